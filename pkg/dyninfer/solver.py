"""
MIT License

Copyright (c) 2017 Code Society

Permission is hereby granted, free of charge, to any person obtaining a copy
of this software and associated documentation files (the "Software"), to deal
in the Software without restriction, including without limitation the rights
to use, copy, modify, merge, publish, distribute, sublicense, and/or sell
copies of the Software, and to permit persons to whom the Software is
furnished to do so, subject to the following conditions:

The above copyright notice and this permission notice shall be included in all
copies or substantial portions of the Software.

THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY,
FITNESS FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE
AUTHORS OR COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER
LIABILITY, WHETHER IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM,
OUT OF OR IN CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE
SOFTWARE.
"""
import logging
from enum import Enum

import numpy as np
import pandas as pd

from dyninfer.evaluation import MarkovStrategy, evaluate_markov, myopic_strategy
from dyninfer.exceptions import MismatchedResult, RoundOutOfRange
from dyninfer.model import frozen_array
from dyninfer.reduction import bar_loss_table, myopic_table

log = logging.getLogger("dyninfer")

TIE_TOLERANCE = 1e-9


class TieBreakRule(Enum):
    """how a policy entry is picked among estimates tied for the minimum"""
    MYOPIC_PREFERRED = 'myopic'
    FIRST_INDEX = 'first'


class SolveResult:
    def __init__(self, problem, bar_loss, v_star, q_star, policy, tie_sets, rule):
        self.n = problem.n
        self.x_space = problem.x_space
        self.yhat_space = problem.yhat_space
        self.init = problem.init
        self.bar_loss = bar_loss
        self.v_star = frozen_array(v_star)
        self.q_star = frozen_array(q_star)
        self.policy = np.array(policy, dtype=np.int64)
        self.policy.flags.writeable = False
        self.tie_sets = tuple(tuple(tuple(ties) for ties in row) for row in tie_sets)
        self.rule = rule
        self.myopic = myopic_table(bar_loss)
        self.myopic.flags.writeable = False

    def _at(self, i, x):
        if i < 1 or i > self.n:
            raise RoundOutOfRange("round %r outside 1..%d" % (i, self.n))
        return i - 1, self.x_space.index(x)

    def v(self, i, x):
        r, a = self._at(i, x)
        return float(self.v_star[r, a])

    def q(self, i, x, yhat):
        r, a = self._at(i, x)
        return float(self.q_star[r, a, self.yhat_space.index(yhat)])

    def action(self, i, x):
        r, a = self._at(i, x)
        return self.yhat_space.label(self.policy[r, a])

    def ties(self, i, x):
        r, a = self._at(i, x)
        return [self.yhat_space.label(c) for c in self.tie_sets[r][a]]

    def myopic_action(self, i, x):
        r, a = self._at(i, x)
        return self.yhat_space.label(self.myopic[r, a])

    def deviations(self):
        """(round, x label) pairs where the dynamic choice is not the single-round Bayes estimate."""
        return [(r + 1, self.x_space.label(a))
                for r in range(self.n) for a in range(len(self.x_space))
                if self.policy[r, a] != self.myopic[r, a]]

    def markov_strategy(self):
        return MarkovStrategy(self.x_space, self.yhat_space, self.policy)

    def matches(self, problem):
        return self.n == problem.n and self.x_space == problem.x_space and self.yhat_space == problem.yhat_space

    def __str__(self):
        return str({"n": self.n, "rule": self.rule.value, "v_star": self.v_star.tolist(),
                    "policy": self.policy.tolist()})


def _tie_set(row, tolerance):
    best = min(row)
    return [c for c in range(len(row)) if row[c] <= best + tolerance]


def _pick(ties, myopic, rule):
    if rule == TieBreakRule.MYOPIC_PREFERRED and myopic in ties:
        return myopic
    return ties[0]


def solve(problem, rule=TieBreakRule.MYOPIC_PREFERRED, tolerance=TIE_TOLERANCE):
    """
    Backward induction over rounds n..1.

    q_star[n] is the final-round bar loss; for i < n
        q_star[i][x][yhat] = bar_loss[i][x][yhat] + sum_x' P(x'|x, yhat) v_star[i+1][x']
    and v_star[i][x] is the row minimum. Estimates within `tolerance` of the
    minimum form the tie set; the policy picks among them per `rule`.
    """
    if isinstance(rule, str):
        rule = TieBreakRule(rule)

    bar_loss = bar_loss_table(problem)
    myopic = myopic_table(bar_loss)
    n, nx, nyhat = bar_loss.values.shape

    q_star = np.empty((n, nx, nyhat))
    v_star = np.empty((n, nx))
    policy = np.empty((n, nx), dtype=np.int64)
    tie_sets = [None] * n

    for r in range(n - 1, -1, -1):
        if r == n - 1:
            q_star[r] = bar_loss.values[r]
        else:
            # transition_array[r] drives round r+2 (1-indexed), i.e. out of round r+1
            kernel = problem.transition_array[r]
            for a in range(nx):
                for c in range(nyhat):
                    expected = 0.0
                    for b in range(nx):
                        expected += kernel[a, c, b] * v_star[r + 1, b]
                    q_star[r, a, c] = bar_loss.values[r, a, c] + expected

        round_ties = []
        for a in range(nx):
            v_star[r, a] = q_star[r, a].min()
            ties = _tie_set(q_star[r, a], tolerance)
            policy[r, a] = _pick(ties, myopic[r, a], rule)
            round_ties.append(ties)
            if len(ties) > 1:
                log.debug("tie at round %d x=%s among %s" % (r + 1, problem.x_space.label(a),
                                                              [problem.yhat_space.label(c) for c in ties]))
        tie_sets[r] = round_ties
        log.debug("round %d: v_star=%s" % (r + 1, v_star[r].tolist()))

    return SolveResult(problem, bar_loss, v_star, q_star, policy, tie_sets, rule)


def minimum_inference_loss(problem, result, init=None):
    """sum_x P(X_1 = x) v_star[1][x]; `init` overrides the problem's initial distribution"""
    if not result.matches(problem):
        raise MismatchedResult("result was solved for n=%d %s/%s, problem is n=%d %s/%s"
                               % (result.n, result.x_space, result.yhat_space, problem.n, problem.x_space, problem.yhat_space))
    if init is None:
        init = problem.init
    if init.alphabet != problem.x_space:
        raise MismatchedResult("initial distribution is not over the problem's observation space")

    total = 0.0
    for a in range(len(problem.x_space)):
        total += float(init.probs[a]) * float(result.v_star[0, a])
    return total


def solution_report(result):
    """One row per (round, x): V*, the Q* row, chosen and myopic estimates and their flags."""
    rows = []
    for r in range(result.n):
        for a, x in enumerate(result.x_space):
            row = {
                "round": r + 1,
                "x": x,
                "v_star": float(result.v_star[r, a]),
            }
            for c, yhat in enumerate(result.yhat_space):
                row["q_star[%s]" % yhat] = float(result.q_star[r, a, c])
            row["yhat"] = result.yhat_space.label(result.policy[r, a])
            row["tie"] = len(result.tie_sets[r][a]) > 1
            row["myopic"] = result.yhat_space.label(result.myopic[r, a])
            row["differs"] = bool(result.policy[r, a] != result.myopic[r, a])
            rows.append(row)

    columns = ["round", "x", "v_star"] + ["q_star[%s]" % yhat for yhat in result.yhat_space] + \
              ["yhat", "tie", "myopic", "differs"]
    return pd.DataFrame(rows, columns=columns)


def compare_with_myopic(problem, rule=TieBreakRule.MYOPIC_PREFERRED):
    """Exact inference loss of the dynamic optimum against repeated single-round Bayes estimation."""
    result = solve(problem, rule)
    dynamic = evaluate_markov(problem, result.markov_strategy()).j
    myopic = evaluate_markov(problem, myopic_strategy(problem)).j
    return {"dynamic": dynamic, "myopic": myopic, "gain": myopic - dynamic}
