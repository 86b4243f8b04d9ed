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
import itertools
import logging

import numpy as np

from dyninfer.exceptions import ShapeMismatch, ModelFormatError, UnknownLabel, RoundOutOfRange, InvalidParams
from dyninfer.model import frozen_array
from dyninfer.reduction import bar_loss_table, myopic_table
from dyninfer.rng import SeededRNG

log = logging.getLogger("dyninfer")

DEFAULT_TRAJECTORY_CAP = 10000


class MarkovStrategy:
    """table[i-1, x] is the estimate index played at observation x in round i."""

    def __init__(self, x_space, yhat_space, table):
        table = np.array(table, dtype=np.int64)
        if table.ndim != 2 or table.shape[1] != len(x_space):
            raise ShapeMismatch("strategy table has shape %s, expected (n, %d)" % (table.shape, len(x_space)))
        if table.size and (table.min() < 0 or table.max() >= len(yhat_space)):
            raise ShapeMismatch("strategy table holds estimate indices outside 0..%d" % (len(yhat_space) - 1))
        table.flags.writeable = False
        self.x_space = x_space
        self.yhat_space = yhat_space
        self.table = table
        self.n = table.shape[0]

    @classmethod
    def from_mapping(cls, problem, policy):
        """`policy` is a list of n objects x-label -> estimate label."""
        if not isinstance(policy, list):
            raise ModelFormatError("strategy 'policy' must be an array of objects")
        if len(policy) != problem.n:
            raise ShapeMismatch("strategy covers %d rounds, problem has %d" % (len(policy), problem.n))
        table = np.empty((problem.n, len(problem.x_space)), dtype=np.int64)
        for r, row in enumerate(policy):
            if not isinstance(row, dict) or set(str(key) for key in row) != set(problem.x_space.labels):
                raise ShapeMismatch("strategy round %d must map every observation %s" % (r + 1, list(problem.x_space)))
            mapping = dict((str(key), value) for key, value in row.items())
            for a, x in enumerate(problem.x_space):
                try:
                    table[r, a] = problem.yhat_space.index(mapping[x])
                except UnknownLabel:
                    raise ShapeMismatch("strategy round %d plays unknown estimate %r at x=%s" % (r + 1, mapping[x], x))
        return cls(problem.x_space, problem.yhat_space, table)

    def to_mapping(self):
        return [dict((x, self.yhat_space.label(self.table[r, a])) for a, x in enumerate(self.x_space))
                for r in range(self.n)]

    def action(self, i, x):
        if i < 1 or i > self.n:
            raise RoundOutOfRange("round %r outside 1..%d" % (i, self.n))
        return self.yhat_space.label(self.table[i - 1, self.x_space.index(x)])

    def check(self, problem):
        if self.n != problem.n or self.x_space != problem.x_space or self.yhat_space != problem.yhat_space:
            raise ShapeMismatch("strategy shaped for n=%d %s->%s, problem is n=%d %s->%s"
                                % (self.n, self.x_space, self.yhat_space, problem.n, problem.x_space, problem.yhat_space))
        return self

    def __eq__(self, other):
        return isinstance(other, MarkovStrategy) and self.x_space == other.x_space \
            and self.yhat_space == other.yhat_space and np.array_equal(self.table, other.table)

    def __ne__(self, other):
        return not self == other

    def __str__(self):
        return str(self.to_mapping())


def constant_strategy(problem, label):
    c = problem.yhat_space.index(label)
    return MarkovStrategy(problem.x_space, problem.yhat_space, np.full((problem.n, len(problem.x_space)), c))


def myopic_strategy(problem):
    """repeated single-round Bayes estimation"""
    return MarkovStrategy(problem.x_space, problem.yhat_space, myopic_table(bar_loss_table(problem)))


def enumerate_markov_strategies(problem):
    """Every deterministic Markov strategy, last (round, x) cell varying fastest."""
    shape = (problem.n, len(problem.x_space))
    for cells in itertools.product(range(len(problem.yhat_space)), repeat=shape[0] * shape[1]):
        yield MarkovStrategy(problem.x_space, problem.yhat_space, np.array(cells).reshape(shape))


class EvalResult:
    def __init__(self, j, v, x_space):
        self.j = float(j)
        self.v = frozen_array(v)
        self.x_space = x_space
        self.n = self.v.shape[0]

    def __str__(self):
        return str({"j": self.j, "v": self.v.tolist()})


def evaluate_markov(problem, strategy):
    """
    Exact loss-to-go of a Markov strategy by backward recursion:
        v[n][x] = bar_loss_n(x, psi_n(x))
        v[i][x] = bar_loss_i(x, psi_i(x)) + sum_x' P(x'|x, psi_i(x)) v[i+1][x']
    """
    strategy.check(problem)
    cost = bar_loss_table(problem).values
    n, nx = problem.n, len(problem.x_space)
    v = np.empty((n, nx))

    for r in range(n - 1, -1, -1):
        for a in range(nx):
            c = strategy.table[r, a]
            value = cost[r, a, c]
            if r < n - 1:
                kernel = problem.transition_array[r]
                expected = 0.0
                for b in range(nx):
                    expected += kernel[a, c, b] * v[r + 1, b]
                value = value + expected
            v[r, a] = value

    j = 0.0
    for a in range(nx):
        j += float(problem.init.probs[a]) * float(v[0, a])
    return EvalResult(j, v, problem.x_space)


def loss_to_go(result, i, x):
    if i < 1 or i > result.n:
        raise RoundOutOfRange("round %r outside 1..%d" % (i, result.n))
    return float(result.v[i - 1, result.x_space.index(x)])


class Trajectory:
    def __init__(self, id, xs, ys, yhats, loss):
        self.id = id
        self.xs = xs
        self.ys = ys
        self.yhats = yhats
        self.loss = loss

    def __str__(self):
        return str(self.__dict__)


class SimulationResult:
    def __init__(self, mean, var, rollouts, seed, trajectories=None):
        self.mean = mean
        self.var = var
        self.rollouts = rollouts
        self.seed = seed
        self.trajectories = trajectories or []

    @property
    def std_error(self):
        return (self.var / self.rollouts) ** 0.5

    def __str__(self):
        return str({"mean": self.mean, "var": self.var, "rollouts": self.rollouts, "seed": self.seed})


def _cdf_rows(matrix):
    """Cumulative rows for inverse-CDF sampling; from the last positive entry on the row reads 1."""
    cdf = np.cumsum(matrix, axis=-1)
    flat_probs = matrix.reshape(-1, matrix.shape[-1])
    flat_cdf = cdf.reshape(-1, matrix.shape[-1])
    for k in range(flat_probs.shape[0]):
        last = np.nonzero(flat_probs[k] > 0)[0][-1]
        flat_cdf[k, last:] = 1.0
    return flat_cdf.reshape(matrix.shape)


def _draw(cdf_rows, u):
    return (cdf_rows <= u[:, None]).sum(axis=1)


def simulate(problem, strategy, rollouts, seed, keep_trajectories=False, trajectory_cap=DEFAULT_TRAJECTORY_CAP,
             chunk_size=65536):
    """
    Monte Carlo rollouts of the joint process under a Markov strategy.

    Each rollout uses 2n uniforms from its own substream (see SeededRNG):
    column 0 draws X_1, column 2i-1 draws Y_i and column 2i draws X_{i+1}.
    """
    strategy.check(problem)
    if isinstance(rollouts, bool) or not isinstance(rollouts, (int, np.integer)) or rollouts < 1:
        raise InvalidParams("rollouts must be >= 1, got %r" % (rollouts,))

    rng = SeededRNG(seed)
    n = problem.n
    init_cdf = _cdf_rows(np.asarray(problem.init.probs))
    quantity_cdf = [_cdf_rows(problem.quantity_array[r]) for r in range(n)]
    transition_cdf = [_cdf_rows(problem.transition_array[r]) for r in range(n - 1)]
    loss = problem.loss.values

    losses = np.empty(rollouts)
    trajectories = []
    cap = min(rollouts, trajectory_cap) if keep_trajectories else 0

    for start, u in rng.rollout_blocks(rollouts, 2 * n, chunk_size):
        count = u.shape[0]
        x = _draw(np.broadcast_to(init_cdf, (count, init_cdf.shape[0])), u[:, 0])
        total = np.zeros(count)
        xs, ys, yhats = [], [], []
        for r in range(n):
            yhat = strategy.table[r, x]
            y = _draw(quantity_cdf[r][x], u[:, 2 * r + 1])
            total = total + loss[x, y, yhat]
            xs.append(x)
            ys.append(y)
            yhats.append(yhat)
            if r < n - 1:
                x = _draw(transition_cdf[r][x, yhat], u[:, 2 * r + 2])
        losses[start:start + count] = total

        for k in range(min(count, max(0, cap - start))):
            trajectories.append(Trajectory(
                "%d-%d" % (rng.seed, start + k),
                [problem.x_space.label(step[k]) for step in xs],
                [problem.y_space.label(step[k]) for step in ys],
                [problem.yhat_space.label(step[k]) for step in yhats],
                float(losses[start + k])))
        log.debug("simulated rollouts %d..%d" % (start, start + count - 1))

    mean = float(np.mean(losses))
    var = float(np.var(losses, ddof=1)) if rollouts > 1 else 0.0
    log.info("simulated %d rollouts (seed=%d): mean=%.6f var=%.6f" % (rollouts, rng.seed, mean, var))
    return SimulationResult(mean, var, int(rollouts), rng.seed, trajectories)
