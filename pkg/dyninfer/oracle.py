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
import math
from enum import Enum

import numpy as np

from dyninfer.exceptions import HistoryIncomplete, SearchSpaceTooLarge, ShapeMismatch
from dyninfer.model import Alphabet, Distribution, TransitionKernel, QuantityKernel, ContextualLoss, Problem
from dyninfer.reduction import bar_loss_table
from dyninfer.rng import SeededRNG
from dyninfer.solver import solve, minimum_inference_loss

log = logging.getLogger("dyninfer")

DEFAULT_STRATEGY_LIMIT = 10 ** 6
DEFAULT_PAIR_LIMIT = 10 ** 7
CHUNK_SIZE = 65536


class HistoryMode(Enum):
    """whether past quantities Y_1..Y_{i-1} are shown to the estimator"""
    REVEALED = 'revealed'
    UNREVEALED = 'unrevealed'


class SearchMethod(Enum):
    ENUMERATE = 'enumerate'
    TREE = 'tree'
    AUTO = 'auto'


def _mode(mode):
    return mode if isinstance(mode, HistoryMode) else HistoryMode(mode)


def history_keys(problem, mode, i):
    """
    Round-i histories in lexicographic order: observation indices (x_1..x_i)
    outermost, then quantity indices (y_1..y_{i-1}) in revealed mode.
    """
    ny_len = i - 1 if _mode(mode) == HistoryMode.REVEALED else 0
    keys = []
    for xs in itertools.product(range(len(problem.x_space)), repeat=i):
        for ys in itertools.product(range(len(problem.y_space)), repeat=ny_len):
            keys.append((xs, ys))
    return keys


def history_counts(problem, mode):
    """h_i per round: |X|^i |Y|^(i-1) revealed, |X|^i unrevealed"""
    nx, ny = len(problem.x_space), len(problem.y_space)
    if _mode(mode) == HistoryMode.REVEALED:
        return [nx ** i * ny ** (i - 1) for i in range(1, problem.n + 1)]
    return [nx ** i for i in range(1, problem.n + 1)]


def count_history_strategies(problem, mode):
    return len(problem.yhat_space) ** sum(history_counts(problem, mode))


def _count_text(problem, mode):
    return "%d**%d" % (len(problem.yhat_space), sum(history_counts(problem, mode)))


def _count_repr(problem, mode):
    digits = sum(history_counts(problem, mode)) * math.log10(len(problem.yhat_space))
    if digits < 30:
        return str(count_history_strategies(problem, mode))
    return "~1e%d" % int(digits)


class HistoryStrategy:
    """tables[i-1] maps a round-i history (xs, ys) of label indices to an estimate index."""

    def __init__(self, x_space, y_space, yhat_space, mode, tables):
        self.x_space = x_space
        self.y_space = y_space
        self.yhat_space = yhat_space
        self.mode = _mode(mode)
        self.tables = [dict(table) for table in tables]
        self.n = len(self.tables)

    def decide(self, i, xs, ys):
        key = (tuple(xs), tuple(ys) if self.mode == HistoryMode.REVEALED else ())
        try:
            return self.tables[i - 1][key]
        except (KeyError, IndexError):
            raise HistoryIncomplete("no decision for round %d history x=%s y=%s"
                                    % (i, [self.x_space.label(a) for a in key[0]],
                                       [self.y_space.label(b) for b in key[1]]))

    def check(self, problem):
        if self.n != problem.n or self.x_space != problem.x_space or self.y_space != problem.y_space \
                or self.yhat_space != problem.yhat_space:
            raise ShapeMismatch("history strategy shaped for another problem")
        return self

    def to_records(self):
        return [[{"xs": [self.x_space.label(a) for a in xs],
                  "ys": [self.y_space.label(b) for b in ys],
                  "yhat": self.yhat_space.label(c)}
                 for (xs, ys), c in sorted(table.items())]
                for table in self.tables]

    def __str__(self):
        return str({"mode": self.mode.value, "rounds": self.to_records()})


def lift_markov(problem, strategy, mode):
    """A Markov strategy written out as a history strategy (decision depends on x_i only)."""
    strategy.check(problem)
    tables = []
    for i in range(1, problem.n + 1):
        tables.append(dict(((xs, ys), int(strategy.table[i - 1, xs[-1]])) for xs, ys in history_keys(problem, mode, i)))
    return HistoryStrategy(problem.x_space, problem.y_space, problem.yhat_space, mode, tables)


def random_history_strategy(problem, mode, rng):
    tables = []
    for i in range(1, problem.n + 1):
        keys = history_keys(problem, mode, i)
        choices = rng.integers(0, len(problem.yhat_space), size=len(keys))
        tables.append(dict((key, int(c)) for key, c in zip(keys, choices)))
    return HistoryStrategy(problem.x_space, problem.y_space, problem.yhat_space, mode, tables)


def _trajectory_count(problem):
    return (len(problem.x_space) * len(problem.y_space)) ** problem.n


def exact_loss_history(problem, strategy):
    """
    Expected accumulated loss by enumerating every (x^n, y^n) trajectory in
    lexicographic order. Zero-probability branches are not visited, so the
    strategy only needs decisions for reachable histories.
    """
    strategy.check(problem)
    q = problem.quantity_array
    t = problem.transition_array
    loss = problem.loss.values
    n, nx, ny = problem.n, len(problem.x_space), len(problem.y_space)
    totals = [0.0]

    def walk(i, xs, ys, prob, acc):
        a = xs[-1]
        c = strategy.decide(i, xs, ys)
        for b in range(ny):
            p_y = q[i - 1, a, b]
            if p_y == 0.0:
                continue
            step = acc + loss[a, b, c]
            if i == n:
                totals[0] += prob * p_y * step
                continue
            for a_next in range(nx):
                p_x = t[i - 1, a, c, a_next]
                if p_x == 0.0:
                    continue
                walk(i + 1, xs + (a_next,), ys + (b,), prob * p_y * p_x, step)

    for a in range(nx):
        p = problem.init.probs[a]
        if p == 0.0:
            continue
        walk(1, (a,), (), p, 0.0)
    return float(totals[0])


def _batch_exact_losses(problem, mode, positions, decisions):
    """
    exact_loss_history for many strategies at once; decisions[s, pos] is the
    estimate strategy s plays at history position pos. Same operation order as
    the scalar walk so both give identical values.
    """
    q = problem.quantity_array
    t = problem.transition_array
    loss = problem.loss.values
    n, nx, ny = problem.n, len(problem.x_space), len(problem.y_space)
    revealed = _mode(mode) == HistoryMode.REVEALED
    count = decisions.shape[0]
    totals = np.zeros(count)

    def walk(i, xs, ys, prob, acc):
        a = xs[-1]
        c = decisions[:, positions[(xs, ys if revealed else ())]]
        for b in range(ny):
            p_y = q[i - 1, a, b]
            if p_y == 0.0:
                continue
            step = acc + loss[a, b, c]
            if i == n:
                totals[:] += prob * p_y * step
                continue
            for a_next in range(nx):
                p_x = t[i - 1, a, c, a_next]
                walk(i + 1, xs + (a_next,), ys + (b,), prob * p_y * p_x, step)

    for a in range(nx):
        p = problem.init.probs[a]
        if p == 0.0:
            continue
        walk(1, (a,), (), np.full(count, p), np.zeros(count))
    return totals


def _positions(problem, mode):
    positions = {}
    for i in range(1, problem.n + 1):
        for key in history_keys(problem, mode, i):
            positions[key] = len(positions)
    return positions


def _strategy_from_decisions(problem, mode, positions, row):
    tables = [dict() for _ in range(problem.n)]
    for (xs, ys), pos in positions.items():
        tables[len(xs) - 1][(xs, ys)] = int(row[pos])
    return HistoryStrategy(problem.x_space, problem.y_space, problem.yhat_space, mode, tables)


def _decision_block(start, stop, width, base):
    index = np.arange(start, stop, dtype=np.int64)
    block = np.empty((stop - start, width), dtype=np.int64)
    for pos in range(width):
        block[:, pos] = (index // (base ** (width - 1 - pos))) % base
    return block


def _check_feasible(problem, mode, limit, pair_limit):
    count = count_history_strategies(problem, mode)
    if count > limit:
        raise SearchSpaceTooLarge("%s mode has %s = %s history strategies, limit is %d"
                                  % (_mode(mode).value, _count_text(problem, mode), _count_repr(problem, mode), limit),
                                  count=count, limit=limit)
    pairs = count * _trajectory_count(problem)
    if pairs > pair_limit:
        raise SearchSpaceTooLarge("%d strategies x %d trajectories = %d pairs, limit is %d"
                                  % (count, _trajectory_count(problem), pairs, pair_limit),
                                  count=count, limit=limit)
    return count


def enumerate_history_strategies(problem, mode, limit=DEFAULT_STRATEGY_LIMIT):
    """
    Every deterministic history strategy exactly once. Strategy k assigns to
    history position p (rounds in order, histories lexicographic) the digit p
    of k written in base |Yhat| with position 0 most significant.
    """
    mode = _mode(mode)
    count = count_history_strategies(problem, mode)
    if count > limit:
        raise SearchSpaceTooLarge("%s mode has %s history strategies, limit is %d"
                                  % (mode.value, _count_text(problem, mode), limit), count=count, limit=limit)
    positions = _positions(problem, mode)

    def stream():
        for start in range(0, count, CHUNK_SIZE):
            block = _decision_block(start, min(count, start + CHUNK_SIZE), len(positions), len(problem.yhat_space))
            for row in block:
                yield _strategy_from_decisions(problem, mode, positions, row)

    return stream()


class OracleReport:
    def __init__(self, brute_min, dp_min, witness, strategies_searched, lemma1_pairs, mode, method,
                 histories_decided=None):
        self.brute_min = float(brute_min)
        self.dp_min = float(dp_min)
        self.gap = self.brute_min - self.dp_min
        self.witness = witness
        self.strategies_searched = strategies_searched
        self.lemma1_pairs = lemma1_pairs
        self.mode = mode
        self.method = method
        # tree search covers the class by deciding each history once; enumeration leaves this None
        self.histories_decided = histories_decided

    def __str__(self):
        return str({"brute_min": self.brute_min, "dp_min": self.dp_min, "gap": self.gap,
                    "strategies_searched": self.strategies_searched, "mode": self.mode.value,
                    "method": self.method.value, "histories_decided": self.histories_decided})


def _dp_min(problem):
    return minimum_inference_loss(problem, solve(problem))


def _enumerate_optimum(problem, mode, limit, pair_limit):
    count = _check_feasible(problem, mode, limit, pair_limit)
    positions = _positions(problem, mode)
    base = len(problem.yhat_space)

    best_value, best_row = None, None
    for start in range(0, count, CHUNK_SIZE):
        stop = min(count, start + CHUNK_SIZE)
        block = _decision_block(start, stop, len(positions), base)
        losses = _batch_exact_losses(problem, mode, positions, block)
        k = int(np.argmin(losses))
        if best_value is None or losses[k] < best_value:
            best_value, best_row = float(losses[k]), block[k].copy()
        log.debug("searched strategies %d..%d, best so far %.12g" % (start, stop - 1, best_value))

    witness = _strategy_from_decisions(problem, mode, positions, best_row)
    log.info("enumerated %d %s-mode strategies" % (count, mode.value))
    return exact_loss_history(problem, witness), witness, count


def _tree_optimum(problem, mode):
    q = problem.quantity_array
    t = problem.transition_array
    loss = problem.loss.values
    n, nx, ny, nyhat = problem.n, len(problem.x_space), len(problem.y_space), len(problem.yhat_space)
    revealed = mode == HistoryMode.REVEALED
    tables = [dict() for _ in range(n)]
    memo = {}

    def value(i, xs, ys):
        key = (xs, ys)
        if key in memo:
            return memo[key]
        a = xs[-1]
        best, best_c = None, 0
        for c in range(nyhat):
            total = 0.0
            for b in range(ny):
                inner = loss[a, b, c]
                if i < n:
                    next_ys = ys + (b,) if revealed else ys
                    for a_next in range(nx):
                        inner += t[i - 1, a, c, a_next] * value(i + 1, xs + (a_next,), next_ys)
                total += q[i - 1, a, b] * inner
            if best is None or total < best:
                best, best_c = total, c
        tables[i - 1][key] = best_c
        memo[key] = best
        return best

    brute_min = 0.0
    for a in range(nx):
        brute_min += problem.init.probs[a] * value(1, (a,), ())
    witness = HistoryStrategy(problem.x_space, problem.y_space, problem.yhat_space, mode, tables)
    log.info("history-tree search decided %d %s-mode histories" % (len(memo), mode.value))
    return float(brute_min), witness, count_history_strategies(problem, mode), len(memo)


def history_tree_optimum(problem, mode):
    """Exact minimum over all history strategies, deciding each history independently."""
    mode = _mode(mode)
    brute_min, witness, count, decided = _tree_optimum(problem, mode)
    pairs = [verify_lemma1(problem, witness)] if _trajectory_count(problem) <= DEFAULT_PAIR_LIMIT else []
    return OracleReport(brute_min, _dp_min(problem), witness, count, pairs, mode, SearchMethod.TREE, decided)


def brute_force_optimum(problem, mode=HistoryMode.REVEALED, limit=DEFAULT_STRATEGY_LIMIT,
                        pair_limit=DEFAULT_PAIR_LIMIT, method=SearchMethod.ENUMERATE):
    mode = _mode(mode)
    method = method if isinstance(method, SearchMethod) else SearchMethod(method)

    if method == SearchMethod.AUTO:
        try:
            _check_feasible(problem, mode, limit, pair_limit)
            method = SearchMethod.ENUMERATE
        except SearchSpaceTooLarge:
            method = SearchMethod.TREE
    if method == SearchMethod.TREE:
        return history_tree_optimum(problem, mode)

    brute_min, witness, count = _enumerate_optimum(problem, mode, limit, pair_limit)
    return OracleReport(brute_min, _dp_min(problem), witness, count, [verify_lemma1(problem, witness)],
                        mode, SearchMethod.ENUMERATE)


def verify_lemma1(problem, strategy, pair_limit=DEFAULT_PAIR_LIMIT):
    """
    Returns (lhs, rhs): lhs sums the contextual loss over full (x^n, y^n)
    trajectories, rhs sums the observation-estimate loss over histories with
    the current round's quantity integrated out (over x^n only when
    quantities are not revealed).
    """
    strategy.check(problem)
    if _trajectory_count(problem) > pair_limit:
        raise SearchSpaceTooLarge("%d trajectories exceed the limit %d" % (_trajectory_count(problem), pair_limit),
                                  count=_trajectory_count(problem), limit=pair_limit)
    lhs = exact_loss_history(problem, strategy)

    bar = bar_loss_table(problem).values
    q = problem.quantity_array
    t = problem.transition_array
    n, nx, ny = problem.n, len(problem.x_space), len(problem.y_space)
    revealed = strategy.mode == HistoryMode.REVEALED
    totals = [0.0]

    def walk(i, xs, ys, prob):
        a = xs[-1]
        c = strategy.decide(i, xs, ys)
        totals[0] += prob * bar[i - 1, a, c]
        if i == n:
            return
        for a_next in range(nx):
            p_x = t[i - 1, a, c, a_next]
            if p_x == 0.0:
                continue
            if revealed:
                for b in range(ny):
                    p_y = q[i - 1, a, b]
                    if p_y == 0.0:
                        continue
                    walk(i + 1, xs + (a_next,), ys + (b,), prob * p_y * p_x)
            else:
                walk(i + 1, xs + (a_next,), ys, prob * p_x)

    for a in range(nx):
        p = problem.init.probs[a]
        if p == 0.0:
            continue
        walk(1, (a,), (), p)
    return lhs, float(totals[0])


def random_problem(rng, n, nx=2, ny=2, nyhat=2):
    """Random instance: Dirichlet(1) rows, losses uniform on [0, 1]."""
    x_space = Alphabet([str(k) for k in range(nx)])
    y_space = Alphabet([str(k) for k in range(ny)])
    yhat_space = Alphabet([str(k) for k in range(nyhat)])
    init = Distribution(x_space, rng.dirichlet(np.ones(nx)))
    transitions = [TransitionKernel(i, x_space, yhat_space, rng.dirichlet(np.ones(nx), size=(nx, nyhat)))
                   for i in range(2, n + 1)]
    quantities = [QuantityKernel(i, x_space, y_space, rng.dirichlet(np.ones(ny), size=nx))
                  for i in range(1, n + 1)]
    loss = ContextualLoss(x_space, y_space, yhat_space, rng.uniform(0.0, 1.0, size=(nx, ny, nyhat)))
    return Problem(n, x_space, y_space, yhat_space, init, transitions, quantities, loss)


def sweep(instances, seed, n_values=(1, 2, 3), modes=(HistoryMode.REVEALED, HistoryMode.UNREVEALED),
          limit=DEFAULT_STRATEGY_LIMIT, pair_limit=DEFAULT_PAIR_LIMIT, method=SearchMethod.AUTO,
          strategies_per_instance=10, size=(2, 2, 2)):
    """
    Randomized check of the oracle claims. Instance k is drawn from the
    stream fork(k) of `seed` with horizon n_values[k % len(n_values)].
    """
    root = SeededRNG(seed)
    records = []
    for k in range(instances):
        rng = root.fork(k)
        n = n_values[k % len(n_values)]
        problem = random_problem(rng, n, *size)
        reports = [brute_force_optimum(problem, mode, limit, pair_limit, method) for mode in modes]

        lemma_gaps = []
        for s in range(strategies_per_instance):
            strategy = random_history_strategy(problem, modes[s % len(modes)], rng)
            lhs, rhs = verify_lemma1(problem, strategy, pair_limit)
            lemma_gaps.append(abs(lhs - rhs))

        records.append({"instance": k, "n": n, "problem": problem, "reports": reports,
                        "lemma1_gap_max": max(lemma_gaps) if lemma_gaps else 0.0})
        log.debug("instance %d (n=%d): gaps %s" % (k, n, [r.gap for r in reports]))
    return records
