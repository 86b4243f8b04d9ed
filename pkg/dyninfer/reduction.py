import logging

import numpy as np
import pandas as pd

from dyninfer.model import frozen_array

log = logging.getLogger("dyninfer")


def _expected_loss(q_row, loss_column):
    # sum over y in label-index order, shared by every bar-loss code path
    total = 0.0
    for p, value in zip(q_row, loss_column):
        total += float(p) * float(value)
    return total


class BarLossTable:
    """Observation-estimate loss: values[i-1, x, yhat] = sum_y P(y|x) loss(x, y, yhat) for round i."""

    def __init__(self, x_space, yhat_space, values):
        self.x_space = x_space
        self.yhat_space = yhat_space
        self.values = frozen_array(values)
        self.n = self.values.shape[0]

    def value(self, i, x, yhat):
        return float(self.values[i - 1, self.x_space.index(x), self.yhat_space.index(yhat)])

    def round_slice(self, i):
        return self.values[i - 1]

    def to_frame(self):
        rows = []
        for i in range(1, self.n + 1):
            for a, x in enumerate(self.x_space):
                for c, yhat in enumerate(self.yhat_space):
                    rows.append((i, x, yhat, float(self.values[i - 1, a, c])))
        return pd.DataFrame(rows, columns=["round", "x", "yhat", "value"])

    def to_csv(self, digits=12):
        return self.to_frame().to_csv(index=False, float_format="%%.%dg" % digits, lineterminator="\n")

    def __eq__(self, other):
        return isinstance(other, BarLossTable) and self.x_space == other.x_space \
            and self.yhat_space == other.yhat_space and np.array_equal(self.values, other.values)

    def __ne__(self, other):
        return not self == other


class MdpView:
    """The problem seen as a finite-horizon MDP: observations are states, estimates are actions."""

    def __init__(self, problem, cost):
        self.problem = problem
        self.n = problem.n
        self.states = problem.x_space
        self.actions = problem.yhat_space
        self.cost = cost
        self.dynamics = problem.transitions
        self.init = problem.init

    def next_state_distribution(self, i, x, action):
        """Distribution of the round i+1 state after playing `action` at state `x` in round i."""
        return self.problem.transition(i + 1).row(x, action)

    def __str__(self):
        return str({"n": self.n, "states": list(self.states), "actions": list(self.actions),
                    "dynamics": len(self.dynamics)})


def observation_estimate_loss(problem, i, x, yhat):
    i = problem.check_round(i)
    a = problem.x_space.index(x)
    c = problem.yhat_space.index(yhat)
    return _expected_loss(problem.quantity_array[i - 1, a], problem.loss.values[a, :, c])


def bar_loss_table(problem):
    shape = (problem.n, len(problem.x_space), len(problem.yhat_space))
    values = np.empty(shape)
    for i in range(shape[0]):
        for a in range(shape[1]):
            for c in range(shape[2]):
                values[i, a, c] = _expected_loss(problem.quantity_array[i, a], problem.loss.values[a, :, c])
    return BarLossTable(problem.x_space, problem.yhat_space, values)


def myopic_index(row):
    """argmin of a bar-loss row, smallest index on ties"""
    best = 0
    for c in range(1, len(row)):
        if row[c] < row[best]:
            best = c
    return best


def myopic_bayes_estimate(problem, i, x):
    i = problem.check_round(i)
    a = problem.x_space.index(x)
    row = [observation_estimate_loss(problem, i, x, yhat) for yhat in problem.yhat_space]
    best = myopic_index(row)
    if sum(1 for value in row if value == row[best]) > 1:
        log.debug("myopic tie at round %d x=%s, taking %s" % (i, problem.x_space.label(a), problem.yhat_space.label(best)))
    return problem.yhat_space.label(best)


def myopic_table(bar_loss):
    """Myopic estimate index for every (round, x)."""
    n, nx, _ = bar_loss.values.shape
    table = np.empty((n, nx), dtype=np.int64)
    for i in range(n):
        for a in range(nx):
            table[i, a] = myopic_index(bar_loss.values[i, a])
    return table


def to_mdp(problem):
    return MdpView(problem, bar_loss_table(problem))
