"""Built-in worked models: the toggle machine, stock trend prediction and yield prediction."""
import logging
import math
from enum import Enum

import numpy as np

from dyninfer.exceptions import InvalidParams
from dyninfer.model import Alphabet, Distribution, ContextualLoss, make_stationary_problem

log = logging.getLogger("dyninfer")

BINARY = ("0", "1")
YIELD = "yield"
NOT_YIELD = "not_yield"


def _binary_problem(n, transition, quantity_one, init):
    x_space = Alphabet(BINARY)
    y_space = Alphabet(BINARY)
    yhat_space = Alphabet(BINARY)
    if init is None:
        # the worked models leave P(X_1) open; start at x=0
        init = Distribution.point_mass(x_space, "0")
    t = dict(((x, yhat), dict((x_next, 1.0 if x_next == transition(x, yhat) else 0.0) for x_next in BINARY))
             for x in BINARY for yhat in BINARY)
    q = dict((x, {"0": 1.0 - quantity_one[x], "1": quantity_one[x]}) for x in BINARY)
    loss = ContextualLoss.zero_one(x_space, y_space, yhat_space)
    return make_stationary_problem(n, init, t, q, loss)


def example_section33(n, init=None):
    """
    Binary toggle machine: estimating 0 flips the observation, estimating 1
    keeps it. P(Y=1|X=0) = 0.1, P(Y=1|X=1) = 0.6, 0-1 loss.
    """
    def transition(x, yhat):
        if yhat == "0":
            return "1" if x == "0" else "0"
        return x

    return _binary_problem(n, transition, {"0": 0.1, "1": 0.6}, init)


example_toggle = example_section33


def example_stock(n, init=None):
    """
    Stock trend prediction with the deterministic market response X_i = Yhat_{i-1}.
    P(Y=1|X=0) = 0.4, P(Y=1|X=1) = 0.7, 0-1 loss.
    """
    return _binary_problem(n, lambda x, yhat: yhat, {"0": 0.4, "1": 0.7}, init)


class Planner(Enum):
    """what the ego vehicle does after predicting not_yield"""
    PERSIST = 'persist'
    FALL_BACK = 'fallback'


class YieldParams:
    def __init__(self, beta=1.0, d_c=10.0, grid=None, c_missed=0.05, c_danger=1.0, planner=Planner.PERSIST,
                 move_probability=0.7):
        self.beta = beta
        self.d_c = d_c
        self.grid = list(grid) if grid is not None else [float(d) for d in range(0, 21, 2)]
        self.c_missed = c_missed
        self.c_danger = c_danger
        self.planner = planner if isinstance(planner, Planner) else Planner(planner)
        self.move_probability = move_probability

    def validate(self):
        if not self.beta > 0:
            raise InvalidParams("beta must be > 0, got %r" % (self.beta,))
        if len(self.grid) < 2:
            raise InvalidParams("distance grid needs at least two points")
        if any(b <= a for a, b in zip(self.grid, self.grid[1:])):
            raise InvalidParams("distance grid must be strictly increasing: %s" % self.grid)
        if not self.grid[0] <= self.d_c <= self.grid[-1]:
            raise InvalidParams("critical distance %r outside the grid [%r, %r]" % (self.d_c, self.grid[0], self.grid[-1]))
        if self.c_missed < 0 or self.c_danger < 0:
            raise InvalidParams("loss scales must be >= 0")
        if not 0.0 <= self.move_probability <= 1.0:
            raise InvalidParams("move probability must lie in [0, 1]")
        return self

    def __str__(self):
        return str(dict(self.__dict__, planner=self.planner.value))


def yield_probability(params, x):
    """logistic P(yield | gap x)"""
    z = params.beta * (x - params.d_c)
    if z >= 0:
        return 1.0 / (1.0 + math.exp(-z))
    e = math.exp(z)
    return e / (1.0 + e)


def _grid_label(d):
    text = "%g" % d
    return text if float(text) == d else repr(float(d))


def _yield_transitions(params):
    grid = params.grid
    last = len(grid) - 1
    move = params.move_probability
    table = {}
    for k, d in enumerate(grid):
        down = np.zeros(len(grid))
        down[max(k - 1, 0)] += move
        down[k] += 1.0 - move
        table[(_grid_label(d), YIELD)] = down

        after_no = np.zeros(len(grid))
        if params.planner == Planner.FALL_BACK:
            after_no[last] = 1.0
        else:
            after_no[min(k + 1, last)] += move
            after_no[k] += 1.0 - move
        table[(_grid_label(d), NOT_YIELD)] = after_no

    return dict((key, dict((_grid_label(d), float(p)) for d, p in zip(grid, row))) for key, row in table.items())


def example_yield(n, params=None):
    """
    Yield prediction on a grid of bumper-to-bumper gaps.

    Predicting yield lets the follower close the gap (one step down with
    probability move_probability); predicting not_yield opens it (Persist) or
    resets to the largest gap (FallBack). A missed chance costs c_missed * x,
    a wrong yield costs c_danger * max(0, 1 + (d_c - x) / span).
    """
    params = (params or YieldParams()).validate()
    if not isinstance(n, int) or n < 1:
        raise InvalidParams("horizon must be an integer >= 1, got %r" % (n,))

    labels = [_grid_label(d) for d in params.grid]
    x_space = Alphabet(labels)
    y_space = Alphabet((YIELD, NOT_YIELD))
    yhat_space = Alphabet((YIELD, NOT_YIELD))
    span = params.grid[-1] - params.grid[0]

    values = np.zeros((len(x_space), 2, 2))
    for k, d in enumerate(params.grid):
        values[k, 0, 1] = params.c_missed * d
        values[k, 1, 0] = params.c_danger * max(0.0, 1.0 + (params.d_c - d) / span)
    loss = ContextualLoss(x_space, y_space, yhat_space, values)

    q = {}
    for d in params.grid:
        p = yield_probability(params, d)
        q[_grid_label(d)] = {YIELD: p, NOT_YIELD: 1.0 - p}

    nearest = min(range(len(params.grid)), key=lambda k: (abs(params.grid[k] - params.d_c), k))
    init = Distribution.point_mass(x_space, labels[nearest])

    log.debug("yield model: %s" % params)
    return make_stationary_problem(n, init, _yield_transitions(params) if n > 1 else None, q, loss)
