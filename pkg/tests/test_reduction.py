import numpy as np
import pytest

from dyninfer.examples import example_toggle, example_stock
from dyninfer.exceptions import RoundOutOfRange, UnknownLabel
from dyninfer.model import ContextualLoss, Problem
from dyninfer.oracle import random_problem
from dyninfer.reduction import observation_estimate_loss, bar_loss_table, myopic_bayes_estimate, myopic_index, \
    to_mdp
from dyninfer.rng import SeededRNG

stock_slice = {("0", "0"): 0.4, ("0", "1"): 0.6, ("1", "0"): 0.7, ("1", "1"): 0.3}
toggle_slice = {("0", "0"): 0.1, ("0", "1"): 0.9, ("1", "0"): 0.6, ("1", "1"): 0.4}


# ---- Observation-estimate loss ----

@pytest.mark.parametrize("build,expected", [(example_stock, stock_slice), (example_toggle, toggle_slice)])
def test_worked_model_slices(build, expected):
    problem = build(6)
    for i in range(1, 7):
        for (x, yhat), value in expected.items():
            assert observation_estimate_loss(problem, i, x, yhat) == pytest.approx(value, abs=1e-12)


def test_table_matches_explicit_sum():
    problem = random_problem(SeededRNG(3), 3, 3, 2, 4)
    table = bar_loss_table(problem)
    for i in range(1, 4):
        for x in problem.x_space:
            for yhat in problem.yhat_space:
                explicit = sum(problem.quantity(i).row(x)[y] * problem.loss.value(x, y, yhat) for y in problem.y_space)
                assert table.value(i, x, yhat) == pytest.approx(explicit, abs=1e-12)


def test_table_and_point_lookup_are_identical(stock):
    table = bar_loss_table(stock)
    for x in stock.x_space:
        for yhat in stock.yhat_space:
            assert table.value(2, x, yhat) == observation_estimate_loss(stock, 2, x, yhat)


def test_table_is_estimator_independent(toggle):
    assert bar_loss_table(toggle) == bar_loss_table(toggle)
    assert np.array_equal(bar_loss_table(toggle).values, bar_loss_table(toggle.with_init(toggle.init)).values)


def test_zero_one_loss_is_one_minus_probability():
    problem = random_problem(SeededRNG(11), 2, 3, 3, 3)
    loss = ContextualLoss.zero_one(problem.x_space, problem.y_space, problem.yhat_space)
    problem = Problem(problem.n, problem.x_space, problem.y_space, problem.yhat_space, problem.init,
                      problem.transitions, problem.quantities, loss)
    table = bar_loss_table(problem)
    for i in (1, 2):
        for x in problem.x_space:
            for yhat in problem.yhat_space:
                assert table.value(i, x, yhat) == pytest.approx(1.0 - problem.quantity(i).row(x)[yhat], abs=1e-12)


def test_errors(toggle):
    with pytest.raises(RoundOutOfRange):
        observation_estimate_loss(toggle, 7, "0", "0")
    with pytest.raises(RoundOutOfRange):
        observation_estimate_loss(toggle, 0, "0", "0")
    with pytest.raises(UnknownLabel):
        observation_estimate_loss(toggle, 1, "2", "0")


def test_csv_layout(stock):
    lines = bar_loss_table(stock.truncate(1)).to_csv().splitlines()
    assert lines == ["round,x,yhat,value", "1,0,0,0.4", "1,0,1,0.6", "1,1,0,0.7", "1,1,1,0.3"]


# ---- Myopic estimates ----

def test_myopic_estimates(toggle, stock):
    assert myopic_bayes_estimate(toggle, 1, "1") == "1"
    assert myopic_bayes_estimate(toggle, 1, "0") == "0"
    assert myopic_bayes_estimate(stock, 1, "0") == "0"


def test_myopic_tie_takes_smallest_index():
    assert myopic_index([0.5, 0.5]) == 0
    assert myopic_index([0.7, 0.2, 0.2]) == 1


# ---- MDP view ----

def test_mdp_view(toggle, stock):
    mdp = to_mdp(toggle)
    assert len(mdp.states) == 2 and len(mdp.actions) == 2 and mdp.n == 6
    assert mdp.cost == bar_loss_table(toggle)

    mdp = to_mdp(stock)
    for x in stock.x_space:
        for action in stock.yhat_space:
            assert mdp.next_state_distribution(1, x, action)[action] == 1.0


def test_mdp_view_single_round():
    mdp = to_mdp(example_toggle(1))
    assert len(mdp.dynamics) == 0
    assert mdp.cost.n == 1
