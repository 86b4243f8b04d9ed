import numpy as np
import pytest

from dyninfer.examples import example_section33, example_toggle, example_stock, example_yield, yield_probability, YieldParams, \
    Planner, YIELD, NOT_YIELD
from dyninfer.exceptions import InvalidParams
from dyninfer.formats import problem_to_dict
from dyninfer.model import Alphabet, Distribution, validate_problem
from dyninfer.reduction import myopic_table, bar_loss_table
from dyninfer.solver import solve


# ---- Binary worked models ----

@pytest.mark.parametrize("build", [example_section33, example_stock])
def test_binary_models_validate(build):
    problem = build(6)
    assert validate_problem(problem_to_dict(problem)) == problem
    assert problem.init["0"] == 1.0
    assert set(np.unique(problem.transition_array)) <= {0.0, 1.0}


def test_toggle_alias():
    assert example_toggle is example_section33


def test_toggle_transitions(toggle):
    kernel = toggle.transition(2)
    assert kernel.row("0", "0")["1"] == 1.0
    assert kernel.row("1", "0")["0"] == 1.0
    assert kernel.row("0", "1")["0"] == 1.0
    assert kernel.row("1", "1")["1"] == 1.0
    assert toggle.quantity(3).row("0")["1"] == 0.1
    assert toggle.quantity(3).row("1")["1"] == 0.6


def test_stock_follows_the_prediction(stock):
    for i in range(2, 7):
        for x in stock.x_space:
            for yhat in stock.yhat_space:
                assert stock.transition(i).row(x, yhat)[yhat] == 1.0


@pytest.mark.parametrize("build", [example_toggle, example_stock])
def test_single_round_policy_is_myopic(build):
    result = solve(build(1))
    assert np.array_equal(result.policy, myopic_table(bar_loss_table(build(1))))
    assert result.action(1, "0") == "0"
    assert result.action(1, "1") == "1"


def test_custom_init():
    init = Distribution.uniform(Alphabet(("0", "1")))
    assert example_stock(3, init).init == init


def test_worked_model_values(toggle, stock):
    assert solve(toggle).v(1, "0") == pytest.approx(1.9, abs=1e-12)
    assert solve(stock).v(1, "1") == pytest.approx(1.8, abs=1e-12)


# ---- Yield prediction ----

def test_yield_probability():
    params = YieldParams()
    assert yield_probability(params, 10.0) == 0.5
    steep = YieldParams(beta=1e3)
    assert yield_probability(steep, 8.0) < 1e-300
    assert yield_probability(steep, 12.0) == pytest.approx(1.0)


def test_yield_quantity_is_monotone():
    problem = example_yield(4)
    probabilities = [problem.quantity(1).row(x)[YIELD] for x in problem.x_space]
    assert all(b > a for a, b in zip(probabilities, probabilities[1:]))


def test_yield_model_layout():
    problem = example_yield(4)
    assert list(problem.x_space) == ["0", "2", "4", "6", "8", "10", "12", "14", "16", "18", "20"]
    assert list(problem.yhat_space) == [YIELD, NOT_YIELD]
    assert problem.init["10"] == 1.0
    assert problem.loss.value("6", YIELD, NOT_YIELD) == pytest.approx(0.3)
    assert problem.loss.value("0", NOT_YIELD, YIELD) == pytest.approx(1.5)
    assert problem.loss.value("20", NOT_YIELD, YIELD) == pytest.approx(0.5)
    assert problem.loss.value("4", YIELD, YIELD) == 0.0


def test_yield_default_policy():
    result = solve(example_yield(4))
    assert result.action(1, "0") == NOT_YIELD


def test_persist_planner_transitions():
    problem = example_yield(3)
    after_yield = problem.transition(2).row("10", YIELD)
    assert after_yield["8"] == pytest.approx(0.7)
    assert after_yield["10"] == pytest.approx(0.3)
    after_no = problem.transition(2).row("10", NOT_YIELD)
    assert after_no["12"] == pytest.approx(0.7)
    assert problem.transition(2).row("0", YIELD)["0"] == 1.0
    assert problem.transition(2).row("20", NOT_YIELD)["20"] == 1.0


def test_fall_back_planner_transitions():
    problem = example_yield(3, YieldParams(planner=Planner.FALL_BACK))
    for x in problem.x_space:
        assert problem.transition(2).row(x, NOT_YIELD)["20"] == 1.0


def test_single_round_yield_model():
    problem = example_yield(1)
    assert problem.n == 1
    assert len(problem.transitions) == 0


@pytest.mark.parametrize("params", [
    YieldParams(beta=0.0),
    YieldParams(grid=[0.0]),
    YieldParams(grid=[0.0, 4.0, 2.0]),
    YieldParams(d_c=30.0),
    YieldParams(c_missed=-1.0),
    YieldParams(move_probability=1.5),
])
def test_yield_rejects_bad_params(params):
    with pytest.raises(InvalidParams):
        example_yield(4, params)


def test_yield_rejects_bad_horizon():
    with pytest.raises(InvalidParams):
        example_yield(0)
