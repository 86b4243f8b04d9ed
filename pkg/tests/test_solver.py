import numpy as np
import pytest

from dyninfer.evaluation import evaluate_markov
from dyninfer.examples import example_toggle, example_stock
from dyninfer.exceptions import MismatchedResult
from dyninfer.model import ContextualLoss, Distribution, Problem
from dyninfer.oracle import random_problem
from dyninfer.rng import SeededRNG
from dyninfer.solver import solve, minimum_inference_loss, solution_report, compare_with_myopic, TieBreakRule

# V* per round as (x=0, x=1), rounds 1..6
toggle_values = [(1.9, 2.1), (1.5, 1.8), (1.2, 1.4), (0.8, 1.1), (0.5, 0.7), (0.1, 0.4)]
stock_values = [(2.1, 1.8), (1.8, 1.5), (1.5, 1.2), (1.2, 0.9), (0.8, 0.6), (0.4, 0.3)]


def _rescaled(problem, scale):
    loss = ContextualLoss(problem.x_space, problem.y_space, problem.yhat_space, problem.loss.values * scale)
    return Problem(problem.n, problem.x_space, problem.y_space, problem.yhat_space, problem.init,
                   problem.transitions, problem.quantities, loss)


# ---- Worked models ----

@pytest.mark.parametrize("build,values", [(example_toggle, toggle_values), (example_stock, stock_values)])
def test_value_tables(build, values):
    result = solve(build(6))
    for i, (v0, v1) in enumerate(values, start=1):
        assert result.v(i, "0") == pytest.approx(v0, abs=1e-12)
        assert result.v(i, "1") == pytest.approx(v1, abs=1e-12)


def test_toggle_deviations(toggle):
    result = solve(toggle)
    assert result.deviations() == [(1, "1"), (3, "1"), (5, "1")]
    assert result.ties(2, "1") == ["0", "1"]
    assert result.ties(4, "1") == ["0", "1"]
    assert result.action(2, "1") == "1"


def test_stock_deviations(stock):
    result = solve(stock)
    assert result.deviations() == [(1, "0"), (2, "0"), (3, "0")]
    assert [result.action(i, "0") for i in (1, 2, 3)] == ["1", "1", "1"]
    assert result.ties(4, "0") == ["0", "1"]
    assert result.action(4, "0") == "0"


def test_first_index_rule_changes_only_tied_entries(toggle):
    myopic = solve(toggle, TieBreakRule.MYOPIC_PREFERRED)
    first = solve(toggle, "first")
    assert first.rule == TieBreakRule.FIRST_INDEX
    assert first.deviations() == [(1, "1"), (2, "1"), (3, "1"), (4, "1"), (5, "1")]
    assert np.array_equal(first.v_star, myopic.v_star)
    for result in (myopic, first):
        j = evaluate_markov(toggle, result.markov_strategy()).j
        assert j == pytest.approx(minimum_inference_loss(toggle, result), abs=1e-12)


def test_last_round_is_bar_loss(stock):
    result = solve(stock)
    assert np.array_equal(result.q_star[-1], result.bar_loss.values[-1])


def test_policy_within_ties():
    result = solve(random_problem(SeededRNG(5), 4, 3, 2, 3))
    for r in range(result.n):
        for a in range(3):
            assert result.policy[r, a] in result.tie_sets[r][a]
            assert result.v_star[r, a] == result.q_star[r, a].min()


def test_bellman_consistency():
    problem = random_problem(SeededRNG(8), 5, 3, 3, 2)
    result = solve(problem)
    for i in range(1, problem.n):
        for x in problem.x_space:
            best = min(result.bar_loss.value(i, x, yhat)
                       + sum(problem.transition(i + 1).row(x, yhat)[x_next] * result.v(i + 1, x_next)
                             for x_next in problem.x_space)
                       for yhat in problem.yhat_space)
            assert result.v(i, x) == pytest.approx(best, abs=1e-12)


@pytest.mark.parametrize("build", [example_toggle, example_stock])
def test_values_shrink_with_remaining_rounds(build):
    result = solve(build(6))
    assert np.all(np.diff(result.v_star, axis=0) <= 0)


def test_scaling_the_loss_keeps_the_policy():
    problem = random_problem(SeededRNG(21), 4)
    base = solve(problem, TieBreakRule.FIRST_INDEX)
    scaled = solve(_rescaled(problem, 3.5), TieBreakRule.FIRST_INDEX)
    assert base.tie_sets == scaled.tie_sets
    assert np.array_equal(base.policy, scaled.policy)
    assert np.allclose(scaled.v_star, 3.5 * base.v_star, atol=1e-12)


# ---- Minimum inference loss ----

def test_minimum_inference_loss(toggle):
    result = solve(toggle)
    assert minimum_inference_loss(toggle, result) == pytest.approx(1.9, abs=1e-12)
    uniform = Distribution.uniform(toggle.x_space)
    assert minimum_inference_loss(toggle, result, uniform) == pytest.approx(2.0, abs=1e-12)


def test_single_round_is_bayes_risk():
    problem = example_toggle(1)
    result = solve(problem)
    assert minimum_inference_loss(problem, result) == pytest.approx(0.1, abs=1e-12)
    assert result.deviations() == []


def test_mismatched_result(toggle):
    result = solve(toggle)
    with pytest.raises(MismatchedResult):
        minimum_inference_loss(example_toggle(5), result)


# ---- Reports ----

def test_solution_report(toggle, stock):
    report = solution_report(solve(toggle))
    assert len(report) == 12
    assert list(report.columns) == ["round", "x", "v_star", "q_star[0]", "q_star[1]", "yhat", "tie", "myopic", "differs"]
    differs = report[report["differs"]]
    assert list(zip(differs["round"], differs["x"])) == [(1, "1"), (3, "1"), (5, "1")]

    report = solution_report(solve(stock))
    assert report["differs"].sum() == 3
    assert solution_report(solve(example_stock(1)))["differs"].sum() == 0


def test_compare_with_myopic(stock):
    comparison = compare_with_myopic(stock)
    assert comparison["dynamic"] == pytest.approx(2.1, abs=1e-12)
    assert comparison["myopic"] == pytest.approx(2.4, abs=1e-12)
    assert comparison["gain"] == pytest.approx(0.3, abs=1e-12)
