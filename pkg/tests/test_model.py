"""Tests for problem construction and validation."""
import numpy as np
import pytest

from dyninfer.exceptions import DimensionMismatch, NotStochastic, HorizonMismatch, ModelFormatError, \
    UnknownLabel, RoundOutOfRange
from dyninfer.model import Alphabet, Distribution, TransitionKernel, QuantityKernel, ContextualLoss, Problem, \
    validate_problem, make_stationary_problem

binary = Alphabet(("0", "1"))

toggle_document = {
    "n": 2,
    "x_space": ["0", "1"],
    "y_space": ["0", "1"],
    "yhat_space": ["0", "1"],
    "init": {"0": 1.0, "1": 0.0},
    "transitions": [{"0|0": {"0": 0.0, "1": 1.0}, "0|1": {"0": 1.0, "1": 0.0},
                     "1|0": {"0": 1.0, "1": 0.0}, "1|1": {"0": 0.0, "1": 1.0}}],
    "quantities": [{"0": {"0": 0.9, "1": 0.1}, "1": {"0": 0.4, "1": 0.6}}] * 2,
    "loss": [{"x": x, "y": y, "yhat": yhat, "value": 0.0 if y == yhat else 1.0}
             for x in "01" for y in "01" for yhat in "01"],
}


def _document(**changes):
    document = dict(toggle_document)
    document.update(changes)
    return document


# ---- Alphabets and distributions ----

def test_alphabet_index_label_bijection():
    alphabet = Alphabet(("low", "mid", "high"))
    for k, label in enumerate(alphabet):
        assert alphabet.index(label) == k
        assert alphabet.label(k) == label
    assert "mid" in alphabet
    assert "top" not in alphabet


def test_alphabet_rejects_bad_labels():
    with pytest.raises(ModelFormatError):
        Alphabet(())
    with pytest.raises(ModelFormatError):
        Alphabet(("a", "a"))
    with pytest.raises(ModelFormatError):
        Alphabet(("a|b", "c"))


def test_unknown_label():
    with pytest.raises(UnknownLabel):
        binary.index("2")


def test_distribution_tolerance():
    Distribution(binary, [0.3, 0.7 + 5e-10])
    with pytest.raises(NotStochastic):
        Distribution(binary, [0.3, 0.7 + 1e-6])


def test_distribution_rejects_negative_and_nan():
    with pytest.raises(NotStochastic):
        Distribution(binary, [-0.1, 1.1])
    with pytest.raises(NotStochastic):
        Distribution(binary, [float("nan"), 1.0])


def test_distribution_wrong_length():
    with pytest.raises(DimensionMismatch):
        Distribution(binary, [0.2, 0.3, 0.5])


def test_distribution_rejects_non_numbers():
    for value in (True, "1.0", None):
        with pytest.raises(ModelFormatError):
            Distribution.from_mapping(binary, {"0": value, "1": 0.0})
    with pytest.raises(ModelFormatError):
        validate_problem(_document(init={"0": True, "1": False}))


def test_point_mass_and_uniform():
    assert Distribution.point_mass(binary, "1")["1"] == 1.0
    assert Distribution.uniform(binary)["0"] == 0.5


# ---- Kernels and losses ----

def test_transition_kernel_rows_are_stochastic():
    with pytest.raises(NotStochastic):
        TransitionKernel(2, binary, binary, np.full((2, 2, 2), 0.6))


def test_quantity_kernel_shape():
    with pytest.raises(DimensionMismatch):
        QuantityKernel(1, binary, binary, np.full((3, 2), 0.5))


def test_loss_records_must_be_total():
    records = [{"x": "0", "y": "0", "yhat": "0", "value": 0.0}]
    with pytest.raises(DimensionMismatch):
        ContextualLoss.from_records(binary, binary, binary, records)


def test_loss_records_reject_booleans():
    records = [dict(record, value=record["value"] == 1.0) for record in toggle_document["loss"]]
    with pytest.raises(ModelFormatError):
        ContextualLoss.from_records(binary, binary, binary, records)


def test_loss_records_reject_duplicates():
    records = list(toggle_document["loss"]) + [{"x": "0", "y": "0", "yhat": "0", "value": 2.0}]
    with pytest.raises(ModelFormatError):
        ContextualLoss.from_records(binary, binary, binary, records)


def test_zero_one_loss():
    loss = ContextualLoss.zero_one(binary, binary, binary)
    assert loss.value("1", "0", "1") == 1.0
    assert loss.value("1", "1", "1") == 0.0


# ---- Problem validation ----

def test_validate_document():
    problem = validate_problem(toggle_document)
    assert problem.n == 2
    assert problem.transition(2).row("0", "0")["1"] == 1.0
    assert problem.quantity(1).row("1")["1"] == 0.6


def test_validate_accepts_problem():
    problem = validate_problem(toggle_document)
    assert validate_problem(problem) is problem


def test_validate_stationary_flag():
    document = _document(stationary=True, n=4, quantities=toggle_document["quantities"][:1])
    problem = validate_problem(document)
    assert problem.n == 4
    assert len(problem.transitions) == 3
    assert problem.transition(4) == problem.transition(2).relabel(4)


def test_horizon_mismatch():
    with pytest.raises(HorizonMismatch):
        validate_problem(_document(n=3))
    with pytest.raises(HorizonMismatch):
        validate_problem(_document(n=0))


def test_dimension_mismatch_on_init():
    with pytest.raises(DimensionMismatch):
        validate_problem(_document(init={"0": 0.5, "1": 0.25, "2": 0.25}))


def test_not_stochastic_init():
    with pytest.raises(NotStochastic):
        validate_problem(_document(init={"0": 0.5, "1": 0.6}))


def test_missing_key():
    document = dict(toggle_document)
    del document["loss"]
    with pytest.raises(ModelFormatError):
        validate_problem(document)


def test_n1_needs_no_transitions():
    problem = validate_problem(_document(n=1, transitions=[], quantities=toggle_document["quantities"][:1]))
    assert len(problem.transitions) == 0
    with pytest.raises(RoundOutOfRange):
        problem.transition(2)


def test_truncate_keeps_first_rounds():
    problem = validate_problem(toggle_document)
    short = problem.truncate(1)
    assert short.n == 1
    assert short.quantity(1) == problem.quantity(1)
    with pytest.raises(HorizonMismatch):
        problem.truncate(3)


def test_make_stationary_problem():
    loss = ContextualLoss.zero_one(binary, binary, binary)
    t = {("0", "0"): {"0": 1.0, "1": 0.0}, ("0", "1"): {"0": 0.0, "1": 1.0},
         ("1", "0"): {"0": 1.0, "1": 0.0}, ("1", "1"): {"0": 0.0, "1": 1.0}}
    q = {"0": {"0": 0.6, "1": 0.4}, "1": {"0": 0.3, "1": 0.7}}
    problem = make_stationary_problem(3, Distribution.uniform(binary), t, q, loss)
    assert isinstance(problem, Problem)
    assert [kernel.round for kernel in problem.transitions] == [2, 3]
    assert problem.transition_array.shape == (2, 2, 2, 2)
    assert problem.quantity_array.shape == (3, 2, 2)


def test_arrays_are_read_only(toggle):
    with pytest.raises(ValueError):
        toggle.quantity_array[0, 0, 0] = 0.5
