"""JSON documents read and written by the command line (see docs/FORMATS.md)."""
import json
import math
import sys

from dyninfer.exceptions import ModelFormatError
from dyninfer.evaluation import MarkovStrategy
from dyninfer.model import Distribution, validate_problem

JSON_DIGITS = 12


def float_token(value, digits=JSON_DIGITS):
    if not math.isfinite(value):
        return json.dumps(value)
    return "%.*g" % (digits, value)


def _encode(obj, digits, level):
    if isinstance(obj, float):
        return float_token(obj, digits)
    inner = "\n" + "  " * (level + 1)
    outer = "\n" + "  " * level
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = ["%s: %s" % (json.dumps(str(key)), _encode(obj[key], digits, level + 1)) for key in sorted(obj)]
        return "{" + inner + ("," + inner).join(items) + outer + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [_encode(value, digits, level + 1) for value in obj]
        return "[" + inner + ("," + inner).join(items) + outer + "]"
    return json.dumps(obj)


def dumps(document, digits=JSON_DIGITS):
    """sorted keys, two-space indent, floats written as fixed `%.{digits}g` tokens"""
    if digits is None:
        return json.dumps(document, sort_keys=True, indent=2) + "\n"
    return _encode(document, digits, 0) + "\n"


def read_text(filename):
    if filename == "-":
        return sys.stdin.read()
    try:
        with open(filename, "r", encoding="utf-8") as file:
            return file.read()
    except (OSError, UnicodeDecodeError) as e:
        raise ModelFormatError("cannot read %s: %s" % (filename, e))


def write_text(text, filename):
    if not filename or filename == "-":
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    try:
        with open(filename, "w", encoding="utf-8", newline="\n") as file:
            file.write(text)
    except OSError as e:
        raise ModelFormatError("cannot write %s: %s" % (filename, e))


def parse_json(text, what="document"):
    try:
        return json.loads(text)
    except ValueError as e:
        raise ModelFormatError("%s is not valid JSON: %s" % (what, e))
    except RecursionError:
        raise ModelFormatError("%s is nested too deeply" % what)


def problem_to_dict(problem):
    return {
        "n": problem.n,
        "x_space": list(problem.x_space),
        "y_space": list(problem.y_space),
        "yhat_space": list(problem.yhat_space),
        "init": problem.init.to_mapping(),
        "transitions": [kernel.to_mapping() for kernel in problem.transitions],
        "quantities": [kernel.to_mapping() for kernel in problem.quantities],
        "loss": problem.loss.to_records(),
    }


def dump_problem(problem):
    # full precision keeps the model file round trip exact
    return dumps(problem_to_dict(problem), digits=None)


def parse_problem(text):
    return validate_problem(parse_json(text, "model"))


def load_problem(filename):
    return parse_problem(read_text(filename))


def parse_init(problem, text):
    """`--init` value: an observation label (point mass) or a JSON object label->probability."""
    if text in problem.x_space:
        return Distribution.point_mass(problem.x_space, text)
    return Distribution.from_mapping(problem.x_space, parse_json(text, "--init"), "init")


def strategy_to_dict(strategy):
    return {"policy": strategy.to_mapping()}


def parse_strategy(problem, text):
    document = parse_json(text, "strategy")
    if not isinstance(document, dict) or "policy" not in document:
        raise ModelFormatError("strategy document must be an object with a 'policy' array")
    return MarkovStrategy.from_mapping(problem, document["policy"])


def load_strategy(problem, filename):
    return parse_strategy(problem, read_text(filename))


def _per_round(n, x_space, value):
    return [dict((x, value(r, a)) for a, x in enumerate(x_space)) for r in range(n)]


def solve_result_to_dict(result, min_loss):
    return {
        "v_star": _per_round(result.n, result.x_space, lambda r, a: float(result.v_star[r, a])),
        "q_star": _per_round(result.n, result.x_space,
                             lambda r, a: dict((yhat, float(result.q_star[r, a, c]))
                                               for c, yhat in enumerate(result.yhat_space))),
        "policy": _per_round(result.n, result.x_space, lambda r, a: result.yhat_space.label(result.policy[r, a])),
        "ties": _per_round(result.n, result.x_space,
                           lambda r, a: [result.yhat_space.label(c) for c in result.tie_sets[r][a]]),
        "min_loss": float(min_loss),
        "tie_break": result.rule.value,
    }


def eval_result_to_dict(result):
    return {
        "j": result.j,
        "v": _per_round(result.n, result.x_space, lambda r, a: float(result.v[r, a])),
    }


def simulation_to_dict(simulation):
    document = {
        "mean": simulation.mean,
        "var": simulation.var,
        "rollouts": simulation.rollouts,
        "seed": simulation.seed,
    }
    if simulation.trajectories:
        document["trajectories"] = [dict(t.__dict__) for t in simulation.trajectories]
    return document


def count_value(count):
    """exact integer while it fits 64 bits, else an order-of-magnitude string"""
    if count.bit_length() <= 64:
        return count
    return "~1e%d" % int((count.bit_length() - 1) * math.log10(2))


def oracle_report_to_dict(report, instance=None):
    document = {
        "brute_min": report.brute_min,
        "dp_min": report.dp_min,
        "gap": report.gap,
        "strategies_searched": count_value(report.strategies_searched),
        "mode": report.mode.value,
        "method": report.method.value,
        "histories_decided": report.histories_decided,
        "lemma1_pairs": [[lhs, rhs] for lhs, rhs in report.lemma1_pairs],
        "witness": report.witness.to_records(),
    }
    if instance is not None:
        document["instance"] = instance
    return document
