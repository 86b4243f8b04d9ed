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
import argparse
import logging
import sys

from dyninfer import set_verbose
from dyninfer.config import get_config, default_seed
from dyninfer.evaluation import evaluate_markov, myopic_strategy, simulate
from dyninfer.examples import example_section33, example_stock, example_yield, YieldParams, Planner
from dyninfer.exceptions import DynInferException, InvalidParams
from dyninfer.formats import dumps, write_text, load_problem, load_strategy, parse_init, dump_problem, \
    solve_result_to_dict, eval_result_to_dict, simulation_to_dict, oracle_report_to_dict
from dyninfer.model import Distribution
from dyninfer.oracle import brute_force_optimum, sweep, HistoryMode, SearchMethod
from dyninfer.reduction import bar_loss_table
from dyninfer.solver import solve, minimum_inference_loss, TieBreakRule
from dyninfer.trellis import export_trellis

log = logging.getLogger("dyninfer")

GAP_TOLERANCE = 1e-9
LEMMA_TOLERANCE = 1e-12

parser = argparse.ArgumentParser(prog="dyninfer", description='Dynamic inference toolkit: finite-horizon solving, '
                                                              'strategy evaluation and brute-force verification')
parser.add_argument('--config_file', action="store", dest="config_file", help="Configuration file (default dyninfer.cfg)")
parser.add_argument('--verbose', action="store_true", dest="verbose", help="Debug logging on stderr")
commands = parser.add_subparsers(dest="command", metavar="command")
commands.required = True


def _model_args(sub):
    sub.add_argument('-m', '--model', action="store", dest="model", required=True, help="Model JSON file, - for stdin")
    sub.add_argument('-o', '--output', action="store", dest="output", default="-", help="Output file, - for stdout")


def _tie_break_arg(sub):
    sub.add_argument('--tie-break', action="store", dest="tie_break", choices=["myopic", "first"],
                     help="Rule among tied optimal estimates (default from config: myopic)")


solve_parser = commands.add_parser("solve", help="Backward induction: V*, Q*, optimal policy")
_model_args(solve_parser)
_tie_break_arg(solve_parser)
solve_parser.add_argument('--init', action="store", dest="init",
                          help="Override P(X_1): an observation label or a JSON object label->probability")

evaluate_parser = commands.add_parser("evaluate", help="Exact inference loss and loss-to-go of a Markov strategy")
_model_args(evaluate_parser)
_tie_break_arg(evaluate_parser)
evaluate_parser.add_argument('-s', '--strategy', action="store", dest="strategy", default="optimal",
                             help="Strategy JSON file, or 'optimal' / 'myopic' (default optimal)")

simulate_parser = commands.add_parser("simulate", help="Seeded Monte Carlo rollouts of a Markov strategy")
_model_args(simulate_parser)
_tie_break_arg(simulate_parser)
simulate_parser.add_argument('-s', '--strategy', action="store", dest="strategy", default="optimal",
                             help="Strategy JSON file, or 'optimal' / 'myopic' (default optimal)")
simulate_parser.add_argument('--rollouts', action="store", dest="rollouts", type=int, help="Number of rollouts")
simulate_parser.add_argument('--seed', action="store", dest="seed", type=int,
                             help="64-bit seed (default $DYNINFER_SEED, then config)")
simulate_parser.add_argument('--keep-trajectories', action="store_true", dest="keep_trajectories",
                             help="Include sampled trajectories in the output")
simulate_parser.add_argument('--trajectory-cap', action="store", dest="trajectory_cap", type=int,
                             help="Most trajectories to keep")

verify_parser = commands.add_parser("verify", help="Brute-force optimum over history strategies against the DP")
verify_parser.add_argument('-m', '--model', action="store", dest="model", help="Model JSON file")
verify_parser.add_argument('-o', '--output', action="store", dest="output", default="-", help="Output file, - for stdout")
verify_parser.add_argument('--mode', action="store", dest="mode", choices=["revealed", "unrevealed", "both"])
verify_parser.add_argument('--method', action="store", dest="method", choices=["enumerate", "tree", "auto"])
verify_parser.add_argument('--limit', action="store", dest="limit", type=int, help="Most strategies to enumerate")
verify_parser.add_argument('--pair-limit', action="store", dest="pair_limit", type=int,
                           help="Most strategy x trajectory pairs to enumerate")
verify_parser.add_argument('--instances', action="store", dest="instances", type=int,
                           help="Random binary instances to sweep instead of a model")
verify_parser.add_argument('--seed', action="store", dest="seed", type=int, help="Seed for --instances")
verify_parser.add_argument('--n-values', action="store", dest="n_values", default="1,2,3",
                           help="Comma separated horizons cycled through by --instances")
verify_parser.add_argument('--strategies', action="store", dest="strategies", type=int, default=10,
                           help="Random history strategies per instance for the loss rewriting check")

trellis_parser = commands.add_parser("export-trellis", help="Unrolled diagram of the optimal strategy")
_model_args(trellis_parser)
_tie_break_arg(trellis_parser)
trellis_parser.add_argument('-f', '--format', action="store", dest="format", choices=["dot", "text"], default="dot")

export_parser = commands.add_parser("export", help="Export derived tables")
export_commands = export_parser.add_subparsers(dest="table", metavar="table")
export_commands.required = True
bar_loss_parser = export_commands.add_parser("bar-loss", help="Observation-estimate loss table as CSV")
_model_args(bar_loss_parser)

example_parser = commands.add_parser("example", help="Write a built-in model as JSON")
example_parser.add_argument('name', choices=["section33", "toggle", "stock", "yield"])
example_parser.add_argument('--n', action="store", dest="n", type=int, help="Horizon (default 6, yield 4)")
example_parser.add_argument('--init', action="store", dest="init", help="Initial observation label")
example_parser.add_argument('-o', '--output', action="store", dest="output", default="-", help="Output file, - for stdout")
example_parser.add_argument('--beta', action="store", dest="beta", type=float, default=1.0)
example_parser.add_argument('--dc', action="store", dest="d_c", type=float, default=10.0)
example_parser.add_argument('--grid', action="store", dest="grid", help="Comma separated gap grid (default 0,2,..,20)")
example_parser.add_argument('--c-missed', action="store", dest="c_missed", type=float, default=0.05)
example_parser.add_argument('--c-danger', action="store", dest="c_danger", type=float, default=1.0)
example_parser.add_argument('--planner', action="store", dest="planner", choices=["persist", "fallback"], default="persist")
example_parser.add_argument('--move-probability', action="store", dest="move_probability", type=float, default=0.7)


def _rule(args, config):
    return TieBreakRule(args.tie_break or config.get('SOLVER', 'tie_break'))


def _solve(problem, args, config):
    return solve(problem, _rule(args, config), config.getfloat('SOLVER', 'tie_tolerance'))


def _strategy(problem, args, config):
    if args.strategy == "optimal":
        return _solve(problem, args, config).markov_strategy()
    if args.strategy == "myopic":
        return myopic_strategy(problem)
    return load_strategy(problem, args.strategy)


def _json_digits(config):
    return config.getint('OUTPUT', 'json_digits')


def do_solve(args, config):
    problem = load_problem(args.model)
    result = _solve(problem, args, config)
    init = parse_init(problem, args.init) if args.init else problem.init
    document = solve_result_to_dict(result, minimum_inference_loss(problem, result, init))
    write_text(dumps(document, _json_digits(config)), args.output)
    return 0


def do_evaluate(args, config):
    problem = load_problem(args.model)
    result = evaluate_markov(problem, _strategy(problem, args, config))
    write_text(dumps(eval_result_to_dict(result), _json_digits(config)), args.output)
    return 0


def do_simulate(args, config):
    problem = load_problem(args.model)
    strategy = _strategy(problem, args, config)
    try:
        seed = args.seed if args.seed is not None else default_seed(config)
    except ValueError:
        raise InvalidParams("DYNINFER_SEED must be an integer")
    rollouts = args.rollouts if args.rollouts is not None else config.getint('SIMULATION', 'rollouts')
    cap = args.trajectory_cap if args.trajectory_cap is not None else config.getint('SIMULATION', 'trajectory_cap')
    simulation = simulate(problem, strategy, rollouts, seed, keep_trajectories=args.keep_trajectories,
                          trajectory_cap=cap)
    write_text(dumps(simulation_to_dict(simulation), _json_digits(config)), args.output)
    return 0


def _line(document, digits):
    return dumps(document, digits).replace("\n", " ").strip()


def do_verify(args, config):
    mode = args.mode or config.get('ORACLE', 'mode')
    modes = [HistoryMode.REVEALED, HistoryMode.UNREVEALED] if mode == "both" else [HistoryMode(mode)]
    method = SearchMethod(args.method or config.get('ORACLE', 'method'))
    limit = args.limit if args.limit is not None else config.getint('ORACLE', 'strategy_limit')
    pair_limit = args.pair_limit if args.pair_limit is not None else config.getint('ORACLE', 'pair_limit')
    digits = _json_digits(config)

    lines = []
    gaps = []
    lemma_gaps = []
    if args.model:
        problem = load_problem(args.model)
        for instance_mode in modes:
            report = brute_force_optimum(problem, instance_mode, limit, pair_limit, method)
            gaps.append(abs(report.gap))
            lemma_gaps.extend(abs(lhs - rhs) for lhs, rhs in report.lemma1_pairs)
            lines.append(_line(oracle_report_to_dict(report, 0), digits))
    else:
        try:
            n_values = tuple(int(n) for n in args.n_values.split(","))
        except ValueError:
            raise InvalidParams("--n-values must be comma separated integers")
        try:
            seed = args.seed if args.seed is not None else default_seed(config)
        except ValueError:
            raise InvalidParams("DYNINFER_SEED must be an integer")
        records = sweep(args.instances, seed, n_values, modes, limit, pair_limit, method, args.strategies)
        for record in records:
            lemma_gaps.append(record["lemma1_gap_max"])
            for report in record["reports"]:
                gaps.append(abs(report.gap))
                lemma_gaps.extend(abs(lhs - rhs) for lhs, rhs in report.lemma1_pairs)
                lines.append(_line(oracle_report_to_dict(report, record["instance"]), digits))

    gap_max = max(gaps) if gaps else 0.0
    lemma_max = max(lemma_gaps) if lemma_gaps else 0.0
    passed = gap_max <= GAP_TOLERANCE and lemma_max <= LEMMA_TOLERANCE
    if not passed:
        log.warning("history strategies beat the dynamic program: gap_max=%.3e lemma1_max=%.3e" % (gap_max, lemma_max))
    lines.append("%s gap_max=%.3e lemma1_max=%.3e" % ("PASS" if passed else "FAIL", gap_max, lemma_max))
    write_text("\n".join(lines) + "\n", args.output)
    return 0 if passed else 1


def do_export_trellis(args, config):
    problem = load_problem(args.model)
    result = _solve(problem, args, config)
    write_text(export_trellis(problem, result, args.format, config.getint('OUTPUT', 'dot_decimals')), args.output)
    return 0


def do_export(args, config):
    problem = load_problem(args.model)
    write_text(bar_loss_table(problem).to_csv(_json_digits(config)), args.output)
    return 0


def do_example(args, config):
    if args.name == "yield":
        grid = None
        if args.grid:
            try:
                grid = [float(d) for d in args.grid.split(",")]
            except ValueError:
                raise InvalidParams("--grid must be comma separated numbers")
        params = YieldParams(beta=args.beta, d_c=args.d_c, grid=grid, c_missed=args.c_missed,
                             c_danger=args.c_danger, planner=Planner(args.planner),
                             move_probability=args.move_probability)
        problem = example_yield(args.n if args.n is not None else 4, params)
    else:
        build = example_stock if args.name == "stock" else example_section33
        problem = build(args.n if args.n is not None else 6)
    if args.init:
        problem = problem.with_init(Distribution.point_mass(problem.x_space, args.init))
    write_text(dump_problem(problem), args.output)
    return 0


handlers = {
    "solve": do_solve,
    "evaluate": do_evaluate,
    "simulate": do_simulate,
    "verify": do_verify,
    "export-trellis": do_export_trellis,
    "export": do_export,
    "example": do_example,
}


def _error(e):
    message = " ".join(str(e).split())
    sys.stderr.write("error: %s: %s\n" % (e.code, message))


def run(argv):
    """Exit status: 0 success, 1 domain error (one line on stderr), 2 usage error."""
    try:
        args = parser.parse_args(argv)
        if args.command == "verify" and not args.model and args.instances is None:
            verify_parser.error("one of -m/--model or --instances is required")
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2

    set_verbose(args.verbose)
    try:
        config = get_config(args.config_file)
        return handlers[args.command](args, config)
    except DynInferException as e:
        _error(e)
        return 1
    except ValueError as e:
        # config values that do not parse
        sys.stderr.write("error: InvalidConfig: %s\n" % " ".join(str(e).split()))
        return 1


def main():
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
