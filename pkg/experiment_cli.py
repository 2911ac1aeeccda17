import argparse
import logging
import sys
from fractions import Fraction

import pandas as pd

from analysis import (
    load_spec,
    run_single_experiment,
    run_sweep,
    validate_experiment,
    verify_sweep,
)
from config import (
    DEFAULT_FAR_EPS,
    EXIT_BUDGET,
    EXIT_CONTRACT,
    EXIT_ERROR,
    EXIT_OK,
    EXIT_PARSE,
    LOG_FORMAT,
    LOG_LEVEL,
    LSM_CONCENTRATION_THRESHOLD,
)
from encoders.json_codec import (
    dumps,
    fraction_to_str,
    local_stats_to_frame,
    separator_report_to_dict,
    write_csv,
)
from encoders.text_formats import (
    format_permutation,
    format_tuple,
    load_gset,
    load_system,
    load_tuple,
    parse_marginal,
)
from modules.errors import (
    BudgetExceededError,
    ContractViolationError,
    ParseError,
    PermTestError,
)
from modules.gsets import gset_distance, gset_distance_upper_bound, random_stabilizer_marginal
from modules.local_stats import ProbeSet, exact_local_stats
from modules.named_systems import SYSTEM_NOTES
from modules.perm_core import QueryOracle
from modules.solution_space import FlexBudget, defect, enumerate_solutions, nearest_solution
from modules.word_engine import Alphabet, evaluate, evaluate_point_counted, parse_word, word_to_text

logger = logging.getLogger(__name__)

SYSTEM_HELP = (
    "built-in name or system file. Built-ins: 'commutator' ({c}); 'bs m n' ({bs})".format(
        c=SYSTEM_NOTES["commutator"], bs=SYSTEM_NOTES["bs"]
    )
)


def cli_eval(args):
    """
    Prints w(sigma) in cycle notation, or its value at one point with the
    number of oracle queries spent.
    """
    sigma = load_tuple(args.tuple)
    alphabet = Alphabet.from_text(args.alphabet) if args.alphabet else Alphabet.of_size(sigma.k)
    w = parse_word(args.word, alphabet)
    if args.point is not None:
        oracle = QueryOracle(sigma)
        y = evaluate_point_counted(w, oracle, args.point - 1)
        print(dumps({"point": args.point, "image": y + 1, "queries": oracle.count}))
        return
    print(format_permutation(evaluate(w, sigma), args.style))


def cli_reduce(args):
    alphabet = Alphabet.from_text(args.alphabet)
    print(word_to_text(parse_word(args.word, alphabet)))


def cli_solutions(args):
    system = load_system(args.system)
    solutions = enumerate_solutions(system, args.n)
    print(len(solutions))
    if args.list:
        for tau in solutions:
            print(format_tuple(tau).replace("\n", " ; "))


def cli_defect(args):
    system = load_system(args.system)
    sigma = load_tuple(args.tuple)
    print(fraction_to_str(defect(system, sigma)))


def cli_dist(args):
    system = load_system(args.system)
    sigma = load_tuple(args.tuple)
    found = nearest_solution(system, sigma, FlexBudget.parse(args.flex), Fraction(args.eps))
    print(
        dumps(
            {
                "distance": found.distance,
                "degree": found.degree,
                "witness": found.witness,
                "exhaustive": found.exhaustive,
                "flex": args.flex,
            }
        )
    )


def cli_stats(args):
    """Exact N_{sigma,P} for P = words up to the probe radius."""
    sigma = load_tuple(args.tuple)
    probe = ProbeSet.from_radius(Alphabet.of_size(sigma.k), args.probe_radius)
    frame = local_stats_to_frame(exact_local_stats(sigma, probe))
    if args.out:
        write_csv(frame, args.out)
    else:
        print(frame.to_csv(index=False, lineterminator="\n"), end="")


def _spec_from_args(args):
    overrides = {
        "systems": [args.system] if args.system else None,
        "n": args.n,
        "s": args.s,
        "probe_radius": args.probe_radius,
        "delta": args.delta,
        "instance_models": args.instance_model,
        "corruption": args.corruption,
        "flex": args.flex,
        "far_eps": args.eps,
        "trials": args.trials,
        "seed": args.seed,
        "out": args.out,
        "format": args.format,
        "workers": args.workers,
    }
    if args.command in ("sas", "lsm"):
        overrides["tester"] = args.command
    elif getattr(args, "tester", None):
        overrides["tester"] = args.tester
    return load_spec(args.config, overrides)


def _emit_report(report, spec):
    if spec.format == "csv":
        frame = pd.DataFrame([{k: v for k, v in report.items() if k != "config"}])
        if spec.out:
            write_csv(frame, spec.out, dumps(spec.echo()))
        else:
            print(f"# config: {dumps(spec.echo())}")
            print(frame.to_csv(index=False, lineterminator="\n"), end="")
        return
    text = dumps(report, indent=2)
    if spec.out:
        with open(spec.out, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text)


def cli_tester(args):
    """Runs SAS or LSM on one instance; ``--validate`` adds a separator check."""
    spec = _spec_from_args(args)
    report = run_single_experiment(spec)
    if args.validate:
        separator = validate_experiment(spec)
        report["separator"] = separator_report_to_dict(separator)
        _emit_report(report, spec)
        if not separator.ok():
            raise ContractViolationError(
                f"{len(separator.violations)} instance(s) violate the 0.99 contract"
            )
        return
    _emit_report(report, spec)


def cli_dsets(args):
    X = load_gset(args.x)
    Y = load_gset(args.y)
    if args.heuristic:
        value = gset_distance_upper_bound(X, Y)
        print(dumps({"d_S_upper_bound": value, "exact": False}))
        return
    print(dumps({"d_S": gset_distance(X, Y), "exact": True}))


def cli_marginal(args):
    X = load_gset(args.x)
    alphabet = Alphabet.from_text(args.alphabet) if args.alphabet else Alphabet.of_size(X.k)
    spec = parse_marginal(args.A, args.B, alphabet)
    print(fraction_to_str(random_stabilizer_marginal(X, spec)))


def cli_sweep(args):
    spec = _spec_from_args(args)
    table = run_sweep(spec, progress=args.progress)
    if args.verify:
        mismatches = verify_sweep(spec, table)
        if not mismatches.empty:
            raise PermTestError(f"{len(mismatches)} sweep row(s) failed verification")
        logger.info("verification pass agrees on all %d rows", len(table))
    if spec.out:
        write_csv(table, spec.out, dumps(spec.echo()))
    else:
        print(f"# config: {dumps(spec.echo())}")
        print(table.to_csv(index=False, lineterminator="\n"), end="")


def _add_experiment_flags(parser):
    parser.add_argument("--config", help="YAML experiment spec; flags override its fields")
    parser.add_argument("--system", help=SYSTEM_HELP)
    parser.add_argument("--n", help="degree, or an inclusive range such as 3..6")
    parser.add_argument(
        "--s",
        type=int,
        nargs="+",
        help=f"repetition parameter(s); 1 for sas, {LSM_CONCENTRATION_THRESHOLD} for lsm by default",
    )
    parser.add_argument("--probe-radius", type=int, nargs="+", help="LSM probe radius")
    parser.add_argument("--delta", nargs="+", help="LSM TV threshold, e.g. 1/20")
    parser.add_argument(
        "--instance-model",
        nargs="+",
        choices=["solutions", "planted", "random", "far-certified"],
    )
    parser.add_argument("--corruption", type=int, nargs="+", help="planted edits m")
    parser.add_argument("--flex", help="zero | linear:c | n-linear:c | unbounded")
    parser.add_argument("--eps", help=f"far-certified distance (default {DEFAULT_FAR_EPS})")
    parser.add_argument("--trials", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--workers", type=int)
    parser.add_argument("--out")
    parser.add_argument("--format", choices=["json", "csv"])


def build_parser():
    parser = argparse.ArgumentParser(
        prog="experiment_cli",
        description="Testability experiments for systems of permutation equations.",
    )
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate a word on a tuple of permutations")
    p.add_argument("word")
    p.add_argument("tuple", help="tuple text or file; 1-based points")
    p.add_argument("--alphabet")
    p.add_argument("--point", type=int, help="evaluate at one 1-based point through the oracle")
    p.add_argument("--style", choices=["cycles", "images"], default="cycles")
    p.set_defaults(handler=cli_eval)

    p = sub.add_parser("reduce", help="print the freely reduced word")
    p.add_argument("word")
    p.add_argument("--alphabet", default="xy")
    p.set_defaults(handler=cli_reduce)

    p = sub.add_parser("solutions", help="count Sol_E(n)")
    p.add_argument("--system", required=True, help=SYSTEM_HELP)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--list", action="store_true", help="also print every solution")
    p.set_defaults(handler=cli_solutions)

    p = sub.add_parser("defect", help="exact defect of a tuple")
    p.add_argument("tuple")
    p.add_argument("--system", required=True, help=SYSTEM_HELP)
    p.set_defaults(handler=cli_defect)

    p = sub.add_parser("dist", help="distance to the (flexible) solution set")
    p.add_argument("tuple")
    p.add_argument("--system", required=True, help=SYSTEM_HELP)
    p.add_argument("--flex", default="zero")
    p.add_argument("--eps", default=DEFAULT_FAR_EPS, help="eps for the linear:c window")
    p.set_defaults(handler=cli_dist)

    p = sub.add_parser("stats", help="exact local statistics of a tuple as CSV")
    p.add_argument("tuple")
    p.add_argument("--probe-radius", type=int, default=2)
    p.add_argument("--out")
    p.set_defaults(handler=cli_stats)

    for name in ("sas", "lsm"):
        p = sub.add_parser(name, help=f"run the {name.upper()} tester on one instance")
        _add_experiment_flags(p)
        p.add_argument("--validate", action="store_true", help="also run the separator check")
        p.set_defaults(handler=cli_tester)

    p = sub.add_parser("dsets", help="d_S between two finite actions")
    p.add_argument("x", help="tuple text or file for X")
    p.add_argument("y", help="tuple text or file for Y")
    p.add_argument("--heuristic", action="store_true", help="greedy upper bound instead of exact search")
    p.set_defaults(handler=cli_dsets)

    p = sub.add_parser("marginal", help="random-stabilizer probability of C_{A,B}")
    p.add_argument("x", help="tuple text or file for the action")
    p.add_argument("--A", required=True, help="words of A, comma or space separated")
    p.add_argument("--B", default="", help="words of B (a subset of A)")
    p.add_argument("--alphabet")
    p.set_defaults(handler=cli_marginal)

    p = sub.add_parser("sweep", help="parameter sweep to CSV")
    _add_experiment_flags(p)
    p.add_argument("--tester", choices=["sas", "lsm"])
    p.add_argument("--verify", action="store_true", help="recompute exact columns independently")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(handler=cli_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else LOG_LEVEL, format=LOG_FORMAT)
    try:
        args.handler(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except BudgetExceededError as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except ContractViolationError as e:
        print(f"contract violation: {e}", file=sys.stderr)
        return EXIT_CONTRACT
    except (PermTestError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
