"""Command line entry point ``leakage-lab``.

Exit codes: 0 success, 2 invalid system or mechanism, 3 soundness violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .confusion import build, theorem1_bound
from .experiment import ExperimentConfig, SoundnessViolation, emit_report, run_batch
from .greedy import run_algorithm1
from .mechanism import (
    MechanismError,
    PreconditionError,
    check_perfect_decoding,
    lemma2_lower_expression,
    load_mechanism,
    max_leakage,
    save_mechanism,
    utility_D,
)
from .polymatroid import build_program, theorem2
from .prob import DistributionError
from .system import SystemSpec, ValidationError, check, load_system

EXIT_INVALID = 2
EXIT_UNSOUND = 3


def _load(path) -> SystemSpec:
    return check(load_system(path))


def cmd_bounds(args) -> int:
    spec = _load(args.system)
    graph = build(spec)
    out = {"units": "bits", "theorem1_bits": theorem1_bound(spec, graph)}
    out.update(theorem2(spec).to_dict())
    if args.dot:
        Path(args.dot).write_text(graph.to_dot(spec) + "\n")
    if args.lp_dump:
        Path(args.lp_dump).write_text(build_program(spec, spec.Q, spec.P).to_text())
    print(json.dumps(out, indent=2))
    return 0


def cmd_design(args) -> int:
    spec = _load(args.system)
    result = run_algorithm1(spec)
    save_mechanism(result.mechanism, args.out)
    if args.trace:
        Path(args.trace).write_text(json.dumps([s.to_dict() for s in result.trace], indent=2))
    print(json.dumps({
        "units": "bits",
        "leakage_bits": result.leakage,
        "outputs": result.mechanism.n_outputs,
        "merges": len(result.trace),
    }, indent=2))
    return 0


def cmd_analyze(args) -> int:
    spec = _load(args.system)
    mech = load_mechanism(args.mechanism, spec)
    try:
        lemma2 = lemma2_lower_expression(spec, mech)
    except PreconditionError:
        lemma2 = None
    print(json.dumps({
        "units": "bits",
        "leakage_bits": max_leakage(spec, mech),
        "users": [
            {"D": utility_D(spec, mech, i), "d": u.gain_threshold,
             "decoded": check_perfect_decoding(spec, mech, i)}
            for i, u in enumerate(spec.users)
        ],
        "lemma2_bits": lemma2,
    }, indent=2))
    return 0


def cmd_experiment(args) -> int:
    config = ExperimentConfig(
        trials=args.trials,
        n=args.n,
        m=args.m,
        seed=args.seed,
        max_adversary_side_info=args.max_p,
        digraph_mode={"catalog": "nonisomorphic-catalog", "labeled": "labeled-random"}[args.digraphs],
    )
    report = run_batch(config, workers=args.workers)
    emit_report(report, args.out)
    if args.csv:
        emit_report(report, args.csv, "csv")
    print(json.dumps({
        "ratio_buckets_cumulative": report.cumulative_buckets(),
        "dominance": report.dominance(),
    }, indent=2))
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="leakage-lab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", help="clique and polymatroid lower bounds")
    p.add_argument("--system", required=True)
    p.add_argument("--dot", help="write the confusion graph in DOT format")
    p.add_argument("--lp-dump", help="write the Lambda(Q, P) program as text")
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("design", help="run the greedy merging mechanism design")
    p.add_argument("--system", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--trace")
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("analyze", help="evaluate a mechanism on a system")
    p.add_argument("--system", required=True)
    p.add_argument("--mechanism", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("experiment", help="randomized bound-versus-greedy evaluation")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--n", type=int, default=5)
    p.add_argument("--m", type=int, default=5)
    p.add_argument("--max-p", type=int, default=2)
    p.add_argument("--digraphs", choices=("catalog", "labeled"), default="catalog")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    args = make_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, MechanismError, DistributionError, KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except SoundnessViolation as exc:
        print(f"soundness violation: {exc}", file=sys.stderr)
        return EXIT_UNSOUND


if __name__ == "__main__":
    sys.exit(main())
