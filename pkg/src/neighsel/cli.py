"""Command line front end.

Subcommands ``gen``, ``estimate``, and ``eval`` operate on files: sample
data from a generated model, estimate edge sets from a CSV matrix, and
score an estimated edge list against a reference.  The remaining
subcommands run the built-in studies and write (or print) their reports.

Exit codes are a stable contract: 0 success, 2 configuration error,
3 data error, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import (
    ConstantColumn,
    DomainError,
    EmptyPath,
    FoldTooSmall,
    GridError,
    InconsistentP,
    MaxIterations,
    MleDoesNotExist,
    NotPositiveDefinite,
    NotUnique,
    ParseError,
    RaggedRow,
)
from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment, write_report
from .formats import canonical_json, load_csv, read_edges, write_csv, write_edges, write_model
from .graph import aggregate_and, aggregate_or, compare_edge_sets
from .neighborhood import AlphaPenalty, CvPenalty, FixedPenalty, estimate_all_neighborhoods
from .numeric import derive_seed, standardize
from .synth import build_model, generate_geometric_graph, sample_gaussian

CONFIG_ERRORS = (DomainError, GridError, FoldTooSmall, EmptyPath)
DATA_ERRORS = (ParseError, RaggedRow, ConstantColumn, InconsistentP, OSError, UnicodeDecodeError)
NUMERIC_ERRORS = (NotPositiveDefinite, MaxIterations, NotUnique, MleDoesNotExist)


def _print(payload: dict) -> None:
    sys.stdout.write(canonical_json(payload))


def _run_gen(args: argparse.Namespace) -> int:
    graph = generate_geometric_graph(args.p, derive_seed(args.seed, 0), args.kernel)
    model = build_model(graph)
    data = sample_gaussian(model.covariance, args.n, derive_seed(args.seed, 1))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_model(model, out / "model.json")
    write_edges(graph.edge_set(), out / "truth.tsv")
    write_csv(data, out / "data.csv")
    _print(
        {
            "edges": len(graph.edges),
            "files": ["data.csv", "model.json", "truth.tsv"],
            "kernel": args.kernel,
            "n": args.n,
            "p": args.p,
        }
    )
    return 0


def _run_estimate(args: argparse.Namespace) -> int:
    if args.lam is not None:
        penalty = FixedPenalty(args.lam)
        echo = {"rule": "fixed", "lambda": args.lam}
    elif args.cv is not None:
        if args.seed is None:
            raise DomainError("--cv needs --seed for the fold shuffle")
        penalty = CvPenalty(folds=args.cv)
        echo = {"rule": "cv", "folds": args.cv}
    else:
        alpha = 0.05 if args.alpha is None else args.alpha
        penalty = AlphaPenalty(alpha)
        echo = {"rule": "alpha", "alpha": alpha}

    data = standardize(load_csv(args.data))
    hoods = estimate_all_neighborhoods(
        data, penalty, workers=args.workers, seed=args.seed or 0
    )
    rules = ("and", "or") if args.rule == "both" else (args.rule,)
    sets = {}
    for rule in rules:
        agg = aggregate_and if rule == "and" else aggregate_or
        sets[rule] = agg(hoods, data.p)

    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for rule, edge_set in sets.items():
            write_edges(edge_set, out / f"{rule}.tsv")

    summary = {"n": data.n, "p": data.p, "penalty": echo}
    for rule, edge_set in sets.items():
        summary[rule] = {"edges": len(edge_set.edges)}
    _print(summary)
    return 0


def _run_eval(args: argparse.Namespace) -> int:
    estimate = read_edges(args.estimate, args.p, rule="path")
    truth = read_edges(args.truth, args.p, rule="truth")
    metrics = compare_edge_sets(estimate, truth)
    _print(
        {
            "cross_component_fp": metrics.cross_component_fp,
            "fdp": metrics.fdp,
            "fn": metrics.fn,
            "fp": metrics.fp,
            "tp": metrics.tp,
            "violation": metrics.component_violation,
        }
    )
    return 0


def _run_study(args: argparse.Namespace) -> int:
    overrides = {}
    for name in (
        "p", "n", "replicates", "alpha", "kernel", "rule",
        "folds", "coupling", "scale", "grid_size", "grid_ratio",
    ):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    config = ExperimentConfig(
        experiment=args.command, seed=args.seed, out_dir=args.out, **overrides
    )
    report = run_experiment(config, workers=args.workers)
    if args.out is not None:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        write_report(report, out / "report.json")
    else:
        _print(report.payload())
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="neighsel",
        description="Graph estimation by per-node penalized regressions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="sample a model and a data matrix into a directory")
    gen.add_argument("--p", type=int, required=True, help="number of variables")
    gen.add_argument("--n", type=int, required=True, help="number of observations")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--kernel", choices=("text", "local"), default="text")
    gen.add_argument("--out", required=True, help="output directory")
    gen.set_defaults(handler=_run_gen)

    est = sub.add_parser("estimate", help="estimate edge sets from a CSV data matrix")
    est.add_argument("data", help="CSV file with header x1..xp")
    pen = est.add_mutually_exclusive_group()
    pen.add_argument("--alpha", type=float, help="significance level (default 0.05)")
    pen.add_argument("--lambda", dest="lam", type=float, help="fixed penalty value")
    pen.add_argument("--cv", type=int, metavar="FOLDS", help="cross-validated penalty")
    est.add_argument("--rule", choices=("and", "or", "both"), default="both")
    est.add_argument("--seed", type=int, help="required with --cv")
    est.add_argument("--workers", type=int, default=1)
    est.add_argument("--out", help="directory for and.tsv / or.tsv")
    est.set_defaults(handler=_run_estimate)

    ev = sub.add_parser("eval", help="score an edge list against a reference")
    ev.add_argument("estimate", help="TSV edge list to score")
    ev.add_argument("truth", help="TSV reference edge list")
    ev.add_argument("--p", type=int, required=True, help="number of variables")
    ev.set_defaults(handler=_run_eval)

    study_help = {
        "table1": "correct-edge counts for four methods on small graphs",
        "fig1": "thousand-node demonstration with count-matched estimates",
        "prop1": "cross-validated versus level-based penalty selection",
        "level": "rate of edges joining distinct true components",
        "robust": "paired clean and heavy-tail contaminated runs",
    }
    study_kernels = {
        "table1": ("text", "local"),
        "fig1": ("text", "local", "auto"),
        "prop1": ("text", "local", "identity"),
        "level": ("text", "local", "identity"),
        "robust": ("text", "local"),
    }
    for name in EXPERIMENTS:
        study = sub.add_parser(name, help=study_help[name])
        study.add_argument("--seed", type=int, required=True)
        study.add_argument("--p", type=int)
        study.add_argument("--n", type=int)
        study.add_argument("--replicates", type=int)
        study.add_argument("--alpha", type=float)
        study.add_argument("--kernel", choices=study_kernels[name])
        if name in ("level", "robust"):
            study.add_argument("--rule", choices=("and", "or", "both"))
        if name == "prop1":
            study.add_argument("--cv", dest="folds", type=int, metavar="FOLDS")
            study.add_argument("--coupling", type=float)
        if name == "robust":
            study.add_argument("--scale", type=float)
        if name == "table1":
            study.add_argument("--grid-size", dest="grid_size", type=int)
            study.add_argument("--grid-ratio", dest="grid_ratio", type=float)
        study.add_argument("--workers", type=int, default=1)
        study.add_argument("--out", help="directory for report.json and artifacts")
        study.set_defaults(handler=_run_study)

    return parser


def _fail(code: int, exc: BaseException) -> int:
    print(f"error: {exc}", file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse has already written its message; keep its code
        return int(exc.code or 0)
    try:
        return args.handler(args)
    except CONFIG_ERRORS as exc:
        return _fail(2, exc)
    except DATA_ERRORS as exc:
        return _fail(3, exc)
    except NUMERIC_ERRORS as exc:
        return _fail(4, exc)


if __name__ == "__main__":
    raise SystemExit(main())
