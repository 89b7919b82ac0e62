"""Command line front end: validate, run, summarize and compare experiments.

    portmoea validate --config experiment.toml
    portmoea run --config experiment.toml [--out DIR] [--workers N] [--seed S]
    portmoea summarize --out DIR
    portmoea compare --out DIR
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .experiment import (
    ExperimentSpec,
    SpecValidationError,
    compare_results,
    load_spec,
    run_experiment,
    summarize_results,
    validate_spec,
)

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="portmoea",
        description="Batch runner for constrained mean-variance portfolio MOEAs",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    p_validate = sub.add_parser("validate", help="check an experiment config")
    p_validate.add_argument("--config", required=True, help="TOML experiment spec")

    p_run = sub.add_parser("run", help="validate and execute an experiment")
    p_run.add_argument("--config", required=True, help="TOML experiment spec")
    p_run.add_argument("--out", help="override the output directory")
    p_run.add_argument("--workers", type=int, help="parallel run workers")
    p_run.add_argument("--seed", type=int, help="override the base seed")

    p_sum = sub.add_parser("summarize", help="rebuild summary.csv from a result tree")
    p_sum.add_argument("--out", required=True, help="result directory")

    p_cmp = sub.add_parser("compare", help="rebuild rank-sum comparisons from a result tree")
    p_cmp.add_argument("--out", required=True, help="result directory")

    return parser


def _load(args) -> ExperimentSpec:
    spec = load_spec(args.config)
    overrides = {}
    if getattr(args, "out", None):
        overrides["out_dir"] = args.out
    if getattr(args, "workers", None):
        overrides["workers"] = args.workers
    if getattr(args, "seed", None) is not None:
        overrides["base_seed"] = args.seed
    return replace(spec, **overrides) if overrides else spec


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.verb == "validate":
            spec = validate_spec(_load(args))
            grid = len(spec.instances) * len(spec.algorithms) * spec.runs
            print(
                f"spec OK: {len(spec.instances)} instance(s) x "
                f"{len(spec.algorithms)} algorithm(s) x {spec.runs} run(s) "
                f"= {grid} runs -> {spec.out_dir}"
            )
        elif args.verb == "run":
            out = run_experiment(_load(args))
            print(f"results written to {out}")
        elif args.verb == "summarize":
            path = summarize_results(Path(args.out))
            print(f"summary written to {path}")
        elif args.verb == "compare":
            path = compare_results(Path(args.out))
            print(f"comparisons written to {path}")
    except SpecValidationError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
