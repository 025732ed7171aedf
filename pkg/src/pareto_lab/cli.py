"""Command-line interface.

Exit codes: 0 when everything computed (and any verdict is PASS or
INCONCLUSIVE), 2 on a FAIL verdict, 1 on usage or runtime errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import asdict
from typing import Sequence

from . import geometry
from .constructions import br_parameters, saturation_residual, tree_gadget_bound
from .harness import (
    FAIL,
    FAMILIES,
    PROJECTION_SETS,
    ExperimentConfig,
    ExperimentError,
    export,
    run_experiment,
    summary_line,
)

EXIT_OK, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; 2 is reserved for FAIL verdicts
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _add_run_options(p: argparse.ArgumentParser, trials: int | None = 100) -> None:
    p.add_argument("--trials", type=int, default=trials)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write per-trial records to this file")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--timings", action="store_true", help="include elapsed_ms (output no longer reproducible)")


def _parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pareto-lab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bounds", help="closed-form lower bounds and counts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--s-card", type=int)

    p = sub.add_parser("wendel", help="exact Wendel probability, optionally with a Monte Carlo check")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--dist")
    _add_run_options(p, trials=None)

    p = sub.add_parser("zonotope", help="hull vertices of {Vr} against the generic count")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--dist")
    _add_run_options(p)

    p = sub.add_parser("experiment", help="run any experiment family")
    p.add_argument("--config", help="JSON file with ExperimentConfig fields; flags are ignored")
    p.add_argument("--family", choices=FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--dist")
    p.add_argument("--set", dest="set_kind", choices=PROJECTION_SETS)
    p.add_argument("--size", type=int)
    _add_run_options(p)

    p = sub.add_parser("tree-gadget", help="spanning-tree gadget: Pareto counts and the gadget claim")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    _add_run_options(p)

    p = sub.add_parser("knapsack", help="unit-weight knapsack Pareto counts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--verify-embedding", action="store_true")
    _add_run_options(p)

    p = sub.add_parser("br-params", help="parameter schedule of the cloning construction")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--phi", type=float, required=True)

    p = sub.add_parser("projection", help="hull vertices of a random projection of a 0/1 set")
    p.add_argument("--set", dest="set_kind", choices=PROJECTION_SETS, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--size", type=int)
    p.add_argument("--subsets", type=int, default=1, help="number of random subsets (randomsubset only)")
    _add_run_options(p)
    return parser


def _run(config: ExperimentConfig, timings: bool) -> int:
    try:
        records, summary = run_experiment(config)
    except ExperimentError as exc:
        if config.out:
            export(exc.records, None, config.out, config.format, config, timings, error=str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    print(summary_line(config, summary))
    if summary.violations:
        print(f"deterministic check failed in {summary.violations} trial(s)")
    if config.out:
        export(records, summary, config.out, config.format, config, timings)
    return EXIT_FAIL if summary.verdict == FAIL else EXIT_OK


def _cmd_bounds(a: argparse.Namespace) -> int:
    n, d = a.n, a.d
    basic = geometry.lower_bound_basic(n, d)
    print(f"lower_bound_basic = {basic} = {float(basic):.10g}")
    if n >= 2 and d >= 2:
        print(f"lower_bound_simple = {geometry.lower_bound_simple(n, d):.10g}")
    if a.s_card is not None:
        r = geometry.lower_bound_restricted(n, d, a.s_card)
        print(f"lower_bound_restricted = {r} = {float(r):.10g}")
    w = geometry.wendel_probability(n, d)
    print(f"wendel_probability = {w} = {float(w):.10g}")
    if n >= d:
        print(f"zonotope_vertex_count_generic = {geometry.zonotope_vertex_count_generic(n, d)}")
    if n >= 3 and d >= 2:
        print(f"tree_gadget_bound(m=n) = {tree_gadget_bound(n, d):.10g}")
    return EXIT_OK


def _cmd_br(a: argparse.Namespace) -> int:
    params = br_parameters(a.n, a.d, a.phi)
    for key, value in asdict(params).items():
        print(f"{key} = {value}")
    print(f"objects_within_budget = {params.objects_used <= params.n}")
    if params.phi_hat is not None:
        print(f"phi_hat_residual = {saturation_residual(params.phi_hat, a.n, a.d):.3g}")
    return EXIT_OK


def _cmd_projection(a: argparse.Namespace) -> int:
    count = a.subsets if a.set_kind == "randomsubset" else 1
    status = EXIT_OK
    for index in range(count):
        out = a.out
        if out and count > 1:
            stem, dot, ext = out.rpartition(".")
            out = f"{stem}-{index}.{ext}" if dot else f"{out}-{index}"
        config = ExperimentConfig(
            "projection",
            a.n,
            a.d,
            trials=a.trials,
            seed=a.seed,
            set_kind=a.set_kind,
            size=a.size,
            subset_index=index,
            out=out,
            format=a.format,
        )
        if count > 1:
            print(f"subset {index}: ", end="")
        status = max(status, _run(config, a.timings))
    return status


def main(argv: Sequence[str] | None = None) -> int:
    parser = _parser()
    a = parser.parse_args(argv)
    try:
        if a.command == "bounds":
            return _cmd_bounds(a)
        if a.command == "br-params":
            return _cmd_br(a)
        if a.command == "wendel":
            w = geometry.wendel_probability(a.n, a.d)
            print(f"wendel_probability = {w} = {float(w):.10g}")
            if a.trials is None:
                return EXIT_OK
            config = ExperimentConfig(
                "wendel", a.n, a.d, trials=a.trials, seed=a.seed, dist=a.dist, out=a.out, format=a.format
            )
            return _run(config, a.timings)
        if a.command == "zonotope":
            config = ExperimentConfig(
                "zonotope", a.n, a.d, trials=a.trials, seed=a.seed, dist=a.dist, out=a.out, format=a.format
            )
            return _run(config, a.timings)
        if a.command == "tree-gadget":
            config = ExperimentConfig(
                "tree-gadget", a.m, a.d, trials=a.trials, seed=a.seed, out=a.out, format=a.format
            )
            return _run(config, a.timings)
        if a.command == "knapsack":
            config = ExperimentConfig(
                "knapsack",
                a.n,
                a.d,
                trials=a.trials,
                seed=a.seed,
                verify=a.verify_embedding,
                out=a.out,
                format=a.format,
            )
            return _run(config, a.timings)
        if a.command == "projection":
            return _cmd_projection(a)
        if a.command == "experiment":
            if a.config:
                with open(a.config, encoding="utf-8") as fh:
                    config = ExperimentConfig.from_json(fh.read())
            else:
                if a.family is None or a.n is None or a.d is None:
                    parser.error("experiment needs --family, --n and --d (or --config)")
                config = ExperimentConfig(
                    a.family,
                    a.n,
                    a.d,
                    trials=a.trials,
                    seed=a.seed,
                    k=a.k,
                    dist=a.dist,
                    set_kind=a.set_kind,
                    size=a.size,
                    out=a.out,
                    format=a.format,
                )
            return _run(config, a.timings)
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    parser.error(f"unknown command {a.command}")  # pragma: no cover
    return EXIT_ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
