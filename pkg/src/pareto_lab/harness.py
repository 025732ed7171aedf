"""Monte Carlo experiment runner, summary statistics and export."""

from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from fractions import Fraction
from pathlib import Path
from typing import Callable

from . import geometry
from .constructions import (
    KNAPSACK_LIMIT,
    TREE_LIMIT,
    build_tree_gadget,
    build_unit_weight_knapsack,
    gadget_claim_violations,
    knapsack_pareto_count,
    tree_gadget_bound,
    verify_knapsack_embedding,
)
from .core import ObjectiveMatrix
from .enumeration import (
    CapacityError,
    FixedCardinality,
    FullCube,
    SignCube,
    count_pareto,
)
from .sampling import DistributionSpec, MatrixDistribution, RandomStream, sample_matrix

FAMILIES = (
    "basic-cube",
    "sign-cube",
    "restricted",
    "tree-gadget",
    "knapsack",
    "wendel",
    "zonotope",
    "projection",
)
# families whose target is an exact expectation rather than a lower bound
EXACT_FAMILIES = {"wendel", "zonotope"}
PROJECTION_SETS = ("hammingball", "cube", "randomsubset")
MIN_TRIALS_FOR_VERDICT = 30
# path entry reserved for the stream that draws a random feasible subset
SUBSET_STREAM = 1 << 62

PASS, FAIL, INCONCLUSIVE = "PASS", "FAIL", "INCONCLUSIVE"

DEFAULT_DIST = {
    "basic-cube": "symuniform:1",
    "sign-cube": "symuniform:1",
    "restricted": "symuniform:1",
    "wendel": "gaussian:1",
    "zonotope": "gaussian:1",
}


@dataclass(frozen=True)
class ExperimentConfig:
    family: str
    n: int
    d: int
    trials: int = 100
    seed: int = 0
    k: int | None = None
    dist: str | None = None
    set_kind: str | None = None
    size: int | None = None
    subset_index: int = 0
    verify: bool = False
    out: str | None = None
    format: str = "csv"

    def __post_init__(self) -> None:
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.n < 1 or self.d < 1:
            raise ValueError(f"n and d must be positive, got n={self.n}, d={self.d}")
        if not 0 <= self.seed < 1 << 64:
            raise ValueError(f"seed must fit in 64 unsigned bits, got {self.seed}")
        if self.format not in ("csv", "json"):
            raise ValueError(f"format must be csv or json, got {self.format!r}")
        if self.dist is not None:
            DistributionSpec.parse(self.dist)
        if self.family == "restricted" and self.k is not None and not 0 <= self.k <= self.n:
            raise ValueError(f"need 0 <= k <= n, got k={self.k}")
        if self.family == "tree-gadget" and self.n < 3:
            raise ValueError("tree-gadget needs m >= 3 (pass it as n)")
        if self.family == "tree-gadget" and self.d < 2:
            raise ValueError("tree-gadget needs d >= 2")
        if self.family == "tree-gadget" and self.n > TREE_LIMIT:
            raise ValueError(f"tree-gadget enumerates all m^(m-2) trees; needs m <= {TREE_LIMIT}")
        if self.family == "knapsack" and self.n > KNAPSACK_LIMIT:
            raise ValueError(f"knapsack enumerates all 2^n solutions; needs n <= {KNAPSACK_LIMIT}")
        if self.family == "projection":
            if self.set_kind not in PROJECTION_SETS:
                raise ValueError(f"projection needs set_kind in {PROJECTION_SETS}")
            if self.set_kind != "cube" and not (self.size and 1 <= self.size <= 2**self.n):
                raise ValueError("projection needs 1 <= size <= 2^n")
            if self.d > self.n:
                raise ValueError("projection needs d <= n")

    @classmethod
    def from_json(cls, text: str) -> ExperimentConfig:
        data = json.loads(text)
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(**data)

    @property
    def distribution(self) -> DistributionSpec:
        return DistributionSpec.parse(self.dist or DEFAULT_DIST.get(self.family, "symuniform:1"))

    @property
    def effective_k(self) -> int | None:
        if self.family in ("restricted", "knapsack"):
            return self.n // 2 if self.k is None else self.k
        return self.k


@dataclass(frozen=True)
class TrialRecord:
    trial_index: int
    derived_seed_path: tuple[int, ...]
    statistic: float
    elapsed: float
    violations: int = 0


@dataclass(frozen=True)
class SummaryStats:
    trials: int
    mean: float
    sample_stddev: float
    standard_error: float
    ci95_lo: float
    ci95_hi: float
    bound_target: float | None
    verdict: str | None
    violations: int = 0


class ExperimentError(RuntimeError):
    """A trial failed; ``records`` holds the trials completed before it."""

    def __init__(self, message: str, records: list[TrialRecord], trial_index: int):
        super().__init__(message)
        self.records = records
        self.trial_index = trial_index


def summarize(
    records: list[TrialRecord],
    bound_target: float | None = None,
    two_sided: bool = False,
) -> SummaryStats:
    """Mean, spread and verdict of a run.

    FAIL when the mean sits more than three standard errors below the target
    (or away from it, for ``two_sided`` exact targets) or when any trial
    reported a violated deterministic check; INCONCLUSIVE under 30 trials.
    """
    if not records:
        raise ValueError("cannot summarize an empty run")
    values = [r.statistic for r in records]
    m = len(values)
    mean = math.fsum(values) / m
    var = math.fsum((v - mean) ** 2 for v in values) / (m - 1) if m > 1 else 0.0
    sd = math.sqrt(var)
    se = sd / math.sqrt(m)
    violations = sum(r.violations for r in records)
    if violations:
        verdict = FAIL
    elif bound_target is None:
        verdict = None
    elif m < MIN_TRIALS_FOR_VERDICT:
        verdict = INCONCLUSIVE
    elif two_sided:
        verdict = FAIL if abs(mean - bound_target) > 3 * se else PASS
    else:
        verdict = FAIL if mean + 3 * se < bound_target else PASS
    return SummaryStats(
        trials=m,
        mean=mean,
        sample_stddev=sd,
        standard_error=se,
        ci95_lo=mean - 1.96 * se,
        ci95_hi=mean + 1.96 * se,
        bound_target=None if bound_target is None else float(bound_target),
        verdict=verdict,
        violations=violations,
    )


def bound_target(config: ExperimentConfig) -> Fraction | float | None:
    n, d, fam = config.n, config.d, config.family
    if fam in ("basic-cube", "sign-cube"):
        return geometry.lower_bound_basic(n, d)
    if fam in ("restricted", "knapsack"):
        return geometry.lower_bound_restricted(n, d, math.comb(n, config.effective_k))
    if fam == "tree-gadget":
        return tree_gadget_bound(n, d)
    if fam == "wendel":
        return geometry.wendel_probability(n, d)
    if fam == "zonotope":
        return geometry.zonotope_vertex_count_generic(n, d)
    return None


def projection_set(config: ExperimentConfig):
    n = config.n
    if config.set_kind == "cube":
        return FullCube(n)
    if config.set_kind == "hammingball":
        return geometry.hamming_ball(n, (0,) * n, config.size)
    stream = RandomStream(config.seed, (SUBSET_STREAM, config.subset_index))
    return geometry.random_subset(n, config.size, stream)


def _trial_function(config: ExperimentConfig) -> Callable[[RandomStream], tuple[float, int]]:
    n, d, fam = config.n, config.d, config.family

    md = MatrixDistribution.iid(d, n, config.distribution)

    def iid(stream: RandomStream) -> ObjectiveMatrix:
        return sample_matrix(md, stream)

    if fam == "basic-cube":
        return lambda s: (count_pareto(iid(s), FullCube(n)), 0)
    if fam == "sign-cube":
        return lambda s: (count_pareto(iid(s), SignCube(n)), 0)
    if fam == "restricted":
        fs = FixedCardinality(n, config.effective_k)
        return lambda s: (count_pareto(iid(s), fs), 0)
    if fam == "tree-gadget":
        gadget = build_tree_gadget(n, d)

        def tree_trial(s: RandomStream) -> tuple[float, int]:
            V = sample_matrix(gadget.distribution, s)
            return count_pareto(V, gadget.feasible), len(gadget_claim_violations(V, n))

        return tree_trial
    if fam == "knapsack":

        def knapsack_trial(s: RandomStream) -> tuple[float, int]:
            inst = build_unit_weight_knapsack(n, d, s)
            bad = 0
            if config.verify and not verify_knapsack_embedding(inst, config.effective_k):
                bad = 1
            return knapsack_pareto_count(inst), bad

        return knapsack_trial
    if fam == "wendel":
        return lambda s: (float(not geometry.origin_in_hull(iid(s).entries.T)), 0)
    if fam == "zonotope":
        return lambda s: (len(geometry.hull_vertices(geometry.zonotope_points(iid(s)))), 0)
    if fam == "projection":
        fs = projection_set(config)
        return lambda s: (geometry.random_projection_vertex_count(fs, d, s), 0)
    raise ValueError(f"unknown family {fam!r}")  # pragma: no cover


def worker_count() -> int:
    raw = os.environ.get("PARETO_LAB_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"PARETO_LAB_THREADS must be a positive integer, got {raw!r}") from None
    if value < 1:
        raise ValueError(f"PARETO_LAB_THREADS must be a positive integer, got {raw!r}")
    return value


def run_trials(config: ExperimentConfig, workers: int | None = None) -> list[TrialRecord]:
    fn = _trial_function(config)

    def one(t: int) -> TrialRecord:
        stream = RandomStream(config.seed, (t,))
        start = time.perf_counter()
        stat, bad = fn(stream)
        elapsed = (time.perf_counter() - start) * 1000.0
        return TrialRecord(t, stream.path, float(stat), elapsed, bad)

    workers = worker_count() if workers is None else workers
    records: list[TrialRecord] = []
    indices = range(config.trials)
    try:
        if workers == 1:
            for t in indices:
                records.append(one(t))
        else:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                for rec in pool.map(one, indices):
                    records.append(rec)
    except CapacityError as exc:
        raise ExperimentError(f"trial {len(records)}: {exc}", records, len(records)) from exc
    return records


def run_experiment(
    config: ExperimentConfig, workers: int | None = None
) -> tuple[list[TrialRecord], SummaryStats]:
    records = run_trials(config, workers)
    target = bound_target(config)
    summary = summarize(
        records,
        None if target is None else float(target),
        two_sided=config.family in EXACT_FAMILIES,
    )
    return records, summary


CSV_COLUMNS = ("trial", "family", "n", "d", "k", "seed", "statistic", "elapsed_ms")


def _number(x: float) -> str:
    return str(int(x)) if float(x).is_integer() else repr(float(x))


def render_csv(
    config: ExperimentConfig, records: list[TrialRecord], timings: bool = False
) -> str:
    """CSV text; ``elapsed_ms`` stays empty unless ``timings`` so reruns are byte-identical."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    k = config.effective_k
    for r in records:
        writer.writerow(
            [
                r.trial_index,
                config.family,
                config.n,
                config.d,
                "" if k is None else k,
                config.seed,
                _number(r.statistic),
                f"{r.elapsed:.3f}" if timings else "",
            ]
        )
    return buf.getvalue()


def render_json(
    config: ExperimentConfig,
    records: list[TrialRecord],
    summary: SummaryStats | None,
    timings: bool = False,
    error: str | None = None,
) -> str:
    doc = {
        "config": asdict(config),
        "records": [
            {
                "trial": r.trial_index,
                "path": list(r.derived_seed_path),
                "statistic": r.statistic,
                "elapsed_ms": round(r.elapsed, 3) if timings else None,
                "violations": r.violations,
            }
            for r in records
        ],
        "summary": None if summary is None else asdict(summary),
    }
    if error is not None:
        doc["error"] = error
    return json.dumps(doc, indent=2) + "\n"


def export(
    records: list[TrialRecord],
    stats: SummaryStats | None,
    path: str | os.PathLike,
    format: str,
    config: ExperimentConfig,
    timings: bool = False,
    error: str | None = None,
) -> Path:
    if not str(path):
        raise ValueError("export path must be non-empty")
    if format == "csv":
        text = render_csv(config, records, timings)
    elif format == "json":
        text = render_json(config, records, stats, timings, error)
    else:
        raise ValueError(f"unknown export format {format!r}")
    target = Path(path)
    try:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write {target}: {exc.strerror or exc}") from exc
    return target


def summary_line(config: ExperimentConfig, s: SummaryStats) -> str:
    target = "-" if s.bound_target is None else f"{s.bound_target:.6g}"
    return (
        f"{config.family} n={config.n} d={config.d} trials={s.trials} "
        f"mean={s.mean:.6g} sd={s.sample_stddev:.4g} se={s.standard_error:.4g} "
        f"ci95=[{s.ci95_lo:.6g}, {s.ci95_hi:.6g}] target={target} "
        f"verdict={s.verdict or 'COMPUTED'}"
    )

