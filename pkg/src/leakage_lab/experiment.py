"""Randomized evaluation of both lower bounds against the greedy mechanism.

Each trial draws a system with ``W_i = {i}``, side information from the
in-neighborhoods of a random digraph, Bernoulli sources, thresholds set to
a random fraction of ``H_inf(X_{G_i})`` and an adversary side-information
set of bounded size. The trial records both bounds, the greedy leakage and
their ratio ``R``; the batch summary buckets ``R`` like the reference table.

Every trial owns an independent RNG stream derived from ``(seed, trial)``,
so trials can run in any order or in parallel with identical results.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from itertools import combinations
from pathlib import Path

import numpy as np

from . import __version__
from .confusion import build, theorem1_bound
from .digraphs import MAX_CATALOG_N, catalog_codes, decode, in_neighborhoods
from .greedy import run_algorithm1
from .polymatroid import theorem2
from .prob import ProductDistribution, SourceDistribution
from .system import SystemSpec, UserSpec, check

SOUNDNESS_TOL = 1e-6
ONE_TOL = 1e-9
ZERO_TOL = 1e-12
BUCKETS = ("=1", "<1.05", "<1.1", "<1.2", ">=1.2")
DIGRAPH_MODES = ("nonisomorphic-catalog", "labeled-random")

# Counts reported for 500 trials with n = m = 5 and binary sources.
REFERENCE = {
    "trials": 500,
    "ratio_buckets_cumulative": {"=1": 162, "<1.05": 401, "<1.1": 429, "<1.2": 460, ">=1.2": 40},
    "thm1_gt_thm2": 498,
    "thm2_gt_thm1": 2,
}


class SoundnessViolation(RuntimeError):
    """A lower bound exceeded the achieved leakage; always an implementation bug."""

    def __init__(self, record):
        self.record = record
        super().__init__(
            f"trial {record.index}: greedy leakage {record.alg1_bits} is below "
            f"bound max({record.theorem1_bits}, {record.theorem2_bits})"
        )


@dataclass(frozen=True)
class ExperimentConfig:
    trials: int = 500
    n: int = 5
    m: int = 5
    alphabet: int = 2
    seed: int = 42
    p_range: tuple[float, float] = (0.0, 1.0)
    d_fraction_range: tuple[float, float] = (0.0, 1.0)
    max_adversary_side_info: int = 2
    digraph_mode: str = "nonisomorphic-catalog"

    def __post_init__(self):
        object.__setattr__(self, "p_range", tuple(self.p_range))
        object.__setattr__(self, "d_fraction_range", tuple(self.d_fraction_range))
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if not 1 <= self.m <= self.n:
            raise ValueError("need 1 <= m <= n since user i must decode source i")
        if self.alphabet < 2:
            raise ValueError("alphabet must have at least 2 symbols")
        for name in ("p_range", "d_fraction_range"):
            lo, hi = getattr(self, name)
            if not 0.0 <= lo < hi <= 1.0:
                raise ValueError(f"{name} must be an interval inside (0, 1)")
        if self.digraph_mode not in DIGRAPH_MODES:
            raise ValueError(f"digraph_mode must be one of {DIGRAPH_MODES}")
        if self.digraph_mode == "nonisomorphic-catalog" and self.n > MAX_CATALOG_N:
            raise ValueError(f"catalog too large: n={self.n} exceeds {MAX_CATALOG_N}")
        if self.max_adversary_side_info < 0:
            raise ValueError("max_adversary_side_info must be non-negative")


def trial_rng(config: ExperimentConfig, index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(config.seed, spawn_key=(index,))))


def _open_uniform(rng: np.random.Generator, lo: float, hi: float) -> float:
    while True:
        v = float(rng.uniform(lo, hi))
        if lo < v < hi:
            return v


def _random_source(config: ExperimentConfig, rng) -> SourceDistribution:
    if config.alphabet == 2:
        return SourceDistribution.bernoulli(_open_uniform(rng, *config.p_range))
    # Larger alphabets: uniform on the simplex.
    while True:
        p = rng.dirichlet(np.ones(config.alphabet))
        if np.all(p > 0):
            return SourceDistribution(tuple(p / p.sum()))


def adversary_choices(n: int, cap: int) -> list[frozenset[int]]:
    """Every ``P ⊆ [n]`` with ``|P| <= cap``, smallest first."""
    return [frozenset(c) for k in range(min(cap, n) + 1) for c in combinations(range(n), k)]


def random_digraph(config: ExperimentConfig, rng) -> frozenset[tuple[int, int]]:
    n = config.n
    if config.digraph_mode == "nonisomorphic-catalog":
        codes = catalog_codes(n)
        return decode(codes[int(rng.integers(len(codes)))], n)
    bits = rng.integers(0, 2, size=n * (n - 1))
    code = int(sum(int(b) << k for k, b in enumerate(bits)))
    return decode(code, n)


def system_from_digraph(sources: ProductDistribution, arcs, m: int,
                        fractions, P) -> SystemSpec:
    n = sources.n
    side = in_neighborhoods(arcs, n)
    users = []
    for i in range(m):
        G = frozenset(range(n)) - side[i] - {i}
        d = float(fractions[i]) * sources.min_entropy(G)
        users.append(UserSpec(side[i], frozenset({i}), d))
    return SystemSpec(sources, tuple(users), frozenset(P))


def random_system(config: ExperimentConfig, rng: np.random.Generator) -> SystemSpec:
    sources = ProductDistribution(tuple(_random_source(config, rng) for _ in range(config.n)))
    arcs = random_digraph(config, rng)
    fractions = [_open_uniform(rng, *config.d_fraction_range) for _ in range(config.m)]
    choices = adversary_choices(config.n, config.max_adversary_side_info)
    P = choices[int(rng.integers(len(choices)))]
    return check(system_from_digraph(sources, arcs, config.m, fractions, P))


@dataclass(frozen=True)
class TrialRecord:
    index: int
    theorem1_bits: float
    theorem2_bits: float
    alg1_bits: float
    R: float
    n_outputs: int
    system: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        if math.isinf(self.R):
            d["R"] = None
        return d


def ratio(alg1: float, thm1: float, thm2: float) -> float:
    bound = max(thm1, thm2)
    if bound <= ZERO_TOL:
        return 1.0 if alg1 <= ZERO_TOL else math.inf
    return alg1 / bound


def evaluate_system(spec: SystemSpec, index: int = 0) -> TrialRecord:
    graph = build(spec)
    t1 = theorem1_bound(spec, graph)
    t2 = theorem2(spec).bound
    result = run_algorithm1(spec, graph=graph)
    alg1 = result.leakage
    record = TrialRecord(index, t1, t2, alg1, ratio(alg1, t1, t2),
                         result.mechanism.n_outputs, spec.to_dict())
    if record.R < 1 - SOUNDNESS_TOL or alg1 < max(t1, t2) - SOUNDNESS_TOL:
        raise SoundnessViolation(record)
    return record


def run_trial(config: ExperimentConfig, index: int) -> TrialRecord:
    return evaluate_system(random_system(config, trial_rng(config, index)), index)


def _run_one(args):
    return run_trial(*args)


def bucket_of(R: float) -> str:
    """Disjoint bucket label for a ratio."""
    if abs(R - 1.0) <= ONE_TOL:
        return "=1"
    if R < 1.05:
        return "<1.05"
    if R < 1.1:
        return "<1.1"
    if R < 1.2:
        return "<1.2"
    return ">=1.2"


@dataclass(frozen=True)
class ExperimentReport:
    config: ExperimentConfig
    records: tuple[TrialRecord, ...]

    def disjoint_buckets(self) -> dict[str, int]:
        counts = dict.fromkeys(BUCKETS, 0)
        for r in self.records:
            counts[bucket_of(r.R)] += 1
        return counts

    def cumulative_buckets(self) -> dict[str, int]:
        """Counts as in the reference table: each ``<t`` column includes ``R = 1``."""
        d = self.disjoint_buckets()
        out, running = {}, 0
        for key in BUCKETS[:-1]:
            running += d[key]
            out[key] = running
        out[">=1.2"] = d[">=1.2"]
        return out

    def dominance(self) -> dict[str, int]:
        out = {"thm1_gt_thm2": 0, "thm2_gt_thm1": 0, "equal": 0}
        for r in self.records:
            diff = r.theorem1_bits - r.theorem2_bits
            if diff > ONE_TOL:
                out["thm1_gt_thm2"] += 1
            elif diff < -ONE_TOL:
                out["thm2_gt_thm1"] += 1
            else:
                out["equal"] += 1
        return out

    def to_dict(self) -> dict:
        return {
            "software": "leakage-lab",
            "version": __version__,
            "units": "bits (log base 2)",
            "config": asdict(self.config),
            "seed": self.config.seed,
            "adversary_sampling": "uniform over all P with |P| <= max_adversary_side_info",
            "ratio_buckets": {
                "cumulative": self.cumulative_buckets(),
                "disjoint": self.disjoint_buckets(),
            },
            "dominance": self.dominance(),
            "reference": REFERENCE,
            "trials": [r.to_dict() for r in self.records],
        }


def run_batch(config: ExperimentConfig, workers: int = 1, trials=None) -> ExperimentReport:
    """Run every trial (or the given trial indices) and collect a report.

    Raises :class:`SoundnessViolation` on the first trial whose greedy
    leakage falls below a lower bound.
    """
    indices = list(range(config.trials)) if trials is None else list(trials)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            records = list(pool.map(_run_one, [(config, i) for i in indices], chunksize=4))
    else:
        records = [run_trial(config, i) for i in indices]
    return ExperimentReport(config, tuple(records))


def report_json(report: ExperimentReport) -> str:
    return json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n"


def report_csv(report: ExperimentReport) -> str:
    buf = io.StringIO()
    buf.write(f"# leakage-lab {__version__}; units=bits\n")
    buf.write(f"# config={json.dumps(asdict(report.config), sort_keys=True)}\n")
    buf.write(f"# seed={report.config.seed}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BUCKETS)
    if report.records:
        c = report.cumulative_buckets()
        w.writerow([c[k] for k in BUCKETS])
    return buf.getvalue()


def emit_report(report: ExperimentReport, path, fmt: str | None = None) -> Path:
    """Write the report as JSON (full records) or CSV (bucket summary)."""
    path = Path(path)
    fmt = fmt or ("csv" if path.suffix.lower() == ".csv" else "json")
    text = report_csv(report) if fmt == "csv" else report_json(report)
    try:
        path.write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {path}: {exc}") from exc
    return path
