"""Replicated Monte Carlo runs compared against the theory predictions.

Replica ``i`` of an experiment with seed ``s`` draws from
``np.random.default_rng(np.random.SeedSequence(s, spawn_key=(i,)))``, so a
replica's output depends only on ``(s, i)`` and never on scheduling.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .degree_model import DegreeDistribution, DegreeSequence, from_counts, near_critical_sequence, sample_iid
from .errors import GclError, MaxAttemptsExceeded, UnitMismatch
from .exploration import ExplorationTrace, explore, rescaled_curve
from .config_model import is_simple
from .plotting import line_plot
from .theory import (
    GeneratingFunctions,
    NearCriticalPrediction,
    Regime,
    TheoryReport,
    classify,
    predict_near_critical,
    solve_xi,
    theory_report,
)

SCHEMA_VERSION = 1
NEAR_CRITICAL_THRESHOLD = 4.0
DEFAULT_TOLERANCES = {
    "v2_frac": 0.01,
    "v1_zero": 1e-3,
    "rel": 0.15,
    "v2_over_v1": 0.1,
}


def replica_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


@dataclass
class ExperimentConfig:
    """One experiment. ``source`` is one of::

        {"kind": "distribution", "dist": {...}}      # resampled per replica, needs n
        {"kind": "counts", "counts": {"1": 500, ...}} # reused by every replica
        {"kind": "near_critical", "base": {...}, "alpha": 0.02}  # needs n
    """

    source: dict
    n: int | None = None
    replicas: int = 1
    seed: int = 0
    graph_mode: str = "multigraph"
    mode: str = "combinatorial"
    max_attempts: int = 1000
    trace: dict | None = None
    tolerances: dict = field(default_factory=dict)
    outputs: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(f"unsupported schema_version {self.schema_version}")
        if self.replicas < 1:
            raise ValueError("replicas must be >= 1")
        if self.graph_mode not in ("multigraph", "simple"):
            raise ValueError("graph_mode must be 'multigraph' or 'simple'")
        kind = self.source.get("kind")
        if kind not in ("distribution", "counts", "near_critical"):
            raise ValueError(f"unknown source kind {kind!r}")
        if kind != "counts" and not self.n:
            raise ValueError(f"source kind {kind!r} needs n")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return asdict(self)

    @property
    def units(self) -> str:
        return "near_critical" if self.source["kind"] == "near_critical" else "fraction"

    def distribution(self) -> DegreeDistribution | None:
        if self.source["kind"] == "distribution":
            return DegreeDistribution.from_json(self.source["dist"])
        if self.source["kind"] == "near_critical":
            return DegreeDistribution.from_json(self.source["base"])
        return None

    def fixed_sequence(self) -> DegreeSequence | None:
        kind = self.source["kind"]
        if kind == "counts":
            return from_counts({int(k): int(v) for k, v in self.source["counts"].items()})
        if kind == "near_critical":
            return near_critical_sequence(self.distribution(), int(self.n), float(self.source["alpha"]))
        return None

    def theory(self):
        """The prediction this experiment is checked against."""
        if self.source["kind"] == "near_critical":
            seq = self.fixed_sequence()
            return predict_near_critical(self.distribution(), seq.n, seq.alpha)
        src = self.distribution() or self.fixed_sequence()
        return theory_report(src)


@dataclass
class ReplicaRecord:
    replica: int
    n: int
    lam_n: float
    alpha_n: float
    v1: int | None = None
    e1: int | None = None
    v2: int | None = None
    e2: int | None = None
    vk1: dict = field(default_factory=dict)
    attempts: int = 1
    failed: bool = False

    def normalized(self, units: str) -> dict:
        if self.failed:
            return {}
        out = {
            "v1_frac": self.v1 / self.n,
            "e1_frac": self.e1 / self.n,
            "v2_frac": self.v2 / self.n,
            "e2_frac": self.e2 / self.n,
        }
        out.update({f"vk1_frac_{k}": c / self.n for k, c in self.vk1.items()})
        if units == "near_critical":
            scale = self.n * self.alpha_n
            out["v1_scaled"] = self.v1 / scale
            out["e1_scaled"] = self.e1 / scale
            out["v2_over_v1"] = self.v2 / self.v1 if self.v1 else math.nan
            out.update({f"vk1_scaled_{k}": c / scale for k, c in self.vk1.items()})
        return out


def _aggregate(values: list[float]) -> dict:
    vals = [v for v in values if not math.isnan(v)]
    if not vals:
        return {"mean": math.nan, "std": math.nan, "min": math.nan, "max": math.nan, "count": 0}
    mean = math.fsum(vals) / len(vals)
    std = math.sqrt(math.fsum((v - mean) ** 2 for v in vals) / (len(vals) - 1)) if len(vals) > 1 else math.nan
    return {"mean": mean, "std": std, "min": min(vals), "max": max(vals), "count": len(vals)}


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    records: list[ReplicaRecord]

    @property
    def units(self) -> str:
        return self.config.units

    @property
    def ok_records(self) -> list[ReplicaRecord]:
        return [r for r in self.records if not r.failed]

    def statistic_names(self) -> list[str]:
        names: list[str] = []
        for r in self.ok_records:
            for k in r.normalized(self.units):
                if k not in names:
                    names.append(k)
        return names

    def values(self, stat: str) -> list[float]:
        return [r.normalized(self.units).get(stat, 0.0) for r in self.ok_records]

    @property
    def aggregates(self) -> dict:
        return {s: _aggregate(self.values(s)) for s in self.statistic_names()}

    def mean(self, stat: str) -> float:
        return _aggregate(self.values(stat))["mean"]

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "records": [asdict(r) for r in self.records],
            "aggregates": _json_safe(self.aggregates),
        }


def _json_safe(obj):
    if isinstance(obj, float):
        return None if math.isnan(obj) or math.isinf(obj) else obj
    if isinstance(obj, dict):
        return {str(k): _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _run_one(config: ExperimentConfig, fixed: DegreeSequence | None, dist, index: int) -> ReplicaRecord:
    rng = replica_rng(int(config.seed), index)
    seq = fixed if fixed is not None else sample_iid(dist, int(config.n), rng)
    rec = ReplicaRecord(index, seq.n, seq.lam, seq.alpha)
    for attempt in range(1, config.max_attempts + 1):
        stats, _, graph = explore(seq, rng, config.mode)
        if config.graph_mode == "multigraph" or is_simple(graph).simple:
            break
    else:
        rec.failed = True
        rec.attempts = config.max_attempts
        return rec
    rec.attempts = attempt
    rec.v1, rec.e1 = stats.largest(0)
    rec.v2, rec.e2 = stats.largest(1)
    rec.vk1 = stats.histogram(0) if len(stats) else {}
    return rec


def run_replicas(config: ExperimentConfig, threads: int | None = 1) -> ExperimentResult:
    """Run every replica; output is a pure function of the config."""
    fixed = config.fixed_sequence()
    dist = config.distribution() if fixed is None else None
    indices = range(config.replicas)
    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(lambda i: _run_one(config, fixed, dist, i), indices))
    else:
        records = [_run_one(config, fixed, dist, i) for i in indices]
    if all(r.failed for r in records):
        raise MaxAttemptsExceeded(f"every replica exceeded {config.max_attempts} attempts")
    return ExperimentResult(config, records)


# -- comparison -------------------------------------------------------------


@dataclass
class ComparisonRecord:
    statistic: str
    aggregate: str
    empirical: float
    theoretical: float
    gap: float
    rel_gap: float | None
    tolerance: float | None
    criterion: str
    passed: bool | None

    def to_dict(self) -> dict:
        return _json_safe(asdict(self))


@dataclass
class ComparisonReport:
    units: str
    records: list[ComparisonRecord]
    tolerances: dict
    note: str = ""

    @property
    def all_passed(self) -> bool:
        return all(r.passed is not False for r in self.records)

    def to_dict(self) -> dict:
        return {
            "units": self.units,
            "all_passed": self.all_passed,
            "tolerances": _json_safe(self.tolerances),
            "note": self.note,
            "records": [r.to_dict() for r in self.records],
        }


def _record(stat, agg, emp, theo, tol, criterion) -> ComparisonRecord:
    gap = emp - theo
    rel = gap / theo if theo else None
    if tol is None or math.isnan(emp):
        passed = None
    elif criterion == "abs":
        passed = abs(gap) < tol
    elif criterion == "rel":
        passed = rel is not None and abs(rel) < tol
    else:  # "below": empirical value must stay under tol
        passed = emp < tol
    return ComparisonRecord(stat, agg, emp, theo, gap, rel, tol, criterion, passed)


def default_abs_tolerance(n: int, lam_n: float) -> float:
    """Monte Carlo scale 5 n^(-1/2) (1 + lam_n) for fraction statistics."""
    return 5.0 * n ** -0.5 * (1.0 + lam_n)


def compare(result: ExperimentResult, theory, tolerances: dict | None = None) -> ComparisonReport:
    """Per-statistic gaps between replicate means (or maxima) and the prediction."""
    tol = {**DEFAULT_TOLERANCES, **result.config.tolerances, **(tolerances or {})}
    agg = result.aggregates
    ok = result.ok_records
    if isinstance(theory, NearCriticalPrediction):
        if result.units != "near_critical":
            raise UnitMismatch("near-critical prediction needs a near-critical experiment")
        within = theory.n_third_alpha >= tol.get("n_third_alpha_min", NEAR_CRITICAL_THRESHOLD)
        rel = tol["rel"] if within else None
        recs = [
            _record("v1_scaled", "mean", agg["v1_scaled"]["mean"], theory.coefficient, rel, "rel"),
            _record("e1_scaled", "mean", agg["e1_scaled"]["mean"], theory.coefficient, rel, "rel"),
            _record("v2_over_v1", "mean", agg["v2_over_v1"]["mean"], 0.0,
                    tol["v2_over_v1"] if within else None, "below"),
        ]
        for k, v in theory.vk_c1.items():
            key = f"vk1_scaled_{k}"
            emp = agg[key]["mean"] if key in agg else 0.0
            recs.append(_record(key, "mean", emp, v / (theory.n * theory.alpha_n), None, "rel"))
        note = "" if within else "outside theorem hypotheses (n^(1/3) alpha_n too small); diagnostic only"
        return ComparisonReport("near_critical", recs, tol, note)

    if not isinstance(theory, TheoryReport):
        raise TypeError("theory must be a TheoryReport or NearCriticalPrediction")
    if result.units != "fraction":
        raise UnitMismatch("supercritical report compares fractions of n, not near-critical units")
    if theory.v_frac is None:
        return ComparisonReport("fraction", [], tol, f"{theory.regime}: no limiting prediction")
    n = int(np.mean([r.n for r in ok]))
    lam_n = float(np.mean([r.lam_n for r in ok]))
    abs_tol = tol.get("abs") or default_abs_tolerance(n, lam_n)
    tol["abs"] = abs_tol
    if theory.v_frac == 0.0:
        recs = [
            _record("v1_frac", "max", agg["v1_frac"]["max"], 0.0, tol["v1_zero"], "below"),
            _record("e1_frac", "max", agg["e1_frac"]["max"], 0.0, tol["v1_zero"], "below"),
        ]
        return ComparisonReport("fraction", recs, tol)
    recs = [
        _record("v1_frac", "mean", agg["v1_frac"]["mean"], theory.v_frac, abs_tol, "abs"),
        _record("e1_frac", "mean", agg["e1_frac"]["mean"], theory.e_frac, abs_tol, "abs"),
    ]
    for k, v in theory.vk_frac.items():
        key = f"vk1_frac_{k}"
        recs.append(_record(key, "mean", agg[key]["mean"] if key in agg else 0.0, v, abs_tol, "abs"))
    recs.append(_record("v2_frac", "max", agg["v2_frac"]["max"], 0.0, tol["v2_frac"], "below"))
    recs.append(_record("e2_frac", "max", agg["e2_frac"]["max"], 0.0, tol["v2_frac"], "below"))
    return ComparisonReport("fraction", recs, tol)


# -- near-critical sweep ----------------------------------------------------


@dataclass
class SweepRow:
    n: int
    alpha_target: float
    alpha_n: float
    n_third_alpha: float
    v1_scaled: float
    e1_scaled: float
    predicted: float
    predicted_n: float
    rel_gap: float
    v2_over_v1: float
    within_hypotheses: bool
    passed: bool | None


def near_critical_sweep(
    base: DegreeDistribution,
    n_list,
    alpha_list=(),
    replicas: int = 1,
    seed: int = 0,
    *,
    alpha_exponents=(),
    threads: int | None = 1,
    threshold: float = NEAR_CRITICAL_THRESHOLD,
    tolerances: dict | None = None,
) -> list[SweepRow]:
    """Table of v1/(n alpha_n) against 2 lam / beta over a grid of (n, alpha).

    ``predicted_n`` is the same coefficient with the realised lam_n and beta_n,
    reported for diagnosis only; pass/fail uses the limit law.

    ``alpha_exponents`` adds alpha = n**e for each exponent e. Rows with
    ``n^(1/3) alpha_n < threshold`` are emitted as diagnostics (``passed`` is None).
    """
    tol = {**DEFAULT_TOLERANCES, **(tolerances or {})}
    rows = []
    for n in n_list:
        alphas = list(alpha_list) + [float(n) ** e for e in alpha_exponents]
        for a in alphas:
            cfg = ExperimentConfig(
                source={"kind": "near_critical", "base": base.to_json(), "alpha": a},
                n=int(n), replicas=replicas, seed=seed,
            )
            res = run_replicas(cfg, threads)
            pred = cfg.theory()
            seq = cfg.fixed_sequence()
            within = pred.n_third_alpha >= threshold
            v1s = res.mean("v1_scaled")
            ratio = res.mean("v2_over_v1")
            rel = (v1s - pred.coefficient) / pred.coefficient
            passed = (abs(rel) <= tol["rel"] and ratio <= tol["v2_over_v1"]) if within else None
            rows.append(SweepRow(
                int(n), float(a), pred.alpha_n, pred.n_third_alpha, v1s, res.mean("e1_scaled"),
                pred.coefficient, 2 * seq.lam / seq.beta, rel, ratio, within, passed,
            ))
    return rows


# -- output -----------------------------------------------------------------


RESULT_COLUMNS = ["replica", "n", "lam_n", "alpha_n", "attempts", "failed", "v1", "e1", "v2", "e2"]
SWEEP_COLUMNS = [
    "n", "alpha_target", "alpha_n", "n_third_alpha", "v1_scaled", "e1_scaled",
    "predicted", "predicted_n", "rel_gap", "v2_over_v1", "within_hypotheses", "passed",
]


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    return "" if math.isnan(v) else repr(v)


def write_results_csv(result: ExperimentResult, path) -> None:
    stats = result.statistic_names()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(RESULT_COLUMNS + stats)
        for r in result.records:
            norm = r.normalized(result.units)
            base = [getattr(r, c) for c in RESULT_COLUMNS]
            w.writerow([_cell(v) for v in base] + [_cell(norm.get(s)) for s in stats])


def write_sweep_csv(rows: list[SweepRow], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for row in rows:
            w.writerow([_cell(getattr(row, c)) for c in SWEEP_COLUMNS])


def emit_csv(obj, path, **kw) -> None:
    """Write a result, sweep table or trace as CSV."""
    try:
        if isinstance(obj, ExperimentResult):
            write_results_csv(obj, path)
        elif isinstance(obj, ExplorationTrace):
            obj.to_csv(path, **kw)
        elif isinstance(obj, list):
            write_sweep_csv(obj, path)
        else:
            raise TypeError(f"cannot write {type(obj).__name__} as CSV")
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


def plot_trace(trace: ExplorationTrace, gf: GeneratingFunctions, path) -> None:
    """A/n and A_tilde/n against H(exp(-t)); the dashed marker sits at tau = -ln xi."""
    t = trace.t
    x = np.exp(-t)
    series = [
        ("A/n", t, trace.A / trace.n),
        ("A_tilde/n", t, trace.A_tilde / trace.n),
        ("H(exp(-t))", t, gf.H(x) if t.size else t, True),
    ]
    vlines = ()
    if classify(gf) is Regime.SUPERCRITICAL:
        vlines = (-math.log(solve_xi(gf)),)
    line_plot(path, series, title="Active half-edges vs fluid limit", xlabel="t",
              ylabel="fraction of n", vlines=vlines, hline=0.0)


def plot_rescaled(trace: ExplorationTrace, seq: DegreeSequence, t0: float, path) -> None:
    u, y, par = rescaled_curve(trace, seq, t0)
    series = [("rescaled A_tilde", u, y), ("t - beta t^2 / 2", u, par, True)]
    line_plot(path, series, title="Near-critical rescaling", xlabel="t = time / alpha_n",
              ylabel="A_tilde / (alpha_n^2 n)", vlines=(2 / seq.beta,), hline=0.0)


def plot_sweep(rows: list[SweepRow], path) -> None:
    series = []
    for n in sorted({r.n for r in rows}):
        sel = sorted((r for r in rows if r.n == n), key=lambda r: r.n_third_alpha)
        series.append((f"n={n}", [r.n_third_alpha for r in sel], [r.v1_scaled for r in sel]))
    if rows:
        xs = [r.n_third_alpha for r in rows]
        series.append(("2 lam / beta", [min(xs), max(xs)], [rows[0].predicted] * 2, True))
    line_plot(path, series, title="Near-critical sweep", xlabel="n^(1/3) alpha_n",
              ylabel="v1 / (n alpha_n)")


def emit_svg(obj, path, **kw) -> None:
    """Dispatch to the trace, rescaled-trace or sweep plot."""
    try:
        if isinstance(obj, ExplorationTrace) and "seq" in kw:
            plot_rescaled(obj, kw["seq"], kw["t0"], path)
        elif isinstance(obj, ExplorationTrace):
            plot_trace(obj, kw["gf"], path)
        elif isinstance(obj, list):
            plot_sweep(obj, path)
        else:
            raise TypeError(f"cannot plot {type(obj).__name__}")
    except OSError as exc:
        raise OSError(f"{path}: {exc.strerror or exc}") from exc


__all__ = [
    "ExperimentConfig",
    "ExperimentResult",
    "ReplicaRecord",
    "ComparisonReport",
    "ComparisonRecord",
    "SweepRow",
    "run_replicas",
    "compare",
    "near_critical_sweep",
    "emit_csv",
    "emit_svg",
    "replica_rng",
    "GclError",
]
