"""Component exploration over half-edges, revealing the matching as it goes.

Two modes share one kernel:

* ``combinatorial``: each needed partner is a uniform draw from the other
  living half-edges; checkpoints are pairing counts.
* ``timed``: every half-edge carries an Exp(1) lifetime and the partner is the
  next living half-edge to expire; checkpoints are times and the trace also
  carries the unconstrained counts ``V_tilde_k`` and ``S_tilde``.

Trajectories are right-continuous: a checkpoint at time t records the state
after every event at times <= t (an event tied with a checkpoint goes first).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .config_model import ComponentStats, Multigraph, half_edge_layout
from .degree_model import DegreeSequence
from .errors import ModeMismatch
from .theory import GeneratingFunctions, Regime, classify, solve_xi

MODES = ("combinatorial", "timed")


@dataclass(frozen=True, eq=False)
class ExplorationTrace:
    """Checkpointed trajectories of one exploration.

    ``t`` holds times (timed mode) or pairing counts (combinatorial mode).
    ``S_tilde`` and ``V_tilde`` need lifetimes and are ``None`` in
    combinatorial mode. ``V[i, k]`` is the number of sleeping vertices of
    degree k at checkpoint i.
    """

    mode: str
    n: int
    m: int
    t: np.ndarray
    L: np.ndarray
    S: np.ndarray
    V: np.ndarray
    c1_times: np.ndarray
    S_tilde: np.ndarray | None = None
    V_tilde: np.ndarray | None = None
    d_max: int = 0

    @property
    def A(self) -> np.ndarray:
        return self.L - self.S

    @property
    def dead(self) -> np.ndarray:
        return 2 * self.m - self.L

    @property
    def A_tilde(self) -> np.ndarray:
        if self.S_tilde is None:
            raise ModeMismatch("A_tilde needs lifetimes (timed mode)")
        return self.L - self.S_tilde

    def __len__(self) -> int:
        return self.t.size

    def columns(self, ks=None) -> tuple[list[str], list[np.ndarray]]:
        ks = range(self.V.shape[1]) if ks is None else [k for k in ks if k < self.V.shape[1]]
        names = ["t", "L", "A", "S", "S_tilde"]
        empty = np.full(len(self), np.nan)
        cols = [self.t, self.L, self.A, self.S, empty if self.S_tilde is None else self.S_tilde]
        for k in ks:
            names.append(f"V_{k}")
            cols.append(self.V[:, k])
        for k in ks:
            names.append(f"V_tilde_{k}")
            cols.append(empty if self.V_tilde is None else self.V_tilde[:, k])
        return names, cols

    def to_csv(self, path, ks=None) -> None:
        names, cols = self.columns(ks)
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(names)
            for row in zip(*cols):
                w.writerow([_fmt(v) for v in row])

    def c1_to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "t"])
            for i, t in enumerate(self.c1_times.tolist()):
                w.writerow([i, _fmt(t)])


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return ""
    if v.is_integer() and abs(v) < 2**53:
        return str(int(v))
    return f"{v:.10g}"


def _unconstrained_counts(seq: DegreeSequence, deg, first, lifetimes, times):
    """V_tilde_k(t): degree-k vertices whose half-edges all outlive t."""
    nck, K = len(times), seq.d_max + 1
    vt = np.zeros((nck, K), dtype=np.int64)
    vt[:, 0] = seq.nk[0]
    pos = deg > 0
    if lifetimes.size:
        minlife = np.minimum.reduceat(lifetimes, first[:-1][pos])
        dpos = deg[pos]
        for k in range(1, K):
            life_k = np.sort(minlife[dpos == k])
            vt[:, k] = life_k.size - np.searchsorted(life_k, times, side="right")
    return vt


def explore(
    seq: DegreeSequence,
    rng=None,
    mode: str = "combinatorial",
    checkpoints=(),
) -> tuple[ComponentStats, ExplorationTrace, Multigraph]:
    """Find all components of a configuration-model multigraph while building it.

    Parameters
    ----------
    seq : DegreeSequence
    rng : numpy Generator or seed
    mode : ``"combinatorial"`` or ``"timed"``
    checkpoints : ascending times (timed) or pairing counts (combinatorial)

    Returns
    -------
    (ComponentStats, ExplorationTrace, Multigraph)
        The multigraph is the matching realised by this run.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    rng = np.random.default_rng(rng)
    deg, first, owner = half_edge_layout(seq)
    n_half = owner.size
    m = n_half // 2
    timed = mode == "timed"

    c1_draws = rng.random(int(np.count_nonzero(deg)))
    if timed:
        ck_times = np.asarray(checkpoints, dtype=float)
        ck_steps = np.empty(0, dtype=np.int64)
        lifetimes = rng.exponential(1.0, n_half)
        order = np.argsort(lifetimes, kind="stable")
        pair_draws = np.empty(0, dtype=np.int64)
    else:
        ck_steps = np.asarray(checkpoints, dtype=np.int64)
        ck_times = np.empty(0, dtype=float)
        lifetimes = np.empty(0, dtype=float)
        order = np.empty(0, dtype=np.int64)
        highs = np.arange(n_half - 1, 0, -2, dtype=np.int64)
        pair_draws = rng.integers(0, highs) if m else np.empty(0, np.int64)
    if np.any(np.diff(ck_times) < 0) or np.any(np.diff(ck_steps) < 0):
        raise ValueError("checkpoints must be ascending")

    partner, label, edges, ncomp, c1_at, tr_L, tr_S, tr_V = _kernels.explore_kernel(
        deg, first, owner, timed, pair_draws, order, lifetimes, c1_draws, ck_steps, ck_times, seq.d_max
    )
    stats = ComponentStats.from_labels(deg, label, ncomp, edges)
    graph = Multigraph(seq.n, owner, partner)

    if timed:
        vt = _unconstrained_counts(seq, deg, first, lifetimes, ck_times)
        st = vt @ np.arange(vt.shape[1])
        trace = ExplorationTrace(
            "timed", seq.n, m, ck_times, tr_L, tr_S, tr_V, c1_at, st, vt, seq.d_max
        )
    else:
        trace = ExplorationTrace(
            "combinatorial", seq.n, m, ck_steps, tr_L, tr_S, tr_V, c1_at.astype(np.int64), d_max=seq.d_max
        )
    return stats, trace, graph


def explore_batch(seq: DegreeSequence, rng=None, mode: str = "combinatorial", runs: int = 1):
    """Run ``explore`` ``runs`` times on one (small) sequence without per-run overhead.

    Returns two ``(runs, n)`` arrays holding, per run, the component vertex and
    edge counts in the usual order (edges, then vertices, descending),
    zero-padded on the right.
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    rng = np.random.default_rng(rng)
    deg, first, owner = half_edge_layout(seq)
    n_half = owner.size
    timed = mode == "timed"
    c1 = rng.random((runs, int(np.count_nonzero(deg))))
    if timed:
        lifetimes = rng.exponential(1.0, (runs, n_half))
        order = np.argsort(lifetimes, axis=1, kind="stable")
        pair_draws = np.empty((runs, 0), dtype=np.int64)
    else:
        lifetimes = np.empty((runs, 0))
        order = np.empty((runs, 0), dtype=np.int64)
        highs = np.arange(n_half - 1, 0, -2, dtype=np.int64)
        pair_draws = rng.integers(0, highs, size=(runs, highs.size))
    return _kernels.explore_batch_kernel(
        deg, first, owner, timed, np.ascontiguousarray(pair_draws), np.ascontiguousarray(order),
        lifetimes, c1, seq.d_max,
    )


@dataclass(frozen=True, eq=False)
class DeathTrace:
    n: int
    m: int
    t: np.ndarray
    L: np.ndarray
    S_tilde: np.ndarray
    V_tilde: np.ndarray


def pure_death_trajectory(seq: DegreeSequence, rng=None, checkpoint_times=()) -> DeathTrace:
    """Spontaneous deaths only, with no exploration steps.

    A degree-k vertex keeps all its half-edges past t with probability
    ``exp(-k t)``, so its survival time is drawn as Exp(k). L runs the
    jump-by-2 death chain from ``2m - 1`` with rate equal to its current value.
    """
    rng = np.random.default_rng(rng)
    times = np.asarray(checkpoint_times, dtype=float)
    K = seq.d_max + 1
    vt = np.zeros((times.size, K), dtype=np.int64)
    vt[:, 0] = seq.nk[0]
    for k in range(1, K):
        c = int(seq.nk[k])
        if c:
            life = np.sort(rng.exponential(1.0 / k, c))
            vt[:, k] = c - np.searchsorted(life, times, side="right")

    m = seq.m
    if m:
        states = np.arange(2 * m - 1, 0, -2, dtype=np.int64)
        jumps = np.cumsum(rng.exponential(1.0 / states))
        L = np.maximum(2 * m - 1 - 2 * np.searchsorted(jumps, times, side="right"), 0)
    else:
        L = np.zeros(times.size, dtype=np.int64)
    return DeathTrace(seq.n, m, times, L, vt @ np.arange(K), vt)


@dataclass(frozen=True)
class DeviationReport:
    L: float
    V_tilde: float
    S_tilde: float
    A: float
    S_gap: float
    tau: float | None
    a_window_full: bool
    V_tilde_by_k: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "L": self.L,
            "V_tilde": self.V_tilde,
            "S_tilde": self.S_tilde,
            "A": self.A,
            "S_gap": self.S_gap,
            "tau": self.tau,
            "a_window_full": self.a_window_full,
            "V_tilde_by_k": {str(k): v for k, v in self.V_tilde_by_k.items()},
        }


def trace_deviation(trace: ExplorationTrace, gf: GeneratingFunctions, k_max: int = 5) -> DeviationReport:
    """Sup distances between the scaled trajectories and their fluid limits.

    The A and S_tilde - S comparisons are restricted to ``t <= tau = -ln xi``
    (past tau the gap S_tilde - S grows linearly in n by design, since C1 keeps
    waking vertices); when the law is not supercritical they run over all
    checkpoints and ``a_window_full`` is set.
    """
    if trace.mode != "timed":
        raise ModeMismatch(f"deviations need a timed trace, got {trace.mode!r}")
    n, t = trace.n, trace.t
    if t.size == 0:
        return DeviationReport(0.0, 0.0, 0.0, 0.0, 0.0, None, True, {})
    x = np.exp(-t)
    dev_L = np.max(np.abs(trace.L / n - gf.lam * x * x))
    by_k = {}
    for k in range(k_max + 1):
        vk = trace.V_tilde[:, k] if k < trace.V_tilde.shape[1] else np.zeros(t.size)
        by_k[k] = float(np.max(np.abs(vk / n - gf.p(k) * x**k)))
    dev_St = np.max(np.abs(trace.S_tilde / n - gf.h(x)))
    regime = classify(gf)
    if regime is Regime.SUPERCRITICAL:
        tau, full = -math.log(solve_xi(gf)), False
    elif regime is Regime.DEGENERATE_P1_ZERO:
        tau, full = math.inf, False
    else:
        tau, full = None, True
    window = t <= tau if tau is not None else np.ones(t.size, bool)
    dev_A = float(np.max(np.abs(trace.A[window] / n - gf.H(x[window])))) if window.any() else 0.0
    gap = float(np.max(np.abs(trace.S_tilde - trace.S)[window]) / n) if window.any() else 0.0
    return DeviationReport(
        float(dev_L), max(by_k.values()), float(dev_St), dev_A, float(gap),
        None if tau is None or math.isinf(tau) else tau, full, by_k,
    )


def rescaled_curve(trace: ExplorationTrace, seq: DegreeSequence, t0: float):
    """(u, rescaled A_tilde, parabola) on checkpoints with ``t <= alpha_n * t0``.

    ``u = t / alpha_n``; rescaled A_tilde is ``A_tilde(t) / (alpha_n^2 n)`` and the
    parabola is ``u - beta_n u^2 / 2`` with the sequence's own moments.
    """
    if trace.S_tilde is None:
        raise ModeMismatch("rescaled deviation needs a timed trace")
    alpha, beta = seq.alpha, seq.beta
    if not alpha > 0:
        raise ValueError("alpha_n must be positive")
    keep = trace.t <= alpha * t0 * (1 + 1e-12)
    u = trace.t[keep] / alpha
    y = trace.A_tilde[keep] / (alpha * alpha * seq.n)
    return u, y, u - 0.5 * beta * u * u


def rescaled_near_critical_deviation(trace: ExplorationTrace, seq: DegreeSequence, t0: float) -> float:
    u, y, par = rescaled_curve(trace, seq, t0)
    return float(np.max(np.abs(y - par))) if u.size else 0.0
