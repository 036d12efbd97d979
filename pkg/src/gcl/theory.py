"""Generating functions, phase classification and giant-component predictions.

With ``p_k`` the degree law and ``lam = sum k p_k``::

    g(x) = sum p_k x^k          h(x) = x g'(x)          H(x) = lam x^2 - h(x)

In the supercritical phase H has a unique zero ``xi`` in (0, 1), negative to
its left and positive to its right; the giant component then holds a
fraction ``1 - g(xi)`` of the vertices.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .degree_model import DegreeDistribution, DegreeSequence
from .errors import BetaZero, BracketFailure, DomainError, NotCritical, NotSupercritical

TOL_CRIT = 1e-10
VK_DEFAULT_MAX = 64


class Regime(str, enum.Enum):
    SUBCRITICAL = "Subcritical"
    CRITICAL = "Critical"
    SUPERCRITICAL = "Supercritical"
    DEGENERATE_P1_ZERO = "DegenerateP1Zero"
    DEGENERATE_ALL_DEG2 = "DegenerateAllDeg2"

    def __str__(self):
        return self.value


class GeneratingFunctions:
    """Evaluators for g, h, H and their first two derivatives on [0, 1].

    Built either from a :class:`DegreeDistribution` (weights ``p_k``) or from a
    :class:`DegreeSequence` (weights ``n_k``, normalised by ``n`` only at the
    end so that ``g_n(1) == 1`` exactly). ``H`` is evaluated in the form
    ``sum k w_k (x^2 - x^k)``, which vanishes identically at x = 1 and makes
    the empirical coefficient of ``x^2`` equal to ``2m/n``.
    """

    def __init__(self, weights, norm: float = 1.0, *, tail_mass: float = 0.0, source=None):
        w = np.asarray(weights, dtype=float)
        self._k = np.flatnonzero(w).astype(float)
        self._w = w[self._k.astype(np.int64)]
        self.norm = float(norm)
        self.tail_mass = float(tail_mass)
        self.source = source
        self.cutoff = int(self._k[-1]) if self._k.size else 0

    @classmethod
    def from_distribution(cls, dist: DegreeDistribution) -> "GeneratingFunctions":
        return cls(dist.pk, 1.0, tail_mass=dist.tail_mass, source=dist)

    @classmethod
    def from_sequence(cls, seq: DegreeSequence) -> "GeneratingFunctions":
        return cls(seq.nk, seq.n, source=seq)

    # -- moments ------------------------------------------------------------
    def _sum(self, coef) -> float:
        return float(np.dot(self._w, coef)) / self.norm

    def p(self, k: int) -> float:
        hit = np.flatnonzero(self._k == k)
        return float(self._w[hit[0]]) / self.norm if hit.size else 0.0

    @property
    def lam(self) -> float:
        return self._sum(self._k)

    @property
    def edd2(self) -> float:
        return self._sum(self._k * (self._k - 2))

    @property
    def beta(self) -> float:
        k = self._k
        return self._sum(k * (k - 1) * (k - 2))

    def support(self) -> list[int]:
        return [int(k) for k in self._k]

    # -- evaluation ---------------------------------------------------------
    def _powers(self, x, shift: int = 0):
        x = np.asarray(x, dtype=float)
        if np.any((x < 0) | (x > 1)) or np.any(np.isnan(x)):
            raise DomainError("generating functions are evaluated on [0, 1] only")
        e = self._k - shift
        with np.errstate(divide="ignore", invalid="ignore"):
            xp = np.power.outer(x, np.maximum(e, 0))
        # terms with negative exponent carry a zero coefficient
        return x, np.where(e >= 0, xp, 0.0)

    def _eval(self, x, coef, shift=0):
        x, xp = self._powers(x, shift)
        out = xp @ (self._w * coef) / self.norm
        return float(out) if out.ndim == 0 else out

    def g(self, x):
        return self._eval(x, 1.0)

    def dg(self, x):
        return self._eval(x, self._k, 1)

    def d2g(self, x):
        return self._eval(x, self._k * (self._k - 1), 2)

    def h(self, x):
        return self._eval(x, self._k)

    def dh(self, x):
        return self._eval(x, self._k**2, 1)

    def d2h(self, x):
        return self._eval(x, self._k**2 * (self._k - 1), 2)

    def H(self, x):
        x, xp = self._powers(x)
        kw = self._w * self._k
        out = ((x * x)[..., None] - xp) @ kw / self.norm
        return float(out) if np.ndim(out) == 0 else out

    def dH(self, x):
        return 2 * self.lam * np.asarray(x, dtype=float) - self.dh(x)

    def d2H(self, x):
        return 2 * self.lam - self.d2h(x)


def _as_gf(source) -> GeneratingFunctions:
    if isinstance(source, GeneratingFunctions):
        return source
    if isinstance(source, DegreeDistribution):
        return GeneratingFunctions.from_distribution(source)
    if isinstance(source, DegreeSequence):
        return GeneratingFunctions.from_sequence(source)
    raise TypeError(f"cannot build generating functions from {type(source).__name__}")


def empirical_gf(seq: DegreeSequence) -> GeneratingFunctions:
    return GeneratingFunctions.from_sequence(seq)


def eval_g(source, x):
    return _as_gf(source).g(x)


def eval_h(source, x):
    return _as_gf(source).h(x)


def eval_H(source, x):
    return _as_gf(source).H(x)


def classify(source, tol_crit: float = TOL_CRIT) -> Regime:
    gf = _as_gf(source)
    if set(gf.support()) <= {0, 2}:
        return Regime.DEGENERATE_ALL_DEG2
    edd2 = gf.edd2
    if edd2 > tol_crit:
        return Regime.SUPERCRITICAL if gf.p(1) > 0 else Regime.DEGENERATE_P1_ZERO
    if edd2 < -tol_crit:
        return Regime.SUBCRITICAL
    return Regime.CRITICAL


def solve_xi(source, tol: float = 1e-12, tol_crit: float = TOL_CRIT) -> float:
    """Root of H in (0, 1) by bisection.

    The bracket ends are found by probing ``2**-j`` (left, needs H < 0) and
    ``1 - 2**-j`` (right, needs H > 0) for j = 1..64.
    """
    gf = _as_gf(source)
    regime = classify(gf, tol_crit)
    if regime is Regime.DEGENERATE_P1_ZERO:
        return 0.0
    if regime is not Regime.SUPERCRITICAL:
        raise NotSupercritical(f"regime is {regime}")

    a = b = None
    for j in range(1, 65):
        if a is None and gf.H(0.5**j) < 0:
            a = 0.5**j
        if b is None and gf.H(1 - 0.5**j) > 0:
            b = 1 - 0.5**j
        if a is not None and b is not None:
            break
    if a is None or b is None or not a < b:
        raise BracketFailure(f"no sign change of H found (a={a}, b={b})")

    while True:
        mid = 0.5 * (a + b)
        hm = gf.H(mid)
        if b - a <= tol and abs(hm) <= tol:
            return mid
        if mid <= a or mid >= b:
            # bracket exhausted at float resolution
            return mid
        if hm < 0:
            a = mid
        elif hm > 0:
            b = mid
        else:
            return mid


@dataclass(frozen=True)
class TheoryReport:
    regime: Regime
    lam: float
    edd2: float
    xi: float | None = None
    v_frac: float | None = None
    e_frac: float | None = None
    vk_frac: dict = field(default_factory=dict)
    note: str = ""

    @property
    def tau(self) -> float | None:
        """-ln(xi); ``inf`` when xi == 0."""
        if self.xi is None:
            return None
        return math.inf if self.xi == 0 else -math.log(self.xi)

    @property
    def tau_infinite(self) -> bool:
        return self.xi == 0

    def to_dict(self) -> dict:
        tau = self.tau
        return {
            "kind": "theory_report",
            "regime": self.regime.value,
            "lambda": self.lam,
            "edd2": self.edd2,
            "xi": self.xi,
            "tau": None if tau is None or math.isinf(tau) else tau,
            "tau_infinite": self.tau_infinite,
            "v_frac": self.v_frac,
            "e_frac": self.e_frac,
            "vk_frac": {str(k): v for k, v in self.vk_frac.items()},
            "note": self.note,
        }


_NOTES = {
    Regime.DEGENERATE_P1_ZERO: (
        "no vertices of degree 1 but some of degree >= 3: H > 0 on (0, 1) and xi = 0, "
        "so almost every vertex and edge lies in one giant component"
    ),
    Regime.DEGENERATE_ALL_DEG2: (
        "all mass on degrees 0 and 2: H vanishes identically and the limit law does not "
        "determine the giant. Pure 2-regular graphs split into cycles with a random "
        "(non-degenerate) largest fraction; a few extra degree-1 vertices leave no giant; "
        "a few extra degree-4 vertices produce an almost spanning giant"
    ),
    Regime.CRITICAL: "E D(D-2) = 0: no giant of linear size; use the near-critical prediction with alpha_n > 0",
    Regime.SUBCRITICAL: "E D(D-2) < 0: all components are small",
}


def _vk_keys(gf: GeneratingFunctions, full: bool) -> list[int]:
    limit = gf.cutoff if full else min(gf.cutoff, VK_DEFAULT_MAX)
    return [k for k in gf.support() if k <= limit]


def predict_supercritical(source, tol: float = 1e-12, *, full_vk: bool = False) -> TheoryReport:
    """Limits of v(C1)/n, e(C1)/n and v_k(C1)/n for a supercritical (or p1 = 0) law."""
    gf = _as_gf(source)
    regime = classify(gf)
    xi = solve_xi(gf, tol)
    lam = gf.lam
    vk = {k: gf.p(k) * (1.0 - xi**k) for k in _vk_keys(gf, full_vk)}
    return TheoryReport(
        regime=regime,
        lam=lam,
        edd2=gf.edd2,
        xi=xi,
        v_frac=1.0 - gf.g(xi),
        e_frac=0.5 * lam * (1.0 - xi * xi),
        vk_frac=vk,
        note=_NOTES.get(regime, ""),
    )


def theory_report(source, tol: float = 1e-12, *, full_vk: bool = False) -> TheoryReport:
    """Report for any regime; zero fractions below and at criticality."""
    gf = _as_gf(source)
    regime = classify(gf)
    if regime in (Regime.SUPERCRITICAL, Regime.DEGENERATE_P1_ZERO):
        return predict_supercritical(gf, tol, full_vk=full_vk)
    if regime is Regime.DEGENERATE_ALL_DEG2:
        return TheoryReport(regime, gf.lam, gf.edd2, note=_NOTES[regime])
    return TheoryReport(
        regime,
        gf.lam,
        gf.edd2,
        v_frac=0.0,
        e_frac=0.0,
        vk_frac={k: 0.0 for k in _vk_keys(gf, full_vk)},
        note=_NOTES[regime],
    )


@dataclass(frozen=True)
class NearCriticalPrediction:
    lam: float
    beta: float
    n: int
    alpha_n: float
    v_c1: float
    e_c1: float
    vk_c1: dict
    n_third_alpha: float

    @property
    def tau_scaled(self) -> float:
        return 2.0 / self.beta

    @property
    def coefficient(self) -> float:
        """Predicted v(C1) / (n alpha_n), i.e. 2 lam / beta."""
        return 2.0 * self.lam / self.beta

    def to_dict(self) -> dict:
        return {
            "kind": "near_critical_prediction",
            "lambda": self.lam,
            "beta": self.beta,
            "n": self.n,
            "alpha_n": self.alpha_n,
            "v_c1": self.v_c1,
            "e_c1": self.e_c1,
            "vk_c1": {str(k): v for k, v in self.vk_c1.items()},
            "tau_scaled": self.tau_scaled,
            "coefficient": self.coefficient,
            "validity": {"n_third_alpha": self.n_third_alpha},
        }


def predict_near_critical(
    source, n: int, alpha_n: float, *, beta_tol: float = 1e-12, tol_crit: float = TOL_CRIT
) -> NearCriticalPrediction:
    """Leading-order giant size ``(2 lam / beta) n alpha_n`` just above criticality."""
    gf = _as_gf(source)
    regime = classify(gf, tol_crit)
    if regime is not Regime.CRITICAL:
        raise NotCritical(f"regime is {regime}")
    if gf.p(1) <= 0:
        raise NotCritical("near-critical law needs p_1 > 0")
    if not alpha_n > 0:
        raise ValueError("alpha_n must be positive")
    beta = gf.beta
    if beta <= beta_tol:
        raise BetaZero(f"beta = {beta:.3g}")
    lam = gf.lam
    scale = n * alpha_n
    return NearCriticalPrediction(
        lam=lam,
        beta=beta,
        n=int(n),
        alpha_n=float(alpha_n),
        v_c1=2 * lam / beta * scale,
        e_c1=2 * lam / beta * scale,
        vk_c1={k: 2 / beta * k * gf.p(k) * scale for k in _vk_keys(gf, False)},
        n_third_alpha=n ** (1 / 3) * alpha_n,
    )


def near_critical_from_sequence(seq: DegreeSequence) -> NearCriticalPrediction:
    """Same leading-order formula with the sequence's own lam_n, beta_n and n_k / n."""
    alpha = seq.alpha
    if not alpha > 0:
        raise ValueError("alpha_n must be positive")
    beta = seq.beta
    if beta <= 0:
        raise BetaZero(f"beta_n = {beta:.3g}")
    gf = GeneratingFunctions.from_sequence(seq)
    scale = seq.n * alpha
    coef = 2 * seq.lam / beta
    return NearCriticalPrediction(
        lam=seq.lam,
        beta=beta,
        n=seq.n,
        alpha_n=alpha,
        v_c1=coef * scale,
        e_c1=coef * scale,
        vk_c1={k: 2 / beta * k * gf.p(k) * scale for k in _vk_keys(gf, False)},
        n_third_alpha=seq.n ** (1 / 3) * alpha,
    )
