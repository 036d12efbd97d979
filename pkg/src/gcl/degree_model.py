"""Degree sequences (finite n) and degree distributions (the n -> oo law).

A :class:`DegreeSequence` is stored as vertex counts per degree, ``nk[k] = #{i : d_i = k}``.
Vertices are laid out in ascending degree order whenever an explicit vertex
array is needed, which keeps every downstream construction reproducible.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

import numpy as np
from scipy import stats

from .errors import InsufficientDegreeTwoMass, NotCritical, OddDegreeSum

TAIL_MASS = 1e-12


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class DegreeDistribution:
    """Asymptotic degree law ``p_k`` truncated at ``cutoff``.

    ``kind`` is one of ``"finite"``, ``"poisson"`` and ``"power_law"``; closed
    forms are cut at the smallest K leaving tail mass below 1e-12, and the
    discarded mass is kept in ``tail_mass``.
    """

    pk: np.ndarray
    kind: str = "finite"
    params: dict = field(default_factory=dict)
    tail_mass: float = 0.0

    def __post_init__(self):
        pk = np.asarray(self.pk, dtype=float)
        if pk.ndim != 1 or pk.size == 0:
            raise ValueError("pk must be a non-empty 1-d array")
        if np.any(pk < 0):
            raise ValueError("probabilities must be non-negative")
        total = pk.sum()
        if abs(total + self.tail_mass - 1.0) > 1e-12 or self.tail_mass > TAIL_MASS:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        # drop trailing zeros so cutoff is meaningful
        nz = np.flatnonzero(pk)
        pk = pk[: nz[-1] + 1]
        object.__setattr__(self, "pk", _frozen(pk))

    # -- constructors -------------------------------------------------------
    @classmethod
    def finite(cls, probabilities: Mapping[int, float]) -> "DegreeDistribution":
        probs = {int(k): float(p) for k, p in probabilities.items()}
        if any(k < 0 for k in probs):
            raise ValueError("degrees must be non-negative")
        pk = np.zeros(max(probs) + 1)
        for k, p in probs.items():
            pk[k] += p
        return cls(pk, "finite", {})

    @classmethod
    def point_mass(cls, k: int) -> "DegreeDistribution":
        return cls.finite({k: 1.0})

    @classmethod
    def poisson(cls, lam: float) -> "DegreeDistribution":
        if not lam > 0:
            raise ValueError("lambda must be positive")
        K = int(lam)
        while stats.poisson.sf(K, lam) >= TAIL_MASS:
            K += 1
        pk = stats.poisson.pmf(np.arange(K + 1), lam)
        tail = float(stats.poisson.sf(K, lam))
        # pmf rounding can leave |sum - 1| a few ulps above the tail
        pk = pk * ((1.0 - tail) / pk.sum())
        return cls(pk, "poisson", {"lambda": float(lam)}, tail)

    @classmethod
    def power_law(cls, exponent: float, cutoff: int) -> "DegreeDistribution":
        """``p_k`` proportional to ``k**-exponent`` on ``1..cutoff``."""
        if cutoff < 1:
            raise ValueError("cutoff must be >= 1")
        k = np.arange(1, cutoff + 1, dtype=float)
        w = k ** -float(exponent)
        pk = np.concatenate([[0.0], w / w.sum()])
        return cls(pk, "power_law", {"exponent": float(exponent), "cutoff": int(cutoff)})

    @classmethod
    def from_json(cls, obj) -> "DegreeDistribution":
        """Build from ``{"kind": "poisson", "lambda": 2.0}`` style specs (dict or JSON text)."""
        if isinstance(obj, str):
            obj = json.loads(obj)
        kind = obj.get("kind")
        if kind == "poisson":
            return cls.poisson(float(obj["lambda"]))
        if kind == "finite":
            return cls.finite({int(k): float(p) for k, p in obj["pk"].items()})
        if kind == "power_law":
            return cls.power_law(float(obj["exponent"]), int(obj["cutoff"]))
        raise ValueError(f"unknown distribution kind {kind!r}")

    def to_json(self) -> dict:
        if self.kind == "poisson":
            return {"kind": "poisson", "lambda": self.params["lambda"]}
        if self.kind == "power_law":
            return {"kind": "power_law", **self.params}
        return {"kind": "finite", "pk": {str(k): float(p) for k, p in self.items()}}

    # -- accessors ----------------------------------------------------------
    @property
    def cutoff(self) -> int:
        return self.pk.size - 1

    def p(self, k: int) -> float:
        return float(self.pk[k]) if 0 <= k < self.pk.size else 0.0

    def items(self):
        return [(int(k), float(self.pk[k])) for k in np.flatnonzero(self.pk)]

    def _moment(self, f) -> float:
        k = np.arange(self.pk.size, dtype=float)
        return float(np.dot(self.pk, f(k)))

    @property
    def mean(self) -> float:
        return self._moment(lambda k: k)

    @property
    def edd2(self) -> float:
        """E D(D-2)."""
        return self._moment(lambda k: k * (k - 2))

    @property
    def beta(self) -> float:
        """E D(D-1)(D-2)."""
        return self._moment(lambda k: k * (k - 1) * (k - 2))


@dataclass(frozen=True)
class DegreeSequence:
    """Finite degree sequence held as counts ``nk[k]``.

    All moments are computed from exact integer sums before the final
    division by ``n``.
    """

    nk: np.ndarray

    def __post_init__(self):
        nk = np.asarray(self.nk)
        if nk.ndim != 1 or nk.size == 0:
            raise ValueError("counts must be a non-empty 1-d array")
        if not np.issubdtype(nk.dtype, np.integer):
            if not np.all(np.equal(np.mod(nk, 1), 0)):
                raise ValueError("counts must be integers")
        nk = nk.astype(np.int64)
        if np.any(nk < 0):
            raise ValueError("counts must be non-negative")
        if nk.sum() == 0:
            raise ValueError("at least one vertex is required")
        nz = np.flatnonzero(nk)
        nk = nk[: nz[-1] + 1]
        if self._power_sum(nk, 1) % 2:
            raise OddDegreeSum(f"sum of degrees {self._power_sum(nk, 1)} is odd")
        object.__setattr__(self, "nk", _frozen(nk))

    @staticmethod
    def _power_sum(nk, p: int) -> int:
        return sum(k**p * int(c) for k, c in enumerate(nk) if c)

    @classmethod
    def from_degrees(cls, degrees) -> "DegreeSequence":
        d = np.asarray(degrees, dtype=np.int64)
        if d.size and d.min() < 0:
            raise ValueError("degrees must be non-negative")
        return cls(np.bincount(d))

    @property
    def counts(self) -> dict[int, int]:
        return {int(k): int(self.nk[k]) for k in np.flatnonzero(self.nk)}

    @property
    def n(self) -> int:
        return int(self.nk.sum())

    @property
    def total_degree(self) -> int:
        return self._power_sum(self.nk, 1)

    @property
    def m(self) -> int:
        return self.total_degree // 2

    @property
    def d_max(self) -> int:
        return self.nk.size - 1

    @property
    def lam(self) -> float:
        """Mean degree 2m/n."""
        return self.total_degree / self.n

    @property
    def alpha(self) -> float:
        """E D_n(D_n - 2)."""
        s1, s2 = self.total_degree, self._power_sum(self.nk, 2)
        return (s2 - 2 * s1) / self.n

    @property
    def beta(self) -> float:
        """E D_n(D_n - 1)(D_n - 2)."""
        s1, s2, s3 = (self._power_sum(self.nk, p) for p in (1, 2, 3))
        return (s3 - 3 * s2 + 2 * s1) / self.n

    def fraction(self, k: int) -> float:
        return int(self.nk[k]) / self.n if 0 <= k < self.nk.size else 0.0

    def degrees(self) -> np.ndarray:
        """Vertex degrees in the canonical ascending layout."""
        return np.repeat(np.arange(self.nk.size, dtype=np.int64), self.nk)

    def __eq__(self, other):
        if not isinstance(other, DegreeSequence):
            return NotImplemented
        return np.array_equal(self.nk, other.nk)

    def __hash__(self):
        return hash(self.nk.tobytes())


def from_counts(counts: Mapping[int, int]) -> DegreeSequence:
    """``{1: 500, 3: 500}`` -> DegreeSequence. Raises OddDegreeSum for an odd degree total."""
    if not counts:
        raise ValueError("empty counts")
    items = {int(k): int(c) for k, c in counts.items()}
    if any(k < 0 for k in items):
        raise ValueError("degrees must be non-negative")
    if any(c < 0 for c in items.values()):
        raise ValueError("counts must be non-negative")
    nk = np.zeros(max(items) + 1, dtype=np.int64)
    for k, c in items.items():
        nk[k] += c
    return DegreeSequence(nk)


def sample_iid(dist: DegreeDistribution, n: int, rng) -> DegreeSequence:
    """Draw n i.i.d. degrees; an odd total is fixed by bumping one uniform vertex by +1."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(rng)
    if dist.kind == "poisson":
        d = rng.poisson(dist.params["lambda"], n).astype(np.int64)
    else:
        support = np.flatnonzero(dist.pk)
        p = dist.pk[support] / dist.pk[support].sum()
        d = support[rng.choice(support.size, size=n, p=p)].astype(np.int64)
    if int(d.sum()) % 2:
        d[rng.integers(n)] += 1
    return DegreeSequence.from_degrees(d)


@dataclass(frozen=True)
class ConditionReport:
    even_sum: bool
    has_degree_one: bool
    second_moment: float
    fourth_moment_4plus_eta: float
    eta: float
    degenerate_flags: frozenset

    def to_dict(self) -> dict:
        return {
            "even_sum": self.even_sum,
            "has_degree_one": self.has_degree_one,
            "second_moment": self.second_moment,
            "fourth_moment_4plus_eta": self.fourth_moment_4plus_eta,
            "eta": self.eta,
            "degenerate_flags": sorted(self.degenerate_flags),
        }


def check_conditions(seq: DegreeSequence, eta: float = 0.1) -> ConditionReport:
    """Finite-n proxies for the regularity conditions.

    Moments are returned raw; deciding what counts as ``O(n)`` is left to
    the caller.
    """
    support = set(seq.counts)
    flags = set()
    if support <= {0, 2}:
        flags.add("all_mass_on_0_and_2")
    elif 1 not in support and any(k >= 3 for k in support):
        flags.add("p1_zero_supercritical")
    k = np.arange(seq.nk.size, dtype=float)
    return ConditionReport(
        even_sum=seq.total_degree % 2 == 0,
        has_degree_one=seq.fraction(1) > 0,
        second_moment=DegreeSequence._power_sum(seq.nk, 2) / seq.n,
        fourth_moment_4plus_eta=float(np.dot(seq.nk, k ** (4 + eta))) / seq.n,
        eta=eta,
        degenerate_flags=frozenset(flags),
    )


def near_critical_sequence(
    base: DegreeDistribution, n: int, target_alpha: float
) -> DegreeSequence:
    """Round ``n * p_k`` and shift ``c = round(n * alpha / 2)`` pairs of vertices 2->1, 2->3.

    Each pair of moves keeps the degree total fixed and raises
    ``sum d(d-2)`` by 2, so the result has ``alpha_n = target_alpha + O(1/n)``.
    The achieved value is available as ``.alpha`` on the result.
    """
    if abs(base.edd2) > 1e-12:
        raise NotCritical(f"E D(D-2) = {base.edd2:.3g} for the base distribution, expected 0")
    if target_alpha < 0:
        raise ValueError("target_alpha must be non-negative")
    nk = np.rint(n * np.asarray(base.pk)).astype(np.int64)
    if nk.size < 4:
        nk = np.concatenate([nk, np.zeros(4 - nk.size, dtype=np.int64)])
    # degree 2 is neutral for alpha and beta, so it absorbs the rounding residual
    nk[2] += n - int(nk.sum())
    if DegreeSequence._power_sum(nk, 1) % 2:
        nk[2] -= 1
        nk[1] += 1
    c = int(round(n * target_alpha / 2))
    if nk[2] < 2 * c:
        raise InsufficientDegreeTwoMass(f"need {2 * c} degree-2 vertices, have {int(nk[2])}")
    before = DegreeSequence._power_sum(nk, 1)
    nk[2] -= 2 * c
    nk[1] += c
    nk[3] += c
    assert DegreeSequence._power_sum(nk, 1) == before
    return DegreeSequence(nk)


# -- file formats -----------------------------------------------------------


def read_degfile(path) -> DegreeSequence:
    """Parse ``k<TAB>n_k`` lines (ascending k, ``#`` comments)."""
    counts: dict[int, int] = {}
    last = -1
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"{path}:{lineno}: expected 'k<TAB>n_k', got {raw!r}")
        try:
            k, c = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"{path}:{lineno}: non-integer field in {raw!r}") from None
        if k <= last:
            raise ValueError(f"{path}:{lineno}: degrees must be strictly ascending")
        last = k
        counts[k] = c
    return from_counts(counts)


def write_degfile(seq: DegreeSequence, path) -> None:
    lines = [f"# n={seq.n} m={seq.m}"]
    lines += [f"{k}\t{c}" for k, c in seq.counts.items()]
    Path(path).write_text("\n".join(lines) + "\n")

