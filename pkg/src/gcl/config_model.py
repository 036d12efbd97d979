"""Configuration-model multigraphs and a union-find component oracle."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import _kernels
from .degree_model import DegreeSequence, _frozen
from .errors import MaxAttemptsExceeded


def half_edge_layout(seq: DegreeSequence):
    """Vertex degrees, per-vertex half-edge offsets and the owner of each half-edge.

    Half-edges are numbered vertex by vertex, vertices in ascending degree order.
    """
    deg = seq.degrees()
    first = np.zeros(deg.size + 1, dtype=np.int64)
    np.cumsum(deg, out=first[1:])
    owner = np.repeat(np.arange(deg.size, dtype=np.int64), deg)
    return deg, first, owner


@dataclass(frozen=True, eq=False)
class Multigraph:
    n: int
    half_edge_owner: np.ndarray
    partner: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "half_edge_owner", _frozen(np.asarray(self.half_edge_owner, np.int64)))
        object.__setattr__(self, "partner", _frozen(np.asarray(self.partner, np.int64)))

    @property
    def m(self) -> int:
        return self.partner.size // 2

    def degrees(self) -> np.ndarray:
        return np.bincount(self.half_edge_owner, minlength=self.n)

    def edges(self) -> tuple[np.ndarray, np.ndarray]:
        """Endpoint arrays (u, v), one entry per edge, ordered by the lower half-edge index."""
        x = np.flatnonzero(np.arange(self.partner.size) < self.partner)
        return self.half_edge_owner[x], self.half_edge_owner[self.partner[x]]

    def check(self) -> None:
        """Full scan of the involution and ownership invariants."""
        idx = np.arange(self.partner.size)
        if np.any(self.partner < 0) or np.any(self.partner >= self.partner.size):
            raise AssertionError("partner out of range")
        if np.any(self.partner[self.partner] != idx):
            raise AssertionError("partner is not an involution")
        if np.any(self.partner == idx):
            raise AssertionError("partner has a fixed point")

    def write_edge_list(self, path) -> None:
        u, v = self.edges()
        with open(path, "w") as fh:
            for a, b in zip(u.tolist(), v.tolist()):
                fh.write(f"{a} {b}\n")


class ComponentStats:
    """Per-component vertex and edge counts plus degree histograms.

    Components are ordered by edges, then vertices, both descending. Degree
    histograms are stored CSR-style (``hist_offsets``, ``hist_degree``,
    ``hist_count``) so that graphs with millions of components stay cheap.
    """

    def __init__(self, n, m, vertices, edges, hist_offsets, hist_degree, hist_count):
        self.n = int(n)
        self.m = int(m)
        self.vertices = _frozen(vertices)
        self.edges = _frozen(edges)
        self.hist_offsets = _frozen(hist_offsets)
        self.hist_degree = _frozen(hist_degree)
        self.hist_count = _frozen(hist_count)

    @classmethod
    def from_labels(cls, deg, label, ncomp, comp_edges) -> "ComponentStats":
        vertices = np.bincount(label, minlength=ncomp)
        order = np.lexsort((-vertices, -comp_edges))
        rank = np.empty(ncomp, dtype=np.int64)
        rank[order] = np.arange(ncomp)
        dmax = int(deg.max()) if deg.size else 0
        off, hdeg, hcnt = _kernels.degree_histograms(rank[label], deg, ncomp, dmax)
        return cls(deg.size, int(deg.sum()) // 2, vertices[order], comp_edges[order], off, hdeg, hcnt)

    def __len__(self) -> int:
        return self.vertices.size

    @property
    def component_count(self) -> int:
        return len(self)

    def histogram(self, i: int) -> dict[int, int]:
        a, b = self.hist_offsets[i], self.hist_offsets[i + 1]
        return dict(zip(self.hist_degree[a:b].tolist(), self.hist_count[a:b].tolist()))

    def component(self, i: int) -> dict:
        return {
            "vertices": int(self.vertices[i]),
            "edges": int(self.edges[i]),
            "degree_histogram": self.histogram(i),
        }

    @property
    def components(self) -> list[dict]:
        return [self.component(i) for i in range(len(self))]

    @property
    def totals(self) -> dict:
        return {"n": self.n, "m": self.m, "component_count": len(self)}

    def signature(self) -> list[tuple]:
        """Canonical multiset of (vertices, edges, histogram) for exact comparisons."""
        return sorted(
            (int(self.vertices[i]), int(self.edges[i]), tuple(sorted(self.histogram(i).items())))
            for i in range(len(self))
        )

    def largest(self, rank: int = 0) -> tuple[int, int]:
        if rank >= len(self):
            return 0, 0
        return int(self.vertices[rank]), int(self.edges[rank])

    def check(self) -> None:
        if self.vertices.sum() != self.n or self.edges.sum() != self.m:
            raise AssertionError("component totals do not reconcile")
        comp = np.repeat(np.arange(len(self)), np.diff(self.hist_offsets))
        half = np.bincount(comp, weights=self.hist_degree * self.hist_count, minlength=len(self))
        if np.any(half != 2 * self.edges):
            raise AssertionError("degree histogram does not match edge count")
        if np.any(np.bincount(comp, weights=self.hist_count, minlength=len(self)) != self.vertices):
            raise AssertionError("degree histogram does not match vertex count")


def pair_uniform(seq: DegreeSequence, rng) -> Multigraph:
    """Uniform perfect matching of the 2m half-edges."""
    rng = np.random.default_rng(rng)
    _, _, owner = half_edge_layout(seq)
    n_half = owner.size
    jumps = rng.integers(np.arange(1, n_half, 2, dtype=np.int64), n_half) if n_half else np.empty(0, np.int64)
    partner = _kernels.pair_uniform_kernel(n_half, jumps.astype(np.int64))
    return Multigraph(seq.n, owner, partner)


@dataclass(frozen=True)
class SimplicityReport:
    simple: bool
    loops: int
    multi_edge_pairs: int


def is_simple(g: Multigraph) -> SimplicityReport:
    u, v = g.edges()
    loop = u == v
    a, b = np.minimum(u[~loop], v[~loop]), np.maximum(u[~loop], v[~loop])
    _, counts = np.unique(a * np.int64(g.n) + b, return_counts=True)
    loops = int(loop.sum())
    multi = int((counts >= 2).sum())
    return SimplicityReport(loops == 0 and multi == 0, loops, multi)


def sample_simple(seq: DegreeSequence, rng, max_attempts: int = 1000) -> tuple[Multigraph, int]:
    """Rejection sampling: redraw the matching until it has no loops or multi-edges."""
    if max_attempts < 1:
        raise ValueError("max_attempts must be >= 1")
    rng = np.random.default_rng(rng)
    for attempt in range(1, max_attempts + 1):
        g = pair_uniform(seq, rng)
        if is_simple(g).simple:
            return g, attempt
    raise MaxAttemptsExceeded(f"no simple graph in {max_attempts} attempts")


def components_unionfind(g: Multigraph) -> ComponentStats:
    label, edges, ncomp = _kernels.unionfind_labels(g.n, g.half_edge_owner, g.partner)
    return ComponentStats.from_labels(g.degrees(), label, ncomp, edges)


def read_edge_list(path, n: int) -> tuple[np.ndarray, np.ndarray]:
    data = np.loadtxt(Path(path), dtype=np.int64, ndmin=2)
    if data.size and (data.min() < 0 or data.max() >= n):
        raise ValueError("vertex index out of range")
    return data[:, 0], data[:, 1]
