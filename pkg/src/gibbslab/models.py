"""Model definitions: edge configurations, boundary conditions and weights.

Covers the random-cluster (FK) weight, the Potts weight, the loop-model
weight on hexagonal domains and its face-spin counterpart.  Weight functions
accept exact parameter types (Fraction, QSqrt) as well as floats; with exact
inputs the returned weight is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

from .lattice import Domain, HexFaceWindow, LatticeKind
from .unionfind import UnionFind


@dataclass(frozen=True)
class EdgeConfig:
    """Open/closed flags for every edge of a domain, packed into an int.

    Bit i of ``bits`` is the state of edge index i (1 = open).
    """

    domain: Domain
    bits: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.domain.n_edges):
            raise ValueError("bits out of range for %d edges"
                             % self.domain.n_edges)

    def is_open(self, ei: int) -> bool:
        return (self.bits >> ei) & 1 == 1

    @property
    def n_open(self) -> int:
        return self.bits.bit_count()

    def with_edge(self, ei: int, state: bool) -> "EdgeConfig":
        mask = 1 << ei
        bits = self.bits | mask if state else self.bits & ~mask
        return EdgeConfig(self.domain, bits)

    def open_edges(self):
        return [ei for ei in range(self.domain.n_edges) if self.is_open(ei)]

    def to_hex(self) -> str:
        # least-significant bit is edge index 0
        width = (self.domain.n_edges + 3) // 4
        return format(self.bits, "0%dx" % max(width, 1))

    @staticmethod
    def from_hex(domain: Domain, s: str) -> "EdgeConfig":
        return EdgeConfig(domain, int(s, 16))

    @staticmethod
    def empty(domain: Domain) -> "EdgeConfig":
        return EdgeConfig(domain, 0)

    @staticmethod
    def full(domain: Domain) -> "EdgeConfig":
        return EdgeConfig(domain, (1 << domain.n_edges) - 1)


class BoundaryCondition:
    """A partition of the boundary vertex set; singleton blocks implicit.

    ``blocks`` stores only the non-singleton blocks, as frozensets of vertex
    indices.
    """

    __slots__ = ("boundary", "blocks")

    def __init__(self, boundary, blocks=()):
        self.boundary = frozenset(boundary)
        norm = []
        seen = set()
        for b in blocks:
            b = frozenset(b)
            if not b <= self.boundary:
                raise ValueError("block not contained in the boundary set")
            if b & seen:
                raise ValueError("overlapping blocks")
            seen |= b
            if len(b) >= 2:
                norm.append(b)
        self.blocks = frozenset(norm)

    @staticmethod
    def free(boundary) -> "BoundaryCondition":
        return BoundaryCondition(boundary)

    @staticmethod
    def wired(boundary) -> "BoundaryCondition":
        return BoundaryCondition(boundary, [frozenset(boundary)])

    def block_of(self, v):
        for b in self.blocks:
            if v in b:
                return b
        return frozenset([v])

    def all_blocks(self):
        covered = set()
        out = []
        for b in sorted(self.blocks, key=lambda b: sorted(b)):
            out.append(b)
            covered |= b
        for v in sorted(self.boundary - covered):
            out.append(frozenset([v]))
        return out

    def is_free(self):
        return not self.blocks

    def is_wired(self):
        return len(self.boundary) <= 1 or (
            len(self.blocks) == 1 and next(iter(self.blocks)) == self.boundary)

    def __eq__(self, other):
        if not isinstance(other, BoundaryCondition):
            return NotImplemented
        return self.boundary == other.boundary and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.boundary, self.blocks))

    def __repr__(self):
        return "BoundaryCondition(%r, %r)" % (sorted(self.boundary),
                                              [sorted(b) for b in self.blocks])

    def to_json_obj(self):
        return [sorted(b) for b in self.all_blocks()]


def bc_compare(xi: BoundaryCondition, xi2: BoundaryCondition) -> str:
    """Partial order by coarseness: 'coarser' means xi >= xi2 (every xi2
    block sits inside a xi block)."""
    if xi.boundary != xi2.boundary:
        raise ValueError("boundary sets differ")

    def leq(fine, coarse):
        return all(any(b <= c for c in coarse.all_blocks())
                   for b in fine.all_blocks())

    up = leq(xi2, xi)
    down = leq(xi, xi2)
    if up and down:
        return "equal"
    if up:
        return "coarser"
    if down:
        return "finer"
    return "incomparable"


@dataclass(frozen=True)
class FKParams:
    p: object  # real in (0,1); Fraction/QSqrt accepted for exact mode
    q: object  # real >= 1

    def __post_init__(self):
        if not 0 < float(self.p) < 1:
            raise ValueError("p must lie in (0,1)")
        if float(self.q) < 1:
            raise ValueError("q must be >= 1")

    @property
    def beta(self):
        """The edge weight p/(1-p)."""
        return self.p / (1 - self.p)


@dataclass(frozen=True)
class PottsParams:
    T: float
    q: int

    def __post_init__(self):
        if not float(self.T) > 0:
            raise ValueError("T must be positive")
        if not (isinstance(self.q, int) and self.q >= 2):
            raise ValueError("q must be an integer >= 2")


def p_of_T(T: float) -> float:
    """Edge probability matched to Potts temperature: 1 - e^{-1/T}."""
    if T <= 0:
        raise ValueError("T must be positive")
    return 1.0 - math.exp(-1.0 / T)


@dataclass(frozen=True)
class PottsConfig:
    """Spins on all vertices plus the boundary spec tau (0 = free vertex)."""

    domain: Domain
    spins: tuple       # vertex index -> {1..q}
    tau: tuple = None  # vertex index -> {0..q}; None means all free

    def __post_init__(self):
        if len(self.spins) != self.domain.n_vertices:
            raise ValueError("spin vector length mismatch")
        if self.tau is not None:
            if len(self.tau) != self.domain.n_vertices:
                raise ValueError("tau vector length mismatch")
            for i, t in enumerate(self.tau):
                if t != 0 and self.spins[i] != t:
                    raise ValueError("spin disagrees with tau at vertex %d" % i)


def cluster_count(domain: Domain, xi: BoundaryCondition, omega: EdgeConfig,
                  return_uf: bool = False):
    """Number of clusters of omega after fusing each xi-block to a point.

    Isolated vertices count; a fused block counts once even with no open
    edge.
    """
    if omega.domain is not domain:
        raise ValueError("configuration belongs to a different domain")
    uf = UnionFind(domain.n_vertices)
    for b in xi.blocks:
        it = iter(sorted(b))
        first = next(it)
        for v in it:
            uf.union(first, v)
    for ei, (i, j) in enumerate(domain.edges):
        if omega.is_open(ei):
            uf.union(i, j)
    if return_uf:
        return uf.count, uf
    return uf.count


def fk_weight(domain: Domain, xi: BoundaryCondition, params: FKParams,
              omega: EdgeConfig):
    """(p/(1-p))^{open count} * q^{cluster count with xi identifications}."""
    k = cluster_count(domain, xi, omega)
    return params.beta ** omega.n_open * params.q ** k


def fk_log_weight(domain: Domain, xi: BoundaryCondition, params: FKParams,
                  omega: EdgeConfig) -> float:
    k = cluster_count(domain, xi, omega)
    p, q = float(params.p), float(params.q)
    return omega.n_open * (math.log(p) - math.log1p(-p)) + k * math.log(q)


def potts_weight(domain: Domain, params: PottsParams, sigma: PottsConfig):
    """exp(-(1/T) * number of disagreeing adjacent pairs)."""
    if sigma.domain is not domain:
        raise ValueError("configuration belongs to a different domain")
    disagree = sum(1 for i, j in domain.edges
                   if sigma.spins[i] != sigma.spins[j])
    return math.exp(-disagree / float(params.T))


def potts_disagreements(domain: Domain, sigma: PottsConfig) -> int:
    return sum(1 for i, j in domain.edges if sigma.spins[i] != sigma.spins[j])


# ---------------------------------------------------------------------------
# Loop model and spin representation on hexagonal face windows


@dataclass(frozen=True)
class LoopConfig:
    """An even subgraph of the window's hexagonal domain edges."""

    window: HexFaceWindow
    bits: int

    def is_open(self, ei):
        return (self.bits >> ei) & 1 == 1

    @property
    def n_open(self):
        return self.bits.bit_count()


@dataclass(frozen=True)
class FaceSpinConfig:
    """+-1 spins on the interior faces and the exterior ring of a window."""

    window: HexFaceWindow
    spins: dict  # face -> +1 / -1

    def __post_init__(self):
        need = set(self.window.faces) | set(self.window.ring)
        if set(self.spins) != need:
            raise ValueError("spin assignment must cover faces plus ring")
        for s in self.spins.values():
            if s not in (-1, 1):
                raise ValueError("spins must be +-1")


def _check_even(window: HexFaceWindow, bits: int):
    deg = [0] * window.domain.n_vertices
    for ei, (i, j) in enumerate(window.domain.edges):
        if (bits >> ei) & 1:
            deg[i] += 1
            deg[j] += 1
    for vi, d in enumerate(deg):
        if d % 2:
            raise ValueError("odd degree at vertex %r"
                             % (window.domain.vertices[vi],))


def count_loops(loop: LoopConfig) -> int:
    """Number of disjoint cycles in an even-subgraph configuration.

    Every component of an even subgraph with max degree 2 is a single cycle;
    vertices of the hexagonal lattice have degree at most 3, so degree 2 is
    forced at every covered vertex and components are exactly the loops.
    """
    _check_even(loop.window, loop.bits)
    dom = loop.window.domain
    uf = UnionFind(dom.n_vertices)
    covered = set()
    for ei, (i, j) in enumerate(dom.edges):
        if loop.is_open(ei):
            uf.union(i, j)
            covered.add(i)
            covered.add(j)
    roots = {uf.find(v) for v in covered}
    return len(roots)


def loop_weight(loop: LoopConfig, n, x):
    """n^{number of loops} * x^{number of edges}."""
    if float(n) < 0 or float(x) <= 0:
        raise ValueError("need n >= 0 and x > 0")
    return n ** count_loops(loop) * x ** loop.n_open


def spin_weight(sigma: FaceSpinConfig, n, x):
    """n^{finite spin clusters} * x^{disagreeing adjacent face pairs}.

    A spin cluster is finite at window scale when it contains no ring face;
    only face pairs with at least one interior face contribute to either
    count.
    """
    w = sigma.window
    faces = list(w.faces) + list(w.ring)
    index = {f: i for i, f in enumerate(faces)}
    uf = UnionFind(len(faces))
    disagree = 0
    for a, b, _ in w.face_pairs:
        if b not in index:
            continue
        if sigma.spins[a] == sigma.spins[b]:
            uf.union(index[a], index[b])
        else:
            disagree += 1
    ring_roots = {uf.find(index[f]) for f in w.ring}
    finite_roots = set()
    for f in w.faces:
        r = uf.find(index[f])
        if r not in ring_roots:
            finite_roots.add(r)
    return n ** len(finite_roots) * x ** disagree
