"""Planar lattice geometry: domains, boxes, duals, slits, triangle/star.

The primal lattice has vertices {(x,y) integer : x+y even} and edges between
vertices at euclidean distance sqrt(2) (the diagonals of unit squares).  Its
dual is the same lattice translated by (1,0); each primal edge is crossed by
exactly one dual edge.  Coordinates are exact integer pairs throughout.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum

from .unionfind import UnionFind

Vertex = tuple
Edge = tuple  # (u, v) coordinate pair, ordered u < v


class LatticeKind(Enum):
    SQUARE_L = "square-l"
    SQUARE_DUAL = "square-dual"
    TRIANGULAR = "triangular"
    HEXAGONAL = "hexagonal"
    MEDIAL = "medial"


FULL_DEGREE = {
    LatticeKind.SQUARE_L: 4,
    LatticeKind.SQUARE_DUAL: 4,
    LatticeKind.TRIANGULAR: 6,
    LatticeKind.HEXAGONAL: 3,
    LatticeKind.MEDIAL: 4,
}

_DIAG_STEPS = ((1, 1), (1, -1), (-1, 1), (-1, -1))


def is_primal_vertex(v) -> bool:
    return (v[0] + v[1]) % 2 == 0


def is_dual_vertex(v) -> bool:
    return (v[0] + v[1]) % 2 == 1


@dataclass
class Domain:
    """A finite subgraph of a lattice.  Immutable after construction.

    edges are stored as index pairs into the (lexicographically sorted)
    vertex list; the position of an edge in ``edges`` is its edge index.
    """

    lattice: LatticeKind
    vertices: tuple
    edges: tuple
    boundary: frozenset
    terminals: tuple = ()
    _vindex: dict = field(default_factory=dict, repr=False, compare=False)
    _eindex: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        if not self._vindex:
            self._vindex.update({v: i for i, v in enumerate(self.vertices)})
        if not self._eindex:
            self._eindex.update({e: i for i, e in enumerate(self.edges)})

    @property
    def n_vertices(self):
        return len(self.vertices)

    @property
    def n_edges(self):
        return len(self.edges)

    def vertex_index(self, v):
        return self._vindex[v]

    def has_vertex(self, v):
        return v in self._vindex

    def edge_coords(self, ei):
        i, j = self.edges[ei]
        return (self.vertices[i], self.vertices[j])

    def edge_index_of(self, u, v):
        i, j = self._vindex[u], self._vindex[v]
        if i > j:
            i, j = j, i
        return self._eindex.get((i, j))

    def degree(self, vi):
        return sum(1 for i, j in self.edges if i == vi or j == vi)

    def adjacency(self):
        """vertex index -> list of (neighbour index, edge index)."""
        adj = [[] for _ in range(len(self.vertices))]
        for ei, (i, j) in enumerate(self.edges):
            adj[i].append((j, ei))
            adj[j].append((i, ei))
        return adj

    def to_json(self) -> str:
        obj = {
            "lattice": self.lattice.value,
            "vertices": [list(v) for v in self.vertices],
            "edges": [list(e) for e in self.edges],
            "boundary": sorted(self.boundary),
        }
        return json.dumps(obj, separators=(",", ":"))


def domain_from_edges(lattice: LatticeKind, coord_edges, terminals=(),
                      boundary_coords=None) -> Domain:
    """Build a Domain from coordinate edge pairs, boundary by the degree rule.

    A vertex is boundary when its degree in the domain is smaller than the
    full lattice degree, unless an explicit boundary set is given.
    """
    vs = set()
    for u, v in coord_edges:
        vs.add(tuple(u))
        vs.add(tuple(v))
    vertices = tuple(sorted(vs))
    vindex = {v: i for i, v in enumerate(vertices)}
    es = set()
    for u, v in coord_edges:
        i, j = vindex[tuple(u)], vindex[tuple(v)]
        if i > j:
            i, j = j, i
        if i == j:
            raise ValueError("self-loop edge %r" % ((u, v),))
        es.add((i, j))
    edges = tuple(sorted(es))
    deg = [0] * len(vertices)
    for i, j in edges:
        deg[i] += 1
        deg[j] += 1
    full = FULL_DEGREE[lattice]
    if boundary_coords is not None:
        boundary = frozenset(vindex[tuple(v)] for v in boundary_coords)
    else:
        boundary = frozenset(i for i in range(len(vertices)) if deg[i] < full)
    term = tuple(vindex[tuple(t)] for t in terminals)
    return Domain(lattice, vertices, edges, boundary, term)


def _tri_position(v):
    u, w = v
    return (u + 0.5 * w, 0.5 * math.sqrt(3) * w)


def _hex_position(v):
    # brick-wall embedding of the hexagonal lattice, good enough for clipping
    i, j = v
    return (float(i), 1.5 * j + (0.25 if (i + j) % 2 else -0.25))


def build_box(n: int, lattice: LatticeKind = LatticeKind.SQUARE_L) -> Domain:
    """The box of size n: the subgraph spanned by edges inside [-n,n]^2."""
    if n < 1:
        raise ValueError("n must be >= 1")
    edges = []
    if lattice in (LatticeKind.SQUARE_L, LatticeKind.SQUARE_DUAL):
        par = 0 if lattice is LatticeKind.SQUARE_L else 1
        for x in range(-n, n + 1):
            for y in range(-n, n + 1):
                if (x + y) % 2 != par:
                    continue
                for dx, dy in ((1, 1), (1, -1)):
                    u, v = (x, y), (x + dx, y + dy)
                    if abs(v[0]) <= n and abs(v[1]) <= n:
                        edges.append((u, v))
    elif lattice is LatticeKind.TRIANGULAR:
        rng = range(-2 * n, 2 * n + 1)
        steps = ((1, 0), (0, 1), (-1, 1))
        for u in rng:
            for w in rng:
                pu = _tri_position((u, w))
                if not (-n <= pu[0] <= n and -n <= pu[1] <= n):
                    continue
                for s in steps:
                    v = (u + s[0], w + s[1])
                    pv = _tri_position(v)
                    if -n <= pv[0] <= n and -n <= pv[1] <= n:
                        edges.append(((u, w), v))
    elif lattice is LatticeKind.HEXAGONAL:
        rng = range(-2 * n, 2 * n + 1)
        for i in rng:
            for j in rng:
                pu = _hex_position((i, j))
                if not (-n <= pu[0] <= n and -n <= pu[1] <= n):
                    continue
                nbrs = [(i + 1, j)]
                if (i + j) % 2 == 0:
                    nbrs.append((i, j + 1))
                for v in nbrs:
                    pv = _hex_position(v)
                    if -n <= pv[0] <= n and -n <= pv[1] <= n:
                        edges.append(((i, j), v))
    else:
        raise ValueError("build_box unsupported for %s" % lattice)
    return domain_from_edges(lattice, edges)


def enumerate_connected_edge_sets(max_edges: int):
    """All connected edge subsets of the lattice L with up to max_edges
    edges, one representative per translation class, as sorted tuples of
    coordinate edges anchored at the lexicographically least vertex."""

    def canon(edges):
        vs = sorted({v for e in edges for v in e})
        x0, y0 = vs[0]
        return tuple(sorted(
            tuple(sorted(((u[0] - x0, u[1] - y0), (v[0] - x0, v[1] - y0))))
            for u, v in edges))

    seeds = {canon([(((0, 0)), (1, 1))]), canon([((0, 0), (1, -1))])}
    levels = [seeds]
    for _ in range(max_edges - 1):
        nxt = set()
        for es in levels[-1]:
            vs = {v for e in es for v in e}
            for v in vs:
                for dx, dy in ((1, 1), (-1, 1), (-1, -1), (1, -1)):
                    e = tuple(sorted((v, (v[0] + dx, v[1] + dy))))
                    if e not in es:
                        nxt.add(canon(list(es) + [e]))
        levels.append(nxt)
    out = []
    for lv in levels:
        out.extend(sorted(lv))
    return out


def dual_edge(e: Edge) -> Edge:
    """The unique dual edge crossing a primal edge (or back again)."""
    (ux, uy), (vx, vy) = e
    mx2, my2 = ux + vx, uy + vy  # doubled midpoint
    # rotate the edge vector by 90 degrees about the midpoint
    dx, dy = vx - ux, vy - uy
    a = ((mx2 - (-dy)) // 2, (my2 - dx) // 2)
    b = ((mx2 + (-dy)) // 2, (my2 + dx) // 2)
    return (a, b) if a < b else (b, a)


def face_centers(domain: Domain):
    """Dual vertices all four of whose incident primal edges are in domain."""
    out = []
    seen = set()
    for ei in range(domain.n_edges):
        u, v = domain.edge_coords(ei)
        a, b = dual_edge((u, v))
        for c in (a, b):
            if c in seen:
                continue
            seen.add(c)
            corners = [(c[0] - 1, c[1]), (c[0], c[1] + 1),
                       (c[0] + 1, c[1]), (c[0], c[1] - 1)]
            ok = True
            for k in range(4):
                p, q = corners[k], corners[(k + 1) % 4]
                if not (domain.has_vertex(p) and domain.has_vertex(q)):
                    ok = False
                    break
                if domain.edge_index_of(p, q) is None:
                    ok = False
                    break
            if ok:
                out.append(c)
    return sorted(out)


def is_simply_connected(domain: Domain) -> bool:
    """Connected, and every independent cycle bounds a face of the domain."""
    uf = UnionFind(domain.n_vertices)
    for i, j in domain.edges:
        uf.union(i, j)
    if uf.count != 1:
        return False
    rank = domain.n_edges - domain.n_vertices + uf.count
    return rank == len(face_centers(domain))


def dual_domain(domain: Domain) -> Domain:
    """The dual of a simply connected primal domain; the e <-> e* bijection
    is exposed through dual_edge_map."""
    if domain.lattice is not LatticeKind.SQUARE_L:
        raise ValueError("dual_domain requires a primal square-lattice domain")
    if not is_simply_connected(domain):
        raise ValueError("unsupported topology: domain is not simply connected")
    coord_edges = [dual_edge(domain.edge_coords(ei))
                   for ei in range(domain.n_edges)]
    dual = domain_from_edges(LatticeKind.SQUARE_DUAL, coord_edges)
    # sanity: construction must preserve the edge count
    assert dual.n_edges == domain.n_edges
    return dual


def dual_edge_map(domain: Domain, dual: Domain):
    """edge index in domain -> edge index in its dual."""
    out = []
    for ei in range(domain.n_edges):
        a, b = dual_edge(domain.edge_coords(ei))
        out.append(dual.edge_index_of(a, b))
    return out


def build_face_block(k: int) -> Domain:
    """A simply connected block of k x k faces of the primal lattice.

    Face centers sit at dual vertices (2a+b-..., arranged in a k x k diamond
    pattern anchored at (1,0)); for k=2 this is the 12-edge, 9-vertex block.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    centers = []
    for a in range(k):
        for b in range(k):
            centers.append((1 + a + b, a - b))
    edges = []
    for c in centers:
        corners = [(c[0] - 1, c[1]), (c[0], c[1] + 1),
                   (c[0] + 1, c[1]), (c[0], c[1] - 1)]
        for t in range(4):
            edges.append((corners[t], corners[(t + 1) % 4]))
    return domain_from_edges(LatticeKind.SQUARE_L, edges)


def build_path(m: int) -> Domain:
    """A path of m primal edges along one diagonal."""
    edges = [((t, t), (t + 1, t + 1)) for t in range(m)]
    return domain_from_edges(LatticeKind.SQUARE_L, edges)


def build_triangle_star():
    """The triangle on terminals {A,B,C} and the star with centre O.

    Both expose .terminals in the fixed order (A, B, C); labels agree by
    position.
    """
    tri = domain_from_edges(
        LatticeKind.TRIANGULAR,
        [((0, 0), (1, 0)), ((1, 0), (0, 1)), ((0, 1), (0, 0))],
        terminals=((0, 0), (1, 0), (0, 1)),
    )
    star = domain_from_edges(
        LatticeKind.HEXAGONAL,
        [((0, 0), (1, 0)), ((0, 0), (-1, 0)), ((0, 0), (0, 1))],
        terminals=((1, 0), (-1, 0), (0, 1)),
    )
    return tri, star


# ---------------------------------------------------------------------------
# Slit domains


@dataclass
class SlitDomain:
    """The plane glued along [-M,N] x {0} only, truncated to the box of
    radius R.  Axis vertices outside the gluing segment are split into an
    upper copy (x, 0, 1) and a lower copy (x, 0, -1)."""

    M: int
    N: int
    R: int
    domain: Domain
    boundary_plus: frozenset  # upper split copies (vertex indices)
    boundary_minus: frozenset
    boundary_outer: frozenset


def build_slit(M: int, N: int, R: int) -> SlitDomain:
    if M % 2 or N % 2:
        raise ValueError("M and N must be even")
    if not (0 <= M <= R and 0 <= N <= R):
        raise ValueError("need 0 <= M,N <= R")

    def split(x):
        return x % 2 == 0 and (x < -M or x > N)

    def map_vertex(v, other):
        x, y = v
        if y == 0 and split(x):
            return (x, 0, 1) if other[1] > 0 else (x, 0, -1)
        return v

    box = build_box(R, LatticeKind.SQUARE_L)
    edges = []
    for ei in range(box.n_edges):
        u, v = box.edge_coords(ei)
        edges.append((map_vertex(u, v), map_vertex(v, u)))
    dom = domain_from_edges(LatticeKind.SQUARE_L, edges)
    plus, minus = set(), set()
    for i, v in enumerate(dom.vertices):
        if len(v) == 3:
            (plus if v[2] == 1 else minus).add(i)
    outer = frozenset(dom.boundary) - plus - minus
    return SlitDomain(M, N, R, dom, frozenset(plus), frozenset(minus), outer)


def slit_dobrushin_blocks(slit: SlitDomain, outer_rule: str = "wired-split"):
    """The wired block of the Dobrushin boundary condition on a slit domain.

    ``wired-split`` ties the outer truncation boundary in the upper half-plane
    to the wired side (as induced by the all-open upper half-plane
    configuration); ``free`` leaves the outer boundary free.  The choice
    washes out as R grows.
    """
    wired = set(slit.boundary_plus)
    if outer_rule == "wired-split":
        for i in slit.boundary_outer:
            v = slit.domain.vertices[i]
            if v[1] >= 0:
                wired.add(i)
    elif outer_rule != "free":
        raise ValueError("unknown outer_rule %r" % outer_rule)
    return frozenset(wired)


# ---------------------------------------------------------------------------
# Hexagonal face windows (for the loop model and its spin representation)

_HEX_FACE_NEIGHBOURS = ((2, 0), (-2, 0), (1, 1), (-1, 1), (1, -1), (-1, -1))


def hex_face_shared_edge(f, g):
    """The hexagonal-lattice edge shared by two adjacent faces.

    Faces are anchored at their bottom-left vertex (i, j) with i+j even.
    """
    (i, j), (k, l) = f, g
    d = (k - i, l - j)
    if d == (2, 0):
        return ((i + 2, j), (i + 2, j + 1))
    if d == (-2, 0):
        return ((i, j), (i, j + 1))
    if d == (1, 1):
        return ((i + 1, j + 1), (i + 2, j + 1))
    if d == (-1, 1):
        return ((i, j + 1), (i + 1, j + 1))
    if d == (1, -1):
        return ((i + 1, j), (i + 2, j))
    if d == (-1, -1):
        return ((i, j), (i + 1, j))
    raise ValueError("faces %r and %r are not adjacent" % (f, g))


def hex_face_edges(f):
    i, j = f
    return [
        ((i, j), (i + 1, j)), ((i + 1, j), (i + 2, j)),
        ((i, j + 1), (i + 1, j + 1)), ((i + 1, j + 1), (i + 2, j + 1)),
        ((i, j), (i, j + 1)), ((i + 2, j), (i + 2, j + 1)),
    ]


@dataclass
class HexFaceWindow:
    """A window of hexagonal faces plus its ring of exterior faces.

    Spin configurations live on faces (interior free, ring fixed by the
    boundary data); loop configurations live on the lattice edges separating
    face pairs at least one of which is interior.
    """

    faces: tuple       # interior faces, sorted
    ring: tuple        # exterior adjacent faces, sorted
    domain: Domain     # hexagonal-lattice Domain spanned by the window edges
    face_pairs: tuple  # (face_a, face_b, edge index) per window edge

    @property
    def all_faces(self):
        return self.faces + self.ring

    def face_adjacent_pairs(self):
        """All adjacent pairs within faces+ring with at least one interior."""
        return [(a, b) for a, b, _ in self.face_pairs]


def build_hex_window(faces) -> HexFaceWindow:
    faces = tuple(sorted(tuple(f) for f in faces))
    fset = set(faces)
    for i, j in faces:
        if (i + j) % 2:
            raise ValueError("face anchors need even coordinate sum")
    ring = set()
    pairs = []
    for f in faces:
        for d in _HEX_FACE_NEIGHBOURS:
            g = (f[0] + d[0], f[1] + d[1])
            if g not in fset:
                ring.add(g)
            if g not in fset or g > f:
                pairs.append((f, g))
    edges = [hex_face_shared_edge(a, b) for a, b in pairs]
    dom = domain_from_edges(LatticeKind.HEXAGONAL, edges)
    fp = []
    for (a, b), e in zip(pairs, edges):
        u, v = tuple(e[0]), tuple(e[1])
        fp.append((a, b, dom.edge_index_of(u, v)))
    return HexFaceWindow(faces, tuple(sorted(ring)), dom, tuple(fp))
