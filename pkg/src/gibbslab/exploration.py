"""Connectivity analytics and exploration constructions.

Induced boundary conditions from exterior configurations, annulus crossing
clusters, the medial interface walk, shielding arcs above a box on a
duplicated pair of samples, the scale-ladder duplication scan, and the
good-point probe on slit domains.

Everywhere "infinity" is replaced by the window frame; results that depend
on this surrogate are marked as frame-based in their reports.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import (
    Domain,
    LatticeKind,
    SlitDomain,
    build_box,
    domain_from_edges,
    dual_edge,
    slit_dobrushin_blocks,
)
from .models import BoundaryCondition, EdgeConfig, bc_compare
from .unionfind import UnionFind
from . import kernels
from .sampler import ESChain, make_rng

# ---------------------------------------------------------------------------
# Induced boundary conditions and annulus clusters


def induced_bc(window: Domain, omega: EdgeConfig, D: Domain,
               frame_rule: str = "wired-at-frame") -> BoundaryCondition:
    """Boundary condition induced on D by the configuration outside D.

    Two boundary vertices of D share a block iff they are connected by open
    edges of the window that are not edges of D; with the wired-at-frame
    rule, every cluster touching the window frame is treated as one.
    """
    if frame_rule not in ("wired-at-frame", "free-at-frame"):
        raise ValueError("unknown frame rule %r" % frame_rule)
    d_edges = {frozenset(D.edge_coords(k)) for k in range(D.n_edges)}
    uf = UnionFind(window.n_vertices + 1)
    frame_node = window.n_vertices
    if frame_rule == "wired-at-frame":
        for v in window.boundary:
            uf.union(frame_node, v)
    for k, (i, j) in enumerate(window.edges):
        if not omega.is_open(k):
            continue
        u, v = window.vertices[i], window.vertices[j]
        if frozenset((u, v)) in d_edges:
            continue
        uf.union(i, j)
    groups = {}
    for bi in sorted(D.boundary):
        coord = D.vertices[bi]
        root = uf.find(window.vertex_index(coord))
        groups.setdefault(root, []).append(bi)
    blocks = [frozenset(g) for g in groups.values() if len(g) >= 2]
    return BoundaryCondition(frozenset(D.boundary), blocks)


def count_annulus_clusters(window: Domain, omega: EdgeConfig, n: int) -> int:
    """Distinct open clusters within the box of size 2n that meet both the
    box of size n and the boundary of the box of size 2n."""
    outer = build_box(2 * n)
    if not all(window.has_vertex(v) for v in outer.vertices):
        raise ValueError("window does not contain the box of size 2n")
    outer_boundary = {outer.vertices[i] for i in outer.boundary}
    uf = UnionFind(window.n_vertices)
    for k, (i, j) in enumerate(window.edges):
        if not omega.is_open(k):
            continue
        u, v = window.vertices[i], window.vertices[j]
        if max(abs(u[0]), abs(u[1])) <= 2 * n and \
                max(abs(v[0]), abs(v[1])) <= 2 * n:
            uf.union(i, j)
    inner_roots = set()
    outer_roots = set()
    for i, v in enumerate(window.vertices):
        if max(abs(v[0]), abs(v[1])) <= n:
            inner_roots.add(uf.find(i))
        if v in outer_boundary:
            outer_roots.add(uf.find(i))
    return len(inner_roots & outer_roots)


# ---------------------------------------------------------------------------
# Medial interface walk


@dataclass
class InterfaceTrace:
    points: tuple        # doubled medial coordinates along the walk
    records: tuple       # (medial point, primal edge, primal open) per step
    t_h: int             # first step index at height >= h, or -1
    m_h: int             # even integer closest to the x-coordinate there
    exited: bool


_MEDIAL_STEPS = {"N": (0, 2), "E": (2, 0), "S": (0, -2), "W": (-2, 0)}
_OPPOSITE = {"N": "S", "S": "N", "E": "W", "W": "E"}
# pairing of medial half-edges at a vertex, by the direction of whichever of
# the two crossing lattice edges is open there
_PAIR_NE = {"E": "S", "S": "E", "W": "N", "N": "W"}   # open edge along (1,1)
_PAIR_SE = {"E": "N", "N": "E", "W": "S", "S": "W"}   # open edge along (1,-1)


def _medial_primal_edge(m):
    """The primal edge whose midpoint is the medial point m (doubled)."""
    a, b = (m[0] - 1) // 2, (m[1] - 1) // 2
    if (a + b) % 2 == 0:
        return ((a, b), (a + 1, b + 1))
    return ((a, b + 1), (a + 1, b))


def trace_interface(window: Domain, omega: EdgeConfig, start_x: int,
                    h: int = None, max_steps: int = 10 ** 6) -> InterfaceTrace:
    """Walk the medial lattice from the axis crossing at start_x + 1/2,
    heading up, keeping open primal edges on one side and open dual edges on
    the other, until the walk leaves the window."""
    if start_x % 2:
        raise ValueError("start_x must be even (a primal axis vertex)")
    m = (2 * start_x + 1, 1)
    heading = "N"
    points = [(2 * start_x + 1, -1), m]
    records = []
    t_h = -1
    m_h = 0
    exited = False
    seen = {(m, heading)}
    for step in range(max_steps):
        e = _medial_primal_edge(m)
        ei = window.edge_index_of(*e) if (
            window.has_vertex(e[0]) and window.has_vertex(e[1])) else None
        if ei is None:
            exited = True
            break
        is_open = omega.is_open(ei)
        a = (m[0] - 1) // 2
        b = (m[1] - 1) // 2
        ne_open = is_open == ((a + b) % 2 == 0)
        pair = _PAIR_NE if ne_open else _PAIR_SE
        records.append((m, e, is_open))
        if h is not None and t_h < 0 and m[1] >= 2 * h:
            t_h = step
            m_h = a if a % 2 == 0 else a + 1
        heading = pair[_OPPOSITE[heading]]
        dx, dy = _MEDIAL_STEPS[heading]
        m = (m[0] + dx, m[1] + dy)
        points.append(m)
        if (m, heading) in seen:  # closed loop: the walk cannot exit
            break
        seen.add((m, heading))
    return InterfaceTrace(tuple(points), tuple(records), t_h, m_h, exited)


# ---------------------------------------------------------------------------
# Shielding arcs


@dataclass
class DuplicatedState:
    """Two samples on the same window; omega_prime plays the role of the
    coarser-boundary (wired-dominant) sample, translated by translation."""

    domain: Domain
    omega: EdgeConfig
    omega_prime: EdgeConfig
    translation: tuple = (0, 0)

    def __post_init__(self):
        if (self.translation[0] + self.translation[1]) % 2:
            raise ValueError("translation must preserve the lattice")


@dataclass
class ShieldingArc:
    case: str                 # a | b | c | d
    primal_edges: tuple       # open in omega_prime
    dual_edges: tuple         # dual pairs whose crossing edge is closed in omega
    junction: tuple           # (primal vertex, dual vertex) or None
    endpoints: tuple          # (left axis point, right axis point)
    polyline: tuple           # doubled coordinates from left to right
    support_edges: tuple = () # remaining explored primal path (cases c, d)

    @property
    def primal_vertices(self):
        vs = set()
        for u, v in self.primal_edges:
            vs.add(u)
            vs.add(v)
        return vs

    @property
    def crossed_edges(self):
        return {frozenset(dual_edge(d)) for d in self.dual_edges}


_DIRS = ((1, 1), (-1, 1), (-1, -1), (1, -1))  # counterclockwise
_TURN_LEFT = (1, 0, 3, 2)
_TURN_RIGHT = (3, 0, 1, 2)


def _chiral_dfs(start, incoming_idx, moves_fn, is_target, chirality):
    """Deterministic depth-first search whose neighbor order encodes the
    geometric chirality (left-hand or right-hand rule); returns the tree
    path to the first target reached, or None."""
    order = _TURN_LEFT if chirality == "left" else _TURN_RIGHT
    visited = {start}
    parent = {start: None}
    incoming = {start: incoming_idx}
    iters = {start: iter(order)}
    stack = [start]
    while stack:
        v = stack[-1]
        advanced = False
        for rel in iters[v]:
            d = (incoming[v] + rel) % 4
            w = moves_fn(v, d)
            if w is None or w in visited:
                continue
            visited.add(w)
            parent[w] = v
            incoming[w] = d
            if is_target(w):
                path = [w]
                while parent[path[-1]] is not None:
                    path.append(parent[path[-1]])
                path.reverse()
                return path
            stack.append(w)
            iters[w] = iter(order)
            advanced = True
            break
        if not advanced:
            stack.pop()
    return None


def _path_edges(path):
    return tuple(tuple(sorted((path[t], path[t + 1])))
                 for t in range(len(path) - 1))


class _Geometry:
    """Shared lookups for arc exploration on one window."""

    def __init__(self, state: DuplicatedState, n: int):
        self.window = state.domain
        self.state = state
        self.n = n
        self.frame = {self.window.vertices[i] for i in self.window.boundary}

    def in_lambda(self, v):
        return max(abs(v[0]), abs(v[1])) <= self.n

    def primal_open(self, u, v, config):
        w = self.window
        if not (w.has_vertex(u) and w.has_vertex(v)):
            return False
        ei = w.edge_index_of(u, v)
        return ei is not None and config.is_open(ei)

    def dual_open(self, a, b):
        """Dual edge open means its crossing edge is closed in omega."""
        u, v = dual_edge((a, b))
        w = self.window
        if not (w.has_vertex(u) and w.has_vertex(v)):
            return False
        ei = w.edge_index_of(u, v)
        return ei is not None and not self.state.omega.is_open(ei)


def _explore_upper(state: DuplicatedState, n, x, y, h, m, case):
    """The upper-half exploration for one case; see explore_shielding_arc."""
    geo = _Geometry(state, n)
    w = state.domain
    if abs(x) <= n or abs(y) <= n or not (x < 0 < y):
        raise ValueError("need x < 0 < y outside the box of size n")
    if h is None:
        h = n + 2
    if m is None:
        m = -n
    if h < n:
        raise ValueError("need h >= n")
    omega_p = state.omega_prime

    def primal_ok(v, exclude=()):
        return (v[1] >= 0 and not geo.in_lambda(v) and v not in exclude
                and w.has_vertex(v))

    def dual_ok(v, exclude=()):
        return v[1] >= 0 and not geo.in_lambda(v) and v not in exclude

    def primal_moves(exclude=()):
        def moves(v, d):
            t = (v[0] + _DIRS[d][0], v[1] + _DIRS[d][1])
            if not primal_ok(t, exclude):
                return None
            if not geo.primal_open(v, t, omega_p):
                return None
            return t
        return moves

    def dual_moves(exclude=()):
        def moves(v, d):
            t = (v[0] + _DIRS[d][0], v[1] + _DIRS[d][1])
            if not dual_ok(t, exclude):
                return None
            if not geo.dual_open(v, t):
                return None
            return t
        return moves

    if case == "a":
        path = _chiral_dfs((x, 0), 0, primal_moves(), lambda v: v == (y, 0),
                           "left")
        if path is None:
            return None
        edges = _path_edges(path)
        return ShieldingArc("a", edges, (), None, ((x, 0), (y, 0)),
                            tuple((2 * v[0], 2 * v[1]) for v in path))

    if case == "b":
        path = _chiral_dfs((x + 1, 0), 0, dual_moves(),
                           lambda v: v == (y + 1, 0), "left")
        if path is None:
            return None
        edges = _path_edges(path)
        return ShieldingArc("b", (), edges, None, ((x + 1, 0), (y + 1, 0)),
                            tuple((2 * v[0], 2 * v[1]) for v in path))

    if case in ("c", "d"):
        if case == "c":
            p_start, d_start = (x, 0), (y + 1, 0)
            p_chir, d_chir = "left", "right"

            def step1_target(v):
                return v[1] == h and v[0] >= m
        else:
            p_start, d_start = (y, 0), (x + 1, 0)
            p_chir, d_chir = "right", "left"

            def step1_target(v):
                return v[1] == h and v[0] <= -m
        # the opposite arc endpoints are off limits to each exploration
        excl_p = {d_start, (y, 0) if case == "c" else (x, 0)} - {p_start}
        excl_d = {(x + 1, 0) if case == "c" else (y + 1, 0)}

        def step1_ok(v, d):
            t = (v[0] + _DIRS[d][0], v[1] + _DIRS[d][1])
            if t[1] > h or not primal_ok(t, excl_p):
                return None
            if not geo.primal_open(v, t, omega_p):
                return None
            return t

        seg1 = _chiral_dfs(p_start, 0, step1_ok, step1_target, p_chir)
        if seg1 is None:
            return None
        # continue the extremal exploration to the frame (infinity surrogate)
        used = set(seg1[:-1])

        def step2_ok(v, d):
            t = (v[0] + _DIRS[d][0], v[1] + _DIRS[d][1])
            if t in used or not primal_ok(t, excl_p):
                return None
            if not geo.primal_open(v, t, omega_p):
                return None
            return t

        seg2 = _chiral_dfs(seg1[-1], 0, step2_ok, lambda v: v in geo.frame,
                           p_chir)
        if seg2 is None:
            return None
        full_path = seg1 + seg2[1:]
        explored = {}
        for t, e in enumerate(_path_edges(full_path)):
            explored[frozenset(e)] = t
        # extremal dual path ending at a previously explored edge
        junction_box = {}

        def dual_step(v, d):
            t = (v[0] + _DIRS[d][0], v[1] + _DIRS[d][1])
            cross = frozenset(dual_edge(tuple(sorted((v, t)))))
            if geo.dual_open(v, t) and cross in explored:
                junction_box[t] = (v, cross)
                return t  # sentinel move: terminate at the junction
            if not dual_ok(t, excl_d):
                return None
            if not geo.dual_open(v, t):
                return None
            return t

        dseg = _chiral_dfs(d_start, 0, dual_step,
                           lambda v: v in junction_box, d_chir)
        if dseg is None:
            return None
        a_vertex, cross = junction_box[dseg[-1]]
        dseg = dseg[:-1]  # the sentinel vertex is across the junction edge
        if not dseg:
            dseg = [d_start]
        t_j = explored[cross]
        u_vertex = full_path[t_j]
        prefix = full_path[: t_j + 1]
        support = _path_edges(full_path[t_j:])
        primal_edges = _path_edges(prefix)
        dual_edges = _path_edges(dseg)
        if not primal_edges or not dual_edges:
            return None
        if case == "c":
            pts = [(2 * v[0], 2 * v[1]) for v in prefix]
            pts.append((2 * a_vertex[0], 2 * a_vertex[1]))
            pts.extend((2 * v[0], 2 * v[1]) for v in reversed(dseg[:-1]))
            endpoints = (p_start, d_start)
        else:
            pts = [(2 * v[0], 2 * v[1]) for v in dseg]
            pts.append((2 * u_vertex[0], 2 * u_vertex[1]))
            pts.extend((2 * v[0], 2 * v[1]) for v in reversed(prefix[:-1]))
            endpoints = (d_start, p_start)
        junction = (u_vertex, a_vertex)
        return ShieldingArc(case, primal_edges, dual_edges, junction,
                            endpoints, tuple(pts), support)

    raise ValueError("unknown case %r" % case)


def reflect_vertical(window: Domain, omega: EdgeConfig) -> EdgeConfig:
    """Reflect a configuration across the horizontal axis (box windows are
    closed under this symmetry)."""
    bits = 0
    for k in range(window.n_edges):
        u, v = window.edge_coords(k)
        ru, rv = (u[0], -u[1]), (v[0], -v[1])
        rk = window.edge_index_of(*sorted((ru, rv)))
        if rk is None:
            raise ValueError("window not symmetric under reflection")
        if omega.is_open(k):
            bits |= 1 << rk
    return EdgeConfig(window, bits)


def _reflect_arc(arc: ShieldingArc) -> ShieldingArc:
    def rv(v):
        return (v[0], -v[1])

    def re(e):
        return tuple(sorted((rv(e[0]), rv(e[1]))))

    return ShieldingArc(
        arc.case,
        tuple(re(e) for e in arc.primal_edges),
        tuple(re(e) for e in arc.dual_edges),
        None if arc.junction is None else (rv(arc.junction[0]),
                                           rv(arc.junction[1])),
        tuple(rv(p) for p in arc.endpoints),
        tuple((p[0], -p[1]) for p in arc.polyline),
        tuple(re(e) for e in arc.support_edges),
    )


def explore_shielding_arc(state: DuplicatedState, n, x, y, h=None, m=None,
                          case="a", half="upper"):
    """Search for a shielding arc above (or below) the box of size n between
    the axis points x < 0 < y.

    Case a: a path of omega_prime-open edges from (x,0) to (y,0).
    Case b: a path of open dual edges (crossing edges closed in omega) from
    (x+1,0) to (y+1,0).
    Cases c and d: a mixed arc built in three steps -- an extremal
    omega_prime-connection from one axis endpoint to height h, its
    continuation to the window frame, and an extremal dual path from the
    other side ending at a previously explored edge (the junction).
    Returns None when the exploration fails.
    """
    if half == "upper":
        return _explore_upper(state, n, x, y, h, m, case)
    if half != "lower":
        raise ValueError("half must be 'upper' or 'lower'")
    refl = DuplicatedState(state.domain,
                           reflect_vertical(state.domain, state.omega),
                           reflect_vertical(state.domain, state.omega_prime),
                           state.translation)
    arc = _explore_upper(refl, n, x, y, h, m, case)
    return None if arc is None else _reflect_arc(arc)


def check_arc_invariants(arc: ShieldingArc, state: DuplicatedState, n, x, y,
                         half="upper"):
    """Verify every structural requirement of a shielding arc; returns a
    list of failure strings (empty when all hold)."""
    fails = []
    geo = _Geometry(state, n)
    w = state.domain
    sign = 1 if half == "upper" else -1
    for u, v in arc.primal_edges:
        ei = w.edge_index_of(u, v) if w.has_vertex(u) and w.has_vertex(v) \
            else None
        if ei is None or not state.omega_prime.is_open(ei):
            fails.append("primal arc edge %r not open in omega_prime"
                         % ((u, v),))
    for d in arc.dual_edges:
        u, v = dual_edge(d)
        ei = w.edge_index_of(u, v) if w.has_vertex(u) and w.has_vertex(v) \
            else None
        if ei is None or state.omega.is_open(ei):
            fails.append("dual arc edge %r not open in the dual of omega"
                         % (d,))
    for e in arc.primal_edges:
        for v in e:
            if geo.in_lambda(v):
                fails.append("arc vertex %r inside the box" % (v,))
    for e in arc.dual_edges:
        # dual endpoints may sit on the box contour, never strictly inside
        for v in e:
            if max(abs(v[0]), abs(v[1])) < n:
                fails.append("dual arc vertex %r inside the box" % (v,))
    if arc.case in ("c", "d"):
        if not arc.primal_edges or not arc.dual_edges or arc.junction is None:
            fails.append("mixed arc missing a segment or the junction")
    # separation: from the covered axis segment, the frame is unreachable in
    # the half-plane once arc vertices and crossed edges are removed
    blocked_v = arc.primal_vertices
    blocked_e = arc.crossed_edges
    start = [(sx, 0) for sx in range(x + 2, y - 1, 2)
             if w.has_vertex((sx, 0)) and (sx, 0) not in blocked_v]
    adj = {}
    for k, (i, j) in enumerate(w.edges):
        u, v = w.vertices[i], w.vertices[j]
        if sign * u[1] < 0 or sign * v[1] < 0:
            continue
        if frozenset((u, v)) in blocked_e:
            continue
        if u in blocked_v or v in blocked_v:
            continue
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    seen = set(start)
    stack = list(start)
    reached_frame = False
    while stack:
        v = stack.pop()
        if v in geo.frame:
            reached_frame = True
            break
        for t in adj.get(v, ()):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    if reached_frame:
        fails.append("arc does not separate the axis segment from the frame")
    # mixed cases: the primal segment reaches the frame in omega_prime
    # restricted to the half-plane, off the dual segment
    if arc.case in ("c", "d") and not fails:
        adj2 = {}
        for k, (i, j) in enumerate(w.edges):
            if not state.omega_prime.is_open(k):
                continue
            u, v = w.vertices[i], w.vertices[j]
            if sign * u[1] < 0 or sign * v[1] < 0:
                continue
            if frozenset((u, v)) in blocked_e:
                continue
            adj2.setdefault(u, []).append(v)
            adj2.setdefault(v, []).append(u)
        src = arc.junction[0]
        seen = {src}
        stack = [src]
        ok = False
        while stack:
            v = stack.pop()
            if v in geo.frame:
                ok = True
                break
            for t in adj2.get(v, ()):
                if t not in seen:
                    seen.add(t)
                    stack.append(t)
        if not ok:
            fails.append("primal segment not connected to the frame in "
                         "omega_prime off the dual segment")
    return fails


def arc_monotonicity_check(state: DuplicatedState, n, x, y, h=None, m=None,
                           case="c", trials=100, closures_per_trial=1,
                           seed=0):
    """Arc existence is decreasing in omega: with omega_prime fixed and
    promising, closing extra omega-edges must never destroy the arc."""
    base = explore_shielding_arc(state, n, x, y, h, m, case)
    if base is None:
        return {"base_found": False, "violations": 0, "trials": 0}
    rng = make_rng(seed, 9)
    open_edges = state.omega.open_edges()
    violations = 0
    done = 0
    for _ in range(trials):
        if not open_edges:
            break
        bits = state.omega.bits
        for _ in range(closures_per_trial):
            k = open_edges[int(rng.integers(0, len(open_edges)))]
            bits &= ~(1 << k)
        mod = DuplicatedState(state.domain, EdgeConfig(state.domain, bits),
                              state.omega_prime, state.translation)
        arc = explore_shielding_arc(mod, n, x, y, h, m, case)
        done += 1
        if arc is None:
            violations += 1
    return {"base_found": True, "violations": violations, "trials": done}


# ---------------------------------------------------------------------------
# Enclosed domain and the duplication scan


def _on_segment(p, a, b):
    cross = (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0])
    if cross != 0:
        return False
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and \
        min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def _point_in_polygon(p, poly):
    """Exact even-odd test at integer (doubled) coordinates; returns one of
    'in', 'on', 'out'.  Query points have odd coordinates so the ray through
    them never meets a polygon vertex."""
    px, py = p
    crossings = 0
    npts = len(poly)
    for t in range(npts):
        a = poly[t]
        b = poly[(t + 1) % npts]
        if a == b:
            continue
        if _on_segment(p, a, b):
            return "on"
        y1, y2 = a[1], b[1]
        if (y1 < py) == (y2 < py):
            continue
        cross = (b[0] - a[0]) * (py - y1) - (y2 - y1) * (px - a[0])
        if (cross > 0) == (y2 > y1):
            crossings += 1
    return "in" if crossings % 2 else "out"


def enclosed_domain(window: Domain, upper: ShieldingArc,
                    lower: ShieldingArc) -> Domain:
    """The domain delimited by an upper and a lower arc: all window edges
    whose midpoint lies strictly inside the closed arc polygon, excluding
    arc and exploration-support edges."""
    poly = list(upper.polyline) + list(reversed(lower.polyline))
    dedup = []
    for p in poly:
        if not dedup or dedup[-1] != p:
            dedup.append(p)
    if len(dedup) > 1 and dedup[0] == dedup[-1]:
        dedup.pop()
    excluded = set()
    for arc in (upper, lower):
        excluded.update(frozenset(e) for e in arc.primal_edges)
        excluded.update(arc.crossed_edges)
        excluded.update(frozenset(e) for e in arc.support_edges)
    inside = []
    for k in range(window.n_edges):
        u, v = window.edge_coords(k)
        if frozenset((u, v)) in excluded:
            continue
        mid = (u[0] + v[0], u[1] + v[1])
        if _point_in_polygon(mid, dedup) == "in":
            inside.append((u, v))
    if not inside:
        raise ValueError("enclosed domain is empty")
    return domain_from_edges(LatticeKind.SQUARE_L, inside)


def translate_config(window: Domain, omega: EdgeConfig,
                     translation) -> EdgeConfig:
    """Shift a configuration; edges whose image leaves the window are
    dropped and edges entering from outside come in closed."""
    tx, ty = translation
    bits = 0
    for k in range(window.n_edges):
        if not omega.is_open(k):
            continue
        u, v = window.edge_coords(k)
        tu, tv = (u[0] + tx, u[1] + ty), (v[0] + tx, v[1] + ty)
        if window.has_vertex(tu) and window.has_vertex(tv):
            tk = window.edge_index_of(*sorted((tu, tv)))
            if tk is not None:
                bits |= 1 << tk
    return EdgeConfig(window, bits)


@dataclass
class ScanRow:
    trial: int
    scale: int
    arc_found: bool
    case_upper: str
    case_lower: str
    n_arcs: int
    bc_dominates: bool
    invariant_failures: int


def _find_arc(state, n, x, y, half, cases=("a", "b", "c", "d")):
    for case in cases:
        arc = explore_shielding_arc(state, n, x, y, case=case, half=half)
        if arc is not None:
            return arc
    return None


def run_duplication_scan(R: int, p: float, q: int, ladder, trials: int,
                         seed: int = 0, translation=(2, 0),
                         sweeps_between: int = 20, burn_in: int = 200,
                         cases=("a", "b", "c", "d")):
    """Scale-ladder experiment on a duplicated pair of samples.

    omega is drawn from the free-boundary chain and omega_prime from the
    wired-boundary chain (translated); at each scale an upper and a lower
    shielding arc are searched, the enclosed domain is formed, and the
    induced boundary conditions are compared: the scan reports how often
    the condition induced by omega is dominated by the one induced by
    omega_prime, together with per-scale arc frequencies.
    """
    window = build_box(R)
    ladder = sorted(ladder)
    tau_wired = [0] * window.n_vertices
    for i in window.boundary:
        tau_wired[i] = 1
    chain_w = ESChain(window, q, p, tau_wired, seed, init=1, stream=1)
    chain_f = ESChain(window, q, p, None, seed, init="random", stream=2)
    for _ in range(burn_in):
        chain_w.sweep()
        chain_f.sweep()
    rows = []
    for trial in range(trials):
        for _ in range(sweeps_between):
            chain_w.sweep()
            chain_f.sweep()
        omega = chain_f.config()
        omega_p = translate_config(window, chain_w.config(), translation)
        state = DuplicatedState(window, omega, omega_p, translation)
        for n in ladder:
            # nearest primal axis vertices strictly outside the box
            y = n + 2 if n % 2 == 0 else n + 1
            x = -y
            up = _find_arc(state, n, x, y, "upper", cases)
            lo = _find_arc(state, n, x, y, "lower", cases)
            if up is None or lo is None:
                rows.append(ScanRow(trial, n, False, "-", "-", 0, False, 0))
                continue
            n_arcs = sum(2 if a.case in ("c", "d") else 1 for a in (up, lo))
            failures = (check_arc_invariants(up, state, n, x, y, "upper")
                        + check_arc_invariants(lo, state, n, x, y, "lower"))
            try:
                D = enclosed_domain(window, up, lo)
                xi = induced_bc(window, omega, D)
                xi_p = induced_bc(window, omega_p, D)
                dominates = bc_compare(xi_p, xi) in ("coarser", "equal")
            except ValueError as err:
                failures.append(str(err))
                dominates = False
            rows.append(ScanRow(trial, n, True, up.case, lo.case, n_arcs,
                                dominates, len(failures)))
    summary = {}
    for n in ladder:
        rs = [r for r in rows if r.scale == n]
        found = [r for r in rs if r.arc_found]
        summary[n] = {
            "trials": len(rs),
            "arc_frequency": len(found) / max(len(rs), 1),
            "domination_fraction": (
                sum(r.bc_dominates for r in found) / len(found)
                if found else float("nan")),
            "invariant_failures": sum(r.invariant_failures for r in found),
            "max_arcs": max((r.n_arcs for r in found), default=0),
        }
    return rows, summary


# ---------------------------------------------------------------------------
# Good points on slit domains


def estimate_good_points(slit: SlitDomain, q: int, p: float, samples: int,
                         seed: int = 0, burn_in: int = 200,
                         outer_rule: str = "wired-split"):
    """Monte Carlo estimates of the probability that each even axis point of
    the glued segment connects to the wired boundary side within the upper
    half-plane, under mixed wired/free boundary conditions."""
    dom = slit.domain
    wired = slit_dobrushin_blocks(slit, outer_rule)
    tau = [0] * dom.n_vertices
    for i in wired:
        tau[i] = 1
    chain = ESChain(dom, q, p, tau, seed, init="random")

    def vy(v):
        return v[1]

    # half-plane subgraph: edges with both endpoints at height >= 0,
    # excluding lower split copies
    def in_h(v):
        return vy(v) > 0 or (vy(v) == 0 and (len(v) == 2 or v[2] == 1))

    adj = [[] for _ in range(dom.n_vertices)]
    for k, (i, j) in enumerate(dom.edges):
        if in_h(dom.vertices[i]) and in_h(dom.vertices[j]):
            adj[i].append((j, k))
            adj[j].append((i, k))
    indptr = np.zeros(dom.n_vertices + 1, dtype=np.int64)
    for v in range(dom.n_vertices):
        indptr[v + 1] = indptr[v] + len(adj[v])
    nbr_v = np.empty(indptr[-1], dtype=np.int64)
    nbr_e = np.empty(indptr[-1], dtype=np.int64)
    pos = 0
    for v in range(dom.n_vertices):
        for wv, k in adj[v]:
            nbr_v[pos] = wv
            nbr_e[pos] = k
            pos += 1
    sources = np.array(sorted(wired), dtype=np.int64)
    targets = [(xp, dom.vertex_index((xp, 0)))
               for xp in range(-slit.M, slit.N + 1, 2)
               if dom.has_vertex((xp, 0))]
    visited = np.zeros(dom.n_vertices, dtype=np.int64)
    queue = np.empty(dom.n_vertices, dtype=np.int64)
    stamp = 0
    counts = {xp: 0 for xp, _ in targets}
    for _ in range(burn_in):
        chain.sweep()
    for _ in range(samples):
        chain.sweep()
        stamp += 1
        kernels.reach_from_sources(chain.open_state, sources, indptr, nbr_v,
                                   nbr_e, visited, queue, stamp)
        for xp, vi in targets:
            if visited[vi] == stamp:
                counts[xp] += 1
    out = []
    for xp, _ in targets:
        c = counts[xp]
        phat = c / samples
        se = float(np.sqrt(phat * (1 - phat) / samples))
        out.append({"x": xp, "successes": c, "samples": samples,
                    "estimate": phat, "se": se})
    return out
