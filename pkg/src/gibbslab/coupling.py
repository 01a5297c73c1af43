"""Graphical transformations and couplings between the models.

Planar duality of the random-cluster model, the dualize-shift-reflect map
on configurations, the star-triangle transformation on its critical surface,
the joint edge-spin (Edwards-Sokal) measure with its two conditional
samplers, and the two-to-one face-spin / loop correspondence.
"""

from __future__ import annotations

import math
from fractions import Fraction

from .exactnum import QSqrt
from .lattice import (
    Domain,
    LatticeKind,
    domain_from_edges,
    dual_domain,
    dual_edge,
    dual_edge_map,
)
from .models import (
    EdgeConfig,
    FaceSpinConfig,
    FKParams,
    LoopConfig,
    PottsConfig,
)
from .unionfind import UnionFind


def dual_p(p, q):
    """The dual edge parameter: p* p / ((1-p*)(1-p)) = q."""
    return q * (1 - p) / (q * (1 - p) + p)


def self_dual_p(q) -> float:
    """sqrt(q)/(1+sqrt(q)), the fixed point of p <-> p*."""
    s = math.sqrt(q)
    return s / (1.0 + s)


def self_dual_p_exact(q: int):
    """Exact self-dual point: a Fraction when q is a perfect square, an
    element of Q(sqrt(q)) otherwise."""
    s = QSqrt.sqrt_of(q)
    return s / (1 + s)


def dual_config(domain: Domain, omega: EdgeConfig, dual: Domain = None):
    """The dual configuration: e* open iff e closed.  Returns (config on the
    dual domain, dual domain, edge index map)."""
    if dual is None:
        dual = dual_domain(domain)
    emap = dual_edge_map(domain, dual)
    bits = 0
    for ei in range(domain.n_edges):
        if not omega.is_open(ei):
            bits |= 1 << emap[ei]
    return EdgeConfig(dual, bits), dual, emap


def rho_point_map(v):
    """The underlying point map (x, y) -> (x-1, -y); applied twice it is the
    translation by (-2, 0)."""
    return (v[0] - 1, -v[1])


def rho_edge_map(e):
    """Edge bijection of the dualize / shift by (-1,0) / reflect composition."""
    a, b = dual_edge(e)
    fa, fb = rho_point_map(a), rho_point_map(b)
    return (fa, fb) if fa < fb else (fb, fa)


def rho(domain: Domain, omega: EdgeConfig, target: Domain = None):
    """Apply the dualize-shift-reflect map to a configuration.

    The image edge carries the flipped state: (rho omega)_{sigma(e)} = 1 - w_e.
    When target is given, the window must be closed under the edge bijection.
    """
    mapped = [rho_edge_map(domain.edge_coords(ei))
              for ei in range(domain.n_edges)]
    if target is None:
        target = domain_from_edges(LatticeKind.SQUARE_L, mapped)
    bits = 0
    for ei, (u, v) in enumerate(mapped):
        ti = target.edge_index_of(u, v) if (
            target.has_vertex(u) and target.has_vertex(v)) else None
        if ti is None:
            raise ValueError("window is not closed under the map at %r"
                             % ((u, v),))
        if not omega.is_open(ei):
            bits |= 1 << ti
    return EdgeConfig(target, bits), target


# ---------------------------------------------------------------------------
# Star-triangle transformation


def _tri_cubic_residual(p, q):
    y = p / (1 - p)
    return y ** 3 + 3 * y ** 2 - q


def p_c_tri(q) -> float:
    """p = y/(1+y) with y the positive root of y^3 + 3y^2 = q."""
    if float(q) < 1:
        raise ValueError("q must be >= 1")
    lo, hi = 0.0, float(q) ** (1.0 / 3.0) + 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid ** 3 + 3 * mid ** 2 - float(q) <= 0:
            lo = mid
        else:
            hi = mid
    y = 0.5 * (lo + hi)
    return y / (1.0 + y)


def p_c_hex(q) -> float:
    return dual_p(p_c_tri(q), q)


def star_triangle_map(omega_t: EdgeConfig, p, q, rng,
                      star: Domain = None) -> EdgeConfig:
    """Map a triangle configuration to a star configuration preserving the
    connections among the three terminals.

    Deterministic whenever the triangle has an open edge; the empty triangle
    maps to the empty star with probability y^3/q and to each single-edge
    star with probability y^2/q, y = p/(1-p).  Valid only on the critical
    surface y^3 + 3y^2 = q, which makes these masses sum to 1.
    """
    tri = omega_t.domain
    if len(tri.terminals) != 3 or tri.n_edges != 3:
        raise ValueError("expected a 3-terminal triangle domain")
    res = _tri_cubic_residual(float(p), float(q))
    if abs(res) > 1e-9:
        raise ValueError("p is off the critical surface (residual %.3g)" % res)
    if star is None:
        from .lattice import build_triangle_star
        _, star = build_triangle_star()
    centre = next(i for i in range(star.n_vertices)
                  if i not in star.terminals)

    def star_bits(open_terminals):
        bits = 0
        for t in open_terminals:
            ei = star.edges.index(tuple(sorted((centre, star.terminals[t]))))
            bits |= 1 << ei
        return bits

    n_open = omega_t.n_open
    if n_open >= 2:
        return EdgeConfig(star, star_bits((0, 1, 2)))
    if n_open == 1:
        ei = omega_t.open_edges()[0]
        i, j = tri.edges[ei]
        terms = [t for t in range(3) if tri.terminals[t] in (i, j)]
        return EdgeConfig(star, star_bits(terms))
    y = float(p) / (1.0 - float(p))
    u = rng.random() * float(q)
    if u < y ** 3:
        return EdgeConfig(star, 0)
    k = int((u - y ** 3) // y ** 2)
    k = min(k, 2)
    return EdgeConfig(star, star_bits((k,)))


def star_triangle_kernel(p, q):
    """The transition masses out of the empty triangle: (empty, one-edge x3)."""
    y = p / (1 - p)
    return (y ** 3 / q, y ** 2 / q)


# ---------------------------------------------------------------------------
# Joint edge-spin coupling


def es_joint_weight(domain: Domain, params: FKParams, omega: EdgeConfig,
                    sigma: PottsConfig):
    """beta^{open count} on compatible pairs, zero otherwise."""
    if sigma.tau is not None:
        for i, t in enumerate(sigma.tau):
            if t != 0 and sigma.spins[i] != t:
                return 0
    for ei, (i, j) in enumerate(domain.edges):
        if omega.is_open(ei) and sigma.spins[i] != sigma.spins[j]:
            return 0
    return params.beta ** omega.n_open


class ColorConflictError(ValueError):
    """A cluster touches two boundary vertices carrying different colors."""


def sample_sigma_given_omega(domain: Domain, omega: EdgeConfig, tau, q: int,
                             rng) -> PottsConfig:
    """Color each cluster: forced to the boundary color where it touches a
    colored boundary vertex, uniform in {1..q} otherwise."""
    uf = UnionFind(domain.n_vertices)
    for ei, (i, j) in enumerate(domain.edges):
        if omega.is_open(ei):
            uf.union(i, j)
    forced = {}
    if tau is not None:
        for i, t in enumerate(tau):
            if t == 0:
                continue
            r = uf.find(i)
            if forced.get(r, t) != t:
                raise ColorConflictError(
                    "cluster connects colors %d and %d" % (forced[r], t))
            forced[r] = t
    colors = {}
    spins = [0] * domain.n_vertices
    for v in range(domain.n_vertices):
        r = uf.find(v)
        if r not in colors:
            colors[r] = forced.get(r) or int(rng.integers(1, q + 1))
        spins[v] = colors[r]
    return PottsConfig(domain, tuple(spins), tuple(tau) if tau else None)


def sample_omega_given_sigma(domain: Domain, sigma: PottsConfig, p,
                             rng) -> EdgeConfig:
    """Open each monochromatic edge independently with probability p."""
    bits = 0
    u = rng.random(domain.n_edges)
    for ei, (i, j) in enumerate(domain.edges):
        if sigma.spins[i] == sigma.spins[j] and u[ei] < float(p):
            bits |= 1 << ei
    return EdgeConfig(domain, bits)


def potts_from_fk(domain: Domain, omega: EdgeConfig, q: int,
                  frame_color: int, rng, frame=None) -> PottsConfig:
    """Color clusters uniformly; clusters touching the frame all receive
    frame_color when it is nonzero."""
    if frame is None:
        frame = domain.boundary
    uf = UnionFind(domain.n_vertices)
    for ei, (i, j) in enumerate(domain.edges):
        if omega.is_open(ei):
            uf.union(i, j)
    forced = {}
    if frame_color:
        for v in frame:
            forced[uf.find(v)] = frame_color
    colors = {}
    spins = [0] * domain.n_vertices
    for v in range(domain.n_vertices):
        r = uf.find(v)
        if r not in colors:
            colors[r] = forced.get(r) or int(rng.integers(1, q + 1))
        spins[v] = colors[r]
    return PottsConfig(domain, tuple(spins))


# ---------------------------------------------------------------------------
# Loop / face-spin correspondence


def loops_to_spins(loop: LoopConfig):
    """The two spin fields coherent with a loop configuration (spins differ
    across an edge iff the edge is in the loop configuration); they are
    global flips of each other."""
    w = loop.window
    faces = list(w.faces) + list(w.ring)
    index = {f: i for i, f in enumerate(faces)}
    adj = [[] for _ in faces]
    for a, b, ei in w.face_pairs:
        flip = loop.is_open(ei)
        adj[index[a]].append((index[b], flip))
        adj[index[b]].append((index[a], flip))
    spins = [0] * len(faces)
    for start in range(len(faces)):
        if spins[start]:
            continue
        spins[start] = 1
        stack = [start]
        while stack:
            i = stack.pop()
            for j, flip in adj[i]:
                want = -spins[i] if flip else spins[i]
                if spins[j] == 0:
                    spins[j] = want
                    stack.append(j)
                elif spins[j] != want:
                    raise ValueError("loop configuration is not coherent "
                                     "with any spin field")
    plus = FaceSpinConfig(w, {f: spins[index[f]] for f in faces})
    minus = FaceSpinConfig(w, {f: -spins[index[f]] for f in faces})
    return plus, minus


def spins_to_loops(sigma: FaceSpinConfig) -> LoopConfig:
    """Edge in the loop configuration iff its two faces disagree."""
    w = sigma.window
    bits = 0
    for a, b, ei in w.face_pairs:
        if sigma.spins[a] != sigma.spins[b]:
            bits |= 1 << ei
    return LoopConfig(w, bits)


def x_c(n) -> float:
    """The critical loop parameter 1/sqrt(2 + sqrt(2-n)) for n in [0,2]."""
    if not 0 <= float(n) <= 2:
        raise ValueError("n must lie in [0,2]")
    return 1.0 / math.sqrt(2.0 + math.sqrt(2.0 - float(n)))
