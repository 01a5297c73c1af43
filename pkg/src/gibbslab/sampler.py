"""Monte Carlo engines: FK heat-bath chains, joint edge-spin chains for the
Potts model, a lock-step ordered pair of FK chains under comparable boundary
conditions, and a single-face heat-bath for the loop-model spin
representation.  All randomness flows from a counter-based Philox generator
seeded explicitly, so runs are reproducible."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .lattice import Domain, HexFaceWindow
from .models import (
    BoundaryCondition,
    EdgeConfig,
    FaceSpinConfig,
    FKParams,
    bc_compare,
    cluster_count,
    spin_weight,
)
from .coupling import ColorConflictError


def make_rng(seed, stream=0):
    return np.random.Generator(np.random.Philox(key=[seed, stream]))


@dataclass
class ChainSpec:
    domain: Domain
    bc: BoundaryCondition
    params: FKParams
    sweeps: int
    burn_in: int = 0
    seed: int = 0
    init: str = "all-open"  # all-open | all-closed | given
    init_config: EdgeConfig = None

    def __post_init__(self):
        if self.sweeps < 1:
            raise ValueError("sweep count must be >= 1")
        if not 0 <= self.burn_in < self.sweeps:
            raise ValueError("burn-in must be smaller than the sweep count")


@dataclass
class Estimate:
    mean: float
    se: float
    batches: int
    count: int

    def __post_init__(self):
        if self.se < 0 or self.batches < 8:
            raise ValueError("invalid estimate")


def batch_means(series) -> Estimate:
    """Mean and standard error via non-overlapping batch means."""
    x = np.asarray(series, dtype=float)
    n = x.size
    b = 16 if n >= 128 else 8
    if n < b:
        raise ValueError("series too short for %d batches" % b)
    m = n // b
    means = x[: b * m].reshape(b, m).mean(axis=1)
    se = float(means.std(ddof=1) / math.sqrt(b))
    return Estimate(float(x.mean()), se, b, n)


def fk_heat_bath_prob(domain: Domain, xi: BoundaryCondition,
                      params: FKParams, omega: EdgeConfig, e: int):
    """Conditional probability that edge e is open given the rest: p when
    the endpoints are connected off e (with block identifications), else
    p/(p + q(1-p))."""
    p, q = params.p, params.q
    closed = omega.with_edge(e, False)
    _, uf = cluster_count(domain, xi, closed, return_uf=True)
    i, j = domain.edges[e]
    if uf.connected(i, j):
        return p
    return p / (p + q * (1 - p))


def _quotient_arrays(domain: Domain, xi: BoundaryCondition):
    """Contract each boundary block to one node; return edge endpoint node
    arrays and a CSR adjacency carrying edge ids."""
    n_v = domain.n_vertices
    rep = list(range(n_v))
    for b in xi.blocks:
        vs = sorted(b)
        for v in vs[1:]:
            rep[v] = vs[0]
    ids = {}
    node_of = np.empty(n_v, dtype=np.int64)
    for v in range(n_v):
        r = rep[v]
        if r not in ids:
            ids[r] = len(ids)
        node_of[v] = ids[r]
    n_nodes = len(ids)
    en_i = np.empty(domain.n_edges, dtype=np.int64)
    en_j = np.empty(domain.n_edges, dtype=np.int64)
    adj = [[] for _ in range(n_nodes)]
    for k, (i, j) in enumerate(domain.edges):
        a, b = node_of[i], node_of[j]
        en_i[k], en_j[k] = a, b
        if a != b:
            adj[a].append((b, k))
            adj[b].append((a, k))
    indptr = np.zeros(n_nodes + 1, dtype=np.int64)
    for v in range(n_nodes):
        indptr[v + 1] = indptr[v] + len(adj[v])
    nbr_node = np.empty(indptr[-1], dtype=np.int64)
    nbr_edge = np.empty(indptr[-1], dtype=np.int64)
    pos = 0
    for v in range(n_nodes):
        for w, k in adj[v]:
            nbr_node[pos] = w
            nbr_edge[pos] = k
            pos += 1
    return n_nodes, node_of, en_i, en_j, indptr, nbr_node, nbr_edge


def _initial_state(spec: ChainSpec) -> np.ndarray:
    n_e = spec.domain.n_edges
    if spec.init == "all-open":
        return np.ones(n_e, dtype=np.uint8)
    if spec.init == "all-closed":
        return np.zeros(n_e, dtype=np.uint8)
    if spec.init == "given":
        if spec.init_config is None:
            raise ValueError("init 'given' needs init_config")
        return np.array([1 if spec.init_config.is_open(k) else 0
                         for k in range(n_e)], dtype=np.uint8)
    raise ValueError("unknown init rule %r" % spec.init)


class FKChain:
    """Single-edge heat-bath chain for the random-cluster measure."""

    def __init__(self, spec: ChainSpec, stream=0):
        self.spec = spec
        d = spec.domain
        (self.n_nodes, self.node_of, self.en_i, self.en_j, self.indptr,
         self.nbr_node, self.nbr_edge) = _quotient_arrays(d, spec.bc)
        self.state = _initial_state(spec)
        self.p = float(spec.params.p)
        q = float(spec.params.q)
        self.p_cond = self.p / (self.p + q * (1.0 - self.p))
        self.rng = make_rng(spec.seed, stream)
        self.visited = np.zeros(self.n_nodes, dtype=np.int64)
        self.queue = np.empty(self.n_nodes, dtype=np.int64)
        self.stamp = 0

    def sweep(self):
        u = self.rng.random(self.spec.domain.n_edges)
        self.stamp = kernels.fk_sweep(
            self.state, self.en_i, self.en_j, self.indptr, self.nbr_node,
            self.nbr_edge, self.p, self.p_cond, u, self.visited, self.queue,
            self.stamp)
        return self.state

    def config(self) -> EdgeConfig:
        bits = 0
        for k in range(self.spec.domain.n_edges):
            if self.state[k]:
                bits |= 1 << k
        return EdgeConfig(self.spec.domain, bits)


def run_fk_chain(spec: ChainSpec, observables=None):
    """Run the chain and return ({name: Estimate}, final config)."""
    if observables is None:
        observables = {"edge_density": lambda s: float(s.mean())}
    chain = FKChain(spec)
    series = {name: [] for name in observables}
    for t in range(spec.sweeps):
        state = chain.sweep()
        if t >= spec.burn_in:
            for name, f in observables.items():
                series[name].append(f(state))
    est = {name: batch_means(vals) for name, vals in series.items()}
    return est, chain.config()


class SandwichPair:
    """Two heat-bath chains at the same parameters under comparable boundary
    conditions, driven by shared uniforms; the pointwise ordering of the
    configurations is checked after every edge update."""

    def __init__(self, domain: Domain, bc_hi, bc_lo, params: FKParams,
                 seed=0):
        rel = bc_compare(bc_hi, bc_lo)
        if rel == "finer":
            bc_hi, bc_lo = bc_lo, bc_hi
        elif rel == "incomparable":
            raise ValueError("boundary conditions are incomparable")
        self.domain = domain
        spec_hi = ChainSpec(domain, bc_hi, params, 1, 0, seed, "all-open")
        spec_lo = ChainSpec(domain, bc_lo, params, 1, 0, seed, "all-closed")
        self.hi = FKChain(spec_hi)
        self.lo = FKChain(spec_lo)
        self.rng = make_rng(seed, 0)
        self.queue = np.empty(max(self.hi.n_nodes, self.lo.n_nodes),
                              dtype=np.int64)
        self.stamp = 0
        self.sweeps_done = 0

    def sweep(self):
        u = self.rng.random(self.domain.n_edges)
        self.stamp, ok = kernels.fk_sandwich_sweep(
            self.hi.state, self.lo.state,
            self.hi.en_i, self.hi.en_j, self.hi.indptr, self.hi.nbr_node,
            self.hi.nbr_edge,
            self.lo.en_i, self.lo.en_j, self.lo.indptr, self.lo.nbr_node,
            self.lo.nbr_edge,
            self.hi.p, self.hi.p_cond, u, self.hi.visited, self.lo.visited,
            self.queue, self.stamp)
        self.sweeps_done += 1
        if ok == 0:
            raise AssertionError(
                "sandwich ordering violated at sweep %d" % self.sweeps_done)
        return self.hi.state, self.lo.state


def run_sandwich(domain: Domain, bc_hi, bc_lo, params: FKParams, sweeps: int,
                 seed=0):
    """Run the ordered pair; returns per-sweep open densities of both chains
    (raises if the monotone coupling ever breaks order)."""
    pair = SandwichPair(domain, bc_hi, bc_lo, params, seed)
    dens_hi = np.empty(sweeps)
    dens_lo = np.empty(sweeps)
    for t in range(sweeps):
        hi, lo = pair.sweep()
        dens_hi[t] = hi.mean()
        dens_lo[t] = lo.mean()
    return dens_hi, dens_lo


class ESChain:
    """Alternating edge-spin chain: resample edges given spins, then recolor
    clusters.  The edge half-step is a draw from the random-cluster measure
    with wiring induced by the colored boundary, so the open state doubles
    as an FK sample at stationarity."""

    def __init__(self, domain: Domain, q: int, p: float, tau=None, seed=0,
                 init="random", stream=0):
        self.domain = domain
        self.q = int(q)
        self.p = float(p)
        n_v, n_e = domain.n_vertices, domain.n_edges
        self.edge_i = np.array([i for i, _ in domain.edges], dtype=np.int64)
        self.edge_j = np.array([j for _, j in domain.edges], dtype=np.int64)
        self.forced = np.zeros(n_v, dtype=np.int64)
        if tau is not None:
            for v, t in enumerate(tau):
                self.forced[v] = t
        self.rng = make_rng(seed, stream)
        if init == "random":
            self.spins = self.rng.integers(1, self.q + 1, n_v).astype(np.int64)
        elif isinstance(init, int):
            self.spins = np.full(n_v, init, dtype=np.int64)
        else:
            self.spins = np.array(init, dtype=np.int64)
        for v in range(n_v):
            if self.forced[v] > 0:
                self.spins[v] = self.forced[v]
        self.open_state = np.zeros(n_e, dtype=np.uint8)
        self.parent = np.empty(n_v, dtype=np.int64)
        self.colors = np.empty(n_v, dtype=np.int64)

    def sweep(self):
        n_v, n_e = self.domain.n_vertices, self.domain.n_edges
        u_edges = self.rng.random(n_e)
        u_colors = self.rng.random(n_v)
        ok = kernels.es_sweep(self.spins, self.edge_i, self.edge_j,
                              self.forced, self.p, self.q, u_edges, u_colors,
                              self.open_state, self.parent, self.colors)
        if ok == 0:
            raise ColorConflictError(
                "boundary colors meet in one cluster; conditioning degenerate")
        return self.spins, self.open_state

    def config(self) -> EdgeConfig:
        bits = 0
        for k in range(self.domain.n_edges):
            if self.open_state[k]:
                bits |= 1 << k
        return EdgeConfig(self.domain, bits)


def run_potts_es_chain(domain: Domain, q: int, p: float, tau, sweeps: int,
                       burn_in=0, seed=0, init="random", observables=None):
    """Run the alternating chain; default observables are the open-edge
    density and the adjacent-spin agreement fraction."""
    if observables is None:
        edges = domain.edges

        def agreement(spins, open_state):
            agree = sum(1 for i, j in edges if spins[i] == spins[j])
            return agree / max(len(edges), 1)

        observables = {
            "edge_density": lambda s, o: float(o.mean()),
            "agreement": agreement,
        }
    chain = ESChain(domain, q, p, tau, seed, init)
    series = {name: [] for name in observables}
    for t in range(sweeps):
        spins, open_state = chain.sweep()
        if t >= burn_in:
            for name, f in observables.items():
                series[name].append(f(spins, open_state))
    est = {name: batch_means(vals) for name, vals in series.items()}
    return est, chain


def central_density_observable(domain: Domain, radius: int):
    """Open-edge density over edges lying in the central box of the given
    radius; isolates the bulk from boundary-condition surface effects."""
    idx = np.array([k for k, (i, j) in enumerate(domain.edges)
                    if max(abs(c) for c in domain.vertices[i]) <= radius
                    and max(abs(c) for c in domain.vertices[j]) <= radius],
                   dtype=np.int64)
    if idx.size == 0:
        raise ValueError("no edges inside the central box")

    def central_density(spins, open_state):
        return float(open_state[idx].mean())

    return central_density


def run_spin_chain(window: HexFaceWindow, n, x, ring_spins, sweeps: int,
                   burn_in=0, seed=0, observables=None):
    """Single-face heat-bath for the face-spin representation on a small
    window; weights recomputed via spin_weight (windows are tiny)."""
    if float(n) < 1 or float(x) > 1.0 / math.sqrt(float(n)):
        import warnings
        warnings.warn("parameters outside the positive-association regime "
                      "(need n >= 1 and n x^2 <= 1)")
    if observables is None:
        observables = {
            "magnetization": lambda spins: float(
                np.mean([spins[f] for f in window.faces])),
        }
    rng = make_rng(seed, 0)
    spins = dict(ring_spins)
    for f in window.faces:
        spins[f] = 1
    series = {name: [] for name in observables}
    for t in range(sweeps):
        for f in window.faces:
            spins[f] = 1
            w_plus = spin_weight(FaceSpinConfig(window, dict(spins)), n, x)
            spins[f] = -1
            w_minus = spin_weight(FaceSpinConfig(window, dict(spins)), n, x)
            pm = w_minus / (w_plus + w_minus)
            spins[f] = -1 if rng.random() < pm else 1
        if t >= burn_in:
            for name, fobs in observables.items():
                series[name].append(fobs(spins))
    est = {name: batch_means(vals) for name, vals in series.items()}
    return est, spins
