"""Brute-force exact computation on small instances.

Enumerates every configuration of a model, computes weights through the
models module, and exposes distributions, event probabilities, connectivity
pushforwards and certified FKG/CBC sweeps.  With exact parameters (Fraction
or QSqrt) every probability is exact; float parameters give float mode.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .lattice import Domain, HexFaceWindow
from .models import (
    BoundaryCondition,
    EdgeConfig,
    FKParams,
    FaceSpinConfig,
    LoopConfig,
    bc_compare,
    cluster_count,
)
from .unionfind import UnionFind

STATE_SPACE_CAP = 1 << 26


@dataclass
class Distribution:
    """A finite probability table: (key, weight) support plus the total."""

    support: tuple  # ((key, weight), ...) in deterministic key order
    total: object   # partition function Z

    def __post_init__(self):
        if not self.support:
            raise ValueError("empty support")
        if any(float(w) < 0 for _, w in self.support):
            raise ValueError("negative weight in support")

    def prob(self, key):
        for k, w in self.support:
            if k == key:
                return w / self.total
        return 0 * self.total

    def probabilities(self):
        return {k: w / self.total for k, w in self.support}

    def event_probability(self, predicate):
        w = sum(wt for k, wt in self.support if predicate(k))
        return w / self.total

    def expectation(self, f):
        return sum(float(f(k)) * float(w) for k, w in self.support) \
            / float(self.total)

    def pushforward(self, f) -> "Distribution":
        acc = {}
        for k, w in self.support:
            kk = f(k)
            acc[kk] = acc.get(kk, 0) + w
        sup = tuple(sorted(acc.items(), key=lambda kv: repr(kv[0])))
        return Distribution(sup, self.total)

    def tv_distance(self, other) -> float:
        keys = {k for k, _ in self.support} | {k for k, _ in other.support}
        p = self.probabilities()
        q = other.probabilities()
        return 0.5 * sum(abs(float(p.get(k, 0)) - float(q.get(k, 0)))
                         for k in keys)

    def equals_exactly(self, other) -> bool:
        """Distribution equality by cross-multiplication; exact when the
        weights are exact."""
        p = self.probabilities()
        q = other.probabilities()
        keys = set(p) | set(q)
        return all(p.get(k, 0) == q.get(k, 0) for k in keys)


def _check_edge_cap(n_edges):
    if (1 << n_edges) > STATE_SPACE_CAP:
        raise ValueError(
            "state space 2^%d exceeds the enumeration cap 2^26" % n_edges)


def all_edge_configs(domain: Domain):
    _check_edge_cap(domain.n_edges)
    for bits in range(1 << domain.n_edges):
        yield EdgeConfig(domain, bits)


def exact_fk_distribution(domain: Domain, xi: BoundaryCondition,
                          params: FKParams) -> Distribution:
    """Full random-cluster distribution, keyed by the edge-flag integer."""
    _check_edge_cap(domain.n_edges)
    beta, q = params.beta, params.q
    support = []
    total = None
    for bits in range(1 << domain.n_edges):
        omega = EdgeConfig(domain, bits)
        k = cluster_count(domain, xi, omega)
        w = beta ** omega.n_open * q ** k
        support.append((bits, w))
        total = w if total is None else total + w
    return Distribution(tuple(support), total)


def _spin_assignments(domain: Domain, q: int, tau=None):
    """All spin vectors compatible with tau (0 entries free)."""
    free = [i for i in range(domain.n_vertices)
            if tau is None or tau[i] == 0]
    base = [0] * domain.n_vertices
    if tau is not None:
        for i, t in enumerate(tau):
            base[i] = t
    for combo in itertools.product(range(1, q + 1), repeat=len(free)):
        spins = list(base)
        for i, s in zip(free, combo):
            spins[i] = s
        yield tuple(spins)


def exact_potts_distribution(domain: Domain, q: int, b, tau=None):
    """Potts distribution keyed by the spin tuple.

    b is the disagreement factor e^{-1/T}; pass a Fraction for exact mode.
    """
    if q ** domain.n_vertices > STATE_SPACE_CAP:
        raise ValueError("state space %d^%d exceeds the enumeration cap 2^26"
                         % (q, domain.n_vertices))
    support = []
    total = None
    for spins in _spin_assignments(domain, q, tau):
        d = sum(1 for i, j in domain.edges if spins[i] != spins[j])
        w = b ** d
        support.append((spins, w))
        total = w if total is None else total + w
    return Distribution(tuple(support), total)


def exact_es_distribution(domain: Domain, q: int, b, tau=None):
    """Joint edge-and-spin distribution keyed by (bits, spins).

    Weight beta^{open count} on compatible pairs (open edges monochromatic,
    spins matching tau where tau is nonzero), with beta = (1-b)/b so the
    edge probability is p = 1 - b.
    """
    _check_edge_cap(domain.n_edges)
    beta = (1 - b) / b
    support = []
    total = None
    for spins in _spin_assignments(domain, q, tau):
        mono = 0
        for ei, (i, j) in enumerate(domain.edges):
            if spins[i] == spins[j]:
                mono |= 1 << ei
        for bits in range(1 << domain.n_edges):
            if bits & ~mono:
                continue  # an open edge joins unequal spins
            w = beta ** bits.bit_count()
            support.append(((bits, spins), w))
            total = w if total is None else total + w
    return Distribution(tuple(support), total)


def exact_loop_distribution(window: HexFaceWindow, n, x) -> Distribution:
    """Loop-model distribution over even subgraphs, keyed by edge flags."""
    dom = window.domain
    _check_edge_cap(dom.n_edges)
    from .models import count_loops
    support = []
    total = None
    for bits in range(1 << dom.n_edges):
        deg = [0] * dom.n_vertices
        for ei, (i, j) in enumerate(dom.edges):
            if (bits >> ei) & 1:
                deg[i] += 1
                deg[j] += 1
        if any(d % 2 for d in deg):
            continue
        loops = count_loops(LoopConfig(window, bits))
        w = n ** loops * x ** bits.bit_count()
        support.append((bits, w))
        total = w if total is None else total + w
    return Distribution(tuple(support), total)


def exact_spin_distribution(window: HexFaceWindow, n, x, ring_spins):
    """Face-spin distribution with the ring fixed, keyed by the interior
    spin tuple (faces in sorted order)."""
    from .models import spin_weight
    if 2 ** len(window.faces) > STATE_SPACE_CAP:
        raise ValueError("state space too large")
    support = []
    total = None
    for combo in itertools.product((-1, 1), repeat=len(window.faces)):
        spins = dict(ring_spins)
        spins.update({f: s for f, s in zip(window.faces, combo)})
        w = spin_weight(FaceSpinConfig(window, spins), n, x)
        support.append((combo, w))
        total = w if total is None else total + w
    return Distribution(tuple(support), total)


# ---------------------------------------------------------------------------
# Connectivity pushforward


def terminal_partition(domain: Domain, xi, omega: EdgeConfig, terminals,
                       include_bc=True):
    """The partition of the terminal list induced by clusters of omega,
    optionally with the boundary-condition identifications applied."""
    uf = UnionFind(domain.n_vertices)
    if include_bc and xi is not None:
        for b in xi.blocks:
            it = iter(sorted(b))
            first = next(it)
            for v in it:
                uf.union(first, v)
    for ei, (i, j) in enumerate(domain.edges):
        if omega.is_open(ei):
            uf.union(i, j)
    groups = {}
    for t, vi in enumerate(terminals):
        groups.setdefault(uf.find(vi), []).append(t)
    return tuple(sorted(tuple(g) for g in groups.values()))


def connectivity_distribution(domain: Domain, xi: BoundaryCondition,
                              params: FKParams, terminals,
                              include_bc=True) -> Distribution:
    if len(terminals) > 8:
        raise ValueError("at most 8 terminals supported")
    dist = exact_fk_distribution(domain, xi, params)
    return dist.pushforward(
        lambda bits: terminal_partition(domain, xi, EdgeConfig(domain, bits),
                                        terminals, include_bc))


def exact_distribution(domain, xi, params, model: str, **kw) -> Distribution:
    """Dispatcher used by the CLI; model in {fk, potts, es, loop, spin}."""
    if model == "fk":
        return exact_fk_distribution(domain, xi, params)
    if model == "potts":
        return exact_potts_distribution(domain, kw["q"], kw["b"],
                                        kw.get("tau"))
    if model == "es":
        return exact_es_distribution(domain, kw["q"], kw["b"], kw.get("tau"))
    if model == "loop":
        return exact_loop_distribution(domain, kw["n"], kw["x"])
    if model == "spin":
        return exact_spin_distribution(domain, kw["n"], kw["x"],
                                       kw["ring_spins"])
    raise ValueError("unknown model %r" % model)


def exact_event_probability(dist: Distribution, predicate):
    return dist.event_probability(predicate)


# ---------------------------------------------------------------------------
# Monotone events and positive-association sweeps


def enumerate_monotone_events(m: int):
    """All increasing events on m edges, as subset masks over the 2^m
    configurations (bit c of the mask set iff config c lies in the event).

    Counts follow the Dedekind numbers: 3, 6, 20, 168, 7581 for m = 1..5.
    """
    if m > 5:
        raise ValueError("monotone-event enumeration capped at m = 5")
    events = [0, 1]
    for k in range(m):
        shift = 1 << k
        nxt = []
        # an event on k+1 edges is a pair (low, high) of k-edge events with
        # low a subset of high: opening the new edge may only help
        for low in events:
            for high in events:
                if low & ~high == 0:
                    nxt.append(low | (high << shift))
        events = nxt
    return events


def _probability_vector(domain, xi, params):
    dist = exact_fk_distribution(domain, xi, params)
    return [w / dist.total for _, w in dist.support]


def _event_prob(mask, probs):
    total = 0
    c = 0
    while mask:
        if mask & 1:
            total = total + probs[c]
        mask >>= 1
        c += 1
    return total


@dataclass
class SweepReport:
    min_slack: object
    witness: tuple
    n_checked: int

    @property
    def passed(self):
        return float(self.min_slack) >= -1e-12


def boundary_partitions(boundary):
    """All set partitions of the boundary vertex set, as boundary
    conditions (singleton classes are left implicit)."""
    items = sorted(boundary)
    parts = [[]]
    for v in items:
        nxt = []
        for p in parts:
            for k in range(len(p)):
                nxt.append([blk | {v} if t == k else blk
                            for t, blk in enumerate(p)])
            nxt.append(p + [{v}])
        parts = nxt
    return [BoundaryCondition(frozenset(items),
                              [frozenset(b) for b in p if len(b) >= 2])
            for p in parts]


def check_fkg(domain: Domain, xi: BoundaryCondition, params: FKParams,
              events=None) -> SweepReport:
    """Positive association: P[A and B] >= P[A] P[B] over all pairs of
    increasing events.  Exact when the parameters are exact."""
    m = domain.n_edges
    if events is None:
        events = enumerate_monotone_events(m)
    probs = _probability_vector(domain, xi, params)
    exact = not any(isinstance(w, float) for w in probs)
    if not exact:
        return _check_fkg_float(events, np.array([float(w) for w in probs]))
    pa = [_event_prob(ev, probs) for ev in events]
    best = None
    witness = None
    n = 0
    for i, a in enumerate(events):
        for j in range(i, len(events)):
            b = events[j]
            slack = _event_prob(a & b, probs) - pa[i] * pa[j]
            n += 1
            if best is None or slack < best:
                best, witness = slack, (a, b)
    return SweepReport(best, witness, n)


def _check_fkg_float(events, probs):
    nc = len(probs)
    mat = np.zeros((len(events), nc))
    for i, ev in enumerate(events):
        for c in range(nc):
            if (ev >> c) & 1:
                mat[i, c] = 1.0
    pa = mat @ probs
    joint = (mat * probs) @ mat.T
    slack = joint - np.outer(pa, pa)
    idx = np.unravel_index(np.argmin(slack), slack.shape)
    return SweepReport(float(slack[idx]), (events[idx[0]], events[idx[1]]),
                       slack.size)


def check_cbc(domain: Domain, xi: BoundaryCondition, xi2: BoundaryCondition,
              params: FKParams, events=None) -> SweepReport:
    """Comparison of boundary conditions: the coarser condition dominates on
    every increasing event."""
    rel = bc_compare(xi, xi2)
    if rel == "finer":
        xi, xi2 = xi2, xi
    elif rel == "incomparable":
        raise ValueError("boundary conditions are incomparable")
    if events is None:
        events = enumerate_monotone_events(domain.n_edges)
    p_hi = _probability_vector(domain, xi, params)
    p_lo = _probability_vector(domain, xi2, params)
    best = None
    witness = None
    for ev in events:
        slack = _event_prob(ev, p_hi) - _event_prob(ev, p_lo)
        if best is None or slack < best:
            best, witness = slack, ev
    return SweepReport(best, (witness,), len(events))


def exact_sample(dist: Distribution, rng) -> object:
    """Inverse-CDF draw from an exact table; reproducible from the rng."""
    u = rng.random()
    acc = 0.0
    z = float(dist.total)
    last = None
    for k, w in dist.support:
        acc += float(w) / z
        last = k
        if u < acc:
            return k
    return last
