"""Exact enumeration: distributions, pushforwards, monotone-event sweeps."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gibbslab.lattice import build_box, build_path, build_triangle_star
from gibbslab.models import BoundaryCondition, EdgeConfig, FKParams
from gibbslab.oracle import (
    Distribution,
    boundary_partitions,
    check_cbc,
    check_fkg,
    connectivity_distribution,
    enumerate_monotone_events,
    exact_es_distribution,
    exact_fk_distribution,
    exact_potts_distribution,
    exact_sample,
    terminal_partition,
)
from gibbslab.sampler import make_rng


def single_edge_dist(p, q, wired):
    dom = build_path(1)
    xi = BoundaryCondition.wired(dom.boundary) if wired else \
        BoundaryCondition.free(dom.boundary)
    return dom, exact_fk_distribution(dom, xi, FKParams(p, q))


def test_single_edge_closed_forms():
    for p, q in [(Fraction(1, 2), 2), (Fraction(1, 3), 2),
                 (Fraction(2, 3), 4)]:
        _, free = single_edge_dist(p, q, wired=False)
        _, wired = single_edge_dist(p, q, wired=True)
        assert free.prob(1) == p / (p + q * (1 - p))
        assert wired.prob(1) == p


def test_fk_distribution_normalizes():
    dom = build_path(2)
    xi = BoundaryCondition.free(dom.boundary)
    dist = exact_fk_distribution(dom, xi, FKParams(Fraction(1, 2), 3))
    assert sum(w for _, w in dist.support) == dist.total
    assert sum(dist.probabilities().values()) == 1


def test_potts_color_permutation_invariance():
    dom = build_path(2)
    dist = exact_potts_distribution(dom, 3, Fraction(1, 2))
    probs = dist.probabilities()
    perm = {1: 2, 2: 3, 3: 1}
    for spins, pr in probs.items():
        assert probs[tuple(perm[s] for s in spins)] == pr


def test_es_marginals_single_edge():
    dom = build_path(1)
    b = Fraction(1, 2)
    es = exact_es_distribution(dom, 2, b)
    fk = exact_fk_distribution(dom, BoundaryCondition.free(dom.boundary),
                               FKParams(1 - b, 2))
    potts = exact_potts_distribution(dom, 2, b)
    assert es.pushforward(lambda k: k[0]).equals_exactly(fk)
    assert es.pushforward(lambda k: k[1]).equals_exactly(potts)


def test_monotone_event_counts_follow_dedekind():
    for m, count in [(1, 3), (2, 6), (3, 20), (4, 168), (5, 7581)]:
        events = enumerate_monotone_events(m)
        assert len(events) == count
        # each event is increasing: adding any open edge stays inside
        full = (1 << (1 << m)) - 1
        for ev in events[:50]:
            assert 0 <= ev <= full
            for c in range(1 << m):
                if (ev >> c) & 1:
                    for e in range(m):
                        assert (ev >> (c | (1 << e))) & 1
    with pytest.raises(ValueError):
        enumerate_monotone_events(6)


def test_fkg_exact_on_paths():
    for m in (1, 2, 3):
        dom = build_path(m)
        xi = BoundaryCondition.free(dom.boundary)
        rep = check_fkg(dom, xi, FKParams(Fraction(1, 3), 2))
        assert rep.min_slack >= 0
        assert rep.passed


def test_cbc_exact_wired_vs_free():
    dom = build_path(2)
    wired = BoundaryCondition.wired(dom.boundary)
    free = BoundaryCondition.free(dom.boundary)
    rep = check_cbc(dom, wired, free, FKParams(Fraction(1, 2), 2))
    assert rep.min_slack >= 0
    # argument order must not matter
    rep2 = check_cbc(dom, free, wired, FKParams(Fraction(1, 2), 2))
    assert rep2.min_slack >= 0


def test_cbc_rejects_incomparable():
    dom = build_box(1)
    b = sorted(dom.boundary)
    xi = BoundaryCondition(dom.boundary, [frozenset(b[:2])])
    xi2 = BoundaryCondition(dom.boundary, [frozenset(b[2:4])])
    with pytest.raises(ValueError):
        check_cbc(dom, xi, xi2, FKParams(0.5, 2.0))


def test_boundary_partitions_bell_numbers():
    for m, bell in [(1, 1), (2, 2), (3, 5), (4, 15)]:
        assert len(boundary_partitions(set(range(m)))) == bell


def test_terminal_partition_and_connectivity():
    tri, _ = build_triangle_star()
    xi = BoundaryCondition.free(tri.boundary)
    full = EdgeConfig.full(tri)
    assert terminal_partition(tri, xi, full, tri.terminals) == ((0, 1, 2),)
    empty = EdgeConfig.empty(tri)
    assert terminal_partition(tri, xi, empty, tri.terminals) == \
        ((0,), (1,), (2,))
    dist = connectivity_distribution(tri, xi, FKParams(Fraction(1, 2), 2),
                                     tri.terminals)
    assert sum(dist.probabilities().values()) == 1
    assert len(dist.support) == 5  # partitions of a 3-set


def test_pushforward_and_tv():
    dom = build_path(1)
    dist = exact_fk_distribution(dom, BoundaryCondition.free(dom.boundary),
                                 FKParams(Fraction(1, 2), 2))
    flip = dist.pushforward(lambda bits: 1 - bits)
    assert flip.prob(0) == dist.prob(1)
    assert dist.tv_distance(dist) == 0
    assert dist.tv_distance(flip) == pytest.approx(abs(2 / 3 - 1 / 3))


def test_exact_sample_reproducible_and_correct_support():
    dom = build_path(2)
    dist = exact_fk_distribution(dom, BoundaryCondition.free(dom.boundary),
                                 FKParams(0.4, 2.0))
    draws1 = [exact_sample(dist, make_rng(5)) for _ in range(20)]
    draws2 = [exact_sample(dist, make_rng(5)) for _ in range(20)]
    assert draws1 == draws2
    assert all(0 <= b < 4 for b in draws1)


@given(st.integers(1, 3), st.integers(1, 4))
@settings(max_examples=20, deadline=None)
def test_event_probability_bounds(m, qi):
    dom = build_path(m)
    dist = exact_fk_distribution(dom, BoundaryCondition.free(dom.boundary),
                                 FKParams(Fraction(1, 2), qi))
    for ev in enumerate_monotone_events(m)[:10]:
        pr = dist.event_probability(lambda bits, e=ev: (e >> bits) & 1)
        assert 0 <= pr <= 1


def test_distribution_rejects_negative_weights():
    with pytest.raises(ValueError):
        Distribution(((0, -1), (1, 2)), 1)
