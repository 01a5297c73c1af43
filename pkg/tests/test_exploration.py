"""Induced boundary conditions, interface walks, shielding arcs, scans."""

import pytest

from gibbslab.coupling import self_dual_p
from gibbslab.exploration import (
    DuplicatedState,
    _point_in_polygon,
    arc_monotonicity_check,
    check_arc_invariants,
    count_annulus_clusters,
    enclosed_domain,
    estimate_good_points,
    explore_shielding_arc,
    induced_bc,
    reflect_vertical,
    run_duplication_scan,
    trace_interface,
    translate_config,
)
from gibbslab.lattice import build_box, build_slit
from gibbslab.models import EdgeConfig, bc_compare


def edge_bits(dom, coord_edges):
    bits = 0
    for u, v in coord_edges:
        bits |= 1 << dom.edge_index_of(*sorted((u, v)))
    return bits


def test_induced_bc_extremes():
    window = build_box(6)
    D = build_box(2)
    full = EdgeConfig.full(window)
    xi = induced_bc(window, full, D)
    assert len(xi.blocks) == 1
    assert next(iter(xi.blocks)) == frozenset(D.boundary)
    empty = EdgeConfig.empty(window)
    assert not induced_bc(window, empty, D).blocks
    assert bc_compare(xi, induced_bc(window, empty, D)) == "coarser"


def test_induced_bc_rejects_unknown_rule():
    window = build_box(4)
    with pytest.raises(ValueError):
        induced_bc(window, EdgeConfig.empty(window), build_box(1), "x")


def test_count_annulus_clusters():
    window = build_box(4)
    assert count_annulus_clusters(window, EdgeConfig.full(window), 1) == 1
    assert count_annulus_clusters(window, EdgeConfig.empty(window), 1) == 0
    two = EdgeConfig(window, edge_bits(
        window, [((1, 1), (2, 2)), ((-2, -2), (-1, -1))]))
    assert count_annulus_clusters(window, two, 1) == 2


def test_trace_interface_dobrushin():
    window = build_box(4)
    bits = 0
    for k in range(window.n_edges):
        u, v = window.edge_coords(k)
        if u[1] <= 0 and v[1] <= 0:
            bits |= 1 << k
    omega = EdgeConfig(window, bits)
    tr = trace_interface(window, omega, 0, h=0)
    assert tr.exited
    assert tr.points[0] == (1, -1) and tr.points[1] == (1, 1)
    # the walk keeps open edges below and closed edges above the axis,
    # so it hugs the axis and never climbs
    for m, e, is_open in tr.records:
        assert is_open == (max(e[0][1], e[1][1]) <= 0)
        assert m[1] in (-1, 1)
    assert tr.t_h == 0
    assert tr.m_h % 2 == 0
    # deterministic
    tr2 = trace_interface(window, omega, 0, h=0)
    assert tr2.points == tr.points


def test_trace_interface_closed_loop_terminates():
    window = build_box(4)
    tr = trace_interface(window, EdgeConfig.full(window), 0)
    assert isinstance(tr.exited, bool)
    assert len(tr.points) < 10 ** 6


def test_trace_interface_rejects_odd_start():
    window = build_box(4)
    with pytest.raises(ValueError):
        trace_interface(window, EdgeConfig.empty(window), 1)


def test_duplicated_state_rejects_odd_translation():
    window = build_box(2)
    e = EdgeConfig.empty(window)
    with pytest.raises(ValueError):
        DuplicatedState(window, e, e, (1, 0))


def deterministic_state():
    window = build_box(8)
    return DuplicatedState(window, EdgeConfig.empty(window),
                           EdgeConfig.full(window), (0, 0))


@pytest.mark.parametrize("case", ["a", "b", "c", "d"])
@pytest.mark.parametrize("half", ["upper", "lower"])
def test_deterministic_arcs_all_cases(case, half):
    state = deterministic_state()
    n, x, y = 2, -4, 4
    arc = explore_shielding_arc(state, n, x, y, case=case, half=half)
    assert arc is not None
    assert arc.case == case
    (lx, ly), (rx, ry) = arc.endpoints
    assert ly == ry == 0
    assert lx in (x, x + 1) and rx in (y, y + 1)
    failures = check_arc_invariants(arc, state, n, x, y, half)
    assert failures == []


def test_enclosed_domain_contains_the_box_and_dominates():
    state = deterministic_state()
    n, x, y = 2, -4, 4
    up = explore_shielding_arc(state, n, x, y, case="a", half="upper")
    lo = explore_shielding_arc(state, n, x, y, case="a", half="lower")
    D = enclosed_domain(state.domain, up, lo)
    box = build_box(n)
    for v in box.vertices:
        assert D.has_vertex(v)
    assert (D.n_vertices, D.n_edges) == (111, 184)
    xi = induced_bc(state.domain, state.omega, D)
    xi_p = induced_bc(state.domain, state.omega_prime, D)
    assert not xi.blocks
    assert len(xi_p.blocks) == 1
    assert bc_compare(xi_p, xi) in ("coarser", "equal")


def test_point_in_polygon_exact():
    square = [(0, 0), (4, 0), (4, 4), (0, 4)]
    assert _point_in_polygon((1, 1), square) == "in"
    assert _point_in_polygon((5, 1), square) == "out"
    assert _point_in_polygon((0, 1), square) == "on"
    assert _point_in_polygon((3, 3), square) == "in"


def test_translate_config_drops_escaping_edges():
    window = build_box(4)
    omega = EdgeConfig(window, edge_bits(
        window, [((0, 0), (1, 1)), ((3, 1), (4, 2))]))
    shifted = translate_config(window, omega, (2, 0))
    assert shifted.n_open == 1
    k = window.edge_index_of((2, 0), (3, 1))
    assert shifted.is_open(k)


def test_reflect_vertical_is_an_involution():
    window = build_box(3)
    omega = EdgeConfig(window, 0b1011001110)
    assert reflect_vertical(window, reflect_vertical(window, omega)) == omega


def test_arc_monotonicity_closing_edges_never_destroys_the_arc():
    window = build_box(8)
    omega = EdgeConfig(window, edge_bits(
        window, [((0, 0), (1, 1)), ((-1, 1), (0, 2))]))
    state = DuplicatedState(window, omega, EdgeConfig.full(window), (0, 0))
    rep = arc_monotonicity_check(state, 2, -4, 4, case="a", trials=20, seed=1)
    assert rep["base_found"]
    assert rep["trials"] == 20
    assert rep["violations"] == 0


def test_duplication_scan_smoke():
    rows, summary = run_duplication_scan(
        12, self_dual_p(2), 2, [2], trials=4, seed=1,
        sweeps_between=5, burn_in=30)
    assert len(rows) == 4
    assert set(summary) == {2}
    s = summary[2]
    assert s["trials"] == 4
    assert 0.0 <= s["arc_frequency"] <= 1.0
    assert s["invariant_failures"] == 0
    found = [r for r in rows if r.arc_found]
    assert all(r.bc_dominates for r in found)


def test_estimate_good_points_slit():
    slit = build_slit(2, 2, 8)
    out = estimate_good_points(slit, 2, self_dual_p(2), samples=300,
                               seed=3, burn_in=50)
    assert [row["x"] for row in out] == [-2, 0, 2]
    for row in out:
        assert 0 <= row["successes"] <= row["samples"] == 300
        assert 0.0 <= row["estimate"] <= 1.0
        assert row["se"] >= 0.0
