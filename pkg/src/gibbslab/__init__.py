"""Lattice statistical mechanics toolkit: random-cluster, Potts, and loop
models on the rotated square lattice, with exact small-instance oracles,
couplings between the models, Monte Carlo samplers, and exploration
constructions (interfaces, shielding arcs, good-point probes)."""

__version__ = "0.1.0"

from .lattice import (
    Domain,
    LatticeKind,
    build_box,
    build_face_block,
    build_hex_window,
    build_path,
    build_slit,
    build_triangle_star,
    domain_from_edges,
    dual_domain,
    dual_edge,
)
from .models import (
    BoundaryCondition,
    EdgeConfig,
    FKParams,
    PottsConfig,
    PottsParams,
    bc_compare,
    cluster_count,
    fk_weight,
    p_of_T,
    potts_weight,
)
from .oracle import (
    Distribution,
    check_cbc,
    check_fkg,
    connectivity_distribution,
    exact_distribution,
    exact_fk_distribution,
    exact_potts_distribution,
    exact_sample,
    enumerate_monotone_events,
)
from .coupling import (
    dual_config,
    dual_p,
    p_c_hex,
    p_c_tri,
    self_dual_p,
    self_dual_p_exact,
    star_triangle_map,
)
from .sampler import ChainSpec, ESChain, FKChain, run_fk_chain
from .exploration import (
    DuplicatedState,
    ShieldingArc,
    count_annulus_clusters,
    estimate_good_points,
    explore_shielding_arc,
    induced_bc,
    run_duplication_scan,
    trace_interface,
)
