"""Command-line surface: exact oracles, verification checks, chain sampling,
and the scan experiments, with reproducible machine-readable output.

Commands: exact, check, sample, scan (dichotomy | shield | goodpoints |
annulus).  Every output starts with a header object {command, version, seed,
parameters}; identical invocations produce byte-identical files.  Exit codes:
0 success/pass, 1 check failure, 2 usage or validation error, 3 resource
limit exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

from . import __version__
from .lattice import (
    LatticeKind,
    build_box,
    build_face_block,
    build_hex_window,
    build_path,
    build_slit,
    build_triangle_star,
    dual_domain,
    enumerate_connected_edge_sets,
    domain_from_edges,
)
from .models import BoundaryCondition, EdgeConfig, FKParams, p_of_T
from . import oracle
from . import coupling
from . import sampler
from . import exploration


class ResourceLimit(Exception):
    pass


def _fmt(x):
    """17 significant digits for floats; exact strings otherwise."""
    if isinstance(x, float):
        return format(x, ".17g")
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return str(x.numerator)
        return "%d/%d" % (x.numerator, x.denominator)
    return str(x)


def _jsonable(x):
    if isinstance(x, Fraction):
        return _fmt(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, frozenset):
        return sorted(x)
    return x


def _header(command, seed, params):
    return {"command": command, "version": __version__, "seed": seed,
            "parameters": _jsonable(params)}


class _Output:
    """Collects a header plus either a result object (json) or rows (csv)."""

    def __init__(self, fmt, path):
        self.fmt = fmt
        self.path = path
        self.header = None
        self.result = {}
        self.columns = None
        self.rows = []

    def write(self):
        lines = []
        if self.fmt == "json":
            obj = dict(self.header)
            obj["result"] = _jsonable(self.result)
            if self.rows:
                obj["rows"] = [_jsonable(dict(zip(self.columns, r)))
                               for r in self.rows]
            lines.append(json.dumps(obj, sort_keys=True))
        else:
            lines.append("# " + json.dumps(self.header, sort_keys=True))
            for k in sorted(self.result):
                lines.append("# %s=%s" % (k, _fmt(self.result[k])))
            if self.columns:
                lines.append(",".join(self.columns))
                for r in self.rows:
                    lines.append(",".join(_fmt(v) for v in r))
        text = "\n".join(lines) + "\n"
        if self.path:
            with open(self.path, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)


# ---------------------------------------------------------------------------
# Shared argument plumbing


def _resolve_seed(args):
    if getattr(args, "seed", None) is not None:
        return args.seed
    return int(os.environ.get("GIBBSLAB_SEED", "0"))


def _common_flags(p):
    p.add_argument("--seed", type=int, default=None,
                   help="default from GIBBSLAB_SEED, else 0")
    p.add_argument("--out", default=None, help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--config", default=None,
                   help="key=value file of defaults; flags override")
    p.add_argument("--workers", type=int, default=1,
                   help="parallelism over independent trials (advisory)")


def _build_domain(spec):
    if spec == "edge":
        return build_path(1)
    if spec == "path2":
        return build_path(2)
    if spec.startswith("path:"):
        return build_path(int(spec.split(":")[1]))
    if spec == "block2":
        return build_face_block(2)
    if spec.startswith("block:"):
        return build_face_block(int(spec.split(":")[1]))
    if spec.startswith("box:"):
        return build_box(int(spec.split(":")[1]))
    if spec == "tri":
        return build_triangle_star()[0]
    if spec == "star":
        return build_triangle_star()[1]
    raise ValueError("unknown domain spec %r" % spec)


def _build_window(spec):
    if not spec.startswith("faces:"):
        raise ValueError("loop domains use faces:K (a row of K hexagons)")
    k = int(spec.split(":")[1])
    return build_hex_window([(2 * t, 0) for t in range(k)])


def _bc_of(domain, name):
    if name == "free":
        return BoundaryCondition.free(domain.boundary)
    if name == "wired":
        return BoundaryCondition.wired(domain.boundary)
    raise ValueError("bc must be free or wired")


def _edge_p(args, rational):
    if args.p is not None:
        return Fraction(args.p) if rational else float(Fraction(args.p))
    if args.T is not None:
        return p_of_T(float(args.T))
    raise ValueError("provide --p or --T")


# ---------------------------------------------------------------------------
# exact


def cmd_exact(args):
    out = _Output(args.format, args.out)
    rational = args.rational
    seed = _resolve_seed(args)
    out.header = _header("exact", seed, {
        "model": args.model, "domain": args.domain, "bc": args.bc,
        "p": args.p, "q": args.q, "T": args.T, "n": args.n, "x": args.x,
        "rational": rational, "full": args.full, "format": args.format})
    if args.model in ("loop", "spin"):
        window = _build_window(args.domain)
        n = Fraction(args.n) if rational else float(Fraction(args.n))
        x = Fraction(args.x) if rational else float(Fraction(args.x))
        dist = oracle.exact_loop_distribution(window, n, x)
        out.result["Z"] = dist.total
        out.result["n_faces"] = len(window.faces)
        out.columns = ("config_hex", "probability")
        if args.full:
            for bits, w in dist.support:
                out.rows.append((format(bits, "x"), w / dist.total))
        out.write()
        return 0
    domain = _build_domain(args.domain)
    if args.model == "fk":
        p = _edge_p(args, rational)
        q = Fraction(args.q) if rational else float(Fraction(args.q))
        xi = _bc_of(domain, args.bc)
        dist = oracle.exact_fk_distribution(domain, xi, FKParams(p, q))
        out.result["Z"] = dist.total
        for ei in range(domain.n_edges):
            marg = dist.event_probability(
                lambda bits, e=ei: (bits >> e) & 1)
            out.result["edge_%d_open" % ei] = marg
        out.columns = ("config_hex", "probability")
        if args.full:
            for bits, w in dist.support:
                out.rows.append((format(bits, "x"), w / dist.total))
        out.write()
        return 0
    if args.model in ("potts", "es"):
        if args.T is None:
            raise ValueError("potts/es need --T")
        q = int(args.q)
        import math
        b = Fraction(args.b) if (rational and args.b) else \
            math.exp(-1.0 / float(args.T))
        tau = None
        if args.bc == "wired":
            tau = [0] * domain.n_vertices
            for i in domain.boundary:
                tau[i] = 1
        if args.model == "potts":
            dist = oracle.exact_potts_distribution(domain, q, b, tau)
            out.result["Z"] = dist.total
            agree = dist.event_probability(
                lambda spins: all(spins[i] == spins[j]
                                  for i, j in domain.edges))
            out.result["all_edges_agree"] = agree
            if domain.n_edges == 1:
                out.result["agreement"] = agree
        else:
            dist = oracle.exact_es_distribution(domain, q, b, tau)
            out.result["Z"] = dist.total
            for ei in range(domain.n_edges):
                out.result["edge_%d_open" % ei] = dist.event_probability(
                    lambda key, e=ei: (key[0] >> e) & 1)
        out.write()
        return 0
    raise ValueError("unknown model %r" % args.model)


# ---------------------------------------------------------------------------
# check


def _check_duality(args, out):
    rational = args.rational
    q = Fraction(args.q) if rational else float(args.q)
    if args.p is not None:
        ps = [Fraction(args.p) if rational else float(Fraction(args.p))]
    else:
        ps = [Fraction(1, 3), Fraction(1, 2)] if rational \
            else [1 / 3, 1 / 2, coupling.self_dual_p(float(q))]
    domain = build_face_block(2)
    dual = dual_domain(domain)
    worst = 0.0
    for p in ps:
        xi = BoundaryCondition.free(domain.boundary)
        prim = oracle.exact_fk_distribution(domain, xi, FKParams(p, q))
        push = prim.pushforward(
            lambda bits: coupling.dual_config(
                domain, EdgeConfig(domain, bits), dual)[0].bits)
        xi_d = BoundaryCondition.wired(dual.boundary)
        dd = oracle.exact_fk_distribution(
            dual, xi_d, FKParams(coupling.dual_p(p, q), q))
        if rational:
            if not push.equals_exactly(dd):
                out.result["witness_p"] = p
                return False
        else:
            tv = push.tv_distance(dd)
            worst = max(worst, tv)
            if tv > 1e-10:
                out.result["witness_p"] = p
                out.result["tv"] = tv
                return False
    out.result["max_tv"] = worst if not rational else 0
    return True


def _check_star_triangle(args, out):
    q = float(args.q)
    p = coupling.p_c_tri(q)
    tri, star = build_triangle_star()
    p_star = coupling.dual_p(p, q)
    worst = 0.0
    parts = [(), ((0, 1),), ((0, 2),), ((1, 2),), ((0, 1, 2),)]
    for blocks in parts:
        xi_t = BoundaryCondition(
            tri.boundary, [frozenset(tri.terminals[t] for t in b)
                           for b in blocks])
        xi_s = BoundaryCondition(
            star.boundary, [frozenset(star.terminals[t] for t in b)
                            for b in blocks])
        dt = oracle.connectivity_distribution(tri, xi_t, FKParams(p, q),
                                              tri.terminals, include_bc=False)
        ds = oracle.connectivity_distribution(star, xi_s, FKParams(p_star, q),
                                              star.terminals,
                                              include_bc=False)
        worst = max(worst, dt.tv_distance(ds))
    out.result["p_c"] = p
    out.result["max_tv"] = worst
    k0, k1 = coupling.star_triangle_kernel(p, q)
    out.result["kernel_row_sum"] = k0 + 3 * k1
    return worst <= 1e-10 and abs(k0 + 3 * k1 - 1) <= 1e-12


def _check_es(args, out):
    import math
    q = int(args.q)
    T = float(args.T) if args.T is not None else 1.0
    b = math.exp(-1.0 / T)
    worst = 0.0
    for dom in (build_path(1), build_path(2)):
        es = oracle.exact_es_distribution(dom, q, b)
        fk = oracle.exact_fk_distribution(
            dom, BoundaryCondition.free(dom.boundary),
            FKParams(1.0 - b, float(q)))
        potts = oracle.exact_potts_distribution(dom, q, b)
        worst = max(worst, es.pushforward(lambda k: k[0]).tv_distance(fk))
        worst = max(worst, es.pushforward(lambda k: k[1]).tv_distance(potts))
    out.result["max_tv"] = worst
    if q == 2:
        dom = build_path(1)
        potts = oracle.exact_potts_distribution(dom, 2, b)
        agree = potts.event_probability(lambda s: s[0] == s[1])
        target = 1.0 / (1.0 + b)
        out.result["agreement"] = agree
        out.result["agreement_expected"] = target
        worst = max(worst, abs(float(agree) - target))
    return worst <= 1e-12


def _check_loop_spin(args, out):
    n = Fraction(args.n) if args.n else 2
    x = Fraction(args.x) if args.x else Fraction(1, 2)
    from .models import spin_weight, loop_weight, LoopConfig, FaceSpinConfig
    worst_gap = 0
    for k in (1, 2, 3):
        window = build_hex_window([(2 * t, 0) for t in range(k)])
        loops = oracle.exact_loop_distribution(window, n, x)
        z_loop = loops.total
        z_spin = 0
        for ring_val in (1, -1):
            ring = {f: ring_val for f in window.ring}
            spins = oracle.exact_spin_distribution(window, n, x, ring)
            z_spin += spins.total
        if z_spin != 2 * z_loop:
            out.result["witness_faces"] = k
            return False
        # configuration-by-configuration: each loop weight equals the
        # weight of either coherent spin field
        for bits, w in loops.support:
            plus, minus = coupling.loops_to_spins(LoopConfig(window, bits))
            for sp in (plus, minus):
                gap = spin_weight(sp, n, x) - w
                worst_gap = max(worst_gap, abs(gap))
                if gap != 0:
                    out.result["witness_config"] = format(bits, "x")
                    return False
    window = build_hex_window([(0, 0)])
    loops = oracle.exact_loop_distribution(window, n, x)
    p_loop = loops.event_probability(lambda bits: bits != 0)
    out.result["one_face_loop_probability"] = p_loop
    out.result["one_face_expected"] = n * x ** 6 / (1 + n * x ** 6)
    return p_loop == n * x ** 6 / (1 + n * x ** 6)


def _check_fkg_sweep(args, out):
    p = Fraction(args.p) if (args.rational and args.p) else \
        (float(Fraction(args.p)) if args.p else 0.5)
    q = Fraction(args.q) if args.rational else float(args.q)
    min_slack = None
    witness = None
    n_checked = 0
    for es in enumerate_connected_edge_sets(args.edges):
        dom = domain_from_edges(LatticeKind.SQUARE_L, es)
        for xi in (BoundaryCondition.free(dom.boundary),
                   BoundaryCondition.wired(dom.boundary)):
            rep = oracle.check_fkg(dom, xi, FKParams(p, q))
            n_checked += rep.n_checked
            if min_slack is None or float(rep.min_slack) < float(min_slack):
                min_slack, witness = rep.min_slack, (es, rep.witness)
    out.result["min_slack"] = min_slack
    out.result["pairs_checked"] = n_checked
    if float(min_slack) < -1e-12:
        out.result["witness"] = repr(witness)
        return False
    return True


def _check_cbc_sweep(args, out):
    from .models import bc_compare
    p = Fraction(args.p) if (args.rational and args.p) else \
        (float(Fraction(args.p)) if args.p else 0.5)
    q = Fraction(args.q) if args.rational else float(args.q)
    min_slack = None
    n_checked = 0
    for es in enumerate_connected_edge_sets(args.edges):
        dom = domain_from_edges(LatticeKind.SQUARE_L, es)
        if len(dom.boundary) > 4:
            continue
        parts = oracle.boundary_partitions(dom.boundary)
        for i, xi in enumerate(parts):
            for xi2 in parts[i + 1:]:
                if bc_compare(xi, xi2) == "incomparable":
                    continue
                rep = oracle.check_cbc(dom, xi, xi2, FKParams(p, q))
                n_checked += rep.n_checked
                if min_slack is None or \
                        float(rep.min_slack) < float(min_slack):
                    min_slack = rep.min_slack
    out.result["min_slack"] = min_slack
    out.result["events_checked"] = n_checked
    return float(min_slack) >= -1e-12


def cmd_check(args):
    out = _Output(args.format, args.out)
    seed = _resolve_seed(args)
    out.header = _header("check", seed, {
        "what": args.what, "q": args.q, "p": args.p, "T": args.T,
        "n": args.n, "x": args.x, "edges": args.edges,
        "rational": args.rational, "format": args.format})
    runner = {
        "duality": _check_duality,
        "star-triangle": _check_star_triangle,
        "es": _check_es,
        "loop-spin": _check_loop_spin,
        "fkg": _check_fkg_sweep,
        "cbc": _check_cbc_sweep,
    }[args.what]
    passed = runner(args, out)
    out.result["passed"] = bool(passed)
    out.write()
    return 0 if passed else 1


# ---------------------------------------------------------------------------
# sample


def cmd_sample(args):
    out = _Output(args.format, args.out)
    seed = _resolve_seed(args)
    out.header = _header("sample", seed, {
        "model": args.model, "R": args.R, "bc": args.bc, "p": args.p,
        "q": args.q, "T": args.T, "sweeps": args.sweeps,
        "burn_in": args.burn_in, "format": args.format})
    domain = build_box(args.R)
    p = _edge_p(args, False)
    if args.model == "fk":
        xi = _bc_of(domain, args.bc)
        spec = sampler.ChainSpec(domain, xi, FKParams(p, float(args.q)),
                                 args.sweeps, args.burn_in, seed)
        est, _ = sampler.run_fk_chain(spec)
    elif args.model == "potts":
        tau = None
        if args.bc == "wired":
            tau = [0] * domain.n_vertices
            for i in domain.boundary:
                tau[i] = 1
        est, _ = sampler.run_potts_es_chain(
            domain, int(args.q), p, tau, args.sweeps, args.burn_in, seed)
    else:
        raise ValueError("sample supports fk or potts")
    out.columns = ("observable", "mean", "se", "batches", "count")
    for name in sorted(est):
        e = est[name]
        out.rows.append((name, e.mean, e.se, e.batches, e.count))
    out.write()
    return 0


# ---------------------------------------------------------------------------
# scan


def cmd_scan_dichotomy(args):
    out = _Output(args.format, args.out)
    seed = _resolve_seed(args)
    out.header = _header("scan dichotomy", seed, {
        "q": args.q, "p": args.p, "n": args.n, "sweeps": args.sweeps,
        "burn_in": args.burn_in, "format": args.format})
    q = int(args.q)
    p = float(Fraction(args.p)) if args.p else coupling.self_dual_p(q)
    domain = build_box(args.n)
    tau = [0] * domain.n_vertices
    for i in domain.boundary:
        tau[i] = 1
    obs = {"edge_density": lambda s, o: float(o.mean()),
           "central_density": sampler.central_density_observable(
               domain, max(args.n // 8, 2))}
    est_w, _ = sampler.run_potts_es_chain(domain, q, p, tau, args.sweeps,
                                          args.burn_in, seed, init=1,
                                          observables=obs)
    est_f, _ = sampler.run_potts_es_chain(domain, q, p, None, args.sweeps,
                                          args.burn_in, seed, init="random",
                                          observables=obs)
    for name in ("edge_density", "central_density"):
        out.result["wired_%s" % name] = est_w[name].mean
        out.result["free_%s" % name] = est_f[name].mean
    ew, ef = est_w["central_density"], est_f["central_density"]
    gap = ew.mean - ef.mean
    se = (ew.se ** 2 + ef.se ** 2) ** 0.5
    out.result.update({
        "wired_mean": ew.mean, "wired_se": ew.se,
        "free_mean": ef.mean, "free_se": ef.se,
        "gap": gap, "combined_se": se,
        "gap_in_se": gap / se if se > 0 else float("inf")})
    out.write()
    return 0


def cmd_scan_shield(args):
    out = _Output(args.format, args.out)
    seed = _resolve_seed(args)
    ladder = [int(t) for t in args.ladder.split(",")]
    q = int(args.q)
    p = float(Fraction(args.p)) if args.p else coupling.self_dual_p(q)
    out.header = _header("scan shield", seed, {
        "q": q, "p": args.p, "R": args.R, "ladder": ladder,
        "trials": args.trials, "sweeps_between": args.sweeps_between,
        "burn_in": args.burn_in, "format": args.format})
    rows, summary = exploration.run_duplication_scan(
        args.R, p, q, ladder, args.trials, seed,
        sweeps_between=args.sweeps_between, burn_in=args.burn_in)
    for n in sorted(summary):
        s = summary[n]
        out.result["scale_%d_arc_frequency" % n] = s["arc_frequency"]
        out.result["scale_%d_domination" % n] = s["domination_fraction"]
        out.result["scale_%d_invariant_failures" % n] = \
            s["invariant_failures"]
        out.result["scale_%d_max_arcs" % n] = s["max_arcs"]
    out.columns = ("trial", "scale", "arc_found", "case_upper", "case_lower",
                   "n_arcs", "bc_dominates")
    for r in rows:
        out.rows.append((r.trial, r.scale, int(r.arc_found), r.case_upper,
                         r.case_lower, r.n_arcs, int(r.bc_dominates)))
    out.write()
    return 0


def cmd_scan_goodpoints(args):
    out = _Output(args.format, args.out)
    seed = _resolve_seed(args)
    q = int(args.q)
    p = float(Fraction(args.p)) if args.p else coupling.self_dual_p(q)
    out.header = _header("scan goodpoints", seed, {
        "q": q, "p": args.p, "M": args.M, "N": args.N, "R": args.R,
        "samples": args.samples, "burn_in": args.burn_in,
        "format": args.format})
    slit = build_slit(args.M, args.N, args.R)
    res = exploration.estimate_good_points(slit, q, p, args.samples, seed,
                                           burn_in=args.burn_in)
    out.result["min_successes"] = min(r["successes"] for r in res)
    out.columns = ("x", "successes", "samples", "estimate", "se")
    for r in res:
        out.rows.append((r["x"], r["successes"], r["samples"],
                         r["estimate"], r["se"]))
    out.write()
    return 0


def cmd_scan_annulus(args):
    out = _Output(args.format, args.out)
    seed = _resolve_seed(args)
    q = int(args.q)
    p = float(Fraction(args.p)) if args.p else coupling.self_dual_p(q)
    out.header = _header("scan annulus", seed, {
        "q": q, "p": args.p, "R": args.R, "n": args.n,
        "samples": args.samples, "burn_in": args.burn_in, "bc": args.bc,
        "format": args.format})
    domain = build_box(args.R)
    tau = None
    if args.bc == "wired":
        tau = [0] * domain.n_vertices
        for i in domain.boundary:
            tau[i] = 1
    chain = sampler.ESChain(domain, q, p, tau, seed,
                            init=1 if args.bc == "wired" else "random")
    for _ in range(args.burn_in):
        chain.sweep()
    counts = {}
    total = 0
    for _ in range(args.samples):
        chain.sweep()
        c = exploration.count_annulus_clusters(domain, chain.config(), args.n)
        counts[c] = counts.get(c, 0) + 1
        total += c
    out.result["mean_crossing_clusters"] = total / args.samples
    out.columns = ("crossing_clusters", "occurrences")
    for c in sorted(counts):
        out.rows.append((c, counts[c]))
    out.write()
    return 0


# ---------------------------------------------------------------------------
# parser


def _build_parser():
    ap = argparse.ArgumentParser(prog="gibbslab")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("exact", help="exact small-instance computation")
    p.add_argument("--model", required=True,
                   choices=("fk", "potts", "es", "loop", "spin"))
    p.add_argument("--domain", default="edge")
    p.add_argument("--bc", default="free")
    p.add_argument("--p", default=None)
    p.add_argument("--q", default="2")
    p.add_argument("--T", default=None)
    p.add_argument("--b", default=None)
    p.add_argument("--n", default="2")
    p.add_argument("--x", default="1/2")
    p.add_argument("--rational", action="store_true")
    p.add_argument("--full", action="store_true",
                   help="include the full distribution table")
    _common_flags(p)
    p.set_defaults(func=cmd_exact)

    p = sub.add_parser("check", help="oracle-backed verification")
    p.add_argument("what", choices=("fkg", "cbc", "duality", "star-triangle",
                                    "es", "loop-spin"))
    p.add_argument("--q", default="2")
    p.add_argument("--p", default=None)
    p.add_argument("--T", default=None)
    p.add_argument("--n", default=None)
    p.add_argument("--x", default=None)
    p.add_argument("--edges", type=int, default=4)
    p.add_argument("--rational", action="store_true")
    _common_flags(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("sample", help="Monte Carlo chain on a box")
    p.add_argument("--model", default="fk", choices=("fk", "potts"))
    p.add_argument("--R", type=int, default=8)
    p.add_argument("--bc", default="free")
    p.add_argument("--p", default=None)
    p.add_argument("--q", default="2")
    p.add_argument("--T", default=None)
    p.add_argument("--sweeps", type=int, default=1000)
    p.add_argument("--burn-in", type=int, default=100, dest="burn_in")
    _common_flags(p)
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("scan", help="experiments")
    ssub = p.add_subparsers(dest="scan_kind", required=True)

    s = ssub.add_parser("dichotomy")
    s.add_argument("--q", default="25")
    s.add_argument("--p", default=None)
    s.add_argument("--n", type=int, default=32)
    s.add_argument("--sweeps", type=int, default=20000)
    s.add_argument("--burn-in", type=int, default=1000, dest="burn_in")
    _common_flags(s)
    s.set_defaults(func=cmd_scan_dichotomy)

    s = ssub.add_parser("shield")
    s.add_argument("--q", default="25")
    s.add_argument("--p", default=None)
    s.add_argument("--R", type=int, default=48)
    s.add_argument("--ladder", default="4,8,16")
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--sweeps-between", type=int, default=20,
                   dest="sweeps_between")
    s.add_argument("--burn-in", type=int, default=200, dest="burn_in")
    _common_flags(s)
    s.set_defaults(func=cmd_scan_shield)

    s = ssub.add_parser("goodpoints")
    s.add_argument("--q", default="25")
    s.add_argument("--p", default=None)
    s.add_argument("--M", type=int, default=8)
    s.add_argument("--N", type=int, default=8)
    s.add_argument("--R", type=int, default=24)
    s.add_argument("--samples", type=int, default=10000)
    s.add_argument("--burn-in", type=int, default=200, dest="burn_in")
    _common_flags(s)
    s.set_defaults(func=cmd_scan_goodpoints)

    s = ssub.add_parser("annulus")
    s.add_argument("--q", default="2")
    s.add_argument("--p", default=None)
    s.add_argument("--R", type=int, default=12)
    s.add_argument("--n", type=int, default=3)
    s.add_argument("--bc", default="wired")
    s.add_argument("--samples", type=int, default=1000)
    s.add_argument("--burn-in", type=int, default=200, dest="burn_in")
    _common_flags(s)
    s.set_defaults(func=cmd_scan_annulus)

    return ap


def _apply_config_file(argv):
    """Inject key=value defaults from --config FILE before the user flags of
    the same subcommand, so explicit flags win."""
    if "--config" not in argv:
        return argv
    i = argv.index("--config")
    path = argv[i + 1]
    extra = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            k, _, v = line.partition("=")
            k = "--" + k.strip().replace("_", "-")
            v = v.strip()
            if v.lower() == "true":
                extra.append(k)
            elif v.lower() != "false":
                extra.extend([k, v])
    # insert right after the (sub)command tokens at the front
    head = 1
    if argv and argv[0] == "scan" and len(argv) > 1:
        head = 2
    elif argv and argv[0] == "check" and len(argv) > 1 \
            and not argv[1].startswith("-"):
        head = 2
    return argv[:head] + extra + argv[head:]


def main(argv=None):
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        argv = _apply_config_file(argv)
        args = _build_parser().parse_args(argv)
        return args.func(args)
    except ValueError as err:
        if "enumeration cap" in str(err) or "state space" in str(err):
            sys.stderr.write("resource limit: %s\n" % err)
            return 3
        sys.stderr.write("error: %s\n" % err)
        return 2
    except OSError as err:
        sys.stderr.write("error: %s\n" % err)
        return 2


if __name__ == "__main__":
    sys.exit(main())
