"""Numba kernels for the Monte Carlo engines.

All kernels operate on flat integer arrays prepared by the sampler module:
edge endpoint arrays, CSR adjacency over "quotient nodes" (vertices with
boundary-condition blocks contracted), and per-sweep uniform variates drawn
outside the kernel so that coupled chains can share them.
"""

from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def _uf_find(parent, x):
    root = x
    while parent[root] != root:
        root = parent[root]
    while parent[x] != root:
        nxt = parent[x]
        parent[x] = root
        x = nxt
    return root


@njit(cache=True)
def es_sweep(spins, edge_i, edge_j, forced, p, q, u_edges, u_colors,
             open_out, parent, colors):
    """One joint edge-spin sweep: resample edges given spins, then recolor
    clusters (forced to the boundary color where applicable, uniform
    otherwise).  Returns 1 on success, 0 on a boundary color conflict."""
    n_e = edge_i.shape[0]
    n_v = spins.shape[0]
    # open each monochromatic edge independently
    for k in range(n_e):
        if spins[edge_i[k]] == spins[edge_j[k]] and u_edges[k] < p:
            open_out[k] = 1
        else:
            open_out[k] = 0
    # cluster the open configuration
    for v in range(n_v):
        parent[v] = v
    for k in range(n_e):
        if open_out[k] == 1:
            ra = _uf_find(parent, edge_i[k])
            rb = _uf_find(parent, edge_j[k])
            if ra != rb:
                parent[rb] = ra
    # color clusters
    for v in range(n_v):
        colors[v] = 0
    for v in range(n_v):
        if forced[v] > 0:
            r = _uf_find(parent, v)
            if colors[r] != 0 and colors[r] != forced[v]:
                return 0
            colors[r] = forced[v]
    for v in range(n_v):
        r = _uf_find(parent, v)
        if colors[r] == 0:
            c = np.int64(u_colors[r] * q) + 1
            if c > q:
                c = q
            colors[r] = c
        spins[v] = colors[r]
    return 1


@njit(cache=True)
def _connected_off_edge(state, k, a, b, indptr, nbr_node, nbr_edge,
                        visited, queue, stamp):
    """Breadth-first search from node a to node b over open edges, ignoring
    edge k.  visited carries stamps so no clearing is needed."""
    if a == b:
        return True
    visited[a] = stamp
    queue[0] = a
    head = 0
    tail = 1
    while head < tail:
        v = queue[head]
        head += 1
        for idx in range(indptr[v], indptr[v + 1]):
            e = nbr_edge[idx]
            if e == k or state[e] == 0:
                continue
            w = nbr_node[idx]
            if visited[w] == stamp:
                continue
            if w == b:
                return True
            visited[w] = stamp
            queue[tail] = w
            tail += 1
    return False


@njit(cache=True)
def fk_sweep(state, en_i, en_j, indptr, nbr_node, nbr_edge, p, p_cond, u,
             visited, queue, stamp):
    """One heat-bath sweep in fixed edge order.  Each edge is opened with
    probability p when its endpoints are connected off the edge (in the
    quotient graph with boundary blocks contracted), else p/(p+q(1-p))."""
    n_e = en_i.shape[0]
    for k in range(n_e):
        stamp += 1
        conn = _connected_off_edge(state, k, en_i[k], en_j[k], indptr,
                                   nbr_node, nbr_edge, visited, queue, stamp)
        thr = p if conn else p_cond
        state[k] = 1 if u[k] < thr else 0
    return stamp


@njit(cache=True)
def fk_sandwich_sweep(state_hi, state_lo,
                      hi_i, hi_j, hi_ptr, hi_node, hi_edge,
                      lo_i, lo_j, lo_ptr, lo_node, lo_edge,
                      p, p_cond, u, visited_hi, visited_lo, queue, stamp):
    """Lock-step heat-bath sweep of two chains sharing the uniforms.

    Returns (stamp, ok) with ok = 0 as soon as the pointwise ordering
    state_lo <= state_hi breaks, which would indicate a kernel bug when the
    boundary conditions are comparable."""
    n_e = hi_i.shape[0]
    for k in range(n_e):
        stamp += 1
        conn_hi = _connected_off_edge(state_hi, k, hi_i[k], hi_j[k], hi_ptr,
                                      hi_node, hi_edge, visited_hi, queue,
                                      stamp)
        thr = p if conn_hi else p_cond
        state_hi[k] = 1 if u[k] < thr else 0
        stamp += 1
        conn_lo = _connected_off_edge(state_lo, k, lo_i[k], lo_j[k], lo_ptr,
                                      lo_node, lo_edge, visited_lo, queue,
                                      stamp)
        thr = p if conn_lo else p_cond
        state_lo[k] = 1 if u[k] < thr else 0
        if state_lo[k] > state_hi[k]:
            return stamp, 0
    return stamp, 1


@njit(cache=True)
def reach_from_sources(state, sources, indptr, nbr_v, nbr_e, visited, queue,
                       stamp):
    """Mark every vertex reachable from the source set through open edges of
    the given (sub)graph; visited[v] == stamp afterwards iff reachable."""
    tail = 0
    for s_idx in range(sources.shape[0]):
        s = sources[s_idx]
        if visited[s] != stamp:
            visited[s] = stamp
            queue[tail] = s
            tail += 1
    head = 0
    while head < tail:
        v = queue[head]
        head += 1
        for idx in range(indptr[v], indptr[v + 1]):
            if state[nbr_e[idx]] == 0:
                continue
            w = nbr_v[idx]
            if visited[w] != stamp:
                visited[w] = stamp
                queue[tail] = w
                tail += 1
    return stamp
