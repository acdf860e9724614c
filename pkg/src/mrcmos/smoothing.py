"""Colored Robin smoothing on the oversampled boxes.

One sweep visits the colors in ascending order.  All boxes of a color are
solved from the state as it was before the color started (Robin data taken
from the neighbours' current fields), then their restrictions to the
subdomains are committed together.
"""
from __future__ import annotations

import time
from typing import Optional

import numpy as np

from ._pool import pmap
from .darcy_core import FactorCache, weighted_trace
from .decomposition import OversampledPartition
from .mrcm import MultiscaleSolution
from .spaces import robin_edges


def gather_robin_data(state: MultiscaleSolution, op: OversampledPartition, i: int,
                      cache: FactorCache, alpha: float = 1.0) -> np.ndarray:
    """Robin data ``-beta u.n + p`` on the inner boundary of box ``i`` read
    from the neighbouring subdomains of the current state.

    ``n`` is the outward normal of the box and ``beta = alpha H / K_H``.
    Values follow the order of :func:`robin_edges`.
    """
    part = op.base
    g = part.grid
    hat = op.hats[i]
    bnd = hat.boundary
    inner = ~bnd.on_domain_boundary
    e = bnd.edges[inner]
    s = bnd.sign[inner]
    out_cell = bnd.outer_cell[inner]
    own = part.cell_owner
    j = own[out_cell]
    if np.any(j == i):
        raise RuntimeError(f"box {i}: boundary edge {e[np.flatnonzero(j == i)[0]]} is not covered by a neighbour")
    lo, hi = g.edge_lo[e], g.edge_hi[e]
    k = cache.problem.perm.values
    from_lo = own[lo] == j
    u = np.where(from_lo, state.flux_lo[e], state.flux_hi[e])
    same = own[lo] == own[hi]
    two_sided = weighted_trace(state.pressure[lo], state.pressure[hi], k[lo], k[hi])
    one_sided = state.pressure[out_cell] + s * u * g.h / (2 * k[out_cell])
    pi = np.where(same, two_sided, one_sided)
    beta = alpha * cache.H / cache.k_h[e]
    return -beta * s * u + pi


def _local_update(state, op, i, cache, alpha):
    lam = gather_robin_data(state, op, i, cache, alpha)
    hat, box = op.hats[i], op.base.subdomains[i]
    _, p, u, _ = cache.solve(hat, alpha, robin_g=lam, with_bc=True, with_source=True)
    return p[hat.local_cells(box.cells)], u[hat.local_edges(box.edges)]


def smoothing_sweep(state: MultiscaleSolution, op: OversampledPartition, cache: FactorCache,
                    alpha: float = 1.0, threads: int = 1,
                    order: Optional[list] = None) -> MultiscaleSolution:
    """One sweep over all colors; returns a new state with the counter advanced.

    ``order`` optionally permutes the processing order inside each color,
    which must not change the result.
    """
    new = state.copy()
    for group in op.color_groups():
        if order is not None:
            group = [i for i in order if i in group]
        frozen = new.copy()
        updates = pmap(lambda i: _local_update(frozen, op, i, cache, alpha), group, threads)
        for i, (p, u) in zip(group, updates):
            new.set_subdomain(i, p, u)
    new.meta["sweeps"] = state.meta.get("sweeps", 0) + 1
    return new


def smooth(solution: MultiscaleSolution, op: OversampledPartition, cache: FactorCache,
           n_sweeps: int, alpha: float = 1.0, threads: int = 1) -> MultiscaleSolution:
    """Apply ``n_sweeps`` smoothing sweeps; zero sweeps returns the input unchanged."""
    if n_sweeps < 0:
        raise ValueError("number of smoothing steps must be >= 0")
    if n_sweeps == 0:
        return solution
    t0 = time.perf_counter()
    state = solution
    for _ in range(n_sweeps):
        state = smoothing_sweep(state, op, cache, alpha, threads)
    if cache.problem.pure_neumann:
        state.pressure -= state.pressure.mean()
    state.meta["ns"] = solution.meta.get("ns", 0) + n_sweeps
    rt = dict(state.meta.get("runtime_ms", {}))
    rt["smoothing"] = rt.get("smoothing", 0.0) + 1e3 * (time.perf_counter() - t0)
    state.meta["runtime_ms"] = rt
    return state


__all__ = ["gather_robin_data", "smoothing_sweep", "smooth", "robin_edges"]
