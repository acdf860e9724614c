"""Discrete error norms, interface flux jumps and convergence slopes."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .decomposition import Partition
from .mrcm import MultiscaleSolution


@dataclass(frozen=True)
class ErrorReport:
    p_abs: float
    p_rel: float
    u_abs: float
    u_rel: float
    mean_adjusted: bool
    reference: str
    """'analytic' or 'fine-grid'."""


def _rel(abs_err: float, ref_norm: float) -> float:
    return abs_err / ref_norm if ref_norm > 0 else float("nan")


def l2_pressure_error(p: np.ndarray, p_ref: np.ndarray, h: float,
                      mean_adjust: bool = False) -> tuple[float, float]:
    """Cell-wise discrete L2 error ``sqrt(sum (p - p_ref)^2 h^2)`` and its relative value."""
    p = np.asarray(p, float)
    p_ref = np.asarray(p_ref, float)
    if p.shape != p_ref.shape:
        raise ValueError(f"pressure fields differ in size: {p.shape} vs {p_ref.shape}")
    if mean_adjust:
        p = p - p.mean()
        p_ref = p_ref - p_ref.mean()
    err = float(np.sqrt(np.sum((p - p_ref) ** 2)) * h)
    return err, _rel(err, float(np.sqrt(np.sum(p_ref ** 2)) * h))


def _sides(x, n_edges):
    if isinstance(x, MultiscaleSolution):
        return x.flux_lo, x.flux_hi
    x = np.asarray(x, float)
    if x.shape != (n_edges,):
        raise ValueError(f"flux field has shape {x.shape}, expected ({n_edges},)")
    return x, x


def l2_flux_error(sol: MultiscaleSolution, ref) -> tuple[float, float]:
    """Edge-wise discrete L2 flux error.

    Edges off the skeleton weigh ``h^2``; each of the two one-sided values on
    a skeleton edge weighs ``h^2 / 2``.  ``ref`` is a single-valued edge
    array or another composite solution.
    """
    part = sol.partition
    g = part.grid
    lo, hi = _sides(sol, g.n_edges)
    rlo, rhi = _sides(ref, g.n_edges)
    # off the skeleton lo == hi, so half of each side gives the full h^2 weight
    w = 0.5 * g.h ** 2
    err = float(np.sqrt(w * np.sum((lo - rlo) ** 2 + (hi - rhi) ** 2)))
    norm = float(np.sqrt(w * np.sum(rlo ** 2 + rhi ** 2)))
    return err, _rel(err, norm)


def default_jump_line(part: Partition) -> list[int]:
    """Faces of the middle horizontal skeleton line (longest horizontal interface)."""
    if part.my < 2:
        return [f.index for f in part.faces if f.axis == 0 and part.block(f.lo)[0] == (part.mx - 2) // 2]
    row = (part.my - 2) // 2
    return [f.index for f in part.faces if f.axis == 1 and part.block(f.lo)[1] == row]


def flux_jump_profile(sol: MultiscaleSolution, faces: Sequence[int]) -> np.ndarray:
    """Flux conservation defect ``u_i.n_i + u_j.n_j`` on the fine edges of a
    straight chain of coarse faces, in order along the line."""
    part = sol.partition
    fs = [part.faces[f] for f in faces]
    if not fs:
        return np.zeros(0)
    axis = {f.axis for f in fs}
    if len(axis) != 1:
        raise ValueError("faces mix vertical and horizontal interfaces")
    ax = axis.pop()
    # line coordinate and position along it, in block units
    line = {part.block(f.lo)[ax] for f in fs}
    if len(line) != 1:
        raise ValueError("faces are not on one straight line")
    along = sorted(part.block(f.lo)[1 - ax] for f in fs)
    if along != list(range(along[0], along[0] + len(along))):
        raise ValueError("faces do not form a connected line")
    fs.sort(key=lambda f: part.block(f.lo)[1 - ax])
    e = np.concatenate([f.edges for f in fs])
    return sol.flux_lo[e] - sol.flux_hi[e]


def convergence_slope(pairs) -> float:
    """Least-squares slope of log(err) against log(h)."""
    pairs = list(pairs)
    if len(pairs) < 2:
        raise ValueError("need at least two (h, err) pairs")
    h, err = np.asarray(pairs, float).T
    if np.any(h <= 0) or np.any(err <= 0):
        raise ValueError("h and err must be positive")
    if np.unique(h).size < 2:
        raise ValueError("h values must be distinct")
    return float(np.polyfit(np.log(h), np.log(err), 1)[0])


def error_report(sol: MultiscaleSolution, ref_pressure: np.ndarray, ref_flux: np.ndarray,
                 reference: str, mean_adjust: bool = False) -> ErrorReport:
    h = sol.partition.grid.h
    pa, pr = l2_pressure_error(sol.pressure, ref_pressure, h, mean_adjust)
    ua, ur = l2_flux_error(sol, ref_flux)
    return ErrorReport(pa, pr, ua, ur, mean_adjust, reference)


def max_cell_imbalance(sol: MultiscaleSolution, source: np.ndarray,
                       subdomains: Optional[Sequence[int]] = None) -> float:
    """Largest |sum of outward fluxes * h - f h^2| over cells, using each
    subdomain's own side on its interface edges."""
    part = sol.partition
    g = part.grid
    h = g.h
    worst = 0.0
    for i in (range(part.n_sub) if subdomains is None else subdomains):
        box = part.subdomains[i]
        u = sol.subdomain_flux(i)
        lo = g.edge_lo[box.edges]
        hi = g.edge_hi[box.edges]
        # outward flux of a cell is +u on its +axis edge, -u on its -axis edge,
        # with u measured along the fixed normal (flipped on left/bottom boundaries)
        un = u * g.edge_normal_sign[box.edges] * h
        bal = np.zeros(g.n_cells)
        np.add.at(bal, lo[lo >= 0], un[lo >= 0])
        np.add.at(bal, hi[hi >= 0], -un[hi >= 0])
        c = box.cells
        r = bal[c] - np.asarray(source)[c] * h * h
        worst = max(worst, float(np.abs(r).max()))
    return worst
