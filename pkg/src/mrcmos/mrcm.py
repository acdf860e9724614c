"""Multiscale Robin coupled solver.

The local solution on each subdomain is split into a bar part, which
carries the sources and outer boundary data with zero Robin data, and a
combination of multiscale basis functions with coefficients ``X``.  The
coefficients solve the interface system that imposes weak continuity of
normal flux (tested by ``M``) and of pressure (tested by ``V``) face by face.

Inner products on the skeleton use the midpoint rule per fine edge.
"""
from __future__ import annotations

import time
import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla

from ._pool import pmap
from .darcy_core import FactorCache
from .decomposition import OversampledPartition, Partition, oversample
from .problem import DarcyProblem
from .spaces import (FINE, FaceSpace, InformedSpace, build_face_spaces, build_fine_space,
                     build_informed_space, build_polynomial_space, dimension_check,
                     hat_traces, robin_edges)


class IllPosedSpacesError(RuntimeError):
    """Interface system with more than one near-null direction."""


@dataclass(frozen=True, eq=False)
class BarSolution:
    sub: int
    pressure: np.ndarray
    flux: np.ndarray
    """``u . n_fixed`` on the subdomain's local edges."""
    gamma_flux_out: np.ndarray
    robin: np.ndarray
    """Robin data on ``gamma(i)`` the bar part was solved with."""


def compute_bar(part: Partition, i: int, cache: FactorCache, alpha: float,
                op: Optional[OversampledPartition] = None) -> BarSolution:
    """Subdomain solve carrying the problem's sources and outer boundary data.

    Without ``op`` the Robin data on the interface is zero.  With ``op`` it is
    the interface trace of the same forced problem solved on the oversampled
    box (zero Robin data on the box boundary), so that the bar part already
    sees the outer boundary data and sources next to the subdomain.
    """
    box = part.subdomains[i]
    gamma = part.gamma(i)
    robin = np.zeros(gamma.size)
    g = None
    if op is not None and op.l > 0:
        robin, _, _ = hat_traces(op, i, cache, alpha, forcing=True)
        r = robin_edges(box)
        order = np.argsort(r)
        g = np.zeros(r.size)
        g[order[np.searchsorted(r, gamma, sorter=order)]] = robin
    _, p, u, _ = cache.solve(box, alpha, robin_g=g, with_bc=True, with_source=True)
    gl = box.local_edges(gamma)
    return BarSolution(i, p, u, part.gamma_sign(i) * u[gl], robin)


@dataclass(frozen=True, eq=False)
class InterfaceSystem:
    matrix: np.ndarray
    rhs: np.ndarray
    col_offsets: np.ndarray
    n_m: int
    """Number of flux-continuity rows; the pressure rows follow."""

    @property
    def size(self) -> int:
        return self.rhs.size


def assemble_interface(part: Partition, spaces: Sequence[InformedSpace],
                       bars: Sequence[BarSolution], m_space: FaceSpace,
                       v_space: FaceSpace) -> InterfaceSystem:
    dimension_check(spaces, m_space, v_space)
    h = part.grid.h
    col = np.concatenate([[0], np.cumsum([s.n for s in spaces])]).astype(int)
    n = int(col[-1])
    a = np.zeros((n, n))
    b = np.zeros(n)
    om, ov = m_space.offsets, v_space.offsets + m_space.dim
    for f, face in enumerate(part.faces):
        bm = m_space.bases[f].values
        bv = v_space.bases[f].values
        rm = slice(om[f], om[f + 1])
        rv = slice(ov[f], ov[f + 1])
        for s in (face.lo, face.hi):
            sp, bar = spaces[s], bars[s]
            sl = sp.face_slices[f]
            sig = sp.sign[sl][:, None]
            beta = sp.beta[sl][:, None]
            flux = sp.gamma_flux_out[sl]
            cs = slice(col[s], col[s + 1])
            a[rm, cs] += h * bm.T @ flux
            a[rv, cs] += h * bv.T @ (sig * (beta * flux + sp.phi[sl]))
            bflux = bar.gamma_flux_out[sl][:, None]
            b[rm] -= h * (bm.T @ bflux)[:, 0]
            brob = bar.robin[sl][:, None]
            b[rv] -= h * (bv.T @ (sig * (beta * bflux + brob)))[:, 0]
    return InterfaceSystem(a, b, col, m_space.dim)


def solve_interface(system: InterfaceSystem, tol: float = 1e-12) -> tuple[np.ndarray, int]:
    """Dense solve of the interface system.

    Rows are equilibrated first.  A pivot below ``tol * max pivot`` triggers
    a singular value analysis: one near-null direction (the constant Robin
    shift of a pure Neumann problem) is removed by a minimum-norm solve; more
    than one is an error.  Returns ``(X, number of deflated modes)``.
    """
    a, b = system.matrix, system.rhs
    if a.size == 0:
        return np.zeros(0), 0
    scale = np.abs(a).max(axis=1)
    scale[scale == 0] = 1.0
    a_s = a / scale[:, None]
    b_s = b / scale
    with warnings.catch_warnings():
        # an exactly singular pivot is handled by the deflation below
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(a_s, check_finite=True)
    d = np.abs(np.diag(lu))
    if d.min() > tol * d.max():
        return sla.lu_solve((lu, piv), b_s), 0
    u, s, vt = np.linalg.svd(a_s)
    keep = s > tol * s[0]
    deficiency = int((~keep).sum())
    if deficiency > 1:
        raise IllPosedSpacesError(
            f"interface system has {deficiency} near-null directions (tolerance {tol:g})")
    x = vt[keep].T @ ((u[:, keep].T @ b_s) / s[keep])
    return x, deficiency


@dataclass(eq=False)
class MultiscaleSolution:
    """Composite solution on the grid.

    Cell pressures are single valued.  Each edge stores the flux seen from
    the lower-index and the higher-index subdomain (``u . n_fixed``); the two
    differ only on skeleton edges.
    """

    partition: Partition
    pressure: np.ndarray
    flux_lo: np.ndarray
    flux_hi: np.ndarray
    coefficients: np.ndarray = field(default_factory=lambda: np.zeros(0))
    meta: dict = field(default_factory=dict)

    def copy(self) -> "MultiscaleSolution":
        return MultiscaleSolution(self.partition, self.pressure.copy(), self.flux_lo.copy(),
                                  self.flux_hi.copy(), self.coefficients.copy(), dict(self.meta))

    def subdomain_flux(self, i: int) -> np.ndarray:
        box = self.partition.subdomains[i]
        e = box.edges
        owner_lo = self._edge_side_is_lo(i, e)
        return np.where(owner_lo, self.flux_lo[e], self.flux_hi[e])

    def subdomain_pressure(self, i: int) -> np.ndarray:
        return self.pressure[self.partition.subdomains[i].cells]

    def _edge_side_is_lo(self, i: int, e: np.ndarray) -> np.ndarray:
        g = self.partition.grid
        lo = g.edge_lo[e]
        own = self.partition.cell_owner
        return (lo >= 0) & (own[np.maximum(lo, 0)] == i)

    def set_subdomain(self, i: int, p: np.ndarray, u: np.ndarray) -> None:
        """Overwrite the fields of subdomain ``i`` (skeleton edges: its own side only)."""
        part = self.partition
        box = part.subdomains[i]
        self.pressure[box.cells] = p
        e = box.edges
        skel = part.skeleton_mask[e]
        is_lo = self._edge_side_is_lo(i, e)
        self.flux_lo[e[~skel | is_lo]] = u[~skel | is_lo]
        self.flux_hi[e[~skel | ~is_lo]] = u[~skel | ~is_lo]

    @classmethod
    def from_fine(cls, part: Partition, pressure: np.ndarray, flux: np.ndarray,
                  **meta) -> "MultiscaleSolution":
        return cls(part, np.array(pressure, float), np.array(flux, float),
                   np.array(flux, float), meta=dict(meta))


def reconstruct(part: Partition, x: np.ndarray, spaces: Sequence[InformedSpace],
                bars: Sequence[BarSolution], problem: Optional[DarcyProblem] = None,
                meta: Optional[dict] = None) -> MultiscaleSolution:
    g = part.grid
    sol = MultiscaleSolution(part, np.zeros(g.n_cells), np.zeros(g.n_edges), np.zeros(g.n_edges),
                             np.asarray(x, float), dict(meta or {}))
    start = 0
    for i, (sp, bar) in enumerate(zip(spaces, bars)):
        xi = x[start:start + sp.n]
        start += sp.n
        sol.set_subdomain(i, bar.pressure + sp.pressure @ xi, bar.flux + sp.flux @ xi)
    if problem is not None and problem.pure_neumann:
        sol.pressure -= sol.pressure.mean()
    return sol


def one_sided_traces(sol: MultiscaleSolution, k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Half-cell pressure reconstructions on both sides of every skeleton edge."""
    part = sol.partition
    g = part.grid
    e = part.skeleton
    lo, hi = g.edge_lo[e], g.edge_hi[e]
    h = g.h
    p_lo = sol.pressure[lo] - sol.flux_lo[e] * h / (2 * k[lo])
    p_hi = sol.pressure[hi] + sol.flux_hi[e] * h / (2 * k[hi])
    return p_lo, p_hi


def continuity_residuals(sol: MultiscaleSolution, m_space: FaceSpace, v_space: FaceSpace,
                         k: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Weak flux-jump and pressure-jump functionals, one value per test function."""
    part = sol.partition
    h = part.grid.h
    p_lo, p_hi = one_sided_traces(sol, k)
    rm, rv = [], []
    start = 0
    for f, face in enumerate(part.faces):
        e = face.edges
        sl = slice(start, start + e.size)
        start += e.size
        rm.append(h * m_space.bases[f].values.T @ (sol.flux_lo[e] - sol.flux_hi[e]))
        rv.append(h * v_space.bases[f].values.T @ (p_lo[sl] - p_hi[sl]))
    cat = lambda v: np.concatenate(v) if v else np.zeros(0)  # noqa: E731
    return cat(rm), cat(rv)


@dataclass
class MethodSpec:
    """One point of the method matrix.

    ``l=None`` is the classical method with polynomial Robin spaces; an
    integer ``l`` uses informed spaces from boxes grown by ``l`` cells.
    """

    d: int = 2
    l: Optional[int] = None
    ns: int = 0

    @property
    def name(self) -> str:
        if self.l is None:
            base = "MRCM" if self.d == 2 else f"MRCM-d{self.d}"
            return base if self.ns == 0 else f"{base},{self.ns}S"
        tag = "OC" if self.d == 1 else "OL"
        name = f"{tag}-{self.l}"
        return name if self.ns == 0 else f"{name},{self.ns}S"

    @classmethod
    def parse(cls, text: str) -> "MethodSpec":
        """Parse ``MRCM``, ``MRCM-d1``, ``OC-2``, ``OL-4,4S`` style names."""
        t = text.strip().upper().replace(" ", "")
        ns = 0
        if "," in t:
            t, s = t.split(",", 1)
            if not s.endswith("S"):
                raise ValueError(f"bad method name {text!r}")
            ns = int(s[:-1])
        if t == "MRCM":
            return cls(2, None, ns)
        if t.startswith("MRCM-D"):
            return cls(int(t[6:]), None, ns)
        if t[:3] in ("OC-", "OL-"):
            return cls(1 if t[1] == "C" else 2, int(t[3:]), ns)
        raise ValueError(f"bad method name {text!r}")


@dataclass
class MultiscaleSolver:
    """Runs the method matrix on one problem and partition, sharing local
    factorizations between methods with equal (box, alpha)."""

    problem: DarcyProblem
    partition: Partition
    threads: int = 1
    affine: bool = True
    """Offset the informed Robin spaces by the oversampled forced trace."""
    cache: FactorCache = field(init=False)

    def __post_init__(self):
        self.cache = FactorCache(self.problem, self.partition.H)

    def spaces(self, alpha: float, d, l: Optional[int]) -> list[InformedSpace]:
        part = self.partition
        idx = range(part.n_sub)
        if d == FINE:
            return pmap(lambda i: build_fine_space(part, i, self.cache, alpha), idx, self.threads)
        if l is None:
            return pmap(lambda i: build_polynomial_space(part, i, self.cache, alpha, d), idx,
                        self.threads)
        op = oversample(part, l)
        return pmap(lambda i: build_informed_space(op, i, self.cache, alpha, d), idx, self.threads)

    def bars(self, alpha: float, l: Optional[int] = None) -> list[BarSolution]:
        part = self.partition
        op = oversample(part, l) if self.affine and l else None
        return pmap(lambda i: compute_bar(part, i, self.cache, alpha, op), range(part.n_sub),
                    self.threads)

    def solve(self, alpha: float, d=2, l: Optional[int] = None) -> MultiscaleSolution:
        part = self.partition
        t0 = time.perf_counter()
        spaces = self.spaces(alpha, d, l)
        t1 = time.perf_counter()
        bars = self.bars(alpha, l)
        m_space, v_space = build_face_spaces(part, d)
        system = assemble_interface(part, spaces, bars, m_space, v_space)
        x, deflated = solve_interface(system)
        t2 = time.perf_counter()
        sol = reconstruct(part, x, spaces, bars, self.problem,
                          dict(alpha=alpha, d=d, l=l, ns=0, interface_size=system.size,
                               deflated=deflated,
                               n_basis=max((s.n for s in spaces), default=0)))
        sol.meta["runtime_ms"] = {"basis": 1e3 * (t1 - t0), "interface": 1e3 * (t2 - t1),
                                  "smoothing": 0.0}
        return sol


def solve_mrcm_full_fine(problem: DarcyProblem, part: Partition, alpha: float,
                         threads: int = 1) -> MultiscaleSolution:
    """Coupled solve with every fine interface edge resolved; reproduces the
    single-grid solution."""
    return MultiscaleSolver(problem, part, threads).solve(alpha, FINE, None)


def solve_mrcm(problem: DarcyProblem, part: Partition, alpha: float, d: int = 2,
               l: Optional[int] = None, threads: int = 1) -> MultiscaleSolution:
    return MultiscaleSolver(problem, part, threads).solve(alpha, d, l)
