"""Cell-centred two-point flux Darcy kernel on a box of the grid.

Each cell row of the assembled matrix is the flux balance

    sum over edges of (outward flux * h) = f * h**2

with interior conductance ``K_H`` (harmonic average) across fine edges.  Box
boundary edges are closed by one of:

* Robin ``-beta u.n + p = g`` through a half cell of the cell's own K:
  ``u.n = (p_cell - g) / (beta + h / (2 K_cell))``.  Dirichlet is ``beta = 0``.
* Neumann ``u.n = z``, which only enters the right-hand side.

``n`` here is the outward normal of the box.  Edge fluxes returned by this
module are always ``u . n_fixed`` with the grid's fixed edge normal.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .mesh import BoxBoundary, BoxRegion
from .problem import BoundarySpec, DarcyProblem, PermField, harmonic_edge_coefficients


class AssemblyError(ValueError):
    """Boundary edges with missing or conflicting closures."""


class SingularSystemError(RuntimeError):
    pass


class FactorizationError(RuntimeError):
    pass


@dataclass(frozen=True)
class RobinData:
    """Robin data ``-beta u.n + p = g`` on a set of edges (global ids)."""

    edges: np.ndarray
    beta: np.ndarray
    g: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.edges, dtype=int).ravel()
        b = np.broadcast_to(np.asarray(self.beta, dtype=float), e.shape).copy()
        g = np.broadcast_to(np.asarray(self.g, dtype=float), e.shape).copy()
        if np.any(b < 0) or not np.all(np.isfinite(b)):
            raise ValueError("Robin beta must be finite and nonnegative")
        object.__setattr__(self, "edges", e)
        object.__setattr__(self, "beta", b)
        object.__setattr__(self, "g", g)

    @classmethod
    def empty(cls) -> "RobinData":
        return cls(np.zeros(0, int), np.zeros(0), np.zeros(0))


@dataclass(frozen=True, eq=False)
class AssembledSystem:
    box: BoxRegion
    matrix: sp.csc_matrix
    rhs: np.ndarray
    boundary: BoxBoundary
    closed: np.ndarray
    """True for Robin/Dirichlet edges, False for Neumann edges."""
    beta: np.ndarray
    coef: np.ndarray
    """Closure conductance ``h / (beta + h / (2 K_cell))``; zero on Neumann edges."""
    values: np.ndarray
    """Boundary data per box boundary edge: g (closed) or z (Neumann)."""
    robin_slots: np.ndarray
    """Position in ``boundary`` of each Robin edge, in the order given at assembly."""
    k_cell: np.ndarray
    interior_local: np.ndarray
    interior_lo: np.ndarray
    interior_hi: np.ndarray
    interior_t: np.ndarray
    """Transmissibility K_H per interior edge (flux * h = t * (p_lo - p_hi))."""
    singular: bool

    @property
    def h(self) -> float:
        return self.box.parent.h

    @property
    def n(self) -> int:
        return self.box.n_cells

    def make_values(self, bc: Optional[BoundarySpec] = None,
                    robin_g: Optional[np.ndarray] = None) -> np.ndarray:
        """Boundary data with the same tags but new values.

        ``bc`` supplies data on outer-boundary edges (zero if omitted) and
        ``robin_g`` the Robin values in the order of the assembly's Robin
        edges (zero if omitted).
        """
        v = np.zeros(self.boundary.size)
        if bc is not None:
            outer = self.boundary.on_domain_boundary
            v[outer] = bc.value[self.boundary.edges[outer]]
        if robin_g is not None:
            v[self.robin_slots] = robin_g
        return v

    def make_rhs(self, values: np.ndarray, source: Optional[np.ndarray] = None) -> np.ndarray:
        """Right-hand side for boundary data ``values`` and a cell source on the box."""
        h = self.h
        rhs = np.zeros(self.n) if source is None else np.asarray(source, float) * (h * h)
        contrib = np.where(self.closed, self.coef * values, -h * values)
        return rhs + np.bincount(self.boundary.local_cell, contrib, minlength=self.n)


def assemble(box: BoxRegion, perm: PermField, k_h: Optional[np.ndarray] = None,
             bc: Optional[BoundarySpec] = None, robin: Optional[RobinData] = None,
             source: Optional[np.ndarray] = None) -> AssembledSystem:
    """Assemble the TPFA system on ``box``.

    Every box boundary edge must be either on the outer boundary (and then
    takes its tag from ``bc``) or listed in ``robin``.  ``source`` is a cell
    field on the whole grid.
    """
    g = box.parent
    h = g.h
    if k_h is None:
        k_h = harmonic_edge_coefficients(perm)
    robin = robin if robin is not None else RobinData.empty()
    bnd = box.boundary

    slot_of = {int(e): k for k, e in enumerate(bnd.edges)}
    try:
        slots = np.array([slot_of[int(e)] for e in robin.edges], dtype=int)
    except KeyError as err:
        raise AssemblyError(f"Robin edge {err.args[0]} is not on the box boundary") from None
    if np.unique(slots).size != slots.size:
        raise AssemblyError("duplicate Robin edges")
    is_robin = np.zeros(bnd.size, bool)
    is_robin[slots] = True
    outer = bnd.on_domain_boundary
    if np.any(is_robin & outer):
        e = bnd.edges[np.flatnonzero(is_robin & outer)[0]]
        raise AssemblyError(f"edge {e} carries both a Robin and an outer boundary tag")
    if np.any(~is_robin & ~outer):
        e = bnd.edges[np.flatnonzero(~is_robin & ~outer)[0]]
        raise AssemblyError(f"box boundary edge {e} has no boundary condition")
    if bc is None and outer.any():
        raise AssemblyError("box touches the outer boundary but no BoundarySpec was given")

    closed = is_robin.copy()
    beta = np.zeros(bnd.size)
    values = np.zeros(bnd.size)
    beta[slots] = robin.beta
    values[slots] = robin.g
    if outer.any():
        closed[outer] = bc.dirichlet[bnd.edges[outer]]
        values[outer] = bc.value[bnd.edges[outer]]

    k_cell = perm.values[box.cells]
    coef = np.where(closed, h / (beta + h / (2.0 * k_cell[bnd.local_cell])), 0.0)

    # interior edges of the box: both neighbours inside
    lo = g.edge_lo[box.edges]
    hi = g.edge_hi[box.edges]
    inside = box.has_cells(lo) & box.has_cells(hi)
    interior_local = np.flatnonzero(inside)
    ilo = box.local_cells(lo[inside])
    ihi = box.local_cells(hi[inside])
    t = np.asarray(k_h)[box.edges[inside]]

    n = box.n_cells
    rows = np.concatenate([ilo, ihi, ilo, ihi, bnd.local_cell])
    cols = np.concatenate([ilo, ihi, ihi, ilo, bnd.local_cell])
    data = np.concatenate([t, t, -t, -t, coef])
    mat = sp.csc_matrix((data, (rows, cols)), shape=(n, n))
    mat.sum_duplicates()

    system = AssembledSystem(
        box=box, matrix=mat, rhs=np.zeros(n), boundary=bnd, closed=closed, beta=beta,
        coef=coef, values=values, robin_slots=slots, k_cell=k_cell,
        interior_local=interior_local, interior_lo=ilo, interior_hi=ihi, interior_t=t,
        singular=not closed.any())
    f_box = None if source is None else np.asarray(source, float)[box.cells]
    object.__setattr__(system, "rhs", system.make_rhs(values, f_box))
    return system


@dataclass(frozen=True, eq=False)
class Factorization:
    lu: object
    n: int
    pinned: bool
    """Pure Neumann system solved with the first dof pinned, then shifted to zero mean."""

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return solve(self, rhs)


def factorize(system: AssembledSystem, constrain: bool = True) -> Factorization:
    """Sparse LU of the (symmetric positive definite) system matrix.

    A singular pure-Neumann system is only accepted with ``constrain=True``;
    it is then made definite by pinning the first unknown.
    """
    a = system.matrix
    pinned = False
    if system.singular:
        if not constrain:
            raise SingularSystemError("pure Neumann system is singular; factorize with constrain=True")
        a = a.tolil(copy=True)
        a[0, :] = 0.0
        a[:, 0] = 0.0
        a[0, 0] = 1.0
        a = a.tocsc()
        pinned = True
    try:
        lu = splu(a, permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                  options=dict(SymmetricMode=True))
    except RuntimeError as err:
        raise FactorizationError(f"factorization failed: {err}") from None
    d = lu.U.diagonal()
    # with high contrast, pivots may be tiny relative to any fixed scale;
    # only their sign is a reliable definiteness test
    cols = lu.perm_c
    bad = np.flatnonzero(~(np.isfinite(d) & (d > 0)))
    if bad.size:
        col = int(cols[bad[0]])
        raise FactorizationError(
            f"matrix is not positive definite: pivot {d[bad[0]]:.3e} at unknown {col}")
    return Factorization(lu, system.n, pinned)


def solve(fact: Factorization, rhs: np.ndarray) -> np.ndarray:
    """Solve for one right-hand side (length n) or several (n x k)."""
    b = np.array(rhs, dtype=float)
    if b.shape[0] != fact.n:
        raise ValueError(f"rhs has {b.shape[0]} rows, system has {fact.n} unknowns")
    if fact.pinned:
        b[0] = 0.0
    x = fact.lu.solve(b)
    if fact.pinned:
        x = x - x.mean(axis=0)
    return x


def recover_fluxes(system: AssembledSystem, p: np.ndarray,
                   values: Optional[np.ndarray] = None) -> np.ndarray:
    """Normal flux ``u . n_fixed`` on every local edge of the box."""
    h = system.h
    values = system.values if values is None else values
    p = np.asarray(p, float)
    u = np.zeros(system.box.n_edges)
    u[system.interior_local] = system.interior_t * (p[system.interior_lo] - p[system.interior_hi]) / h
    bnd = system.boundary
    k_c = system.k_cell[bnd.local_cell]
    with np.errstate(divide="ignore", invalid="ignore"):
        closed_flux = (p[bnd.local_cell] - values) / (system.beta + h / (2.0 * k_c))
    out = np.where(system.closed, closed_flux, values)
    u[bnd.local_edge] = bnd.sign * out
    return u


def weighted_trace(p_lo, p_hi, k_lo, k_hi):
    """Edge pressure between two cells consistent with the two-point flux."""
    return (k_lo * p_lo + k_hi * p_hi) / (k_lo + k_hi)


def edge_pressure_trace(system: AssembledSystem, p: np.ndarray, u: np.ndarray,
                        local_edges, values: Optional[np.ndarray] = None) -> np.ndarray:
    """Pressure on the given local edges of a solved box system.

    Interior edges use the K-weighted average of the two cells, which equals
    the half-cell reconstruction from either side.  Robin and Dirichlet
    boundary edges return ``g + beta * u.n``; Neumann edges have no trace.
    ``p``, ``u`` and ``values`` may carry a trailing column axis.
    """
    local_edges = np.atleast_1d(np.asarray(local_edges, dtype=int))
    values = system.values if values is None else np.asarray(values, float)
    p = np.asarray(p, float)
    u = np.asarray(u, float)
    cols = p.shape[1:]
    out = np.empty((local_edges.size,) + cols)
    where_int = np.full(system.box.n_edges, -1)
    where_int[system.interior_local] = np.arange(system.interior_local.size)
    where_bnd = np.full(system.box.n_edges, -1)
    where_bnd[system.boundary.local_edge] = np.arange(system.boundary.size)
    ki = where_int[local_edges]
    kb = where_bnd[local_edges]
    sel = ki >= 0
    if sel.any():
        a = system.interior_lo[ki[sel]]
        b = system.interior_hi[ki[sel]]
        ka, kb_ = system.k_cell[a], system.k_cell[b]
        if cols:
            ka, kb_ = ka[:, None], kb_[:, None]
        out[sel] = weighted_trace(p[a], p[b], ka, kb_)
    if (~sel).any():
        k = kb[~sel]
        if np.any(~system.closed[k]):
            bad = system.boundary.edges[k[~system.closed[k]][0]]
            raise ValueError(f"no pressure trace on Neumann edge {bad}")
        sign, beta = system.boundary.sign[k], system.beta[k]
        if cols:
            sign, beta = sign[:, None], beta[:, None]
        out[~sel] = values[k] + beta * sign * u[local_edges[~sel]]
    return out


def robin_data_for_box(box: BoxRegion, k_h: np.ndarray, alpha: float, H: float,
                       g: Optional[np.ndarray] = None) -> RobinData:
    """Robin closure on the part of the box boundary inside the domain,
    with ``beta = alpha * H / K_H``."""
    bnd = box.boundary
    e = bnd.edges[~bnd.on_domain_boundary]
    return RobinData(e, alpha * H / k_h[e], 0.0 if g is None else g)


class FactorCache:
    """Robin systems and their factorizations keyed by (box, alpha).

    The matrix of a box system depends only on the box, the permeability,
    the outer boundary tags and beta, so every right-hand side for the same
    key reuses one factorization.
    """

    def __init__(self, problem: DarcyProblem, H: float):
        self.problem = problem
        self.H = H
        self.k_h = harmonic_edge_coefficients(problem.perm)
        self._store: dict = {}
        self._lock = threading.Lock()
        self.factorizations = 0
        self.solves = 0

    def get(self, box: BoxRegion, alpha: float) -> tuple[AssembledSystem, Factorization]:
        key = (box.i0, box.j0, box.w, box.hgt, float(alpha))
        with self._lock:
            hit = self._store.get(key)
        if hit is not None:
            return hit
        robin = robin_data_for_box(box, self.k_h, alpha, self.H)
        system = assemble(box, self.problem.perm, self.k_h, self.problem.bc, robin)
        fact = factorize(system)
        with self._lock:
            self._store.setdefault(key, (system, fact))
            self.factorizations += 1
            return self._store[key]

    def solve(self, box: BoxRegion, alpha: float, robin_g=None, with_bc: bool = False,
              with_source: bool = False):
        """Solve the box problem; ``robin_g`` may hold one column per right-hand side.

        Returns ``(system, p, u, values)`` with the boundary data used.
        """
        system, fact = self.get(box, alpha)
        bc = self.problem.bc if with_bc else None
        src = self.problem.source[box.cells] if with_source else None
        if robin_g is not None and np.ndim(robin_g) == 2 and robin_g.shape[1] == 0:
            # no interface (single subdomain): no basis functions to solve for
            return (system, np.zeros((system.n, 0)), np.zeros((system.box.n_edges, 0)),
                    np.zeros((system.boundary.size, 0)))
        if robin_g is not None and np.ndim(robin_g) == 2:
            vals = np.column_stack([system.make_values(bc, robin_g[:, k])
                                    for k in range(robin_g.shape[1])])
            rhs = np.column_stack([system.make_rhs(vals[:, k], src) for k in range(vals.shape[1])])
            p = solve(fact, rhs)
            u = np.column_stack([recover_fluxes(system, p[:, k], vals[:, k])
                                 for k in range(vals.shape[1])])
            self.solves += vals.shape[1]
        else:
            vals = system.make_values(bc, robin_g)
            p = solve(fact, system.make_rhs(vals, src))
            u = recover_fluxes(system, p, vals)
            self.solves += 1
        return system, p, u, vals


@dataclass(frozen=True, eq=False)
class FineSolution:
    """Single-grid solution: cell pressures and ``u . n_fixed`` on every edge."""

    problem: DarcyProblem
    pressure: np.ndarray
    flux: np.ndarray


def solve_fine(problem: DarcyProblem) -> FineSolution:
    """Reference solve on the whole grid (pure Neumann: zero-mean pressure)."""
    box = problem.grid.full_box
    system = assemble(box, problem.perm, harmonic_edge_coefficients(problem.perm),
                      problem.bc, None, problem.source)
    p = solve(factorize(system), system.rhs)
    return FineSolution(problem, p, recover_fluxes(system, p))
