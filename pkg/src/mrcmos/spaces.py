"""Interface spaces on the skeleton and the per-subdomain Robin trace spaces.

``M`` and ``V`` test weak flux and pressure continuity face by face.  The
Lagrange (Robin data) space of a subdomain is spanned by traces
``phi = -beta u.n + p`` on its interface; three variants are provided:

* informed: traces of zero-source solves on the oversampled box driven by
  constant/linear Robin data on one side of the box,
* polynomial: the face polynomials themselves (classical MRCM),
* fine: one indicator per fine interface edge.

Each variant also caches the subdomain fields (flux and pressure) produced
by its basis, which are the multiscale basis functions.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .darcy_core import FactorCache, edge_pressure_trace
from .decomposition import CoarseFace, OversampledPartition, Partition
from .mesh import BoxRegion

FINE = "fine"


def polynomial_modes(n: int, d: int) -> np.ndarray:
    """``n x d`` midpoint values of {1, (s - L/2) / (L/2)} on ``n`` edges."""
    if d not in (1, 2):
        raise ValueError(f"polynomial degree count must be 1 or 2, got {d}")
    t = (np.arange(n) + 0.5 - n / 2) / (n / 2)
    return np.column_stack([np.ones(n), t][:d])


@dataclass(frozen=True)
class FaceBasis:
    face: CoarseFace
    values: np.ndarray
    """n_edges x d, one column per mode."""

    @property
    def d(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class FaceSpace:
    """A coarse space on the skeleton, one block of functions per face."""

    bases: tuple[FaceBasis, ...]

    @property
    def dim(self) -> int:
        return sum(b.d for b in self.bases)

    @property
    def offsets(self) -> np.ndarray:
        return np.concatenate([[0], np.cumsum([b.d for b in self.bases])]).astype(int)


def face_basis(face: CoarseFace, d) -> FaceBasis:
    if d == FINE:
        return FaceBasis(face, np.eye(face.n_edges))
    return FaceBasis(face, polynomial_modes(face.n_edges, d))


def build_face_spaces(part: Partition, d) -> tuple[FaceSpace, FaceSpace]:
    """Flux-test space M and pressure-test space V (identical layouts)."""
    space = FaceSpace(tuple(face_basis(f, d) for f in part.faces))
    return space, space


def robin_edges(box: BoxRegion) -> np.ndarray:
    """Box boundary edges inside the domain, in box boundary order."""
    bnd = box.boundary
    return bnd.edges[~bnd.on_domain_boundary]


def facing_side(part: Partition, i: int, face: CoarseFace) -> str:
    if i == face.lo:
        return "right" if face.axis == 0 else "top"
    if i == face.hi:
        return "left" if face.axis == 0 else "bottom"
    raise ValueError(f"face {face.index} is not on the interface of subdomain {i}")


def build_lambda_data(part: Partition, hat: BoxRegion, i: int, face: CoarseFace,
                      mode: int) -> np.ndarray:
    """Robin data on the inner boundary of ``hat`` for one face mode.

    Supported on the whole side of ``hat`` that faces ``face``; mode 0 is the
    constant 1, mode 1 the linear function normalized by half the side
    length.  Values follow the order of :func:`robin_edges`.
    """
    side = facing_side(part, i, face)
    if hat.side_on_boundary(side):
        raise ValueError(f"side {side} of the oversampled box lies on the domain boundary")
    bnd = hat.boundary
    inner = ~bnd.on_domain_boundary
    on_side = bnd.side[inner] == ("left", "right", "bottom", "top").index(side)
    out = np.zeros(inner.sum())
    n = int(on_side.sum())
    out[on_side] = polynomial_modes(n, mode + 1)[:, mode]
    return out


@dataclass(frozen=True, eq=False)
class InformedSpace:
    sub: int
    kind: str
    gamma: np.ndarray
    """Interface edges (global ids), face by face."""
    sign: np.ndarray
    """n_i . n_fixed on ``gamma``."""
    beta: np.ndarray
    phi: np.ndarray
    """Robin traces spanning the Lagrange space, ``len(gamma) x n``."""
    flux: np.ndarray
    """Basis fluxes ``u . n_fixed`` on the subdomain's local edges, one column per basis function."""
    pressure: np.ndarray
    gamma_local: np.ndarray
    """Local edge ids of ``gamma`` in the subdomain box."""
    face_slices: dict
    alpha: float
    l: Optional[int]
    d: object

    @property
    def n(self) -> int:
        return self.phi.shape[1]

    @property
    def gamma_flux_out(self) -> np.ndarray:
        return self.sign[:, None] * self.flux[self.gamma_local]


def _face_slices(part: Partition, i: int) -> dict:
    out, start = {}, 0
    for f in part.faces_of[i]:
        n = part.faces[f].n_edges
        out[f] = slice(start, start + n)
        start += n
    return out


def _solve_subdomain_basis(part: Partition, i: int, cache: FactorCache, alpha: float,
                           phi: np.ndarray, kind: str, d, l) -> InformedSpace:
    """Multiscale basis on the subdomain itself for given Robin traces."""
    box = part.subdomains[i]
    gamma = part.gamma(i)
    r = robin_edges(box)
    order = np.argsort(r)
    pos = order[np.searchsorted(r, gamma, sorter=order)]
    g = np.zeros((r.size, phi.shape[1]))
    g[pos] = phi
    _, p, u, _ = cache.solve(box, alpha, robin_g=g)
    return InformedSpace(
        sub=i, kind=kind, gamma=gamma, sign=part.gamma_sign(i),
        beta=alpha * cache.H / cache.k_h[gamma], phi=phi, flux=u, pressure=p,
        gamma_local=box.local_edges(gamma), face_slices=_face_slices(part, i),
        alpha=alpha, l=l, d=d)


def build_polynomial_space(part: Partition, i: int, cache: FactorCache, alpha: float,
                           d: int) -> InformedSpace:
    """Classical space: face polynomials on each interface face."""
    faces = part.faces_of[i]
    n_gamma = part.gamma(i).size
    cols = []
    start = 0
    for f in faces:
        ne = part.faces[f].n_edges
        modes = polynomial_modes(ne, d)
        for k in range(d):
            c = np.zeros(n_gamma)
            c[start:start + ne] = modes[:, k]
            cols.append(c)
        start += ne
    phi = np.column_stack(cols) if cols else np.zeros((0, 0))
    return _solve_subdomain_basis(part, i, cache, alpha, phi, "polynomial", d, None)


def build_fine_space(part: Partition, i: int, cache: FactorCache, alpha: float) -> InformedSpace:
    """One indicator per fine interface edge."""
    n_gamma = part.gamma(i).size
    return _solve_subdomain_basis(part, i, cache, alpha, np.eye(n_gamma), "fine", FINE, None)


def hat_traces(op: OversampledPartition, i: int, cache: FactorCache, alpha: float,
               lam: Optional[np.ndarray] = None, forcing: bool = False):
    """Solve on the oversampled box of ``i`` and take Robin traces on its interface.

    ``lam`` holds Robin data on the inner box boundary (one column per solve,
    zero if omitted); ``forcing`` switches on the problem's sources and outer
    boundary data.  Returns ``(phi, p, u)`` with ``phi`` on ``gamma(i)``.
    """
    part = op.base
    hat = op.hats[i]
    gamma = part.gamma(i)
    sign = part.gamma_sign(i)
    system, p, u, vals = cache.solve(hat, alpha, robin_g=lam, with_bc=forcing,
                                     with_source=forcing)
    gl = hat.local_edges(gamma)
    beta = alpha * cache.H / cache.k_h[gamma]
    pi = edge_pressure_trace(system, p, u, gl, vals)
    if u.ndim == 1:
        return -beta * sign * u[gl] + pi, p, u
    return -beta[:, None] * sign[:, None] * u[gl] + pi, p, u


def build_informed_space(op: OversampledPartition, i: int, cache: FactorCache, alpha: float,
                         d: int) -> InformedSpace:
    """Robin traces on the interface of ``i`` from solves on its oversampled box.

    All ``n_i = d * (#faces)`` solves share one factorization of the box
    system.  The traces are taken on the interface edges, which are interior
    to the box when ``l > 0`` and on its boundary when ``l = 0``.
    """
    part = op.base
    box, hat = part.subdomains[i], op.hats[i]
    gamma = part.gamma(i)
    sign = part.gamma_sign(i)
    faces = part.faces_of[i]
    lam = [build_lambda_data(part, hat, i, part.faces[f], k) for f in faces for k in range(d)]
    lam = np.column_stack(lam) if lam else np.zeros((robin_edges(hat).size, 0))
    phi, p, u = hat_traces(op, i, cache, alpha, lam)
    beta = alpha * cache.H / cache.k_h[gamma]
    return InformedSpace(
        sub=i, kind="informed", gamma=gamma, sign=sign, beta=beta, phi=phi,
        flux=u[hat.local_edges(box.edges)], pressure=p[hat.local_cells(box.cells)],
        gamma_local=box.local_edges(gamma), face_slices=_face_slices(part, i),
        alpha=alpha, l=op.l, d=d)


def dimension_check(spaces, m_space: FaceSpace, v_space: FaceSpace) -> None:
    """Square-system conditions for uniqueness of the coupled solution."""
    total = sum(s.n for s in spaces)
    if m_space.dim != v_space.dim or total != m_space.dim + v_space.dim:
        raise DimensionError(
            f"interface spaces violate the dimension conditions: sum n_i = {total}, "
            f"dim M = {m_space.dim}, dim V = {v_space.dim}")


class DimensionError(ValueError):
    pass
