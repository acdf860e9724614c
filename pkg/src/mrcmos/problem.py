"""Darcy problem definitions: permeability, boundary data, sources.

Includes the manufactured homogeneous problem on the unit square, the SPE10
layer reader and the heterogeneous channel problem built on it.
"""
from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .mesh import Grid, build_grid

SPE10_NX, SPE10_NY, SPE10_NZ = 60, 220, 85
SPE10_COMPONENTS = ("kx", "ky", "kz")
_SPE10_BLOCK = SPE10_NX * SPE10_NY * SPE10_NZ


class SPE10FormatError(ValueError):
    """Malformed SPE10 permeability data."""


@dataclass(frozen=True, eq=False)
class PermField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=float).ravel()
        if v.size != self.grid.n_cells:
            raise ValueError(f"permeability has {v.size} values, grid has {self.grid.n_cells} cells")
        if not np.all(np.isfinite(v)) or np.any(v <= 0):
            raise ValueError("permeability must be strictly positive and finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @classmethod
    def constant(cls, grid: Grid, k: float = 1.0) -> "PermField":
        return cls(grid, np.full(grid.n_cells, float(k)))

    def as_image(self) -> np.ndarray:
        return self.values.reshape(self.grid.shape)


@dataclass(frozen=True, eq=False)
class BoundarySpec:
    """Per-edge boundary tags on the outer boundary.

    ``dirichlet[e]`` selects pressure data ``value[e] = g``; otherwise the edge
    carries a normal flux ``value[e] = z`` measured along the exterior normal.
    Entries for interior edges are ignored.
    """

    grid: Grid
    dirichlet: np.ndarray
    value: np.ndarray

    def __post_init__(self):
        n = self.grid.n_edges
        d = np.asarray(self.dirichlet, dtype=bool)
        v = np.asarray(self.value, dtype=float)
        if d.shape != (n,) or v.shape != (n,):
            raise ValueError("boundary arrays must have one entry per grid edge")
        d = d.copy()
        v = v.copy()
        interior = np.ones(n, bool)
        interior[self.grid.boundary_edges] = False
        d[interior] = False
        v[interior] = 0.0
        d.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "dirichlet", d)
        object.__setattr__(self, "value", v)

    @classmethod
    def from_sides(cls, grid: Grid, sides: Mapping[str, tuple]) -> "BoundarySpec":
        """Build from ``{side: (kind, value)}`` with kind 'dirichlet' or 'neumann'.

        ``value`` is a scalar or a callable of edge midpoints ``(x, y)``.
        Sides that are not listed default to homogeneous Neumann.
        """
        box = grid.full_box
        dirichlet = np.zeros(grid.n_edges, bool)
        value = np.zeros(grid.n_edges)
        for side, (kind, val) in sides.items():
            if kind not in ("dirichlet", "neumann"):
                raise ValueError(f"unknown boundary kind {kind!r}")
            e = box.side_ids(side)
            dirichlet[e] = kind == "dirichlet"
            if callable(val):
                mid = grid.edge_midpoints[e]
                value[e] = val(mid[:, 0], mid[:, 1])
            else:
                value[e] = float(val)
        return cls(grid, dirichlet, value)

    def homogeneous(self) -> "BoundarySpec":
        """Same tags with zero data."""
        return BoundarySpec(self.grid, self.dirichlet, np.zeros(self.grid.n_edges))

    @property
    def pure_neumann(self) -> bool:
        return not self.dirichlet[self.grid.boundary_edges].any()


@dataclass(frozen=True, eq=False)
class DarcyProblem:
    grid: Grid
    perm: PermField
    source: np.ndarray
    bc: BoundarySpec
    exact_pressure: Optional[Callable] = None
    exact_velocity: Optional[Callable] = None
    name: str = "darcy"
    layout: Optional[tuple[int, int]] = None
    """Natural subdomain counts (Mx, My) for this problem, if any."""
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        f = np.array(self.source, dtype=float).ravel()
        if f.size != self.grid.n_cells:
            raise ValueError("source needs one value per cell")
        f.setflags(write=False)
        object.__setattr__(self, "source", f)
        if self.bc.pure_neumann:
            h = self.grid.h
            z = self.bc.value[self.grid.boundary_edges]
            net = f.sum() * h * h - z.sum() * h
            scale = max(1.0, np.abs(f).sum() * h * h + np.abs(z).sum() * h)
            if abs(net) > 1e-10 * scale:
                raise ValueError(f"pure Neumann problem is incompatible: net source {net:.3e}")

    @property
    def pure_neumann(self) -> bool:
        return self.bc.pure_neumann

    @property
    def has_exact(self) -> bool:
        return self.exact_pressure is not None

    def exact_cell_pressure(self) -> np.ndarray:
        c = self.grid.cell_centers
        return np.asarray(self.exact_pressure(c[:, 0], c[:, 1]), dtype=float)

    def exact_edge_flux(self) -> np.ndarray:
        """Exact u . n at edge midpoints, along each edge's fixed normal."""
        g = self.grid
        m = g.edge_midpoints
        ux, uy = self.exact_velocity(m[:, 0], m[:, 1])
        u = np.where(g.edge_axis == 0, ux, uy)
        return u * g.edge_normal_sign


def make_homogeneous_problem(M: int, n_loc: int) -> DarcyProblem:
    """Unit square, K = 1, zero-flux boundary, exact p = cos(2 pi x) cos(2 pi y)."""
    if M < 1 or n_loc < 2:
        raise ValueError(f"need M >= 1 and n_loc >= 2, got M={M}, n_loc={n_loc}")
    n = M * n_loc
    grid = build_grid(n, n, 1.0 / n)
    tau = 2.0 * np.pi

    def pressure(x, y):
        return np.cos(tau * x) * np.cos(tau * y)

    def velocity(x, y):
        return (tau * np.sin(tau * x) * np.cos(tau * y),
                tau * np.cos(tau * x) * np.sin(tau * y))

    c = grid.cell_centers
    f = 2 * tau**2 * pressure(c[:, 0], c[:, 1])
    bc = BoundarySpec.from_sides(grid, {s: ("neumann", 0.0)
                                        for s in ("left", "right", "bottom", "top")})
    return DarcyProblem(grid, PermField.constant(grid), f, bc, pressure, velocity,
                        name=f"homogeneous-{M}x{M}", layout=(M, M))


def make_spe10_problem(perm: PermField) -> DarcyProblem:
    """Channel flow through a 220 x 60 layer: p = 1 on the left, 0 on the right."""
    g = perm.grid
    if (g.nx, g.ny) != (SPE10_NY, SPE10_NX):
        raise ValueError(f"SPE10 layer must live on a 220x60 grid, got {g.nx}x{g.ny}")
    grid = build_grid(SPE10_NY, SPE10_NX, 1.0 / SPE10_NX)
    perm = PermField(grid, perm.values)
    bc = BoundarySpec.from_sides(grid, {
        "left": ("dirichlet", 1.0), "right": ("dirichlet", 0.0),
        "bottom": ("neumann", 0.0), "top": ("neumann", 0.0)})
    return DarcyProblem(grid, perm, np.zeros(grid.n_cells), bc, name="spe10", layout=(11, 3))


def harmonic_edge_coefficients(perm: PermField) -> np.ndarray:
    """Harmonic mean of the two cells adjacent to each edge; boundary edges
    take the value of their single cell."""
    g = perm.grid
    k = perm.values
    lo, hi = g.edge_lo, g.edge_hi
    k_lo = k[np.where(lo >= 0, lo, hi)]
    k_hi = k[np.where(hi >= 0, hi, lo)]
    out = 2.0 * k_lo * k_hi / (k_lo + k_hi)
    out.setflags(write=False)
    return out


# --------------------------------------------------------------------------
# SPE10 input

_HEADER = re.compile(r"^spe10-layer\s+(\d+)\s+(kx|ky|kz)\s+(\d+)\s+(\d+)\s*$")


def _parse_floats(tokens: list[bytes], base: int = 0) -> np.ndarray:
    try:
        return np.array(tokens, dtype=float)
    except ValueError:
        for k, tok in enumerate(tokens):
            try:
                float(tok)
            except ValueError:
                raise SPE10FormatError(
                    f"non-numeric token {tok.decode(errors='replace')!r} at offset {base + k}") from None
        raise


def load_spe10(path: str | os.PathLike, layer: int = 40, component: str = "kx") -> PermField:
    """Read one layer of one permeability component.

    Accepts either the raw SPE10 file (x fastest over 60 cells, then y over
    220, then z over 85, components kx, ky, kz in sequence) or a layer cache
    written by :func:`write_spe10_layer`.  The layer is returned on a 220 x 60
    grid, i.e. the long SPE10 y axis becomes the x axis of the grid.
    """
    if component not in SPE10_COMPONENTS:
        raise ValueError(f"component must be one of {SPE10_COMPONENTS}, got {component!r}")
    if not 1 <= layer <= SPE10_NZ:
        raise ValueError(f"layer {layer} out of range 1..{SPE10_NZ}")
    with open(path, "rb") as fh:
        head = fh.readline()
        m = _HEADER.match(head.decode("ascii", errors="replace").strip())
        if m:
            return _read_layer_cache(fh, m, layer, component, path)
        data = head + fh.read()
    tokens = data.split()
    n_layer = SPE10_NX * SPE10_NY
    start = SPE10_COMPONENTS.index(component) * _SPE10_BLOCK + (layer - 1) * n_layer
    stop = start + n_layer
    if len(tokens) < stop:
        raise SPE10FormatError(
            f"{path}: file is short, {len(tokens)} values, need at least {stop} (offset {len(tokens)})")
    if len(tokens) > 3 * _SPE10_BLOCK:
        raise SPE10FormatError(
            f"{path}: trailing data beyond {3 * _SPE10_BLOCK} values (offset {3 * _SPE10_BLOCK})")
    vals = _parse_floats(tokens[start:stop], base=start)
    bad = np.flatnonzero(~(vals > 0) | ~np.isfinite(vals))
    if bad.size:
        raise SPE10FormatError(f"{path}: nonpositive permeability {vals[bad[0]]} at offset {start + bad[0]}")
    # raw layout is [y=220][x=60]; the grid wants rows of 220
    img = vals.reshape(SPE10_NY, SPE10_NX).T
    grid = build_grid(SPE10_NY, SPE10_NX, 1.0 / SPE10_NX)
    return PermField(grid, img.ravel())


def _read_layer_cache(fh, m, layer, component, path) -> PermField:
    c_layer, c_comp, nx, ny = int(m.group(1)), m.group(2), int(m.group(3)), int(m.group(4))
    if (c_layer, c_comp) != (layer, component):
        raise SPE10FormatError(
            f"{path}: cache holds layer {c_layer} {c_comp}, requested {layer} {component}")
    tokens = fh.read().split()
    if len(tokens) != nx * ny:
        raise SPE10FormatError(f"{path}: expected {nx * ny} values, found {len(tokens)} (offset {len(tokens)})")
    vals = _parse_floats(tokens)
    bad = np.flatnonzero(~(vals > 0) | ~np.isfinite(vals))
    if bad.size:
        raise SPE10FormatError(f"{path}: nonpositive permeability at offset {bad[0]}")
    return PermField(build_grid(nx, ny, 1.0 / ny), vals)


def write_spe10_layer(perm: PermField, path: str | os.PathLike, layer: int, component: str) -> None:
    """Write the layer cache: a header line then one value per line, row-major."""
    g = perm.grid
    with open(path, "w") as fh:
        fh.write(f"spe10-layer {layer} {component} {g.nx} {g.ny}\n")
        fh.write("\n".join(repr(float(v)) for v in perm.values))
        fh.write("\n")


def synthetic_spe10_layer(seed: int = 40) -> PermField:
    """A deterministic stand-in for an SPE10 fluvial layer.

    Log-permeability is a smooth anisotropic Gaussian field plus a few
    sinuous high-permeability channels, clipped to roughly seven decades.
    Used when the real dataset is not available.
    """
    from scipy.ndimage import gaussian_filter

    rng = np.random.default_rng(seed)
    nx, ny = SPE10_NY, SPE10_NX
    noise = gaussian_filter(rng.standard_normal((ny, nx)), sigma=(1.5, 4.0), mode="wrap")
    logk = 0.9 * noise / noise.std() - 0.5
    x = np.arange(nx) + 0.5
    y = np.arange(ny)[:, None] + 0.5
    for _ in range(3):
        y0 = rng.uniform(8, ny - 8)
        amp = rng.uniform(4, 12)
        wave = rng.uniform(40, 110)
        phase = rng.uniform(0, 2 * np.pi)
        width = rng.uniform(2.0, 4.0)
        center = y0 + amp * np.sin(2 * np.pi * x / wave + phase)
        logk = logk + 3.0 * np.exp(-0.5 * ((y - center) / width) ** 2)
    logk = np.clip(logk, -3.0, 4.0)
    grid = build_grid(nx, ny, 1.0 / ny)
    return PermField(grid, 10.0 ** logk.ravel())


def spe10_field(path: str | os.PathLike | None = None, layer: int = 40,
                component: str = "kx") -> PermField:
    """Load the real layer if a path (or ``$SPE10_PERM``) is available,
    otherwise return the synthetic stand-in."""
    path = path or os.environ.get("SPE10_PERM")
    if path:
        return load_spe10(path, layer, component)
    return synthetic_spe10_layer()
