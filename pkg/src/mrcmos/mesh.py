"""Uniform Cartesian grid topology.

Cells are numbered row-major (``j * nx + i``).  Edges are split by the axis
of their normal: all vertical edges (normal along x) come first, numbered
row-major over ``(nx + 1) x ny``, then all horizontal edges (normal along y)
numbered row-major over ``nx x (ny + 1)``.

Every edge carries a fixed unit normal.  Interior edges point along +x or +y,
i.e. from the lower-id cell towards the higher-id one.  Edges on the outer
boundary use the exterior normal, so left and bottom boundary edges point
along -x and -y.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np

SIDES = ("left", "right", "bottom", "top")

# axis of the edge normal
X_NORMAL = 0
Y_NORMAL = 1


class EdgeRef(NamedTuple):
    id: int
    axis: int
    cells: tuple[int, int]
    normal_sign: int
    """+1 when the fixed normal points along +axis, -1 otherwise."""


class SideEdge(NamedTuple):
    id: int
    s: float
    """Arclength of the edge midpoint measured along the side."""


@dataclass(frozen=True, eq=False)
class Grid:
    nx: int
    ny: int
    h: float
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if int(self.nx) < 1 or int(self.ny) < 1:
            raise ValueError(f"grid needs nx, ny >= 1, got ({self.nx}, {self.ny})")
        if not self.h > 0:
            raise ValueError(f"cell size must be positive, got {self.h}")
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))

    @property
    def n_cells(self) -> int:
        return self.nx * self.ny

    @property
    def n_vertical(self) -> int:
        return (self.nx + 1) * self.ny

    @property
    def n_horizontal(self) -> int:
        return self.nx * (self.ny + 1)

    @property
    def n_edges(self) -> int:
        return self.n_vertical + self.n_horizontal

    @property
    def shape(self) -> tuple[int, int]:
        """(ny, nx), the shape of a cell field viewed as an image."""
        return (self.ny, self.nx)

    def cell_id(self, i, j):
        return np.asarray(j) * self.nx + np.asarray(i)

    def vertical_edge_id(self, i, j):
        """Edge at x = i*h bordering cell row j."""
        return np.asarray(j) * (self.nx + 1) + np.asarray(i)

    def horizontal_edge_id(self, i, j):
        """Edge at y = j*h bordering cell column i."""
        return self.n_vertical + np.asarray(j) * self.nx + np.asarray(i)

    @cached_property
    def cell_centers(self) -> np.ndarray:
        i, j = np.meshgrid(np.arange(self.nx), np.arange(self.ny))
        x = self.origin[0] + (i.ravel() + 0.5) * self.h
        y = self.origin[1] + (j.ravel() + 0.5) * self.h
        return np.column_stack([x, y])

    @cached_property
    def _edge_tables(self):
        nx, ny = self.nx, self.ny
        # vertical edges
        iv, jv = np.meshgrid(np.arange(nx + 1), np.arange(ny))
        iv, jv = iv.ravel(), jv.ravel()
        lo_v = np.where(iv > 0, jv * nx + iv - 1, -1)
        hi_v = np.where(iv < nx, jv * nx + iv, -1)
        sign_v = np.where(iv == 0, -1, 1)
        mid_v = np.column_stack([iv * self.h, (jv + 0.5) * self.h])
        # horizontal edges
        ih, jh = np.meshgrid(np.arange(nx), np.arange(ny + 1))
        ih, jh = ih.ravel(), jh.ravel()
        lo_h = np.where(jh > 0, (jh - 1) * nx + ih, -1)
        hi_h = np.where(jh < ny, jh * nx + ih, -1)
        sign_h = np.where(jh == 0, -1, 1)
        mid_h = np.column_stack([(ih + 0.5) * self.h, jh * self.h])
        axis = np.concatenate([np.zeros(iv.size, int), np.ones(ih.size, int)])
        lo = np.concatenate([lo_v, lo_h])
        hi = np.concatenate([hi_v, hi_h])
        sign = np.concatenate([sign_v, sign_h])
        mid = np.vstack([mid_v, mid_h]) + np.asarray(self.origin)
        for a in (axis, lo, hi, sign, mid):
            a.setflags(write=False)
        return axis, lo, hi, sign, mid

    @property
    def edge_axis(self) -> np.ndarray:
        return self._edge_tables[0]

    @property
    def edge_lo(self) -> np.ndarray:
        """Cell on the -axis side of each edge, -1 if outside the grid."""
        return self._edge_tables[1]

    @property
    def edge_hi(self) -> np.ndarray:
        """Cell on the +axis side of each edge, -1 if outside the grid."""
        return self._edge_tables[2]

    @property
    def edge_normal_sign(self) -> np.ndarray:
        return self._edge_tables[3]

    @property
    def edge_midpoints(self) -> np.ndarray:
        return self._edge_tables[4]

    @cached_property
    def boundary_edges(self) -> np.ndarray:
        return np.flatnonzero((self.edge_lo < 0) | (self.edge_hi < 0))

    @cached_property
    def interior_edges(self) -> np.ndarray:
        return np.flatnonzero((self.edge_lo >= 0) & (self.edge_hi >= 0))

    def edge(self, e: int) -> EdgeRef:
        e = int(e)
        if not 0 <= e < self.n_edges:
            raise IndexError(f"edge id {e} out of range [0, {self.n_edges})")
        return EdgeRef(e, int(self.edge_axis[e]),
                       (int(self.edge_lo[e]), int(self.edge_hi[e])),
                       int(self.edge_normal_sign[e]))

    def cell_edges(self, c: int) -> tuple[int, int, int, int]:
        """Edges (left, right, bottom, top) of cell ``c``."""
        j, i = divmod(int(c), self.nx)
        return (int(self.vertical_edge_id(i, j)), int(self.vertical_edge_id(i + 1, j)),
                int(self.horizontal_edge_id(i, j)), int(self.horizontal_edge_id(i, j + 1)))

    @cached_property
    def full_box(self) -> "BoxRegion":
        return BoxRegion(0, 0, self.nx, self.ny, self)


def build_grid(nx: int, ny: int, h: float, origin=(0.0, 0.0)) -> Grid:
    return Grid(int(nx), int(ny), float(h), tuple(origin))


@dataclass(frozen=True, eq=False)
class BoxRegion:
    """An index box of cells ``[i0, i0+w) x [j0, j0+hgt)`` inside a grid.

    Local cell and edge numbering follow the same conventions as
    :class:`Grid`, restricted to the box.  Since both numberings are
    row-major, the local->global maps are strictly increasing and the
    inverse maps are computed by bisection.
    """

    i0: int
    j0: int
    w: int
    hgt: int
    parent: Grid = field(repr=False)

    def __post_init__(self):
        g = self.parent
        if self.w < 1 or self.hgt < 1:
            raise ValueError(f"empty box {self.w}x{self.hgt}")
        if self.i0 < 0 or self.j0 < 0 or self.i0 + self.w > g.nx or self.j0 + self.hgt > g.ny:
            raise ValueError(
                f"box ({self.i0}, {self.j0}, {self.w}, {self.hgt}) outside {g.nx}x{g.ny} grid")

    @property
    def i1(self) -> int:
        return self.i0 + self.w

    @property
    def j1(self) -> int:
        return self.j0 + self.hgt

    @property
    def n_cells(self) -> int:
        return self.w * self.hgt

    @property
    def n_vertical(self) -> int:
        return (self.w + 1) * self.hgt

    @property
    def n_edges(self) -> int:
        return self.n_vertical + self.w * (self.hgt + 1)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.hgt, self.w)

    def same_as(self, other: "BoxRegion") -> bool:
        return (self.parent is other.parent and self.i0 == other.i0 and self.j0 == other.j0
                and self.w == other.w and self.hgt == other.hgt)

    def contains(self, other: "BoxRegion") -> bool:
        return (self.i0 <= other.i0 and self.j0 <= other.j0
                and other.i1 <= self.i1 and other.j1 <= self.j1)

    @cached_property
    def cells(self) -> np.ndarray:
        """Global ids of the local cells."""
        a, b = np.meshgrid(np.arange(self.w), np.arange(self.hgt))
        out = self.parent.cell_id(self.i0 + a.ravel(), self.j0 + b.ravel())
        out.setflags(write=False)
        return out

    @cached_property
    def edges(self) -> np.ndarray:
        """Global ids of the local edges."""
        g = self.parent
        a, b = np.meshgrid(np.arange(self.w + 1), np.arange(self.hgt))
        v = g.vertical_edge_id(self.i0 + a.ravel(), self.j0 + b.ravel())
        a, b = np.meshgrid(np.arange(self.w), np.arange(self.hgt + 1))
        hz = g.horizontal_edge_id(self.i0 + a.ravel(), self.j0 + b.ravel())
        out = np.concatenate([v, hz])
        out.setflags(write=False)
        return out

    def global_cells(self, local) -> np.ndarray:
        return self.cells[np.asarray(local)]

    def global_edges(self, local) -> np.ndarray:
        return self.edges[np.asarray(local)]

    def local_cells(self, glob) -> np.ndarray:
        return _invert(self.cells, glob, "cell")

    def local_edges(self, glob) -> np.ndarray:
        return _invert(self.edges, glob, "edge")

    def has_cells(self, glob) -> np.ndarray:
        glob = np.asarray(glob)
        j, i = np.divmod(glob, self.parent.nx)
        return (glob >= 0) & (i >= self.i0) & (i < self.i1) & (j >= self.j0) & (j < self.j1)

    @cached_property
    def _sides(self):
        g = self.parent
        b = np.arange(self.hgt)
        a = np.arange(self.w)
        return {
            "left": g.vertical_edge_id(self.i0, self.j0 + b),
            "right": g.vertical_edge_id(self.i1, self.j0 + b),
            "bottom": g.horizontal_edge_id(self.i0 + a, self.j0),
            "top": g.horizontal_edge_id(self.i0 + a, self.j1),
        }

    def side_ids(self, side: str) -> np.ndarray:
        """Global ids of the edges on ``side``, by increasing tangential coordinate."""
        return self._sides[side]

    def side_on_boundary(self, side: str) -> bool:
        """True if ``side`` lies on the outer boundary of the parent grid."""
        return {"left": self.i0 == 0, "right": self.i1 == self.parent.nx,
                "bottom": self.j0 == 0, "top": self.j1 == self.parent.ny}[side]

    @cached_property
    def boundary(self) -> "BoxBoundary":
        g = self.parent
        ids, side_idx, inner, outward = [], [], [], []
        for k, side in enumerate(SIDES):
            e = self._sides[side]
            ids.append(e)
            side_idx.append(np.full(e.size, k))
            # cell inside the box and the outward direction along the axis
            if side in ("left", "bottom"):
                inner.append(g.edge_hi[e])
                outward.append(-np.ones(e.size, int))
            else:
                inner.append(g.edge_lo[e])
                outward.append(np.ones(e.size, int))
        ids = np.concatenate(ids)
        inner = np.concatenate(inner)
        outward_axis = np.concatenate(outward)
        # sign relating the box outward normal to the fixed edge normal
        sign = outward_axis * g.edge_normal_sign[ids]
        outer = np.where(outward_axis > 0, g.edge_hi[ids], g.edge_lo[ids])
        return BoxBoundary(
            edges=ids,
            side=np.concatenate(side_idx),
            local_edge=self.local_edges(ids),
            cell=inner,
            local_cell=self.local_cells(inner),
            outer_cell=outer,
            sign=sign,
            on_domain_boundary=outer < 0,
        )


@dataclass(frozen=True)
class BoxBoundary:
    """Boundary edges of a box, concatenated side by side (left, right, bottom, top)."""

    edges: np.ndarray
    side: np.ndarray
    local_edge: np.ndarray
    cell: np.ndarray
    local_cell: np.ndarray
    outer_cell: np.ndarray
    sign: np.ndarray
    """n_box . n_fixed for each edge (+1 or -1)."""
    on_domain_boundary: np.ndarray

    @property
    def size(self) -> int:
        return self.edges.size


def _invert(table: np.ndarray, glob, what: str) -> np.ndarray:
    glob = np.asarray(glob)
    pos = np.searchsorted(table, glob)
    pos_c = np.minimum(pos, table.size - 1)
    if np.any(table[pos_c] != glob):
        bad = np.atleast_1d(glob)[np.atleast_1d(table[pos_c] != glob)][0]
        raise KeyError(f"{what} {bad} is not in the box")
    return pos_c


def extract_box(grid: Grid, i0: int, j0: int, w: int, hgt: int) -> BoxRegion:
    return BoxRegion(int(i0), int(j0), int(w), int(hgt), grid)


def side_edges(box: BoxRegion, side: str) -> list[SideEdge]:
    """Edges on one side of ``box`` with the arclength of their midpoints."""
    if side not in SIDES:
        raise ValueError(f"unknown side {side!r}, expected one of {SIDES}")
    ids = box.side_ids(side)
    h = box.parent.h
    return [SideEdge(int(e), (t + 0.5) * h) for t, e in enumerate(ids)]
