"""Structured non-overlapping partitions, coarse faces and oversampled boxes.

Subdomains are numbered row-major over the ``Mx x My`` block layout.  A
coarse face is the fine-edge segment shared by two edge-adjacent blocks;
vertical faces come first, then horizontal ones, each row-major.  The fixed
normal of every skeleton edge points along +x/+y, which is the exterior
normal of the lower-index subdomain.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .mesh import BoxRegion, Grid, extract_box


@dataclass(frozen=True)
class CoarseFace:
    index: int
    lo: int
    """Subdomain on the -axis side (smaller index)."""
    hi: int
    axis: int
    """0 for a vertical face (normal along x), 1 for a horizontal face."""
    edges: np.ndarray
    """Fine edges ordered by increasing tangential coordinate."""

    @property
    def n_edges(self) -> int:
        return self.edges.size


@dataclass(frozen=True, eq=False)
class Partition:
    grid: Grid
    mx: int
    my: int
    subdomains: tuple[BoxRegion, ...]
    faces: tuple[CoarseFace, ...]

    @property
    def n_sub(self) -> int:
        return self.mx * self.my

    @property
    def n_loc(self) -> tuple[int, int]:
        return self.grid.nx // self.mx, self.grid.ny // self.my

    @property
    def H(self) -> float:
        """Subdomain size; the smaller extent for non-square blocks."""
        return min(self.n_loc) * self.grid.h

    def block(self, i: int) -> tuple[int, int]:
        j, ii = divmod(i, self.mx)
        return ii, j

    @cached_property
    def skeleton(self) -> np.ndarray:
        return np.concatenate([f.edges for f in self.faces]) if self.faces else np.zeros(0, int)

    @cached_property
    def faces_of(self) -> tuple[tuple[int, ...], ...]:
        """Faces touching each subdomain, by increasing face index."""
        out = [[] for _ in range(self.n_sub)]
        for f in self.faces:
            out[f.lo].append(f.index)
            out[f.hi].append(f.index)
        return tuple(tuple(v) for v in out)

    def gamma(self, i: int) -> np.ndarray:
        """Fine edges of the interface of subdomain ``i``, face by face."""
        fs = self.faces_of[i]
        if not fs:
            return np.zeros(0, int)
        return np.concatenate([self.faces[f].edges for f in fs])

    def gamma_sign(self, i: int) -> np.ndarray:
        """n_i . n_fixed on the interface edges of ``i`` (+1 on its lo faces)."""
        fs = self.faces_of[i]
        if not fs:
            return np.zeros(0, int)
        return np.concatenate([np.full(self.faces[f].n_edges, 1 if self.faces[f].lo == i else -1)
                               for f in fs])

    @cached_property
    def cell_owner(self) -> np.ndarray:
        own = np.empty(self.grid.n_cells, int)
        for i, box in enumerate(self.subdomains):
            own[box.cells] = i
        own.setflags(write=False)
        return own

    @cached_property
    def skeleton_mask(self) -> np.ndarray:
        m = np.zeros(self.grid.n_edges, bool)
        m[self.skeleton] = True
        m.setflags(write=False)
        return m


def build_partition(grid: Grid, mx: int, my: int) -> Partition:
    if mx < 1 or my < 1 or grid.nx % mx or grid.ny % my:
        raise ValueError(f"{mx}x{my} blocks do not divide a {grid.nx}x{grid.ny} grid")
    wx, wy = grid.nx // mx, grid.ny // my
    subs = tuple(extract_box(grid, I * wx, J * wy, wx, wy)
                 for J in range(my) for I in range(mx))
    faces = []
    for J in range(my):
        for I in range(mx - 1):
            lo = J * mx + I
            faces.append(CoarseFace(len(faces), lo, lo + 1, 0, subs[lo].side_ids("right")))
    for J in range(my - 1):
        for I in range(mx):
            lo = J * mx + I
            faces.append(CoarseFace(len(faces), lo, lo + mx, 1, subs[lo].side_ids("top")))
    return Partition(grid, mx, my, subs, tuple(faces))


@dataclass(frozen=True, eq=False)
class OversampledPartition:
    base: Partition
    l: int
    hats: tuple[BoxRegion, ...]
    colors: tuple[int, ...]

    @property
    def n_colors(self) -> int:
        return len(set(self.colors))

    def color_groups(self) -> list[list[int]]:
        """Subdomains grouped by color, ascending color id."""
        return [[i for i, c in enumerate(self.colors) if c == col]
                for col in sorted(set(self.colors))]


def grow_box(box: BoxRegion, l: int) -> BoxRegion:
    g = box.parent
    i0 = max(box.i0 - l, 0)
    j0 = max(box.j0 - l, 0)
    i1 = min(box.i1 + l, g.nx)
    j1 = min(box.j1 + l, g.ny)
    return extract_box(g, i0, j0, i1 - i0, j1 - j0)


def boxes_touch(a: BoxRegion, b: BoxRegion) -> bool:
    """True if the closed boxes share at least one point."""
    return not (a.i1 < b.i0 or b.i1 < a.i0 or a.j1 < b.j0 or b.j1 < a.j0)


def oversample(part: Partition, l: int) -> OversampledPartition:
    """Grow every subdomain by ``l`` cells per side (clipped) and 4-color them.

    Colors follow the parity of the block indices.  ``2 l`` must be smaller
    than the block size for same-colored boxes to stay apart; the coloring
    is verified after construction.
    """
    if l < 0:
        raise ValueError("oversampling width must be nonnegative")
    nloc = min(part.n_loc)
    if 2 * l >= nloc and part.n_sub > 1:
        raise ValueError(f"oversampling l={l} too large for {nloc}-cell subdomains (need 2l < {nloc})")
    hats = tuple(grow_box(b, l) for b in part.subdomains)
    colors = []
    for i in range(part.n_sub):
        I, J = part.block(i)
        colors.append(2 * (I % 2) + (J % 2))
    op = OversampledPartition(part, int(l), hats, tuple(colors))
    check_coloring(op)
    return op


def check_coloring(op: OversampledPartition) -> None:
    for group in op.color_groups():
        for a in range(len(group)):
            for b in range(a + 1, len(group)):
                if boxes_touch(op.hats[group[a]], op.hats[group[b]]):
                    raise ValueError(f"oversampled boxes {group[a]} and {group[b]} share a color and touch")


def neighbors_under_overlap(op: OversampledPartition, i: int) -> list[int]:
    """Subdomains j != i that own a cell of the oversampled box of i or
    share a boundary segment with it."""
    hat = op.hats[i]
    out = []
    for j, box in enumerate(op.base.subdomains):
        if j == i:
            continue
        ox = min(hat.i1, box.i1) - max(hat.i0, box.i0)
        oy = min(hat.j1, box.j1) - max(hat.j0, box.j0)
        if ox >= 0 and oy >= 0 and ox + oy > 0:
            out.append(j)
    return out
