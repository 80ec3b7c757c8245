"""Closure computation and the percolation / crossing / gap predicates.

The closure is computed with per-vertex infected-neighbor counters and a
frontier queue: every vertex enters the frontier at most once, so the total
work is O(|V| * max degree).  The fixed point is independent of update
order.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np
from scipy import ndimage

from .structures import (
    STAR,
    SLAB,
    CellSet,
    DomainError,
    Rectangle,
    StructureSpec,
    grid_tables,
    threshold_table,
)


@dataclass(frozen=True)
class CrossDirection:
    """A crossing direction: horizontal axis (1-based) plus orientation.

    ``reverse=False`` crosses from the low face to the high face
    (left-to-right along axis 1, bottom-to-top along axis 2);
    ``reverse=True`` is the opposite orientation.
    """

    axis: int = 1
    reverse: bool = False

    _NAMES = {
        "left-to-right": (1, False),
        "right-to-left": (1, True),
        "bottom-to-top": (2, False),
        "top-to-bottom": (2, True),
    }

    @staticmethod
    def from_name(name: str) -> "CrossDirection":
        try:
            axis, reverse = CrossDirection._NAMES[name]
        except KeyError:
            raise DomainError(f"unknown crossing direction {name!r}") from None
        return CrossDirection(axis, reverse)


LEFT_TO_RIGHT = CrossDirection(1, False)
RIGHT_TO_LEFT = CrossDirection(1, True)
BOTTOM_TO_TOP = CrossDirection(2, False)
TOP_TO_BOTTOM = CrossDirection(2, True)


def _closure_flat(nbrs: np.ndarray, thresholds: np.ndarray, infected: np.ndarray) -> np.ndarray:
    """Counter/frontier closure on a flat grid; mutates and returns infected."""
    size = infected.size
    counts = np.zeros(size, dtype=np.int64)
    frontier = np.flatnonzero(infected)
    remaining = size - frontier.size
    while frontier.size and remaining:
        touched = nbrs[frontier].ravel()
        touched = touched[touched >= 0]
        counts += np.bincount(touched, minlength=size)
        newly = np.flatnonzero(~infected & (counts >= thresholds))
        infected[newly] = True
        remaining -= newly.size
        frontier = newly
    return infected


def closure(spec: StructureSpec, cells: CellSet) -> CellSet:
    """The closure [A]: the least fixed point of the infection rule."""
    if cells.shape != spec.shape:
        raise DomainError("cell set does not belong to this structure")
    nbrs, _ = grid_tables(spec.shape)
    infected = _closure_flat(nbrs, threshold_table(spec), cells.mask.ravel().copy())
    return CellSet.from_mask(infected.reshape(spec.shape))


def closure_uniform(box: Rectangle, cells, t: int) -> CellSet:
    """Closure under the uniform t-neighbor rule, restricted to ``box``.

    ``box`` may live in any dimension; ``cells`` is a CellSet or an iterable
    of absolute coordinates, of which only those inside the box are used.
    """
    if t < 1:
        raise DomainError("uniform threshold must be >= 1")
    dims = box.dim
    nbrs, size = grid_tables(dims)
    infected = np.zeros(size, dtype=bool)
    shape = dims
    coords = cells if not isinstance(cells, CellSet) else iter(cells)
    for c in coords:
        c = tuple(int(x) for x in c)
        if len(c) != len(dims):
            raise DomainError(f"coordinate {c} has wrong arity for the box")
        if box.contains(c):
            local = tuple(x - a for x, a in zip(c, box.lo))
            infected[np.ravel_multi_index(local, shape)] = True
    thresholds = np.full(size, t, dtype=np.int64)
    infected = _closure_flat(nbrs, thresholds, infected)
    out = CellSet(box.hi)
    local_idx = np.array(np.unravel_index(np.flatnonzero(infected), shape))
    offs = np.array(box.lo)[:, None] - 1  # to 0-based absolute
    for col in (local_idx + offs).T:
        out.mask[tuple(col)] = True
    return out


def percolates(spec: StructureSpec, cells: CellSet) -> bool:
    """True iff the closure is the full vertex set."""
    return bool(closure(spec, cells).mask.all())


def _base_layer_index(spec: StructureSpec) -> tuple:
    return (slice(None),) * spec.d + (0,) * spec.ell


def semi_percolates(spec: StructureSpec, cells: CellSet) -> bool:
    """True iff the closure contains every vertex of minimal threshold r."""
    if spec.family != STAR:
        raise DomainError("semi-percolation is defined for star structures")
    closed = closure(spec, cells)
    return bool(closed.mask[_base_layer_index(spec)].all())


def _restricted_closure(shape: tuple[int, ...], region: np.ndarray,
                        thresholds: np.ndarray, infected: np.ndarray) -> np.ndarray:
    """Closure with adjacency restricted to ``region`` (flat bool mask)."""
    nbrs, size = grid_tables(shape)
    blocked = np.where(region, thresholds, np.int64(np.iinfo(np.int64).max))
    return _closure_flat(nbrs, blocked, infected & region)


def is_crossed(spec: StructureSpec, rect: Rectangle, cells: CellSet,
               direction: CrossDirection = LEFT_TO_RIGHT) -> bool:
    """Crossing event H(R): with a fully infected ghost plane on the entry
    side, the closure restricted to R contains a path from entry to exit face.
    """
    if spec.family != SLAB:
        raise DomainError("crossing is defined for slab structures")
    if spec.d != 2:
        raise DomainError("crossing requires d = 2")
    if cells.shape != spec.shape:
        raise DomainError("cell set does not belong to this structure")
    if len(rect.lo) != spec.d:
        raise DomainError("rectangle arity does not match structure")
    if not (all(a >= 1 for a in rect.lo) and all(b <= spec.n for b in rect.hi)):
        raise DomainError("rectangle out of bounds")
    ax = direction.axis - 1
    if not 0 <= ax < spec.d:
        raise DomainError("crossing axis out of range")

    # Local grid: R plus one ghost layer along the entry side of the axis.
    dims = list(rect.dim) + [spec.k] * spec.ell
    dims[ax] += 1
    shape = tuple(dims)
    size = prod(shape)
    ghost_local = 0 if not direction.reverse else shape[ax] - 1
    entry_local = 1 if not direction.reverse else shape[ax] - 2
    exit_local = shape[ax] - 1 if not direction.reverse else 0
    if rect.dim[ax] == 1:
        entry_local = exit_local

    def axis_layer(i: int) -> tuple:
        return (slice(None),) * ax + (i,) + (slice(None),) * (len(shape) - ax - 1)

    # Offset of local (0-based) to absolute (1-based) coordinates.
    offs = list(rect.lo) + [1] * spec.ell
    if not direction.reverse:
        offs[ax] -= 1  # ghost layer sits below lo along the axis

    infected = np.zeros(shape, dtype=bool)
    src = tuple(slice(a - 1, a - 1 + s) for a, s in zip(rect.lo, rect.dim)) \
        + (slice(None),) * spec.ell
    dest = list(slice(None, s) for s in shape)
    dest[ax] = slice(1, None) if not direction.reverse else slice(None, -1)
    infected[tuple(dest)] = cells.mask[src]
    infected[axis_layer(ghost_local)] = True

    # Thresholds depend only on the thickness coordinates.
    if spec.ell:
        thick = np.indices((spec.k,) * spec.ell).reshape(spec.ell, -1) + 1
        extra = ((thick != 1) & (thick != spec.k)).sum(axis=0)
    else:
        extra = np.zeros(1, dtype=int)
    per_column = (spec.r + extra).astype(np.int64)
    thresholds = np.tile(per_column, prod(shape[:spec.d]))

    nbrs, _ = grid_tables(shape)
    closed = _closure_flat(nbrs, thresholds, infected.ravel()).reshape(shape)

    inside = closed.copy()
    inside[axis_layer(ghost_local)] = False
    labels, _ = ndimage.label(inside)
    entry_labels = np.unique(labels[axis_layer(entry_local)])
    exit_labels = np.unique(labels[axis_layer(exit_local)])
    hit = np.intersect1d(entry_labels, exit_labels)
    return bool((hit > 0).any())


def is_semi_crossed(spec: StructureSpec, rect: Rectangle, cells: CellSet,
                    axis: int = 1) -> bool:
    """Semi-crossing of R in direction ``axis`` (1-based) by A.

    Builds A_t^R = (A cap (R u R_t^+)) u R_t^-, closes restricted to
    R u R_t^+ u R_t^-, and checks that every threshold-r vertex of R is
    infected.  Fringes falling outside [n]^d are treated as absent.
    """
    if spec.family != STAR:
        raise DomainError("semi-crossing is defined for star structures")
    if cells.shape != spec.shape:
        raise DomainError("cell set does not belong to this structure")
    if len(rect.lo) != spec.d:
        raise DomainError("rectangle arity does not match structure")
    ax = axis - 1
    if not 0 <= ax < spec.d:
        raise DomainError("semi-crossing axis out of range")

    lo, hi = list(rect.lo), list(rect.hi)
    has_minus = lo[ax] > 1
    has_plus = hi[ax] < spec.n
    glo = lo.copy()
    ghi = hi.copy()
    if has_minus:
        glo[ax] -= 1
    if has_plus:
        ghi[ax] += 1
    shape = tuple(b - a + 1 for a, b in zip(glo, ghi)) + (2,) * spec.ell
    base = tuple(glo) + (1,) * spec.ell  # absolute coordinate of local origin

    def absolute_block(alo: Sequence[int], ahi: Sequence[int], top_only: bool) -> tuple:
        sl = tuple(slice(a - b, h - b + 1) for a, h, b in zip(alo, ahi, base[:spec.d]))
        sl += ((0,) if top_only else (slice(None),)) * spec.ell
        return sl

    region = np.zeros(shape, dtype=bool)
    region[absolute_block(lo, hi, top_only=False)] = True
    fringe_minus = np.zeros(shape, dtype=bool)
    if has_minus:
        flo, fhi = lo.copy(), hi.copy()
        flo[ax] = fhi[ax] = lo[ax] - 1
        fringe_minus[absolute_block(flo, fhi, top_only=True)] = True
    fringe_plus = np.zeros(shape, dtype=bool)
    if has_plus:
        flo, fhi = lo.copy(), hi.copy()
        flo[ax] = fhi[ax] = hi[ax] + 1
        fringe_plus[absolute_block(flo, fhi, top_only=True)] = True

    local_a = np.zeros(shape, dtype=bool)
    src = tuple(slice(a - 1, b) for a, b in zip(glo, ghi)) + (slice(None),) * spec.ell
    local_a[...] = cells.mask[src]

    infected = (local_a & (region | fringe_plus)) | fringe_minus
    full_region = region | fringe_plus | fringe_minus

    thick = np.indices((2,) * spec.ell).reshape(spec.ell, -1)
    extra = np.where((thick == 0).all(axis=0), 0, spec.ell) if spec.ell \
        else np.zeros(1, dtype=int)
    thresholds = np.tile((spec.r + extra).astype(np.int64), prod(shape[:spec.d]))

    closed = _restricted_closure(shape, full_region.ravel(),
                                 thresholds, infected.ravel()).reshape(shape)
    target = absolute_block(lo, hi, top_only=True)
    return bool(closed[target].all())


def has_double_gap(dims: Sequence[int], cells, axes: Iterable[int] | None = None) -> bool:
    """True iff some axis in ``axes`` (1-based; default all) has two adjacent
    empty slabs, where out-of-range slabs count as empty (so an empty face
    qualifies).
    """
    dims = tuple(int(s) for s in dims)
    if isinstance(cells, CellSet):
        if cells.shape != dims:
            raise DomainError("cell set does not match the box")
        mask = cells.mask
    else:
        mask = CellSet(dims, cells).mask
    axes = range(1, len(dims) + 1) if axes is None else axes
    for axis in axes:
        ax = axis - 1
        if not 0 <= ax < len(dims):
            raise DomainError(f"axis {axis} out of range for box {dims}")
        occ = mask.any(axis=tuple(i for i in range(len(dims)) if i != ax))
        padded = np.concatenate(([False], occ, [False]))
        if bool((~padded[:-1] & ~padded[1:]).any()):
            return True
    return False
