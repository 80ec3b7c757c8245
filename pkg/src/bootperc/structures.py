"""Lattice bootstrap structures: coordinates, thresholds, adjacency, geometry.

The lattice is [n]^d x [k]^ell with 1-based coordinates.  The first d axes
are "horizontal", the trailing ell axes are "thickness".  Three families are
supported:

* plain -- [n]^d, every vertex has threshold r (ell = 0).
* star  -- [n]^d x [2]^ell, threshold r on the layer with all thickness
  coordinates equal to 1, threshold r + ell everywhere else.
* slab  -- [n]^d x [k]^ell, threshold r plus one for every thickness
  coordinate strictly between 1 and k.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from math import prod
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy import ndimage

Coord = tuple[int, ...]

PLAIN = "plain"
STAR = "star"
SLAB = "slab"


class DomainError(ValueError):
    """Invalid argument: out-of-bounds coordinate, bad parameter, etc."""


@dataclass(frozen=True)
class StructureSpec:
    """Which bootstrap structure to run on, and its dimensions.

    ``k`` is the thickness side length: 1 for plain (no thickness axes),
    2 for star, >= 2 for slab.
    """

    family: str
    n: int
    d: int
    r: int
    ell: int = 0
    k: int = 1

    def __post_init__(self) -> None:
        if self.family not in (PLAIN, STAR, SLAB):
            raise DomainError(f"unknown family {self.family!r}")
        if self.n < 1 or self.d < 1 or self.r < 1 or self.ell < 0:
            raise DomainError("n, d, r must be >= 1 and ell >= 0")
        if self.family == PLAIN and (self.ell != 0 or self.k != 1):
            raise DomainError("plain structures have no thickness axes")
        if self.family == STAR and self.k != 2:
            raise DomainError("star structures have thickness side 2")
        if self.family == SLAB and self.k < 2:
            raise DomainError("slab structures need k >= 2")

    @staticmethod
    def plain(n: int, d: int, r: int) -> "StructureSpec":
        return StructureSpec(PLAIN, n, d, r)

    @staticmethod
    def star(n: int, d: int, ell: int, r: int) -> "StructureSpec":
        return StructureSpec(STAR, n, d, r, ell, 2)

    @staticmethod
    def slab(n: int, d: int, ell: int, k: int, r: int) -> "StructureSpec":
        return StructureSpec(SLAB, n, d, r, ell, k)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,) * self.d + (self.k,) * self.ell

    @property
    def num_vertices(self) -> int:
        return prod(self.shape)

    def validate_coord(self, v: Sequence[int]) -> Coord:
        v = tuple(int(x) for x in v)
        if len(v) != self.d + self.ell:
            raise DomainError(f"coordinate {v} has wrong arity for {self}")
        for x, bound in zip(v, self.shape):
            if not 1 <= x <= bound:
                raise DomainError(f"coordinate {v} out of bounds for {self}")
        return v

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "n": self.n,
            "d": self.d,
            "ell": self.ell,
            "k": self.k,
            "r": self.r,
        }

    @staticmethod
    def from_json(obj: dict) -> "StructureSpec":
        try:
            family = obj["family"]
            n, d, r = int(obj["n"]), int(obj["d"]), int(obj["r"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"bad structure JSON: {exc}") from exc
        ell = int(obj.get("ell", 0))
        if family == PLAIN:
            return StructureSpec(PLAIN, n, d, r)
        k = int(obj.get("k", 2 if family == STAR else 0))
        return StructureSpec(family, n, d, r, ell, k)

    def dumps(self) -> str:
        return json.dumps(self.to_json())


class CellSet:
    """A set of lattice vertices, stored as a dense boolean grid.

    Membership and insertion are O(1); iteration is in canonical
    axis-lexicographic order (horizontal axes first, then thickness).
    """

    __slots__ = ("shape", "mask")

    def __init__(self, shape: Sequence[int], cells: Iterable[Sequence[int]] = ()):
        self.shape = tuple(int(s) for s in shape)
        self.mask = np.zeros(self.shape, dtype=bool)
        for c in cells:
            self.add(c)

    @classmethod
    def from_mask(cls, mask: np.ndarray) -> "CellSet":
        out = cls.__new__(cls)
        out.shape = mask.shape
        out.mask = mask.astype(bool, copy=False)
        return out

    @classmethod
    def full(cls, shape: Sequence[int]) -> "CellSet":
        return cls.from_mask(np.ones(tuple(shape), dtype=bool))

    def _index(self, coord: Sequence[int]) -> tuple[int, ...]:
        coord = tuple(int(x) for x in coord)
        if len(coord) != len(self.shape):
            raise DomainError(f"coordinate {coord} has wrong arity")
        for x, bound in zip(coord, self.shape):
            if not 1 <= x <= bound:
                raise DomainError(f"coordinate {coord} out of bounds")
        return tuple(x - 1 for x in coord)

    def add(self, coord: Sequence[int]) -> None:
        self.mask[self._index(coord)] = True

    def __contains__(self, coord: Sequence[int]) -> bool:
        try:
            idx = self._index(coord)
        except DomainError:
            return False
        return bool(self.mask[idx])

    def __iter__(self) -> Iterator[Coord]:
        # np.argwhere scans in C order, which is exactly the canonical order.
        for row in np.argwhere(self.mask):
            yield tuple(int(x) + 1 for x in row)

    def __len__(self) -> int:
        return int(self.mask.sum())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CellSet):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.mask, other.mask))

    def __repr__(self) -> str:
        return f"CellSet(shape={self.shape}, n={len(self)})"

    def copy(self) -> "CellSet":
        return CellSet.from_mask(self.mask.copy())

    def coords(self) -> list[Coord]:
        return list(self)

    def to_json(self) -> list[list[int]]:
        return [list(c) for c in self]

    @staticmethod
    def from_json(shape: Sequence[int], obj: Iterable[Sequence[int]]) -> "CellSet":
        return CellSet(shape, obj)


@dataclass(frozen=True)
class Rectangle:
    """Axis-aligned box [lo, hi] (inclusive) in the horizontal coordinates.

    As a vertex set a rectangle always spans the full thickness [k]^ell of
    the owning structure.
    """

    lo: tuple[int, ...]
    hi: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", tuple(int(x) for x in self.lo))
        object.__setattr__(self, "hi", tuple(int(x) for x in self.hi))
        if len(self.lo) != len(self.hi):
            raise DomainError("lo and hi must have the same arity")
        if any(a > b for a, b in zip(self.lo, self.hi)):
            raise DomainError(f"rectangle [{self.lo}, {self.hi}] has lo > hi")

    @property
    def dim(self) -> tuple[int, ...]:
        return tuple(b - a + 1 for a, b in zip(self.lo, self.hi))

    @property
    def phi(self) -> int:
        """Semi-perimeter: the sum of the side lengths."""
        return sum(self.dim)

    @property
    def long(self) -> int:
        return max(self.dim)

    @property
    def short(self) -> int:
        return min(self.dim)

    def contains(self, prefix: Sequence[int]) -> bool:
        return all(a <= x <= b for x, a, b in zip(prefix, self.lo, self.hi))

    def cells(self, spec: StructureSpec) -> CellSet:
        """The rectangle as a vertex set of spec, full thickness."""
        if len(self.lo) != spec.d:
            raise DomainError("rectangle arity does not match structure")
        mask = np.zeros(spec.shape, dtype=bool)
        sl = tuple(slice(a - 1, b) for a, b in zip(self.lo, self.hi))
        sl += (slice(None),) * spec.ell
        mask[sl] = True
        return CellSet.from_mask(mask)

    def to_json(self) -> list[list[int]]:
        return [list(self.lo), list(self.hi)]

    @staticmethod
    def from_json(obj: Sequence[Sequence[int]]) -> "Rectangle":
        if len(obj) != 2:
            raise DomainError("rectangle JSON must be [lo, hi]")
        return Rectangle(tuple(obj[0]), tuple(obj[1]))


def bounding_rectangle(cells: Iterable[Sequence[int]]) -> Rectangle:
    pts = [tuple(c) for c in cells]
    if not pts:
        raise DomainError("bounding rectangle of the empty set is undefined")
    arr = np.asarray(pts, dtype=int)
    return Rectangle(tuple(arr.min(axis=0)), tuple(arr.max(axis=0)))


def threshold(spec: StructureSpec, v: Sequence[int]) -> int:
    """Infection threshold of vertex v under spec's family rules."""
    v = spec.validate_coord(v)
    thick = v[spec.d:]
    if spec.family == PLAIN:
        return spec.r
    if spec.family == STAR:
        return spec.r if all(b == 1 for b in thick) else spec.r + spec.ell
    return spec.r + sum(1 for b in thick if b not in (1, spec.k))


def neighbors(spec: StructureSpec, v: Sequence[int]) -> list[Coord]:
    """In-bounds nearest neighbors of v, in canonical order."""
    v = spec.validate_coord(v)
    out: list[Coord] = []
    for axis, bound in enumerate(spec.shape):
        for delta in (-1, 1):
            x = v[axis] + delta
            if 1 <= x <= bound:
                out.append(v[:axis] + (x,) + v[axis + 1:])
    return out


def _resolve_shape(spec_or_shape) -> tuple[int, ...]:
    if isinstance(spec_or_shape, StructureSpec):
        return spec_or_shape.shape
    return tuple(int(s) for s in spec_or_shape)


def projection(spec: StructureSpec, cells: CellSet) -> CellSet:
    """Horizontal shadow: distinct d-prefixes of the members of cells."""
    if cells.shape != spec.shape:
        raise DomainError("cell set does not belong to this structure")
    if spec.ell == 0:
        return cells.copy()
    mask = cells.mask.any(axis=tuple(range(spec.d, spec.d + spec.ell)))
    return CellSet.from_mask(mask)


def components(spec_or_shape, cells: CellSet) -> list[CellSet]:
    """Nearest-neighbor connected components, ordered by least member."""
    shape = _resolve_shape(spec_or_shape)
    if cells.shape != shape:
        raise DomainError("cell set does not match the ambient grid")
    labels, count = ndimage.label(cells.mask)
    out = []
    for lab in range(1, count + 1):
        out.append(CellSet.from_mask(labels == lab))
    # ndimage assigns labels in scan (canonical) order of first occurrence,
    # so the list is already ordered by least member; keep it explicit anyway.
    return out


def diameter(spec_or_shape, cells: CellSet) -> int:
    """Max over components of the longest side of the bounding box (0 if empty).

    For a connected set this equals the maximum pairwise L-infinity
    distance plus one.
    """
    shape = _resolve_shape(spec_or_shape)
    if cells.shape != shape:
        raise DomainError("cell set does not match the ambient grid")
    labels, count = ndimage.label(cells.mask)
    best = 0
    for sl in ndimage.find_objects(labels):
        if sl is None:
            continue
        best = max(best, max(s.stop - s.start for s in sl))
    return best


@lru_cache(maxsize=64)
def grid_tables(shape: tuple[int, ...]) -> tuple[np.ndarray, int]:
    """Flat neighbor table for a grid of the given shape.

    Returns (nbrs, V) where nbrs is a (V, 2*ndim) int array of flat neighbor
    indices, padded with -1, rows in canonical order.
    """
    ndim = len(shape)
    size = prod(shape)
    flat = np.arange(size)
    coords = np.array(np.unravel_index(flat, shape))  # (ndim, V), 0-based
    nbrs = np.full((size, 2 * ndim), -1, dtype=np.int64)
    col = 0
    for axis in range(ndim):
        for delta in (-1, 1):
            shifted = coords.copy()
            shifted[axis] += delta
            ok = (shifted[axis] >= 0) & (shifted[axis] < shape[axis])
            idx = np.ravel_multi_index(shifted[:, ok], shape)
            nbrs[ok, col] = idx
            col += 1
    return nbrs, size


@lru_cache(maxsize=64)
def threshold_table(spec: StructureSpec) -> np.ndarray:
    """Per-vertex thresholds of spec as a flat int array in canonical order."""
    shape = spec.shape
    if spec.family == PLAIN:
        return np.full(prod(shape), spec.r, dtype=np.int64)
    thick = np.indices((spec.k,) * spec.ell).reshape(spec.ell, -1) + 1
    if spec.family == STAR:
        extra = np.where((thick == 1).all(axis=0), 0, spec.ell)
    else:
        extra = ((thick != 1) & (thick != spec.k)).sum(axis=0)
    per_column = spec.r + extra  # one entry per thickness combination
    return np.tile(per_column, spec.n ** spec.d).astype(np.int64)
