"""Intervals, hyper-boxes, box unions, and grid partitioning.

All sets are closed: adjacent partition cells share boundary faces and
touching boxes count as intersecting. That convention is conservative
for safety checks built on these predicates.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .kernels import points_in_union


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with finite endpoints; lo == hi is allowed."""

    lo: float
    hi: float

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (np.isfinite(lo) and np.isfinite(hi)):
            raise ValueError(f"interval endpoints must be finite, got [{lo}, {hi}]")
        if lo > hi:
            raise ValueError(f"interval lower bound {lo} exceeds upper bound {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, x: float) -> bool:
        return self.lo <= x <= self.hi


def _as_bound_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError(f"{name} must be a non-empty 1-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must be finite")
    return arr


class HyperBox:
    """Axis-aligned product of closed intervals, dimension fixed at construction."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        lo = _as_bound_array(lo, "lo").copy()
        hi = _as_bound_array(hi, "hi").copy()
        if lo.shape != hi.shape:
            raise ValueError(f"bound shapes differ: {lo.shape} vs {hi.shape}")
        if np.any(lo > hi):
            bad = int(np.argmax(lo > hi))
            raise ValueError(
                f"lower bound exceeds upper bound in dimension {bad}: "
                f"[{lo[bad]}, {hi[bad]}]")
        lo.flags.writeable = False
        hi.flags.writeable = False
        self.lo = lo
        self.hi = hi

    @classmethod
    def from_intervals(cls, intervals: Iterable[Interval]) -> "HyperBox":
        ivs = list(intervals)
        return cls([iv.lo for iv in ivs], [iv.hi for iv in ivs])

    @classmethod
    def from_center_radius(cls, center, radius: float) -> "HyperBox":
        """Infinity-norm ball: all points within `radius` of `center`."""
        c = _as_bound_array(center, "center")
        return cls(c - radius, c + radius)

    @property
    def dim(self) -> int:
        return self.lo.size

    @property
    def dims(self) -> tuple[Interval, ...]:
        return tuple(Interval(float(a), float(b)) for a, b in zip(self.lo, self.hi))

    @property
    def widths(self) -> np.ndarray:
        return self.hi - self.lo

    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def contains_point(self, point) -> bool:
        p = np.asarray(point, dtype=np.float64)
        return bool(np.all(self.lo <= p) and np.all(p <= self.hi))

    def contains_box(self, other: "HyperBox") -> bool:
        self._check_dim(other)
        return bool(np.all(self.lo <= other.lo) and np.all(other.hi <= self.hi))

    def inflate(self, eps: float) -> "HyperBox":
        """Pad every face outward by eps (no-op for eps == 0)."""
        if eps == 0.0:
            return self
        if eps < 0.0:
            raise ValueError("padding must be non-negative")
        return HyperBox(self.lo - eps, self.hi + eps)

    def _check_dim(self, other: "HyperBox"):
        if self.dim != other.dim:
            raise ValueError(f"dimension mismatch: {self.dim} vs {other.dim}")

    def __eq__(self, other) -> bool:
        if not isinstance(other, HyperBox):
            return NotImplemented
        return (self.lo.shape == other.lo.shape
                and bool(np.all(self.lo == other.lo))
                and bool(np.all(self.hi == other.hi)))

    def __hash__(self):
        return hash((self.lo.tobytes(), self.hi.tobytes()))

    def __repr__(self):
        parts = ", ".join(f"[{a:g}, {b:g}]" for a, b in zip(self.lo, self.hi))
        return f"HyperBox({parts})"


class BoxUnion:
    """Finite union of equal-dimension boxes, stored as stacked bound arrays.

    `cell_index` optionally records, per box, the lexicographic index of the
    grid cell the box originated from (see `partition_box`).
    """

    __slots__ = ("los", "his", "cell_index")

    def __init__(self, los, his, cell_index=None):
        los = np.asarray(los, dtype=np.float64).copy()
        his = np.asarray(his, dtype=np.float64).copy()
        if los.ndim != 2 or los.shape != his.shape:
            raise ValueError(
                f"bounds must be matching (boxes, dim) arrays, got {los.shape} and {his.shape}")
        if los.shape[1] == 0:
            raise ValueError("boxes must have at least one dimension")
        if not (np.all(np.isfinite(los)) and np.all(np.isfinite(his))):
            raise ValueError("box bounds must be finite")
        if np.any(los > his):
            raise ValueError("lower bound exceeds upper bound in some box")
        if cell_index is not None:
            cell_index = np.asarray(cell_index, dtype=np.int64).copy()
            if cell_index.shape != (los.shape[0],):
                raise ValueError("cell_index length must match number of boxes")
            cell_index.flags.writeable = False
        los.flags.writeable = False
        his.flags.writeable = False
        self.los = los
        self.his = his
        self.cell_index = cell_index

    @classmethod
    def from_boxes(cls, boxes: Sequence[HyperBox], cell_index=None) -> "BoxUnion":
        if not boxes:
            raise ValueError("cannot build a union from zero boxes; use `empty`")
        dim = boxes[0].dim
        for b in boxes:
            if b.dim != dim:
                raise ValueError("all boxes in a union must share a dimension")
        return cls(np.stack([b.lo for b in boxes]),
                   np.stack([b.hi for b in boxes]), cell_index)

    @classmethod
    def empty(cls, dim: int) -> "BoxUnion":
        u = cls.__new__(cls)
        los = np.empty((0, dim), dtype=np.float64)
        his = np.empty((0, dim), dtype=np.float64)
        los.flags.writeable = False
        his.flags.writeable = False
        u.los, u.his, u.cell_index = los, his, None
        return u

    @property
    def dim(self) -> int:
        return self.los.shape[1]

    def __len__(self) -> int:
        return self.los.shape[0]

    def box(self, i: int) -> HyperBox:
        return HyperBox(self.los[i], self.his[i])

    def __iter__(self) -> Iterator[HyperBox]:
        return (self.box(i) for i in range(len(self)))

    def volumes(self) -> np.ndarray:
        return np.prod(self.his - self.los, axis=1)

    def contains_points(self, points) -> np.ndarray:
        """Closed-set membership of each point in at least one box."""
        pts = np.ascontiguousarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != self.dim:
            raise ValueError(f"points must have shape (n, {self.dim})")
        if len(self) == 0:
            return np.zeros(len(pts), dtype=bool)
        return points_in_union(pts, self.los, self.his)

    def inflate(self, eps: float) -> "BoxUnion":
        if eps == 0.0:
            return self
        if eps < 0.0:
            raise ValueError("padding must be non-negative")
        return BoxUnion(self.los - eps, self.his + eps, self.cell_index)

    def __repr__(self):
        return f"BoxUnion({len(self)} boxes, dim={self.dim})"


def as_union(value) -> BoxUnion:
    """Wrap a HyperBox as a one-box union; pass unions through."""
    if isinstance(value, BoxUnion):
        return value
    if isinstance(value, HyperBox):
        return BoxUnion(value.lo[None, :], value.hi[None, :])
    raise TypeError(f"expected HyperBox or BoxUnion, got {type(value).__name__}")


@dataclass(frozen=True)
class PartitionSpec:
    """Segment counts per dimension for grid partitioning."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        if not counts:
            raise ValueError("partition needs at least one dimension")
        if any(c < 1 for c in counts):
            raise ValueError(f"all partition counts must be >= 1, got {counts}")
        object.__setattr__(self, "counts", counts)

    @classmethod
    def uniform(cls, count: int, dim: int) -> "PartitionSpec":
        return cls((count,) * dim)

    @property
    def total(self) -> int:
        return int(np.prod(self.counts))


def _grid_edges(box: HyperBox, spec: PartitionSpec) -> list[np.ndarray]:
    edges = []
    for lo, hi, m in zip(box.lo, box.hi, spec.counts):
        e = lo + np.arange(m + 1, dtype=np.float64) * ((hi - lo) / m)
        e[-1] = hi  # clamp: float drift must not leave a gap at the top
        edges.append(e)
    return edges


def partition_box(box: HyperBox, spec: PartitionSpec) -> BoxUnion:
    """Split `box` into a uniform grid of prod(counts) cells.

    Cells tile the box exactly (shared faces, no gaps) and are ordered
    lexicographically by their per-dimension segment indices; that order
    is also each cell's `cell_index`.
    """
    if len(spec.counts) != box.dim:
        raise ValueError(
            f"partition has {len(spec.counts)} dimensions, box has {box.dim}")
    edges = _grid_edges(box, spec)
    lo_grids = np.meshgrid(*[e[:-1] for e in edges], indexing="ij")
    hi_grids = np.meshgrid(*[e[1:] for e in edges], indexing="ij")
    los = np.stack([g.reshape(-1) for g in lo_grids], axis=1)
    his = np.stack([g.reshape(-1) for g in hi_grids], axis=1)
    return BoxUnion(los, his, cell_index=np.arange(los.shape[0], dtype=np.int64))


def partition_union(h: BoxUnion, bounding: HyperBox, spec: PartitionSpec) -> BoxUnion:
    """Partition `bounding` and keep only cells meeting some box of `h`.

    `bounding` must contain every box of `h`; the retained cells keep the
    lexicographic indices they had in the full grid.
    """
    h = as_union(h)
    if h.dim != bounding.dim:
        raise ValueError(f"dimension mismatch: union {h.dim}, bounding {bounding.dim}")
    if len(h) == 0:
        raise ValueError("cannot partition around an empty union")
    if np.any(h.los < bounding.lo) or np.any(h.his > bounding.hi):
        raise ValueError("bounding box does not contain every box of the union")
    cells = partition_box(bounding, spec)
    # Closed-set intersection of every cell against every box of h.
    meets = np.all((cells.los[:, None, :] <= h.his[None, :, :])
                   & (h.los[None, :, :] <= cells.his[:, None, :]), axis=2)
    keep = meets.any(axis=1)
    return BoxUnion(cells.los[keep], cells.his[keep],
                    cell_index=cells.cell_index[keep])


def boxes_intersect(a: HyperBox, b: HyperBox) -> bool:
    """Closed-set intersection test; touching faces or corners count."""
    a._check_dim(b)
    return bool(np.all(a.lo <= b.hi) and np.all(b.lo <= a.hi))


def interval_hull(u: BoxUnion) -> HyperBox:
    """Smallest box containing every box of the union."""
    u = as_union(u)
    if len(u) == 0:
        raise ValueError("interval hull of an empty union is undefined")
    return HyperBox(u.los.min(axis=0), u.his.max(axis=0))


def cartesian_product(a: HyperBox, b: HyperBox) -> HyperBox:
    """Stack the intervals of `a` followed by those of `b`."""
    return HyperBox(np.concatenate([a.lo, b.lo]), np.concatenate([a.hi, b.hi]))


def sampled_hausdorff_gap(estimate: BoxUnion, samples) -> float:
    """Largest Euclidean distance from a sample point to the nearest box.

    Zero when every sample is covered. This is a diagnostic lower bound on
    how loose the estimate is, not a soundness check.
    """
    estimate = as_union(estimate)
    pts = np.asarray(samples, dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("samples must be a non-empty (n, dim) array")
    if pts.shape[1] != estimate.dim:
        raise ValueError(
            f"sample dimension {pts.shape[1]} != union dimension {estimate.dim}")
    if len(estimate) == 0:
        raise ValueError("gap to an empty union is undefined")
    # Per point and box: componentwise distance to the box, zero inside.
    below = estimate.los[None, :, :] - pts[:, None, :]
    above = pts[:, None, :] - estimate.his[None, :, :]
    gap = np.maximum(np.maximum(below, above), 0.0)
    dist = np.sqrt((gap * gap).sum(axis=2)).min(axis=1)
    return float(dist.max())
