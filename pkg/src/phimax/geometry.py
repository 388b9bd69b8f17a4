"""Points, finite point sets and the Hausdorff-Pompeiu metric.

Compact subsets of a Euclidean box are approximated by finite point sets.
A :class:`PointSet` is stored as an ``(n, d)`` float array in lexicographic
order, with points closer than the snap resolution merged into the
lexicographically smallest representative.
"""
from __future__ import annotations

import io
from typing import Iterable

import numba
import numpy as np
from scipy.spatial import cKDTree

from .errors import DimensionError

DEFAULT_SNAP = 1e-9

# above this many pairwise distances use a KD-tree instead of brute force
_BRUTE_FORCE_LIMIT = 4_000_000
_CHUNK = 2048


def as_point(x) -> np.ndarray:
    """Return ``x`` as a finite 1-D float array."""
    p = np.atleast_1d(np.asarray(x, dtype=float))
    if p.ndim != 1 or p.size == 0:
        raise DimensionError(f"a point needs shape (d,), got {p.shape}")
    if not np.all(np.isfinite(p)):
        raise ValueError(f"point has non-finite coordinates: {p}")
    return p


def distance(x, y) -> float:
    x, y = as_point(x), as_point(y)
    if x.shape != y.shape:
        raise DimensionError(f"dimension mismatch: {x.size} vs {y.size}")
    return float(np.sqrt(np.sum((x - y) ** 2)))


def lexsort_rows(a: np.ndarray) -> np.ndarray:
    """Indices sorting the rows of ``a`` lexicographically (first column major)."""
    return np.lexsort(a.T[::-1])


@numba.njit(cache=True)
def _greedy_keep(pts, snap):
    # pts lexicographically sorted; kept points are pairwise farther than snap
    n, d = pts.shape
    keep = np.ones(n, dtype=np.bool_)
    kept = np.empty(n, dtype=np.int64)
    nkept = 0
    start = 0
    snap2 = snap * snap
    for j in range(n):
        x0 = pts[j, 0]
        while start < nkept and pts[kept[start], 0] < x0 - snap:
            start += 1
        for t in range(start, nkept):
            k = kept[t]
            acc = 0.0
            for c in range(d):
                diff = pts[k, c] - pts[j, c]
                acc += diff * diff
            if acc <= snap2:
                keep[j] = False
                break
        if keep[j]:
            kept[nkept] = j
            nkept += 1
    return keep


def canonicalize(points: np.ndarray, snap: float = DEFAULT_SNAP) -> np.ndarray:
    """Sort rows lexicographically and merge points within ``snap``.

    Points are visited in lexicographic order; a point is dropped when a
    previously kept point lies within ``snap`` of it.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    pts = pts[lexsort_rows(pts)]
    if len(pts) < 2:
        return pts
    # exact duplicates are adjacent after sorting
    dup = np.all(pts[1:] == pts[:-1], axis=1)
    if dup.any():
        pts = pts[np.concatenate(([True], ~dup))]
    if snap <= 0 or len(pts) < 2:
        return pts
    return pts[_greedy_keep(np.ascontiguousarray(pts), float(snap))]


class PointSet:
    """Immutable finite nonempty point set in canonical order."""

    __slots__ = ("_points", "_snap")

    def __init__(self, points, snap: float = DEFAULT_SNAP):
        arr = np.asarray(points, dtype=float)
        if arr.ndim == 1:
            arr = arr[:, None]
        if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
            raise ValueError("a PointSet needs at least one point of dimension >= 1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("PointSet coordinates must be finite")
        arr = canonicalize(arr, snap)
        arr.flags.writeable = False
        self._points = arr
        self._snap = float(snap)

    @property
    def points(self) -> np.ndarray:
        return self._points

    @property
    def dimension(self) -> int:
        return self._points.shape[1]

    @property
    def snap(self) -> float:
        return self._snap

    def __len__(self) -> int:
        return self._points.shape[0]

    def __iter__(self):
        return iter(self._points)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointSet):
            return NotImplemented
        return self._points.shape == other._points.shape and bool(
            np.array_equal(self._points, other._points)
        )

    def __hash__(self):
        return hash(self._points.tobytes())

    def __repr__(self) -> str:
        return f"PointSet(n={len(self)}, d={self.dimension})"

    def union(self, *others: "PointSet") -> "PointSet":
        arrays = [self._points] + [o._points for o in others]
        for o in others:
            _same_dim(self, o)
        return PointSet(np.vstack(arrays), self._snap)

    def resnap(self, snap: float) -> "PointSet":
        return PointSet(self._points, snap)

    def contains_near(self, x, tol: float) -> bool:
        """True if some point of the set lies within ``tol`` of ``x``."""
        p = as_point(x)
        if p.size != self.dimension:
            raise DimensionError("dimension mismatch")
        d = np.sqrt(np.sum((self._points - p) ** 2, axis=1))
        return bool(d.min() <= tol)

    def to_csv(self) -> str:
        return points_to_csv(self._points)

    @classmethod
    def from_csv(cls, text: str, snap: float = DEFAULT_SNAP) -> "PointSet":
        return cls(points_from_csv(text), snap)


def _same_dim(a: PointSet, b: PointSet) -> None:
    if a.dimension != b.dimension:
        raise DimensionError(f"dimension mismatch: {a.dimension} vs {b.dimension}")


def _nearest_distances(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """For each row of ``a`` the distance to the nearest row of ``b``."""
    if a.shape[0] * b.shape[0] > _BRUTE_FORCE_LIMIT:
        d, _ = cKDTree(b).query(a, k=1)
        return np.asarray(d, dtype=float)
    out = np.empty(a.shape[0])
    for start in range(0, a.shape[0], _CHUNK):
        block = a[start:start + _CHUNK]
        diff = block[:, None, :] - b[None, :, :]
        out[start:start + _CHUNK] = np.sqrt(np.min(np.sum(diff * diff, axis=2), axis=1))
    return out


def directed_distance(a: PointSet, b: PointSet) -> float:
    """sup over x in ``a`` of the distance from x to ``b``."""
    _same_dim(a, b)
    return float(np.max(_nearest_distances(a.points, b.points)))


def hausdorff(a: PointSet, b: PointSet) -> float:
    return max(directed_distance(a, b), directed_distance(b, a))


def within_expansion(a: PointSet, b: PointSet, eps: float) -> bool:
    """True iff ``a`` is contained in the open ``eps``-expansion of ``b``."""
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    _same_dim(a, b)
    return bool(np.all(_nearest_distances(a.points, b.points) < eps))


def format_float(v: float) -> str:
    return format(float(v), ".17g")


def points_to_csv(points: Iterable) -> str:
    buf = io.StringIO()
    for row in np.atleast_2d(np.asarray(points, dtype=float)):
        buf.write(",".join(format_float(v) for v in row))
        buf.write("\n")
    return buf.getvalue()


def points_from_csv(text: str) -> np.ndarray:
    rows = [
        [float(v) for v in line.split(",")]
        for line in text.splitlines()
        if line.strip() and not line.lstrip().startswith("#")
    ]
    if not rows:
        raise ValueError("no points in CSV input")
    if len({len(r) for r in rows}) != 1:
        raise DimensionError("CSV rows have differing numbers of coordinates")
    return np.asarray(rows, dtype=float)
