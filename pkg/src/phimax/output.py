"""File formats for rasters and code-space tables."""
from __future__ import annotations

import io

import numpy as np

from .engines import CodeFunction
from .geometry import PointSet
from .ifs import Box
from .shiftspace import parse_finite, word_index


def rasterize(points: PointSet, box: Box, width: int, height: int) -> np.ndarray:
    """Occupancy grid of a 2-D point set; row 0 is the top of the box."""
    if box.dimension != 2 or points.dimension != 2:
        raise ValueError("rasterization needs a 2-D box and point set")
    if width < 1 or height < 1:
        raise ValueError("raster dimensions must be positive")
    lo, hi = box.lo_array, box.hi_array
    span = np.where(hi > lo, hi - lo, 1.0)
    u = (points.points - lo) / span
    cols = np.clip(np.floor(u[:, 0] * width).astype(int), 0, width - 1)
    rows = np.clip(height - 1 - np.floor(u[:, 1] * height).astype(int), 0, height - 1)
    grid = np.zeros((height, width), dtype=bool)
    grid[rows, cols] = True
    return grid


def to_pgm(grid: np.ndarray) -> str:
    """Plain PGM: 0 where occupied, 255 elsewhere."""
    height, width = grid.shape
    buf = io.StringIO()
    buf.write(f"P2\n{width} {height}\n255\n")
    for row in grid:
        buf.write(" ".join("0" if v else "255" for v in row))
        buf.write("\n")
    return buf.getvalue()


def from_pgm(text: str) -> np.ndarray:
    tokens = [t for line in text.splitlines() if not line.startswith("#") for t in line.split()]
    if not tokens or tokens[0] != "P2":
        raise ValueError("not a plain PGM")
    width, height, _ = (int(t) for t in tokens[1:4])
    values = np.array([int(t) for t in tokens[4:]], dtype=int)
    if values.size != width * height:
        raise ValueError("PGM pixel count does not match its header")
    return values.reshape(height, width) == 0


def table_from_csv(text: str, size: int) -> CodeFunction:
    """Read back a table written by :meth:`CodeFunction.to_csv`."""
    words, rows = [], []
    for line in text.splitlines():
        if not line.strip():
            continue
        word, *coords = line.split(",")
        words.append(parse_finite(word, size))
        rows.append([float(v) for v in coords])
    if not words:
        raise ValueError("empty table")
    depth = len(words[0])
    if any(len(w) != depth for w in words):
        raise ValueError("table words have differing lengths")
    table = np.empty((len(rows), len(rows[0])))
    for w, r in zip(words, rows):
        table[word_index(w, size)] = r
    return CodeFunction(depth, table, size)
