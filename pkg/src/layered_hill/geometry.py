"""Point clouds and fixed-radius neighbor search on a uniform grid.

The grid index buckets points into cubic cells of a fixed size; a radius
query only needs to inspect the cells overlapping the query ball, which is
3^d cells when the radius does not exceed the cell size.  This is the
substrate for enumerating geometrically constrained k-tuples, so queries
are exact (non-strict boundary: distance exactly r counts as inside).
"""

from __future__ import annotations

import csv
import itertools
import math

import numpy as np

from .errors import DimensionMismatch, NonPositiveCellSize


class PointCloud:
    """Immutable set of d-dimensional points with cached Euclidean norms.

    Point order is stable: index i always refers to the same point.
    """

    __slots__ = ("dim", "points", "norms")

    def __init__(self, points, dim=None):
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim == 1 and pts.size == 0:
            if dim is None:
                raise DimensionMismatch("empty cloud needs an explicit dimension")
            pts = pts.reshape(0, dim)
        if pts.ndim != 2:
            raise DimensionMismatch(f"points must be a 2-d array, got shape {pts.shape}")
        if dim is not None and pts.shape[1] != dim:
            raise DimensionMismatch(f"expected dimension {dim}, got {pts.shape[1]}")
        if pts.shape[1] < 1:
            raise DimensionMismatch("dimension must be at least 1")
        if pts.size and not np.all(np.isfinite(pts)):
            raise ValueError("all coordinates must be finite")
        pts.setflags(write=False)
        norms = np.linalg.norm(pts, axis=1) if pts.shape[0] else np.empty(0)
        norms.setflags(write=False)
        object.__setattr__(self, "dim", pts.shape[1])
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "norms", norms)

    def __setattr__(self, name, value):
        raise AttributeError("PointCloud is immutable")

    def __len__(self):
        return self.points.shape[0]

    def __repr__(self):
        return f"PointCloud(n={len(self)}, dim={self.dim})"


class GridIndex:
    """Uniform-grid spatial index over a PointCloud.

    Each point index lives in exactly one cell: the cell containing its
    coordinates under floor-division by ``cell_size``.  Immutable after
    construction.
    """

    __slots__ = ("cell_size", "cells", "cloud")

    def __init__(self, cloud, cell_size, cells):
        object.__setattr__(self, "cloud", cloud)
        object.__setattr__(self, "cell_size", cell_size)
        object.__setattr__(self, "cells", cells)

    def __setattr__(self, name, value):
        raise AttributeError("GridIndex is immutable")


def cell_of(point, cell_size):
    """Integer lattice cell containing ``point``."""
    return tuple(int(math.floor(c / cell_size)) for c in point)


def build_index(cloud: PointCloud, cell_size: float) -> GridIndex:
    """Bucket every point of ``cloud`` into cells of side ``cell_size``."""
    if cell_size <= 0:
        raise NonPositiveCellSize(f"cell size must be positive, got {cell_size}")
    cells: dict[tuple, list[int]] = {}
    for i, p in enumerate(cloud.points):
        cells.setdefault(cell_of(p, cell_size), []).append(i)
    return GridIndex(cloud, float(cell_size), cells)


def neighbors_within(index: GridIndex, query_point, r: float, exclude=None) -> set[int]:
    """Indices of all points at Euclidean distance <= r from ``query_point``.

    ``exclude`` marks an index as "self" and drops it from the result.  If r
    exceeds the cell size the cell scan widens accordingly.
    """
    q = np.asarray(query_point, dtype=np.float64)
    if q.shape != (index.cloud.dim,):
        raise DimensionMismatch(
            f"query dimension {q.shape} does not match cloud dimension {index.cloud.dim}"
        )
    cs = index.cell_size
    lo = [int(math.floor((c - r) / cs)) for c in q]
    hi = [int(math.floor((c + r) / cs)) for c in q]
    pts = index.cloud.points
    out: set[int] = set()
    r2 = r * r
    for cell in itertools.product(*(range(a, b + 1) for a, b in zip(lo, hi))):
        for i in index.cells.get(cell, ()):
            diff = pts[i] - q
            if float(diff @ diff) <= r2:
                out.add(i)
    if exclude is not None:
        out.discard(exclude)
    return out


def load_points_csv(path, dim=None) -> PointCloud:
    """Read a point cloud from CSV: one point per row, d numeric fields.

    A single header row is detected by a non-numeric first field and
    skipped.  Raises DimensionMismatch on ragged rows or a dimension that
    disagrees with ``dim``.
    """
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        for lineno, row in enumerate(reader):
            if not row:
                continue
            if lineno == 0:
                try:
                    float(row[0])
                except ValueError:
                    continue  # header row
            rows.append([float(c) for c in row])
    if not rows:
        return PointCloud(np.empty((0, dim if dim else 1)), dim=dim)
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise DimensionMismatch("rows have inconsistent field counts")
    return PointCloud(np.asarray(rows), dim=dim)
