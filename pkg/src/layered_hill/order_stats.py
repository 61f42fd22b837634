"""Descending order statistics of constrained-tuple minimum norms.

The top-count stream processes points in non-increasing norm order (ties
broken by ascending original index).  When a point p is inserted, one
value ||p|| is emitted for every (k-1)-subset S of already-inserted points
with a qualifying tuple S + {p}; candidate subsets are discovered among
points within the constraint's bounding radius of p.  Each qualifying
k-subset is emitted exactly once -- at the insertion of its minimum-norm
member -- and the emission stream is globally non-increasing, so stopping
after ``count`` emissions yields exactly the ``count`` largest values.

For k = 2 every built-in constraint reduces to a pairwise distance test,
and the same stream is produced directly from the distance pairs of a
KD-tree over a prefix of the norm-ordered points (grown geometrically
until enough pairs exist); both routes are covered by the brute-force
oracle below.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .constraints import ALWAYS_ONE, Constraint
from .errors import ArityExceedsCloud, IndeterminateCount, TooManySubsets
from .geometry import PointCloud, cell_of

#: brute-force guard on the number of k-subsets
MAX_BRUTE_FORCE_SUBSETS = 10**7


@dataclass(frozen=True)
class OrderStatStream:
    """Non-increasing sequence of emitted tuple values U_k(1) >= U_k(2) >= ...

    ``total_enumerated`` counts qualifying tuples found; when ``exhausted``
    it equals the total number of qualifying k-subsets in the cloud.
    """

    k: int
    values: np.ndarray
    requested: int
    exhausted: bool
    total_enumerated: int

    def __post_init__(self):
        object.__setattr__(self, "values", np.asarray(self.values, dtype=np.float64))


def _norm_order(cloud: PointCloud) -> np.ndarray:
    """Insertion order: non-increasing norm, ties by ascending index."""
    return np.lexsort((np.arange(len(cloud)), -cloud.norms))


def top_tuple_values(cloud: PointCloud, constraint: Constraint, count: int) -> OrderStatStream:
    """The ``count`` largest values of min-norm over qualifying k-subsets."""
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    k = constraint.arity
    if k > len(cloud):
        raise ArityExceedsCloud(f"arity {k} exceeds cloud size {len(cloud)}")
    order = _norm_order(cloud)
    if k == 1:
        values = cloud.norms[order[:count]]
        exhausted = len(cloud) < count
        return OrderStatStream(1, values, count, exhausted, len(values))
    if k == 2:
        return _top_pairs(cloud, order, constraint.radius, count)
    return _top_by_insertion(cloud, order, constraint, count)


def _top_pairs(cloud, order, radius, count):
    """k = 2 stream from KD-tree distance pairs over a growing norm prefix.

    All pairs inside the prefix have both insertion ranks below the prefix
    length, so ordering them by the larger rank reproduces the insertion
    emission order exactly.
    """
    n = len(cloud)
    pts = cloud.points[order]
    norms = cloud.norms[order]
    m0 = int(3 * math.sqrt(count)) + 16
    prefix = min(n, max(64, m0))
    while True:
        pairs = cKDTree(pts[:prefix]).query_pairs(radius, output_type="ndarray")
        if len(pairs) >= count or prefix == n:
            break
        prefix = min(n, 2 * prefix)
    if len(pairs) == 0:
        return OrderStatStream(2, np.empty(0), count, True, 0)
    last_rank = np.sort(pairs.max(axis=1), kind="stable")
    exhausted = prefix == n and len(pairs) < count
    emitted = last_rank[:count]
    return OrderStatStream(2, norms[emitted], count, exhausted, len(emitted))


def _top_by_insertion(cloud, order, constraint, count):
    """Generic lazy enumeration for any arity via grid-assisted insertion."""
    k = constraint.arity
    bound = constraint.bounding_radius()
    cell_size = bound if bound > 0 else 1.0
    pts = cloud.points
    norms = cloud.norms
    d = cloud.dim
    cells: dict[tuple, list[int]] = {}
    values: list[float] = []
    bound2 = bound * bound
    offsets = list(itertools.product((-1, 0, 1), repeat=d))
    prev = math.inf
    for rank, idx in enumerate(order):
        p = pts[idx]
        home = cell_of(p, cell_size)
        neighbors = []
        for off in offsets:
            cell = tuple(h + o for h, o in zip(home, off))
            for j in cells.get(cell, ()):
                diff = pts[j] - p
                if float(diff @ diff) <= bound2:
                    neighbors.append(j)
        for subset in itertools.combinations(neighbors, k - 1):
            tup = np.vstack([pts[list(subset)], p[None, :]])
            if constraint.evaluate(tup):
                v = float(norms[idx])
                assert v <= prev + 1e-12, "emission stream must be non-increasing"
                prev = v
                values.append(v)
                if len(values) >= count:
                    return OrderStatStream(k, np.asarray(values), count, False, len(values))
        cells.setdefault(home, []).append(idx)
    return OrderStatStream(k, np.asarray(values), count, True, len(values))


def brute_force_tuple_values(cloud: PointCloud, constraint: Constraint) -> np.ndarray:
    """Oracle: enumerate ALL k-subsets, filter, and sort minima descending.

    Deliberately independent of the lazy stream: full pairwise-distance
    matrix, exhaustive combination scan, no grid and no norm ordering.
    """
    k = constraint.arity
    n = len(cloud)
    if k > n:
        raise ArityExceedsCloud(f"arity {k} exceeds cloud size {n}")
    if math.comb(n, k) > MAX_BRUTE_FORCE_SUBSETS:
        raise TooManySubsets(f"C({n},{k}) exceeds the enumeration guard")
    if constraint.kind == ALWAYS_ONE:
        return np.sort(cloud.norms)[::-1].copy()
    diffs = cloud.points[:, None, :] - cloud.points[None, :, :]
    dist2 = np.einsum("ijk,ijk->ij", diffs, diffs)
    adj = [row.tolist() for row in dist2 <= constraint.radius**2]
    norms = cloud.norms.tolist()
    connectivity = constraint.kind == "connectivity"
    out = []
    for combo in itertools.combinations(range(n), k):
        if connectivity:
            qualifies = _combo_connected(combo, adj)
        else:  # pair_distance and diameter: clique test
            qualifies = all(
                adj[a][b] for a, b in itertools.combinations(combo, 2)
            )
        if qualifies:
            out.append(min(norms[i] for i in combo))
    return np.sort(np.asarray(out))[::-1]


def _combo_connected(combo, adj):
    reached = {combo[0]}
    frontier = [combo[0]]
    while frontier:
        a = frontier.pop()
        for b in combo:
            if b not in reached and adj[a][b]:
                reached.add(b)
                frontier.append(b)
    return len(reached) == len(combo)


def count_exceedances(stream: OrderStatStream, threshold: float) -> int:
    """Number of emitted values >= threshold (non-strict).

    Only determined when the stream is exhausted or its last value already
    fell below the threshold.
    """
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    values = stream.values
    if not stream.exhausted:
        if len(values) == 0 or values[-1] >= threshold:
            raise IndeterminateCount(
                "stream truncated before dropping below the threshold"
            )
    return int(np.count_nonzero(values >= threshold))
