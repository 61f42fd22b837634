"""Admissible geometric indicator functions on k-point tuples.

Every built-in constraint is a 0/1 indicator that is invariant under
permutations of its arguments and under common translations, and vanishes
whenever the tuple diameter exceeds a finite bound.  Distance comparisons
are non-strict throughout (a pair at distance exactly t qualifies).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArityMismatch, DimensionMismatch, UnsupportedConstraint

ALWAYS_ONE = "always_one"
PAIR_DISTANCE = "pair_distance"
DIAMETER = "diameter"
CONNECTIVITY = "connectivity"

KINDS = (ALWAYS_ONE, PAIR_DISTANCE, DIAMETER, CONNECTIVITY)


@dataclass(frozen=True)
class Constraint:
    """Indicator on ``arity`` points: connected-graph / diameter / pair tests.

    kind:
        "always_one"    -- arity 1, indicator identically 1
        "pair_distance" -- arity 2, 1 iff |x1 - x2| <= radius
        "diameter"      -- 1 iff max pairwise distance <= radius
        "connectivity"  -- 1 iff the geometric graph with connectivity
                           ``radius`` on the tuple is connected
    """

    kind: str
    arity: int
    radius: float = 1.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedConstraint(f"unknown constraint kind {self.kind!r}")
        if self.kind == ALWAYS_ONE and self.arity != 1:
            raise ArityMismatch("always_one requires arity 1")
        if self.kind == PAIR_DISTANCE and self.arity != 2:
            raise ArityMismatch("pair_distance requires arity 2")
        if self.kind != ALWAYS_ONE and self.arity < 2:
            raise ArityMismatch(f"{self.kind} requires arity >= 2")
        if self.kind != ALWAYS_ONE and not self.radius > 0:
            raise ValueError(f"radius must be positive, got {self.radius}")

    def bounding_radius(self) -> float:
        """Smallest L such that the indicator is 0 above tuple diameter L.

        A connected geometric graph on k vertices with radius t has
        diameter at most (k-1)t, and the bound is attained by a path.
        """
        if self.kind == ALWAYS_ONE:
            return 0.0
        if self.kind == CONNECTIVITY:
            return (self.arity - 1) * self.radius
        return self.radius

    def evaluate(self, points) -> int:
        """Evaluate the indicator on a tuple of ``arity`` points."""
        pts = np.asarray(points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[0] != self.arity:
            raise ArityMismatch(
                f"expected {self.arity} points, got shape {np.shape(points)}"
            )
        if pts.shape[1] < 1:
            raise DimensionMismatch("points must have at least one coordinate")
        if self.kind == ALWAYS_ONE:
            return 1
        diffs = pts[:, None, :] - pts[None, :, :]
        dist2 = np.einsum("ijk,ijk->ij", diffs, diffs)
        t2 = self.radius * self.radius
        if self.kind == PAIR_DISTANCE:
            return int(dist2[0, 1] <= t2)
        if self.kind == DIAMETER:
            return int(dist2.max() <= t2)
        return _connected(dist2 <= t2)


def _connected(adj) -> int:
    """Connectivity of the graph given by a boolean adjacency matrix."""
    k = adj.shape[0]
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(k):
        for j in range(i + 1, k):
            if adj[i, j]:
                parent[find(i)] = find(j)
    root = find(0)
    return int(all(find(i) == root for i in range(k)))


def evaluate(constraint: Constraint, points) -> int:
    return constraint.evaluate(points)


def bounding_radius(constraint: Constraint) -> float:
    return constraint.bounding_radius()


def constraint_from_spec(spec: dict) -> Constraint:
    """Build a Constraint from a config mapping with keys kind/arity/radius."""
    kind = spec.get("kind")
    if kind not in KINDS:
        raise UnsupportedConstraint(f"unknown constraint kind {kind!r}")
    arity = int(spec.get("arity", spec.get("k", 1 if kind == ALWAYS_ONE else 2)))
    radius = float(spec.get("radius", 1.0))
    return Constraint(kind=kind, arity=arity, radius=radius)
