"""Simulation input generators: heavy-tailed clouds and extreme censoring.

All families are spherically symmetric.  Radii are drawn by inverse
transform, directions as normalized Gaussian vectors.  The isotropic
stable family uses sub-Gaussian subordination: X = sqrt(2 * Lam) * G with
G standard Gaussian and Lam a positive (alpha/2)-stable variate from the
Chambers-Mallows-Stuck construction with skewness 1, rescaled so that its
Laplace transform is exp(-s^(alpha/2)).  Under this convention the
characteristic function of X is exp(-|theta|^alpha); the convention is
held fixed across all experiments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterOutOfRange, RemoveCountExceedsCloud
from .estimation import sphere_surface_area
from .geometry import PointCloud
from .order_stats import _norm_order

POWER_LAW = "power_law"
STABLE = "stable"
FRECHET = "frechet"

FAMILIES = (POWER_LAW, STABLE, FRECHET)


@dataclass(frozen=True)
class RadialModel:
    """A spherically symmetric heavy-tailed law in R^d."""

    family: str
    alpha: float
    d: int

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ParameterOutOfRange(f"unknown family {self.family!r}")
        if self.d < 1:
            raise ParameterOutOfRange("dimension must be >= 1")
        if self.family == POWER_LAW and not self.alpha > self.d:
            raise ParameterOutOfRange("power law requires alpha > d")
        if self.family == STABLE and not 0 < self.alpha < 2:
            raise ParameterOutOfRange("stable requires 0 < alpha < 2")
        if self.family == FRECHET and not self.alpha > 0:
            raise ParameterOutOfRange("frechet requires alpha > 0")

    @property
    def power_law_c(self) -> float:
        """Normalizer C of the density C |x|^-alpha 1{|x| >= 1}."""
        if self.family != POWER_LAW:
            raise ParameterOutOfRange("normalizer only defined for the power law")
        return (self.alpha - self.d) / sphere_surface_area(self.d)


def replicate_rng(master_seed: int, stream_id: int) -> np.random.Generator:
    """Private generator for one replicate; (master_seed, stream_id) fully
    determines every draw."""
    return np.random.default_rng(np.random.SeedSequence([int(master_seed), int(stream_id)]))


def _unit_directions(rng, count, d):
    g = rng.standard_normal((count, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def _positive_stable(rng, alpha_half, count):
    """Totally skewed positive stable with Laplace transform exp(-s^alpha_half).

    Chambers-Mallows-Stuck with beta = 1 and alpha_half < 1; the tilt angle
    is arctan(tan(pi*alpha_half/2))/alpha_half = pi/2, and the sub-Gaussian
    scale factor cos(pi*alpha_half/2)^(1/alpha_half) cancels against the
    CMS unit-scale prefactor.
    """
    u = math.pi * (rng.random(count) - 0.5)
    w = rng.standard_exponential(count)
    w = np.clip(w, np.finfo(float).tiny, None)
    a = alpha_half * (u + math.pi / 2.0)
    return (
        np.sin(a)
        / np.cos(u) ** (1.0 / alpha_half)
        * (np.cos(u - a) / w) ** ((1.0 - alpha_half) / alpha_half)
    )


def sample_cloud(
    model: RadialModel, n: int, rng: np.random.Generator, poissonize: bool = False
) -> PointCloud:
    """Draw a cloud of (fixed or Poissonized) size n from the model."""
    if n < 1:
        raise ParameterOutOfRange(f"n must be >= 1, got {n}")
    count = int(rng.poisson(n)) if poissonize else n
    d = model.d
    if count == 0:
        return PointCloud(np.empty((0, d)))
    if model.family == STABLE:
        lam = _positive_stable(rng, model.alpha / 2.0, count)
        g = rng.standard_normal((count, d))
        return PointCloud(np.sqrt(2.0 * lam)[:, None] * g)
    dirs = _unit_directions(rng, count, d)
    u = 1.0 - rng.random(count)  # in (0, 1]
    if model.family == POWER_LAW:
        # survival of the norm is r^(d - alpha) on [1, inf)
        radii = u ** (-1.0 / (model.alpha - d))
    else:  # frechet: P(R <= r) = exp(-r^-alpha)
        e = np.clip(-np.log(u), np.finfo(float).tiny, None)
        radii = e ** (-1.0 / model.alpha)
    return PointCloud(dirs * radii[:, None])


def remove_top_extremes(cloud: PointCloud, remove_count: int) -> PointCloud:
    """Drop the remove_count largest-norm points (ties by ascending index).

    Remaining points keep their original relative order.
    """
    if remove_count < 0:
        raise ParameterOutOfRange("remove_count must be non-negative")
    if remove_count > len(cloud):
        raise RemoveCountExceedsCloud(
            f"cannot remove {remove_count} from a cloud of {len(cloud)}"
        )
    if remove_count == 0:
        return cloud
    order = _norm_order(cloud)
    keep = np.ones(len(cloud), dtype=bool)
    keep[order[:remove_count]] = False
    return PointCloud(cloud.points[keep])


def censor_count(delta: float, m: int) -> int:
    """Missing-extremes count round(delta * m), half away from zero."""
    if delta < 0:
        raise ParameterOutOfRange("delta must be non-negative")
    return int(math.floor(delta * m + 0.5))
