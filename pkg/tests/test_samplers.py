import math

import numpy as np
import pytest

from layered_hill import (
    PointCloud,
    RadialModel,
    censor_count,
    remove_top_extremes,
    replicate_rng,
    sample_cloud,
)
from layered_hill.errors import ParameterOutOfRange, RemoveCountExceedsCloud

POWER = RadialModel("power_law", 2.5, 2)


def test_model_validation():
    with pytest.raises(ParameterOutOfRange):
        RadialModel("power_law", 2.0, 2)  # needs alpha > d
    with pytest.raises(ParameterOutOfRange):
        RadialModel("stable", 2.5, 2)  # needs alpha < 2
    with pytest.raises(ParameterOutOfRange):
        RadialModel("frechet", 0.0, 2)
    with pytest.raises(ParameterOutOfRange):
        RadialModel("uniform", 1.0, 2)
    assert POWER.power_law_c == pytest.approx(0.5 / (2 * math.pi))
    with pytest.raises(ParameterOutOfRange):
        RadialModel("frechet", 1.0, 2).power_law_c


def test_power_law_radius_inversion():
    # u = 0.25 must invert to radius 16; u = 1 to the support boundary 1
    assert 0.25 ** (-1.0 / 0.5) == pytest.approx(16.0)
    cloud = sample_cloud(POWER, 100_000, replicate_rng(0, 0))
    assert np.all(cloud.norms >= 1.0)


def test_frechet_radius_inversion():
    # (-ln u)^(-1/alpha) at u = e^-1 equals 1 for every alpha
    for alpha in (0.5, 1.0, 3.0):
        assert (-math.log(math.exp(-1.0))) ** (-1.0 / alpha) == pytest.approx(1.0)
    cloud = sample_cloud(RadialModel("frechet", 1.0, 2), 10_000, replicate_rng(0, 1))
    assert np.all(cloud.norms > 0)


def test_power_law_survival():
    n = 100_000
    cloud = sample_cloud(POWER, n, replicate_rng(42, 0))
    for r in (2.0, 4.0, 8.0):
        p = r ** (2 - 2.5)
        observed = np.mean(cloud.norms > r)
        se = math.sqrt(p * (1 - p) / n)
        assert abs(observed - p) <= 3 * se


def test_directions_isotropic():
    n = 100_000
    for model in (POWER, RadialModel("stable", 1.5, 2), RadialModel("frechet", 1.0, 2)):
        cloud = sample_cloud(model, n, replicate_rng(7, 3))
        dirs = cloud.points / cloud.norms[:, None]
        assert np.linalg.norm(dirs.mean(axis=0)) <= 4.0 / math.sqrt(n)


def test_stable_tail_exponent():
    # survival of the norm of an isotropic alpha-stable vector decays like
    # r^-alpha; check the empirical log-survival slope over one dyadic step
    n = 200_000
    alpha = 1.5
    cloud = sample_cloud(RadialModel("stable", alpha, 2), n, replicate_rng(11, 0))
    s1 = np.mean(cloud.norms > 20.0)
    s2 = np.mean(cloud.norms > 40.0)
    slope = math.log(s2 / s1) / math.log(2.0)
    assert slope == pytest.approx(-alpha, abs=0.25)


def test_determinism():
    a = sample_cloud(POWER, 1000, replicate_rng(5, 9))
    b = sample_cloud(POWER, 1000, replicate_rng(5, 9))
    assert np.array_equal(a.points, b.points)
    c = sample_cloud(POWER, 1000, replicate_rng(5, 10))
    assert not np.array_equal(a.points, c.points)


def test_poissonize():
    counts = {
        len(sample_cloud(POWER, 50, replicate_rng(1, sid), poissonize=True))
        for sid in range(40)
    }
    assert len(counts) > 1  # the size itself is random
    assert all(abs(c - 50) < 50 for c in counts)


def test_remove_top_extremes():
    pts = [[5.0, 0], [4.0, 0], [3.0, 0], [2.0, 0], [1.0, 0]]
    cloud = PointCloud(pts)
    out = remove_top_extremes(cloud, 2)
    assert np.allclose(sorted(out.norms), [1.0, 2.0, 3.0])
    assert remove_top_extremes(cloud, 0) is cloud
    with pytest.raises(RemoveCountExceedsCloud):
        remove_top_extremes(cloud, 6)
    with pytest.raises(ParameterOutOfRange):
        remove_top_extremes(cloud, -1)


def test_remove_top_extremes_separation():
    cloud = sample_cloud(POWER, 500, replicate_rng(2, 2))
    out = remove_top_extremes(cloud, 50)
    assert len(out) == 450
    removed_min = np.sort(cloud.norms)[::-1][49]
    assert out.norms.max() <= removed_min


def test_remove_ties_by_index():
    # four points with equal norms: removal takes the lowest indices first
    pts = [[1.0, 0], [0, 1.0], [-1.0, 0], [0, -1.0]]
    out = remove_top_extremes(PointCloud(pts), 2)
    assert np.allclose(out.points, [[-1.0, 0], [0, -1.0]])


def test_censor_count():
    assert censor_count(0.5, 100) == 50
    assert censor_count(0.0, 100) == 0
    assert censor_count(1.0, 16) == 16
    assert censor_count(0.25, 16) == 4  # round half up: 4.0
    assert censor_count(0.03, 16) == 0  # 0.48 rounds down
    assert censor_count(0.25, 10) == 3  # 2.5 rounds half up
    with pytest.raises(ParameterOutOfRange):
        censor_count(-0.1, 100)
