import math

import numpy as np
import pytest

from layered_hill import (
    Constraint,
    GeometricConstants,
    Regime,
    alpha_hat,
    confidence_interval,
    estimate_from_stream,
    geometric_constants,
    inverse_normal_cdf,
    layered_hill,
    limit_coeff_Lkl,
    normalized_statistic,
    select_regime,
    theoretical_radius_Rk,
    variance_constant_A,
)
from layered_hill.errors import (
    DegenerateInterval,
    InsufficientExtremes,
    MissingXi,
    NonPositiveH,
    ParameterOutOfRange,
    ProbabilityOutOfRange,
    UnsupportedRegime,
)
from layered_hill.estimation import ball_volume, sphere_surface_area
from layered_hill.order_stats import OrderStatStream

PAIR = Constraint("pair_distance", 2, 1.0)


def stream_of(k, values):
    values = np.asarray(values, dtype=float)
    return OrderStatStream(k, values, len(values), True, len(values))


# ---------------------------------------------------------------- layered_hill

def test_layered_hill_k1_example():
    H = layered_hill(stream_of(1, [8, 4, 2, 1]), m=2)
    assert H == pytest.approx(0.5 * math.log(2.0), abs=1e-12)


def test_layered_hill_k2_example():
    H = layered_hill(stream_of(2, [10, 8, 5, 4, 2]), m=2)
    expected = (math.log(10 / 4) + math.log(8 / 4) + math.log(5 / 4)) / 4.0
    assert H == pytest.approx(expected, abs=1e-12)
    assert H == pytest.approx(0.45814, abs=1e-5)


def test_layered_hill_insufficient():
    with pytest.raises(InsufficientExtremes):
        layered_hill(stream_of(1, [8, 4]), m=3)
    with pytest.raises(InsufficientExtremes):
        layered_hill(stream_of(1, [8, 4, 0.0]), m=3)


def test_alpha_hat():
    assert alpha_hat(2.0, 1, 2) == pytest.approx(2.5)
    assert alpha_hat(1.0 / 3.0, 2, 2) == pytest.approx(2.5)
    with pytest.raises(NonPositiveH):
        alpha_hat(0.0, 1, 2)


# ------------------------------------------------------------------- constants

def test_closed_form_constants_k1():
    gc = geometric_constants(Constraint("always_one", 1), 2)
    assert gc.c_k == pytest.approx(2 * math.pi)
    assert gc.d_kl == {1: 1.0}
    assert gc.method == "closed_form"


def test_closed_form_constants_k2():
    gc = geometric_constants(PAIR, 2)
    assert gc.c_k == pytest.approx(math.pi, rel=1e-12)
    assert gc.d_kl[2] == pytest.approx(math.pi, rel=1e-12)
    assert gc.d_kl[1] == pytest.approx(math.pi**2, rel=1e-12)


def test_surface_and_volume():
    assert sphere_surface_area(2) == pytest.approx(2 * math.pi)
    assert sphere_surface_area(3) == pytest.approx(4 * math.pi)
    assert ball_volume(2) == pytest.approx(math.pi)
    assert ball_volume(3) == pytest.approx(4 * math.pi / 3)


def test_monte_carlo_c2_matches_closed_form():
    gc = geometric_constants(PAIR, 2, mc_samples=100_000)
    assert gc.method == "monte_carlo"
    assert gc.c_k == pytest.approx(math.pi, rel=0.01)
    assert gc.d_kl[1] == pytest.approx(math.pi**2, rel=0.02)


def test_monte_carlo_deterministic_default_rng():
    a = geometric_constants(Constraint("connectivity", 3, 1.0), 2, mc_samples=20_000)
    b = geometric_constants(Constraint("connectivity", 3, 1.0), 2, mc_samples=20_000)
    assert a == b
    assert a.c_k > 0
    assert set(a.d_kl) == {1, 2, 3}
    assert all(v > 0 for v in a.d_kl.values())
    assert all(v >= 0 for v in a.d_kl_se.values())


def test_monte_carlo_diameter_k3_independent_check():
    # D_{3,3} for the diameter constraint: probability that two uniform
    # points of the unit disk lie within distance 1 of each other, times
    # the square of the disk area.  The pairwise-overlap probability has
    # the classical closed form 1 - 3*sqrt(3)/(4*pi).
    gc = geometric_constants(Constraint("diameter", 3, 1.0), 2, mc_samples=200_000)
    p = 1 - 3 * math.sqrt(3) / (4 * math.pi)
    assert gc.d_kl[3] == pytest.approx(math.pi**2 * p, rel=0.02)


# ------------------------------------------------------- limit/variance values

def test_limit_coeff_examples():
    gc = geometric_constants(PAIR, 2)
    assert limit_coeff_Lkl(2, 2, 2, 2.5, gc) == pytest.approx(1.0)
    assert limit_coeff_Lkl(2, 1, 2, 2.5, gc) == pytest.approx(
        2 * 3 / (1 * 5.5) * math.pi, rel=1e-12
    )
    assert limit_coeff_Lkl(2, 1, 2, 2.5, gc) == pytest.approx(3.4272, abs=1e-4)


def test_variance_constant_examples():
    gc1 = geometric_constants(Constraint("always_one", 1), 2)
    assert variance_constant_A(1, 1, 2, 2.5, gc1) == pytest.approx(4.0)
    gc2 = geometric_constants(PAIR, 2)
    assert variance_constant_A(2, 2, 2, 2.5, gc2) == pytest.approx(1.0 / 9.0)
    assert variance_constant_A(2, 1, 2, 2.5, gc2) == pytest.approx(0.19197, abs=1e-3)


def test_identities_on_grid():
    for k in (1, 2, 3):
        for d in (1, 2, 3):
            for alpha in (1.1, 1.7, 2.5, 3.3, 4.0):
                if not alpha * k > d:
                    continue
                gc = GeometricConstants(
                    k, 1.0, {l: float(l) for l in range(1, k + 1)}, "closed_form"
                )
                assert limit_coeff_Lkl(k, k, d, alpha, gc) == pytest.approx(1.0)
                A = variance_constant_A(k, k, d, alpha, gc)
                assert A * (alpha * k - d) ** 2 == pytest.approx(1.0)


def test_parameter_guards():
    gc = geometric_constants(PAIR, 2)
    with pytest.raises(ParameterOutOfRange):
        limit_coeff_Lkl(2, 3, 2, 2.5, gc)
    with pytest.raises(ParameterOutOfRange):
        variance_constant_A(2, 2, 2, 0.9, gc)  # alpha*k <= d


# ----------------------------------------------------------------- regimes/CLT

def test_select_regime():
    assert select_regime(0.5, 1, 2, 2.5).tag == "vanishing"  # threshold 0.8
    assert select_regime(0.9, 2, 2, 2.5).tag == "diverging"  # threshold 0.4
    assert select_regime(0.79, 1, 2, 2.5).tag == "constant"
    with pytest.raises(ParameterOutOfRange):
        select_regime(0.5, 1, 2, 1.5)


def test_regime_validation():
    with pytest.raises(ValueError):
        Regime("weird")
    with pytest.raises(ValueError):
        Regime("vanishing", xi=1.0)
    with pytest.raises(ValueError):
        Regime("constant", xi=-1.0)


def test_normalized_statistic_k1_example():
    gc = geometric_constants(Constraint("always_one", 1), 2)
    stat = normalized_statistic(
        2.1, 1, 2, 100, 2.5, 2.5, Regime("vanishing"), gc
    )
    assert stat == pytest.approx(0.5, rel=1e-12)


def test_normalized_statistic_k2_example():
    gc = geometric_constants(PAIR, 2)
    stat = normalized_statistic(
        1.0 / 3.0 + 0.001, 2, 2, 100, 2.5, 2.5, Regime("vanishing"), gc
    )
    assert stat == pytest.approx(0.3, rel=1e-9)


def test_normalized_statistic_constant_regime():
    gc = geometric_constants(PAIR, 2)
    with pytest.raises(MissingXi):
        normalized_statistic(0.34, 2, 2, 100, 2.5, 2.5, Regime("constant"), gc)
    # with xi -> 0 the constant-regime variance approaches the vanishing one
    lo = normalized_statistic(0.34, 2, 2, 100, 2.5, 2.5, Regime("constant", xi=1e-12), gc)
    van = normalized_statistic(0.34, 2, 2, 100, 2.5, 2.5, Regime("vanishing"), gc)
    assert lo == pytest.approx(van, rel=1e-6)
    # positive xi inflates the variance, shrinking the statistic
    hi = normalized_statistic(0.34, 2, 2, 100, 2.5, 2.5, Regime("constant", xi=0.5), gc)
    assert abs(hi) < abs(van)


def test_normalized_statistic_diverging():
    gc1 = geometric_constants(Constraint("always_one", 1), 2)
    same = normalized_statistic(2.1, 1, 2, 100, 2.5, 2.5, Regime("diverging"), gc1)
    assert same == pytest.approx(0.5)
    gc2 = geometric_constants(PAIR, 2)
    with pytest.raises(UnsupportedRegime):
        normalized_statistic(0.34, 2, 2, 100, 2.5, 2.5, Regime("diverging"), gc2)


def test_inverse_normal_cdf():
    assert inverse_normal_cdf(0.975) == pytest.approx(1.959964, abs=1e-6)
    assert inverse_normal_cdf(0.5) == pytest.approx(0.0, abs=1e-12)
    for bad in (0.0, 1.0, -0.1, 1.1):
        with pytest.raises(ProbabilityOutOfRange):
            inverse_normal_cdf(bad)


def test_confidence_interval_example():
    lo, hi = confidence_interval(2.0, 1, 2, 100, 0.95)
    assert lo == pytest.approx(2.4181, abs=1e-4)
    assert hi == pytest.approx(2.6219, abs=1e-4)
    assert lo < alpha_hat(2.0, 1, 2) < hi


def test_confidence_interval_degenerate():
    with pytest.raises(DegenerateInterval):
        confidence_interval(0.5, 1, 2, 1, 0.95)
    with pytest.raises(ProbabilityOutOfRange):
        confidence_interval(2.0, 1, 2, 100, 1.5)


def test_theoretical_radius_example():
    c = 0.5 / (2 * math.pi)  # (alpha - d) / s_1 at alpha = 2.5, d = 2
    assert theoretical_radius_Rk(2 * math.pi, 1, 2, 2.5, c) == pytest.approx(1.0)
    assert theoretical_radius_Rk(4 * math.pi, 1, 2, 2.5, c) == pytest.approx(4.0)
    with pytest.raises(ParameterOutOfRange):
        theoretical_radius_Rk(-1.0, 1, 2, 2.5, c)


# --------------------------------------------------------------------- reports

def test_estimate_report_shape():
    values = np.sort(np.random.default_rng(0).pareto(0.5, size=500) + 1)[::-1]
    report = estimate_from_stream(stream_of(1, values), 1, 2, 10_000, 20)
    doc = report.to_dict()
    assert set(doc) == {
        "k", "d", "m", "H", "alpha_hat", "regime", "variance_A",
        "tau", "ci_lower", "ci_upper", "gamma",
    }
    assert doc["tau"] == 20.0
    assert doc["regime"] in ("vanishing", "constant", "diverging")
    assert report.denominator == pytest.approx(values[19])
    if doc["ci_lower"] is not None:
        assert doc["ci_lower"] < doc["alpha_hat"] < doc["ci_upper"]
