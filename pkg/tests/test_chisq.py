"""Tests for the chi-square survival function against frozen high-precision values."""

import math

import pytest

from risklab import chi2_sf, regularized_gamma_q

# Frozen from a 40-digit arbitrary-precision evaluation of the regularized
# upper incomplete gamma function.
FROZEN_SF = {
    (3.841, 1): 0.0500136837639567,
    (5.991, 2): 0.05001161502657909,
    (49.65, 3): 9.484974193554073e-11,
    (1.0, 1): 0.3173105078629141,
    (2.706, 1): 0.09997137812525932,
    (40.628362174813894, 15): 0.00036426912815195977,
    (3.3638145434609257, 5): 0.644086765096595,
    (3.3638145434609257, 6): 0.7619914864984442,
    (6.0, 4): 0.19914827347145578,
    (0.5, 3): 0.9188914116546758,
    (123.4, 60): 2.7604032395912826e-06,
    (1e-08, 2): 0.999999995,
    (300.0, 2): 7.175095973164411e-66,
    (28.8, 9): 0.0007003336069781521,
}


class TestAgainstFrozenValues:
    @pytest.mark.parametrize("case", sorted(FROZEN_SF))
    def test_survival_function(self, case):
        statistic, df = case
        assert chi2_sf(statistic, df) == pytest.approx(FROZEN_SF[case], rel=1e-12)

    def test_exact_closed_forms(self):
        # df = 2 has the closed form exp(-x/2).
        for x in (0.1, 1.0, 5.0, 20.0):
            assert chi2_sf(x, 2) == pytest.approx(math.exp(-x / 2), rel=1e-14)
        # Q(1, x) likewise equals exp(-x).
        for x in (0.3, 2.0, 10.0):
            assert regularized_gamma_q(1.0, x) == pytest.approx(
                math.exp(-x), rel=1e-14
            )


class TestShape:
    def test_boundary_values(self):
        assert chi2_sf(0.0, 1) == 1.0
        assert chi2_sf(0.0, 7) == 1.0
        assert regularized_gamma_q(2.5, 0.0) == 1.0

    def test_monotone_decreasing_in_statistic(self):
        for df in (1, 2, 5, 10):
            values = [chi2_sf(x, df) for x in (0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0)]
            assert all(a > b for a, b in zip(values, values[1:]))

    def test_monotone_increasing_in_df(self):
        values = [chi2_sf(5.0, df) for df in (1, 2, 3, 5, 8, 12)]
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_regime_boundary_is_continuous(self):
        # The series/continued-fraction handoff sits at x = a + 1.
        a = 3.0
        below = regularized_gamma_q(a, a + 1.0 - 1e-9)
        above = regularized_gamma_q(a, a + 1.0 + 1e-9)
        assert below == pytest.approx(above, rel=1e-8)

    def test_values_are_probabilities(self):
        for df in (1, 3, 9, 40):
            for x in (1e-6, 0.7, 4.2, 33.0, 250.0):
                value = chi2_sf(x, df)
                assert 0.0 <= value <= 1.0


class TestValidation:
    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            chi2_sf(-0.5, 3)
        with pytest.raises(ValueError):
            chi2_sf(1.0, 0)
        with pytest.raises(ValueError):
            regularized_gamma_q(0.0, 1.0)
        with pytest.raises(ValueError):
            regularized_gamma_q(1.0, -1.0)
