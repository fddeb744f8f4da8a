import math

import numpy as np
import pytest
from scipy.integrate import quad

from ouwoms import Side, Stream, ks_distance, ecdf
from ouwoms.spheroid import (
    MEAN_EXIT_FRACTION,
    mean_exit_time,
    psi,
    sample_spheroid_exit,
    spheroid_cdf,
    spheroid_density,
)

# 1 - F_chi2_3(2), mpmath oracle
CDF_AT_EXP_MINUS_2 = 0.5724067044708798


class TestPsi:
    def test_right_endpoint_is_zero(self):
        assert psi(1.0, 1.0, Side.PLUS) == 0.0

    def test_left_endpoint_is_zero(self):
        assert psi(1.0, 0.0, Side.PLUS) == 0.0

    def test_maximizer(self):
        # t log(1/t) peaks at t = 1/e with value 1/e
        assert psi(1.0, 1.0 / math.e, Side.PLUS) == pytest.approx(
            1.0 / math.sqrt(math.e), abs=1e-12)

    def test_direct_evaluation(self):
        assert psi(2.0, 1.0, Side.PLUS) == pytest.approx(
            1.1774100225154747, abs=1e-12)

    def test_minus_is_exact_negation(self):
        t = np.linspace(0.0, 4.0, 1001)
        up = psi(2.0, t, Side.PLUS)
        dn = psi(2.0, t, Side.MINUS)
        assert np.array_equal(dn, -up)

    def test_bound_d_over_sqrt_e(self):
        for d in (1e-3, 0.5, 1.0, 7.0, 1e4):
            t = np.linspace(0.0, d * d, 1001)
            assert np.all(np.abs(psi(d, t, Side.PLUS)) <= d / math.sqrt(math.e) + 1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            psi(1.0, -1e-9)
        with pytest.raises(ValueError):
            psi(1.0, 1.0 + 1e-6)
        with pytest.raises(ValueError):
            psi(0.0, 0.5)
        # right-endpoint rounding slack is accepted
        assert psi(1.0, 1.0 + 1e-13) == 0.0


class TestDensity:
    def test_peak_value(self):
        assert spheroid_density(1.0, 1.0 / math.e) == pytest.approx(
            0.6577446234794569, abs=1e-12)

    def test_scaling_halves_peak(self):
        # p_d(t) = p_1(t/d^2)/d^2
        assert spheroid_density(2.0, 4.0 / math.e) == pytest.approx(
            0.6577446234794569 / 4.0, abs=1e-12)

    def test_vanishes_at_right_endpoint(self):
        assert spheroid_density(1.0, 1.0) == 0.0

    def test_integrates_to_one(self):
        for d in (0.5, 1.0, 3.0):
            total, _ = quad(lambda t: spheroid_density(d, t), 0.0, d * d,
                            limit=200)
            assert total == pytest.approx(1.0, abs=1e-6)

    def test_domain(self):
        with pytest.raises(ValueError):
            spheroid_density(1.0, 0.0)
        with pytest.raises(ValueError):
            spheroid_density(1.0, 1.1)


class TestCdf:
    def test_total_on_reals(self):
        assert spheroid_cdf(1.0, -1.0) == 0.0
        assert spheroid_cdf(3.0, 0.0) == 0.0
        assert spheroid_cdf(1.0, 1.0) == 1.0
        assert spheroid_cdf(1.0, 5.0) == 1.0

    def test_chi2_3_representation(self):
        assert spheroid_cdf(1.0, math.exp(-2.0)) == pytest.approx(
            CDF_AT_EXP_MINUS_2, abs=1e-12)

    def test_monte_carlo_cross_check(self):
        # independent oracle: numpy RNG, 1e6 draws
        g = np.random.default_rng(20260810)
        tau = g.random(1_000_000) ** 2 * np.exp(-g.standard_normal(1_000_000) ** 2)
        for t in (0.05, math.exp(-2.0), 0.5, 0.9):
            frac = np.mean(tau <= t)
            se = math.sqrt(frac * (1 - frac) / tau.size)
            assert spheroid_cdf(1.0, t) == pytest.approx(frac, abs=4 * se)

    def test_monotone(self):
        t = np.linspace(-0.5, 4.5, 1001)
        v = spheroid_cdf(2.0, t)
        assert np.all(np.diff(v) >= 0.0)

    def test_scaling_law(self):
        t = np.linspace(1e-6, 9.0, 1000)
        assert spheroid_cdf(3.0, t) == pytest.approx(
            spheroid_cdf(1.0, t / 9.0), abs=1e-14)


class TestSampler:
    def test_consumes_three_values_in_fixed_order(self):
        s = Stream.from_seed(5)
        exit_ = sample_spheroid_exit(2.0, s)
        assert s.counter == 3
        # replay the documented draw order by hand
        r = Stream.from_seed(5)
        u, g, bit = r.uniform(), r.normal(), r.bit()
        assert exit_.tau == 4.0 * u * u * math.exp(-g * g)
        assert exit_.side == (Side.MINUS if bit else Side.PLUS)

    def test_support(self):
        s = Stream.from_seed(17)
        for _ in range(2000):
            e = sample_spheroid_exit(1.5, s)
            assert 0.0 < e.tau <= 2.25
            assert e.side in (Side.PLUS, Side.MINUS)

    def test_mean(self):
        s = Stream.from_seed(31)
        n = 100_000
        taus = np.array([sample_spheroid_exit(1.0, s).tau for _ in range(n)])
        se = 0.228923 / math.sqrt(n)  # std of tau at d=1
        assert abs(taus.mean() - MEAN_EXIT_FRACTION) < 3 * se

    def test_goodness_of_fit(self):
        s = Stream.from_seed(63)
        n = 10_000
        taus = [sample_spheroid_exit(2.0, s).tau for _ in range(n)]
        d_stat = ks_distance(lambda t: spheroid_cdf(2.0, t), ecdf(taus))
        assert d_stat <= 1.95 / math.sqrt(n)

    def test_side_is_fair_and_independent(self):
        s = Stream.from_seed(127)
        n = 20_000
        exits = [sample_spheroid_exit(1.0, s) for _ in range(n)]
        minus = sum(e.side is Side.MINUS for e in exits)
        assert abs(minus / n - 0.5) < 3 * math.sqrt(0.25 / n)
        # tau distribution identical on both sides
        lo = [e.tau for e in exits if e.side is Side.MINUS]
        hi = [e.tau for e in exits if e.side is Side.PLUS]
        assert ks_distance(ecdf(lo), ecdf(hi)) < 1.63 * math.sqrt(
            (len(lo) + len(hi)) / (len(lo) * len(hi)))


def test_mean_exit_time_scaling():
    assert mean_exit_time(3.0) == pytest.approx(9.0 * MEAN_EXIT_FRACTION)
    assert MEAN_EXIT_FRACTION == pytest.approx(0.19245008972987526, abs=1e-15)
