"""Scalar special functions against extended-precision frozen values.

Expected numbers were computed with mpmath at 50 digits; mpmath also
serves as the in-test oracle for the Bessel recurrence and wide-range
accuracy checks, independent of the library's own evaluation route.
"""

import math

import mpmath as mp
import numpy as np
import pytest

from refocap.mathfn import (
    bessel_j1,
    bosonic_entropy,
    bosonic_entropy_increment,
    bosonic_entropy_marginal,
    jinc_psf,
)

# mpmath, 50 digits
G_AT_10 = 3.3509970708416191
G_AT_2_MINUS_1 = 0.52324814376454784
LN_11 = 2.3978952727983705
J1_AT_1 = 0.44005058574493352
J1_FIRST_ZERO = 3.8317059702075123


class TestBosonicEntropy:
    def test_frozen_values(self):
        assert bosonic_entropy(0.0) == 0.0
        assert bosonic_entropy(1.0) == pytest.approx(2.0 * math.log(2.0), rel=1e-15)
        assert bosonic_entropy(10.0) == pytest.approx(G_AT_10, rel=1e-14)

    def test_domain_errors(self):
        for bad in (-1.0, -1e-300, math.nan, math.inf):
            with pytest.raises(ValueError):
                bosonic_entropy(bad)

    def test_monotone_and_concave(self):
        rng = np.random.default_rng(42)
        for _ in range(300):
            a, b, c = np.sort(10.0 ** rng.uniform(-6, 6, size=3))
            if a == b or b == c:
                continue
            ga, gb, gc = map(bosonic_entropy, (a, b, c))
            assert ga < gb < gc
            mid = bosonic_entropy((a + c) / 2.0)
            assert mid >= (ga + gc) / 2.0 - 1e-12 * abs(mid)

    def test_branches_agree_in_overlap_window(self):
        for x in np.logspace(-4, -2, 41):
            naive = (x + 1.0) * math.log1p(x) - x * math.log(x)
            series = x * (1.0 - math.log(x)) + x * x / 2.0 - x**3 / 6.0 + x**4 / 12.0
            assert naive == pytest.approx(series, rel=1e-10)
            assert bosonic_entropy(float(x)) == pytest.approx(naive, rel=1e-10)

    def test_matches_naive_formula_above_cutoff(self):
        for x in np.logspace(-3, 6, 50):
            naive = (x + 1.0) * math.log1p(x) - x * math.log(x)
            assert bosonic_entropy(float(x)) == pytest.approx(naive, rel=1e-12)

    def test_extreme_arguments_stay_accurate(self):
        # the naive form cancels ~|log10 x| digits, so the oracle needs 700
        mp.mp.dps = 700
        for x in (1e-300, 1e-20, 1e-8, 1e8, 1e20, 1e300):
            ref = float((mp.mpf(x) + 1) * mp.log(mp.mpf(x) + 1) - mp.mpf(x) * mp.log(mp.mpf(x)))
            assert bosonic_entropy(x) == pytest.approx(ref, rel=1e-13)
        mp.mp.dps = 50


class TestMarginal:
    def test_frozen_values(self):
        assert bosonic_entropy_marginal(1.0) == pytest.approx(math.log(2.0), rel=1e-15)
        assert bosonic_entropy_marginal(0.1) == pytest.approx(LN_11, rel=1e-14)

    def test_large_argument_asymptote(self):
        assert 0.99e-8 < bosonic_entropy_marginal(1e8) < 1.01e-8

    def test_domain_errors(self):
        for bad in (0.0, -1.0, math.nan, math.inf):
            with pytest.raises(ValueError):
                bosonic_entropy_marginal(bad)

    def test_matches_finite_difference_of_entropy(self):
        for x in np.logspace(-3, 3, 31):
            h = 1e-6 * x
            fd = (bosonic_entropy(x + h) - bosonic_entropy(x - h)) / (2.0 * h)
            assert bosonic_entropy_marginal(float(x)) == pytest.approx(fd, rel=1e-5)

    def test_strictly_decreasing(self):
        xs = np.logspace(-10, 10, 200)
        vals = [bosonic_entropy_marginal(float(x)) for x in xs]
        assert all(a > b for a, b in zip(vals, vals[1:]))


class TestEntropyIncrement:
    def test_zero_base_reduces_exactly(self):
        for x in (0.0, 1e-12, 0.5, 3.0, 1e8):
            assert bosonic_entropy_increment(x, 0.0) == bosonic_entropy(x)

    def test_against_extended_precision(self):
        mp.mp.dps = 50

        def g(x):
            return (x + 1) * mp.log(x + 1) - x * mp.log(x) if x > 0 else mp.mpf(0)

        cases = [(1.0, 1.0), (1e-12, 1e-6), (1e-6, 1e6), (0.081, 1e6), (2.0, 0.3)]
        for x, base in cases:
            ref = float(g(mp.mpf(x) + mp.mpf(base)) - g(mp.mpf(base)))
            assert bosonic_entropy_increment(x, base) == pytest.approx(ref, rel=1e-9)

    def test_known_value(self):
        assert bosonic_entropy_increment(1.0, 1.0) == pytest.approx(G_AT_2_MINUS_1, rel=1e-14)

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            bosonic_entropy_increment(-1.0, 1.0)
        with pytest.raises(ValueError):
            bosonic_entropy_increment(1.0, -1.0)


class TestBesselJ1:
    def test_frozen_values(self):
        assert bessel_j1(0.0) == 0.0
        assert bessel_j1(1.0) == pytest.approx(J1_AT_1, rel=1e-13)
        assert abs(bessel_j1(3.8317060)) < 1e-6  # first positive zero

    def test_odd(self):
        rng = np.random.default_rng(3)
        x = rng.uniform(0.01, 50.0, size=100)
        assert np.allclose(bessel_j1(-x), -bessel_j1(x), rtol=0, atol=1e-16)

    def test_domain_errors(self):
        for bad in (math.nan, math.inf):
            with pytest.raises(ValueError):
                bessel_j1(bad)
        with pytest.raises(ValueError):
            bessel_j1(np.array([1.0, math.inf]))

    def test_wide_range_against_mpmath(self):
        # >= 10 significant digits relative to the oscillation envelope
        mp.mp.dps = 30
        xs = np.concatenate([np.linspace(0.01, 30.0, 61), np.logspace(1.5, 4.0, 36)])
        for x in xs:
            ref = float(mp.besselj(1, mp.mpf(float(x))))
            envelope = math.sqrt(2.0 / (math.pi * x))
            assert abs(bessel_j1(float(x)) - ref) <= 1e-10 * max(abs(ref), envelope)

    def test_recurrence_consistency(self):
        # J0(x) + J2(x) = 2 J1(x)/x, with J0 and J2 from the mpmath oracle
        mp.mp.dps = 30
        for x in np.logspace(math.log10(0.1), 2.0, 49):
            j0 = float(mp.besselj(0, mp.mpf(float(x))))
            j2 = float(mp.besselj(2, mp.mpf(float(x))))
            assert abs(j0 + j2 - 2.0 * bessel_j1(float(x)) / x) < 1e-9


class TestJincPsf:
    def test_singular_limit(self):
        assert jinc_psf(0.0) == pytest.approx(math.pi, rel=1e-15)
        assert jinc_psf(1e-8) == pytest.approx(math.pi, abs=1e-12)

    def test_first_zero(self):
        u_zero = J1_FIRST_ZERO / (2.0 * math.pi)
        assert abs(jinc_psf(u_zero)) < 1e-4
        assert abs(jinc_psf(0.6098)) < 1e-3  # four-digit rounding of the zero

    def test_continuity_near_zero(self):
        u = np.logspace(-12, -2.5, 50)
        vals = jinc_psf(u)
        # quadratic droop pi^3 u^2 / 2 stays below 2e-4 out to u ~ 3e-3
        assert np.all(np.abs(vals - math.pi) < 2e-4)
        assert np.all(np.diff(vals) < 1e-15)  # non-increasing away from the peak

    def test_domain_errors(self):
        with pytest.raises(ValueError):
            jinc_psf(-0.1)
        with pytest.raises(ValueError):
            jinc_psf(np.array([0.5, -1e-9]))

    def test_array_shape_and_values(self):
        u = np.array([[0.0, 0.1], [0.25, 0.5]])
        out = jinc_psf(u)
        assert out.shape == u.shape
        assert out[0, 0] == pytest.approx(math.pi)
        assert out[0, 1] == pytest.approx(float(jinc_psf(0.1)))
