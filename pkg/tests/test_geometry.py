"""Fresnel numbers, ratios, regimes, and the closed-form spectra."""

import math

import numpy as np
import pytest

import refocap as rc
from refocap.errors import ConfigError, RegimeError

from conftest import geometry_with_lens_fresnel


def _geometry(wavelength, object_distance, pupil_radius, patch_side, magnification=1.0):
    return rc.make_geometry(
        wavelength, object_distance, pupil_radius, patch_side, magnification=magnification
    )


class TestConstruction:
    def test_solves_thin_lens_from_magnification(self):
        g = _geometry(1e-6, 1e3, 0.05, 0.02, magnification=2.0)
        assert g.image_distance == pytest.approx(2e3, rel=1e-12)
        assert g.focal_length == pytest.approx(1e3 * 2e3 / 3e3, rel=1e-12)

    def test_solves_from_focal_length(self):
        g = rc.make_geometry(1e-6, 1e3, 0.05, 0.02, focal_length=500.0)
        assert g.image_distance == pytest.approx(1e3, rel=1e-12)
        assert g.magnification == pytest.approx(1.0, rel=1e-12)

    def test_solves_from_image_distance(self):
        g = rc.make_geometry(1e-6, 1e3, 0.05, 0.02, image_distance=3e3)
        assert g.magnification == pytest.approx(3.0, rel=1e-12)

    def test_consistent_overspecification_accepted(self):
        g = rc.make_geometry(
            1e-6, 1e3, 0.05, 0.02, image_distance=1e3, focal_length=500.0, magnification=1.0
        )
        assert g.focal_length == pytest.approx(500.0)

    def test_contradiction_rejected(self):
        with pytest.raises(ConfigError):
            rc.make_geometry(
                1e-6, 1e3, 0.05, 0.02, image_distance=1e3, focal_length=501.0
            )
        with pytest.raises(ConfigError):
            rc.make_geometry(
                1e-6, 1e3, 0.05, 0.02, image_distance=1e3, magnification=1.001
            )

    def test_virtual_image_rejected(self):
        with pytest.raises(ConfigError):
            rc.make_geometry(1e-6, 1e3, 0.05, 0.02, focal_length=2e3)

    def test_positivity(self):
        with pytest.raises(ConfigError):
            rc.make_geometry(-1e-6, 1e3, 0.05, 0.02, magnification=1.0)
        with pytest.raises(ConfigError):
            rc.make_geometry(1e-6, 1e3, 0.0, 0.02, magnification=1.0)

    def test_paraxial_violation_warns_not_fails(self):
        with pytest.warns(UserWarning):
            g = rc.make_geometry(1e-6, 1.0, 0.05, 0.5, magnification=1.0)
        assert g.patch_side == 0.5


class TestFresnelNumbers:
    def test_lens_fresnel_reference_value(self):
        g = _geometry(1e-6, 1e3, 0.05, 0.02)
        assert rc.lens_fresnel_number(g) == pytest.approx(math.pi, rel=1e-12)

    def test_lens_fresnel_quadratic_in_patch(self):
        g1 = _geometry(1e-6, 1e3, 0.05, 0.02)
        g2 = _geometry(1e-6, 1e3, 0.05, 0.04)
        assert rc.lens_fresnel_number(g2) == pytest.approx(
            4.0 * rc.lens_fresnel_number(g1), rel=1e-12
        )

    def test_lens_fresnel_small_system(self):
        g = _geometry(1e-6, 100.0, 1e-3, 1e-3)
        assert rc.lens_fresnel_number(g) == pytest.approx(math.pi * 1e-4, rel=1e-12)

    def test_rayleigh_length(self):
        g = _geometry(1e-6, 100.0, 1e-3, 1e-3)
        assert rc.rayleigh_length(g) == pytest.approx(0.1, rel=1e-12)
        g2 = _geometry(1e-6, 100.0, 2e-3, 1e-3)
        assert rc.rayleigh_length(g2) == pytest.approx(0.05, rel=1e-12)

    def test_fresnel_equals_rayleigh_form(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            g = _geometry(
                10.0 ** rng.uniform(-7, -5),
                10.0 ** rng.uniform(1, 4),
                10.0 ** rng.uniform(-3, -1),
                10.0 ** rng.uniform(-4, -2),
                magnification=10.0 ** rng.uniform(-1, 1),
            )
            alt = math.pi * (g.patch_side / rc.rayleigh_length(g)) ** 2
            assert rc.lens_fresnel_number(g) == pytest.approx(alt, rel=1e-12)

    def test_free_space_reference_value(self):
        g = _geometry(1e-6, 1e3, 0.05, 1e-2)
        assert rc.free_space_fresnel_number(g) == pytest.approx(2.5e-3, rel=1e-12)

    def test_free_space_equals_area_form(self):
        rng = np.random.default_rng(12)
        for _ in range(50):
            m = 10.0 ** rng.uniform(-1, 1)
            g = _geometry(1e-6, 500.0, 0.01, 10.0 ** rng.uniform(-3, -2), magnification=m)
            a1 = g.patch_side**2
            a2 = (m * g.patch_side) ** 2
            d = g.object_distance * (1.0 + m)
            assert rc.free_space_fresnel_number(g) == pytest.approx(
                a1 * a2 / (g.wavelength * d) ** 2, rel=1e-12
            )

    def test_magnification_factor_monotone_to_one(self):
        values = [
            rc.free_space_fresnel_number(_geometry(1e-6, 1e3, 0.05, 0.01, magnification=m))
            for m in (0.5, 1.0, 2.0, 10.0, 1e3)
        ]
        assert all(a < b for a, b in zip(values, values[1:]))
        limit = 0.01**4 / (1e-6 * 1e3) ** 2
        assert values[-1] == pytest.approx(limit, rel=1e-2)


class TestRegimes:
    def test_classification(self):
        assert rc.classify_regime(1e-4).regime == rc.Regime.FARFIELD
        assert rc.classify_regime(math.pi).regime == rc.Regime.INTERMEDIATE
        assert rc.classify_regime(314.0).regime == rc.Regime.NEARFIELD

    def test_inverted_thresholds(self):
        with pytest.raises(ConfigError):
            rc.classify_regime(1.0, farfield_max=10.0, nearfield_min=0.1)

    def test_custom_thresholds(self):
        assert rc.classify_regime(5.0, 1.0, 4.0).regime == rc.Regime.NEARFIELD


class TestRatios:
    def test_loss_ratio_reference_value(self):
        g = _geometry(1e-6, 100.0, 0.1, 0.01)
        assert rc.farfield_loss_ratio(g) == pytest.approx((100.0 * math.pi) ** 2 * 4.0, rel=1e-12)

    def test_mode_ratio_reference_value(self):
        g = _geometry(1e-6, 1e3, 0.01, 0.01)
        assert rc.nearfield_mode_ratio(g) == pytest.approx(4.0 * math.pi, rel=1e-12)

    def test_ratio_identities(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            g = _geometry(
                10.0 ** rng.uniform(-7, -5),
                10.0 ** rng.uniform(1, 4),
                10.0 ** rng.uniform(-3, -1),
                10.0 ** rng.uniform(-4, -2),
                magnification=10.0 ** rng.uniform(-1, 1),
            )
            fresnel = rc.lens_fresnel_number(g)
            fresnel_fs = rc.free_space_fresnel_number(g)
            assert rc.farfield_loss_ratio(g) * fresnel_fs == pytest.approx(
                fresnel**2, rel=1e-12
            )
            assert rc.nearfield_mode_ratio(g) * fresnel_fs == pytest.approx(
                fresnel, rel=1e-12
            )

    def test_loss_ratio_large_magnification_limit(self):
        g = _geometry(1e-6, 100.0, 0.1, 0.01, magnification=1e6)
        assert rc.farfield_loss_ratio(g) == pytest.approx((100.0 * math.pi) ** 2, rel=1e-5)

    def test_mode_ratio_independent_of_wavelength_and_distance(self):
        a = rc.nearfield_mode_ratio(_geometry(1e-6, 1e3, 0.02, 0.01))
        b = rc.nearfield_mode_ratio(_geometry(5e-7, 25.0, 0.02, 0.01))
        assert a == pytest.approx(b, rel=1e-12)

    def test_dimensionless_quantities_scale_invariant(self):
        rng = np.random.default_rng(14)
        base = _geometry(1e-6, 1e3, 0.03, 0.01, magnification=2.0)
        for _ in range(30):
            s = 10.0 ** rng.uniform(-1, 1)
            scaled = _geometry(
                s * base.wavelength,
                s * base.object_distance,
                s * base.pupil_radius,
                s * base.patch_side,
                magnification=2.0,
            )
            for fn in (
                rc.lens_fresnel_number,
                rc.free_space_fresnel_number,
                rc.farfield_loss_ratio,
                rc.nearfield_mode_ratio,
            ):
                assert fn(scaled) == pytest.approx(fn(base), rel=1e-12)
            assert rc.rayleigh_length(scaled) == pytest.approx(
                s * rc.rayleigh_length(base), rel=1e-12
            )


class TestMixedRegimeWindow:
    def test_reference_case_fails_upper_bound(self):
        # lower bound 5e-10 (margin x10 -> 5e-9 <= lambda), upper bound 1e-7
        # (margin -> 1e-8 < lambda): the window must report False.
        g = _geometry(1e-6, 1e5, 1.0, 1e-2)
        window = rc.check_mixed_regime(g, margin=10.0)
        assert not window.ok
        assert window.slack_low == pytest.approx(1e-6 / 5e-10, rel=1e-12)
        assert window.slack_high == pytest.approx(1e-7 / 1e-6, rel=1e-12)

    def test_margin_one_is_plain_inequalities(self):
        g = _geometry(7e-7 / 1e-6 * 1e-6, 1e3, 1.0, 1e-2)  # lambda = 7e-7
        window = rc.check_mixed_regime(g, margin=1.0)
        assert window.ok == (window.slack_low >= 1.0 and window.slack_high >= 1.0)
        assert window.ok

    def test_margin_below_one_rejected(self):
        g = _geometry(1e-6, 1e3, 0.05, 0.01)
        with pytest.raises(ConfigError):
            rc.check_mixed_regime(g, margin=0.5)

    def test_window_implies_nearfield_farfield_pair(self):
        rng = np.random.default_rng(15)
        hits = 0
        for _ in range(400):
            g = _geometry(
                10.0 ** rng.uniform(-6.5, -5.5),
                10.0 ** rng.uniform(2, 4),
                10.0 ** rng.uniform(-1, 0.5),
                10.0 ** rng.uniform(-3, -1.5),
                magnification=10.0 ** rng.uniform(-0.5, 0.5),
            )
            if not rc.check_mixed_regime(g, margin=10.0).ok:
                continue
            hits += 1
            lens = rc.classify_regime(rc.lens_fresnel_number(g))
            fs = rc.classify_regime(rc.free_space_fresnel_number(g))
            assert lens.regime == rc.Regime.NEARFIELD
            assert fs.regime == rc.Regime.FARFIELD
        assert hits > 5  # the sweep must actually sample the window


class TestAsymptoticSpectrum:
    def test_lens_farfield_single_mode(self):
        g = geometry_with_lens_fresnel(1e-2)
        spectrum = rc.asymptotic_spectrum(rc.Scenario.LENS, g)
        assert len(spectrum) == 1
        assert spectrum.eta[0] == pytest.approx(1e-4, rel=1e-10)

    def test_free_space_farfield_single_mode(self):
        g = _geometry(1e-6, 1e3, 0.05, (4e-2 * (1e-3) ** 2) ** 0.25)  # F_fs = 1e-2
        spectrum = rc.asymptotic_spectrum(rc.Scenario.FREE_SPACE, g)
        assert len(spectrum) == 1
        assert spectrum.eta[0] == pytest.approx(1e-2, rel=1e-10)

    def test_lens_nearfield_unit_modes(self):
        g = geometry_with_lens_fresnel(100.0)
        fresnel = rc.lens_fresnel_number(g)
        spectrum = rc.asymptotic_spectrum(rc.Scenario.LENS, g)
        assert len(spectrum) == math.ceil(fresnel)
        assert abs(len(spectrum) - 100) <= 1  # geometry solving leaves ~1e-14 slack
        assert np.all(spectrum.eta == 1.0)
        assert spectrum.nu_asymptotic == fresnel

    def test_intermediate_refused(self):
        g = _geometry(1e-6, 1e3, 0.05, 0.02)  # F = pi
        with pytest.raises(RegimeError):
            rc.asymptotic_spectrum(rc.Scenario.LENS, g)

    def test_hole_refused(self):
        g = geometry_with_lens_fresnel(1e-2)
        with pytest.raises(RegimeError):
            rc.asymptotic_spectrum(rc.Scenario.HOLE, g)

    def test_spectrum_invariants(self):
        g = geometry_with_lens_fresnel(37.3)
        spectrum = rc.asymptotic_spectrum(rc.Scenario.LENS, g)
        assert np.all((spectrum.eta >= 0.0) & (spectrum.eta <= 1.0))
        assert np.all(np.diff(spectrum.eta) <= 0.0)
        assert spectrum.nu_threshold == 38
