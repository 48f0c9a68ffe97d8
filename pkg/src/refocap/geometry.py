"""Physical parameterization of the three scenarios and their closed forms.

A scenario is a monochromatic field propagating from a square object patch
of side L to its geometric image (side M*L), either through a thin lens of
pupil radius R at distance D_o (image at D_i), directly through free
space over the same total distance, or through a bare hole of radius R in
an absorbing screen.  Everything here is closed-form arithmetic on the
geometry: Fresnel numbers, regime classification, the farfield/nearfield
asymptotic spectra, and the two scenario ratios used by the gain formulas.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError, RegimeError
from .spectra import ModeSpectrum

# Default decade of margin around the F << 1 / F >> 1 limits.
FARFIELD_MAX_DEFAULT = 0.1
NEARFIELD_MIN_DEFAULT = 10.0

_REL_TOL = 1e-12
_SOLVE_TOL = 1e-9
_PARAXIAL_RATIO_DEFAULT = 0.1


class Scenario(str, Enum):
    """Which optical system sits between the object and image planes."""

    LENS = "lens"
    FREE_SPACE = "free_space"
    HOLE = "hole"


class Regime(str, Enum):
    FARFIELD = "farfield"
    NEARFIELD = "nearfield"
    INTERMEDIATE = "intermediate"


@dataclass(frozen=True)
class RegimeLabel:
    """Classification of a Fresnel number against the two thresholds used."""

    regime: Regime
    fresnel: float
    farfield_max: float
    nearfield_min: float


@dataclass(frozen=True)
class OpticalGeometry:
    """All physical parameters of a scenario, in SI units (meters).

    Invariants: every field positive and finite, the thin-lens relation
    1/D_o + 1/D_i = 1/f, and magnification = D_i/D_o, each to 1e-12
    relative.  Use ``make_geometry`` to build one from a partial
    specification; it solves the thin-lens equation and also runs the
    paraxial sanity warnings.
    """

    wavelength: float
    object_distance: float
    image_distance: float
    focal_length: float
    magnification: float
    pupil_radius: float
    patch_side: float

    def __post_init__(self) -> None:
        for name in (
            "wavelength",
            "object_distance",
            "image_distance",
            "focal_length",
            "magnification",
            "pupil_radius",
            "patch_side",
        ):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
                raise ConfigError(f"geometry.{name}: must be positive and finite, got {value!r}")
        lhs = 1.0 / self.object_distance + 1.0 / self.image_distance
        rhs = 1.0 / self.focal_length
        if abs(lhs - rhs) > _REL_TOL * abs(rhs):
            raise ConfigError(
                "geometry: thin-lens relation 1/D_o + 1/D_i = 1/f violated "
                f"(residual {abs(lhs - rhs) / abs(rhs):.3e} relative)"
            )
        m = self.image_distance / self.object_distance
        if abs(m - self.magnification) > _REL_TOL * abs(m):
            raise ConfigError(
                f"geometry: magnification {self.magnification!r} inconsistent with "
                f"D_i/D_o = {m!r}"
            )


def make_geometry(
    wavelength: float,
    object_distance: float,
    pupil_radius: float,
    patch_side: float,
    *,
    image_distance: float | None = None,
    focal_length: float | None = None,
    magnification: float | None = None,
    paraxial_ratio: float = _PARAXIAL_RATIO_DEFAULT,
) -> OpticalGeometry:
    """Build a geometry from wavelength, D_o, R, L, and any of (D_i, f, M).

    Over-specified combinations are cross-checked and rejected above 1e-9
    relative disagreement.  Violations of the paraxial sanity bounds
    (L and R small against D_o) warn rather than fail.
    """
    if image_distance is None and focal_length is None and magnification is None:
        raise ConfigError(
            "geometry: provide at least one of image_distance, focal_length, magnification"
        )
    if not (math.isfinite(object_distance) and object_distance > 0):
        raise ConfigError(f"geometry.object_distance: must be positive, got {object_distance!r}")

    if image_distance is not None:
        d_i = float(image_distance)
    elif magnification is not None:
        d_i = float(magnification) * object_distance
    else:
        if not 0.0 < focal_length < object_distance:
            raise ConfigError(
                "geometry.focal_length: a real image needs 0 < f < D_o, got "
                f"f={focal_length!r}, D_o={object_distance!r}"
            )
        d_i = focal_length * object_distance / (object_distance - focal_length)
    if not (math.isfinite(d_i) and d_i > 0):
        raise ConfigError(f"geometry: derived image_distance {d_i!r} is not positive")

    f = object_distance * d_i / (object_distance + d_i)
    m = d_i / object_distance
    if focal_length is not None and abs(focal_length - f) > _SOLVE_TOL * abs(f):
        raise ConfigError(
            f"geometry: focal_length {focal_length!r} contradicts thin-lens value {f!r}"
        )
    if magnification is not None and abs(magnification - m) > _SOLVE_TOL * abs(m):
        raise ConfigError(
            f"geometry: magnification {magnification!r} contradicts D_i/D_o = {m!r}"
        )

    geom = OpticalGeometry(
        wavelength=float(wavelength),
        object_distance=float(object_distance),
        image_distance=float(d_i),
        focal_length=float(f),
        magnification=float(m),
        pupil_radius=float(pupil_radius),
        patch_side=float(patch_side),
    )
    if geom.patch_side > paraxial_ratio * geom.object_distance:
        warnings.warn(
            f"patch_side/object_distance = {geom.patch_side / geom.object_distance:.3g} "
            f"exceeds the paraxial sanity ratio {paraxial_ratio}",
            stacklevel=2,
        )
    if geom.pupil_radius > paraxial_ratio * geom.object_distance:
        warnings.warn(
            f"pupil_radius/object_distance = {geom.pupil_radius / geom.object_distance:.3g} "
            f"exceeds the paraxial sanity ratio {paraxial_ratio}",
            stacklevel=2,
        )
    return geom


def lens_fresnel_number(geom: OpticalGeometry) -> float:
    """Fresnel number of the lens scenario, pi * R^2 L^2 / (lambda D_o)^2."""
    return (
        math.pi
        * geom.pupil_radius**2
        * geom.patch_side**2
        / (geom.wavelength**2 * geom.object_distance**2)
    )


def rayleigh_length(geom: OpticalGeometry) -> float:
    """Diffraction-limited resolution scale lambda * D_o / R on the object plane."""
    return geom.wavelength * geom.object_distance / geom.pupil_radius


def free_space_fresnel_number(geom: OpticalGeometry) -> float:
    """Fresnel number of direct propagation over D_o(1+M) between the same patches.

    Equals A1*A2/(lambda*d)^2 with emitting area L^2, detecting area (M*L)^2,
    and separation d = D_o(1+M), which simplifies to
    L^4/(lambda D_o)^2 * (M/(1+M))^2.
    """
    m = geom.magnification
    return (
        geom.patch_side**4
        / (geom.wavelength**2 * geom.object_distance**2)
        * (m / (1.0 + m)) ** 2
    )


def classify_regime(
    fresnel: float,
    farfield_max: float = FARFIELD_MAX_DEFAULT,
    nearfield_min: float = NEARFIELD_MIN_DEFAULT,
) -> RegimeLabel:
    """Label a Fresnel number as farfield (F below), nearfield (F above), or neither."""
    if not (0.0 < farfield_max < nearfield_min):
        raise ConfigError(
            f"regime thresholds must satisfy 0 < farfield_max < nearfield_min, "
            f"got ({farfield_max!r}, {nearfield_min!r})"
        )
    if fresnel < farfield_max:
        regime = Regime.FARFIELD
    elif fresnel > nearfield_min:
        regime = Regime.NEARFIELD
    else:
        regime = Regime.INTERMEDIATE
    return RegimeLabel(
        regime=regime, fresnel=fresnel, farfield_max=farfield_max, nearfield_min=nearfield_min
    )


def farfield_loss_ratio(geom: OpticalGeometry) -> float:
    """Ratio of the single-mode losses, lens over free space (algebraically F^2/F_fs).

    (pi R^2 / (lambda D_o))^2 * ((1+M)/M)^2; above 1 exactly when refocusing
    beats direct propagation in the farfield pairing.
    """
    m = geom.magnification
    return (
        math.pi * geom.pupil_radius**2 / (geom.wavelength * geom.object_distance)
    ) ** 2 * ((1.0 + m) / m) ** 2


def nearfield_mode_ratio(geom: OpticalGeometry) -> float:
    """Ratio of lossless mode counts, lens over free space (algebraically F/F_fs).

    pi * (R/L)^2 * ((1+M)/M)^2; independent of wavelength and distance.
    """
    m = geom.magnification
    return math.pi * (geom.pupil_radius / geom.patch_side) ** 2 * ((1.0 + m) / m) ** 2


@dataclass(frozen=True)
class MixedRegimeWindow:
    """Result of the lens-nearfield / free-space-farfield wavelength window check.

    ``slack_low`` is how many times the wavelength clears the lower bound
    L^2 M / (D_o (M+1)); ``slack_high`` how many times it clears the upper
    bound L R / D_o.  The window holds when both slacks reach the margin.
    """

    ok: bool
    slack_low: float
    slack_high: float
    margin: float


def check_mixed_regime(geom: OpticalGeometry, margin: float = 10.0) -> MixedRegimeWindow:
    """Check L^2 M/(D_o(M+1)) << lambda << L R / D_o with a multiplicative margin."""
    if margin < 1.0:
        raise ConfigError(f"margin must be >= 1, got {margin!r}")
    m = geom.magnification
    lower = geom.patch_side**2 * m / (geom.object_distance * (m + 1.0))
    upper = geom.patch_side * geom.pupil_radius / geom.object_distance
    slack_low = geom.wavelength / lower
    slack_high = upper / geom.wavelength
    return MixedRegimeWindow(
        ok=(slack_low >= margin and slack_high >= margin),
        slack_low=slack_low,
        slack_high=slack_high,
        margin=margin,
    )


def asymptotic_spectrum(
    scenario: Scenario,
    geom: OpticalGeometry,
    farfield_max: float = FARFIELD_MAX_DEFAULT,
    nearfield_min: float = NEARFIELD_MIN_DEFAULT,
) -> ModeSpectrum:
    """Closed-form mode spectrum in the farfield or nearfield limit.

    Farfield: one mode with transmissivity F^2 (lens) or F_fs (free space).
    Nearfield: ceil(F) unit-transmissivity modes, with the unrounded count
    kept in ``nu_asymptotic``.  Intermediate Fresnel numbers and the hole
    scenario have no closed form and must go through the numerical path.
    """
    if scenario == Scenario.HOLE:
        raise RegimeError(
            "no closed-form spectrum for the hole scenario; use the numerical path"
        )
    if scenario == Scenario.LENS:
        fresnel = lens_fresnel_number(geom)
        single_mode_eta = fresnel**2
    else:
        fresnel = free_space_fresnel_number(geom)
        single_mode_eta = fresnel
    label = classify_regime(fresnel, farfield_max, nearfield_min)
    if label.regime == Regime.INTERMEDIATE:
        raise RegimeError(
            f"no closed-form spectrum at Fresnel number {fresnel:.6g} (intermediate "
            f"regime between {farfield_max:g} and {nearfield_min:g}); use the numerical path"
        )
    if label.regime == Regime.FARFIELD:
        eta = np.array([single_mode_eta])
        nu_raw = None
    else:
        eta = np.ones(math.ceil(fresnel))
        nu_raw = fresnel
    return ModeSpectrum(
        eta=eta,
        sigma=np.sqrt(eta),
        grid_orders=None,
        converged=True,
        scenario=scenario.value,
        nu_asymptotic=nu_raw,
    )
