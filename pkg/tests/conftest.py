"""Shared geometry builders for the test suite.

All tests use the same reference optics (1 um light, 1 km throw, 5 cm
pupil) and solve for the patch side or pupil radius that places the
scenario at a prescribed Fresnel number or ratio.
"""

import math

import refocap as rc

WAVELENGTH = 1e-6
OBJECT_DISTANCE = 1e3
PUPIL_RADIUS = 0.05


def geometry_with_lens_fresnel(target: float, magnification: float = 1.0) -> rc.OpticalGeometry:
    """Patch side solved so the lens Fresnel number equals ``target``."""
    patch = (
        WAVELENGTH * OBJECT_DISTANCE * math.sqrt(target / math.pi) / PUPIL_RADIUS
    )
    return rc.make_geometry(
        WAVELENGTH, OBJECT_DISTANCE, PUPIL_RADIUS, patch, magnification=magnification
    )


def farfield_pair_geometry(loss_ratio: float = 4.0) -> rc.OpticalGeometry:
    """Both scenarios farfield, with the single-mode loss ratio r1 = ``loss_ratio``."""
    pupil = math.sqrt(
        WAVELENGTH * OBJECT_DISTANCE * math.sqrt(loss_ratio) / (2.0 * math.pi)
    )
    return rc.make_geometry(
        WAVELENGTH, OBJECT_DISTANCE, pupil, 3e-3, magnification=1.0
    )


def nearfield_pair_geometry(mode_ratio: float = 4.0) -> rc.OpticalGeometry:
    """Both scenarios nearfield, with the mode-count ratio r2 = ``mode_ratio``."""
    patch = 0.04
    pupil = patch * math.sqrt(mode_ratio / (4.0 * math.pi))
    return rc.make_geometry(WAVELENGTH, 100.0, pupil, patch, magnification=1.0)


def mixed_pair_geometry(
    fresnel: float = 20.0, fresnel_fs: float = 0.05
) -> rc.OpticalGeometry:
    """Lens nearfield at F = ``fresnel``, free space farfield at ``fresnel_fs``."""
    distance = 100.0
    patch = (4.0 * fresnel_fs) ** 0.25 * math.sqrt(WAVELENGTH * distance)
    pupil = math.sqrt(fresnel / math.pi) * WAVELENGTH * distance / patch
    return rc.make_geometry(WAVELENGTH, distance, pupil, patch, magnification=1.0)
