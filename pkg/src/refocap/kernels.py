"""Propagation kernels for the three scenarios.

All kernels map amplitudes on the object plane to amplitudes on the image
plane and carry dimension 1/m^2, so that quadrature weights in m^2 make
sampled singular values dimensionless.

The lens point-spread function factors into a jinc profile of the scaled
offset |r_i - M r_o| times a separable unimodular phase; because a
separable phase is a diagonal unitary on each side it cannot change
singular values, and it is omitted by default (``include_phase=False``)
to keep sampled matrices real and well-conditioned.  The free-space
propagator's quadratic phase has a cross term and is never separable, so
it is always kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np

from .errors import ConfigError
from .geometry import (
    OpticalGeometry,
    Scenario,
    free_space_fresnel_number,
    lens_fresnel_number,
)
from .mathfn import jinc_psf
from .spectra import (
    Domain,
    KernelFunction,
    SampledKernel,
    as_kernel,
    assemble,
    build_grid,
    compose_spectra_matrix,
    converge_spectrum,
    ModeSpectrum,
)

MIN_PUPIL_ORDER = 4


class PlanarPoint(NamedTuple):
    """Cartesian coordinates (meters) on a transverse plane."""

    x: float
    y: float


@dataclass(frozen=True)
class KernelSpec:
    """Scenario, geometry, and evaluation options for a propagation kernel."""

    scenario: Scenario
    geometry: OpticalGeometry
    include_phase: bool = False
    pupil_order: int = 16

    def __post_init__(self) -> None:
        if self.scenario == Scenario.HOLE and self.pupil_order < MIN_PUPIL_ORDER:
            raise ConfigError(
                f"hole scenario needs pupil quadrature order >= {MIN_PUPIL_ORDER}, "
                f"got {self.pupil_order}"
            )


def _as_points(r) -> np.ndarray:
    arr = np.asarray(r, dtype=float)
    if arr.shape[-1] != 2:
        raise ConfigError(f"points must have a trailing dimension of 2, got shape {arr.shape}")
    return arr


def lens_phase(spec: KernelSpec, r_i, r_o) -> np.ndarray:
    """Separable phase of the lens kernel: pi/(lambda D_o) (|r_o|^2 + |r_i|^2/M) + const."""
    g = spec.geometry
    r_i = _as_points(r_i)
    r_o = _as_points(r_o)
    quad = (r_o**2).sum(axis=-1) + (r_i**2).sum(axis=-1) / g.magnification
    const = 2.0 * math.pi * g.object_distance * (1.0 + g.magnification) / g.wavelength
    return math.pi / (g.wavelength * g.object_distance) * quad + const


def lens_psf(spec: KernelSpec, r_i, r_o) -> np.ndarray:
    """Point-spread function of a thin lens with a circular pupil of radius R.

    Amplitude R^2/(lambda^2 D_o D_i) * jinc_psf(R * |r_i - M r_o| / (lambda D_i)),
    times exp(j*theta) when the spec asks for the phase.  Peak modulus (at the
    geometric image point) is pi R^2 / (lambda^2 D_o D_i).
    """
    if spec.scenario != Scenario.LENS:
        raise ConfigError(f"lens_psf needs a lens spec, got scenario {spec.scenario.value!r}")
    g = spec.geometry
    r_i = _as_points(r_i)
    r_o = _as_points(r_o)
    offset = r_i - g.magnification * r_o
    rho = np.sqrt((offset**2).sum(axis=-1)) / (g.wavelength * g.image_distance)
    amplitude = (
        g.pupil_radius**2
        / (g.wavelength**2 * g.object_distance * g.image_distance)
        * jinc_psf(g.pupil_radius * rho)
    )
    if spec.include_phase:
        return amplitude * np.exp(1j * lens_phase(spec, r_i, r_o))
    return amplitude


def free_space_kernel(
    distance: float, r_to, r_from, wavelength: float, include_phase: bool = True
) -> np.ndarray:
    """Paraxial free-space propagator exp(j pi |r2 - r1|^2 / (lambda d)) / (lambda d).

    The global phase convention is dropped (only singular values matter);
    the quadratic phase itself has a non-separable cross term and is
    essential to diffraction, so ``include_phase`` is ignored and the
    phase is always applied.
    """
    del include_phase
    if not (math.isfinite(distance) and distance > 0.0):
        raise ValueError(f"propagation distance must be positive, got {distance!r}")
    r_to = _as_points(r_to)
    r_from = _as_points(r_from)
    delta2 = ((r_to - r_from) ** 2).sum(axis=-1)
    return np.exp(1j * math.pi * delta2 / (wavelength * distance)) / (wavelength * distance)


def _domains(geom: OpticalGeometry) -> tuple[Domain, Domain, Domain]:
    object_patch = Domain("square", geom.patch_side)
    image_patch = Domain("square", geom.magnification * geom.patch_side)
    pupil = Domain("disk", geom.pupil_radius)
    return object_patch, image_patch, pupil


def hole_stage_kernels(spec: KernelSpec) -> tuple[KernelFunction, KernelFunction]:
    """Free-space stages of the hole scenario: object->screen and screen->image."""
    g = spec.geometry
    object_patch, image_patch, pupil = _domains(g)
    stage1 = as_kernel(
        lambda r_s, r_o: free_space_kernel(g.object_distance, r_s, r_o, g.wavelength),
        domain_in=object_patch,
        domain_out=pupil,
    )
    stage2 = as_kernel(
        lambda r_i, r_s: free_space_kernel(g.image_distance, r_i, r_s, g.wavelength),
        domain_in=pupil,
        domain_out=image_patch,
    )
    return stage1, stage2


def hole_composite_kernel(spec: KernelSpec, r_i, r_o) -> np.ndarray:
    """Two-stage hole kernel: disk integral of stage2(r_i, r_s) * stage1(r_s, r_o).

    Evaluated lazily per point pair with the spec's pupil quadrature; the
    matrix-product path in ``scenario_assembler`` is the fast route and
    agrees with this one to quadrature roundoff.
    """
    if spec.scenario != Scenario.HOLE:
        raise ConfigError(
            f"hole_composite_kernel needs a hole spec, got scenario {spec.scenario.value!r}"
        )
    g = spec.geometry
    pupil_grid = build_grid(Domain("disk", g.pupil_radius), spec.pupil_order)
    r_i = _as_points(r_i)
    r_o = _as_points(r_o)
    r_i_b, r_o_b = np.broadcast_arrays(r_i, r_o)
    shape = r_i_b.shape[:-1]
    flat_i = r_i_b.reshape(-1, 2)
    flat_o = r_o_b.reshape(-1, 2)
    to_image = free_space_kernel(
        g.image_distance, flat_i[:, None, :], pupil_grid.nodes[None, :, :], g.wavelength
    )
    from_object = free_space_kernel(
        g.object_distance, pupil_grid.nodes[None, :, :], flat_o[:, None, :], g.wavelength
    )
    values = (to_image * from_object) @ pupil_grid.weights
    return values.reshape(shape)


def kernel_function(spec: KernelSpec) -> KernelFunction:
    """The scenario's kernel as a callable with declared endpoint domains."""
    object_patch, image_patch, _ = _domains(spec.geometry)
    if spec.scenario == Scenario.LENS:
        fn = lambda r_out, r_in: lens_psf(spec, r_out, r_in)
    elif spec.scenario == Scenario.FREE_SPACE:
        g = spec.geometry
        total = g.object_distance + g.image_distance
        fn = lambda r_out, r_in: free_space_kernel(total, r_out, r_in, g.wavelength)
    else:
        fn = lambda r_out, r_in: hole_composite_kernel(spec, r_out, r_in)
    return as_kernel(fn, domain_in=object_patch, domain_out=image_patch)


def scenario_assembler(spec: KernelSpec) -> Callable[[int], SampledKernel]:
    """Order -> SampledKernel factory used by the convergence loop.

    For the hole scenario this takes the matrix-product route through the
    pupil: both free-space stages are sampled and composed, with the pupil
    radial order following the refinement order (but never below the
    configured pupil order).
    """
    g = spec.geometry
    object_patch, image_patch, pupil = _domains(g)

    def assemble_at(order: int) -> SampledKernel:
        grid_in = build_grid(object_patch, order)
        grid_out = build_grid(image_patch, order)
        if spec.scenario != Scenario.HOLE:
            return assemble(kernel_function(spec), grid_in, grid_out, spec.scenario.value)
        stage1, stage2 = hole_stage_kernels(spec)
        pupil_grid = build_grid(pupil, max(spec.pupil_order, order))
        sampled1 = assemble(stage1, grid_in, pupil_grid, "hole-stage1")
        sampled2 = assemble(stage2, pupil_grid, grid_out, "hole-stage2")
        return compose_spectra_matrix(sampled1, pupil_grid, sampled2)

    return assemble_at


def scenario_fresnel(spec: KernelSpec) -> float:
    """Fresnel number governing the scenario's mode count (stage F for the hole)."""
    if spec.scenario == Scenario.FREE_SPACE:
        return free_space_fresnel_number(spec.geometry)
    return lens_fresnel_number(spec.geometry)


def scenario_spectrum(
    spec: KernelSpec,
    *,
    initial_order: int = 8,
    rtol: float = 1e-4,
    max_order: int = 64,
) -> ModeSpectrum:
    """Converged numerical mode spectrum for a scenario.

    Tracks the top max(10, ceil(2F)) transmissivities across grid doublings,
    F being the scenario's Fresnel number.
    """
    tracked = max(10, math.ceil(2.0 * scenario_fresnel(spec)))
    return converge_spectrum(
        scenario_assembler(spec),
        tracked=tracked,
        initial_order=initial_order,
        rtol=rtol,
        max_order=max_order,
    )
