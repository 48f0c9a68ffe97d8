"""Head-to-head comparison of refocused and free-space communication.

Closed-form capacity gains for the three regime pairings, their thermal
variants, a numerical cross-check that runs the full spectra + water-filling
pipeline on both scenarios, and the screen-negligibility analysis of the
bare-hole scenario.

Gain conventions (lens capacity over free-space capacity):

  * farfield/farfield:   g(r1 * eta_fs * N) / g(eta_fs * N), r1 the loss ratio
  * nearfield/nearfield: r2 * g(N/nu) / g(r2 * N/nu), nu the lens mode count
  * nearfield/farfield:  nu * g(N/nu) / g(eta_fs * N)

Each formula is only meaningful in its regime pairing, so the geometry-level
entry points verify the classification and raise otherwise; ``check=False``
computes anyway for exploration.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .capacity import (
    PhotonBudget,
    capacity_of,
    capacity_thermal,
    water_fill,
)
from .errors import RegimeError
from .geometry import (
    FARFIELD_MAX_DEFAULT,
    NEARFIELD_MIN_DEFAULT,
    OpticalGeometry,
    Regime,
    Scenario,
    classify_regime,
    farfield_loss_ratio,
    free_space_fresnel_number,
    lens_fresnel_number,
    nearfield_mode_ratio,
)
from .kernels import KernelSpec, hole_stage_kernels, scenario_spectrum
from .mathfn import bosonic_entropy
from .spectra import Domain, ModeSpectrum, assemble, build_grid, converge_spectrum


def farfield_gain_formula(loss_ratio: float, eta_fs: float, total: float) -> float:
    """g(r1 * eta_fs * N) / g(eta_fs * N); approaches r1 for weak signals, 1 for strong."""
    return bosonic_entropy(loss_ratio * eta_fs * total) / bosonic_entropy(eta_fs * total)


def nearfield_gain_formula(mode_ratio: float, nu: float, total: float) -> float:
    """r2 * g(N/nu) / g(r2 * N/nu); approaches r2 for strong signals, 1 for weak."""
    return mode_ratio * bosonic_entropy(total / nu) / bosonic_entropy(mode_ratio * total / nu)


def mixed_gain_formula(nu: float, eta_fs: float, total: float) -> float:
    """nu * g(N/nu) / g(eta_fs * N); approaches nu for strong signals, 1/eta_fs for weak."""
    return nu * bosonic_entropy(total / nu) / bosonic_entropy(eta_fs * total)


def _regime_pair(
    geom: OpticalGeometry, farfield_max: float, nearfield_min: float
) -> tuple[Regime, Regime, float, float]:
    fresnel = lens_fresnel_number(geom)
    fresnel_fs = free_space_fresnel_number(geom)
    lens_label = classify_regime(fresnel, farfield_max, nearfield_min)
    fs_label = classify_regime(fresnel_fs, farfield_max, nearfield_min)
    return lens_label.regime, fs_label.regime, fresnel, fresnel_fs


def _require_pair(
    geom: OpticalGeometry,
    want_lens: Regime,
    want_fs: Regime,
    farfield_max: float,
    nearfield_min: float,
) -> tuple[float, float]:
    lens_regime, fs_regime, fresnel, fresnel_fs = _regime_pair(
        geom, farfield_max, nearfield_min
    )
    if lens_regime != want_lens:
        raise RegimeError(
            f"lens Fresnel number F = {fresnel:.6g} is {lens_regime.value}, "
            f"but this gain needs {want_lens.value}"
        )
    if fs_regime != want_fs:
        raise RegimeError(
            f"free-space Fresnel number F_fs = {fresnel_fs:.6g} is {fs_regime.value}, "
            f"but this gain needs {want_fs.value}"
        )
    return fresnel, fresnel_fs


def farfield_gain(
    geom: OpticalGeometry,
    total: float,
    *,
    check: bool = True,
    farfield_max: float = FARFIELD_MAX_DEFAULT,
    nearfield_min: float = NEARFIELD_MIN_DEFAULT,
) -> float:
    """Capacity gain when both scenarios sit in the farfield."""
    if check:
        _require_pair(geom, Regime.FARFIELD, Regime.FARFIELD, farfield_max, nearfield_min)
    return farfield_gain_formula(
        farfield_loss_ratio(geom), free_space_fresnel_number(geom), total
    )


def nearfield_gain(
    geom: OpticalGeometry,
    total: float,
    *,
    check: bool = True,
    farfield_max: float = FARFIELD_MAX_DEFAULT,
    nearfield_min: float = NEARFIELD_MIN_DEFAULT,
) -> float:
    """Capacity gain when both scenarios sit in the nearfield (real-valued nu = F)."""
    if check:
        _require_pair(geom, Regime.NEARFIELD, Regime.NEARFIELD, farfield_max, nearfield_min)
    return nearfield_gain_formula(
        nearfield_mode_ratio(geom), lens_fresnel_number(geom), total
    )


def mixed_gain(
    geom: OpticalGeometry,
    total: float,
    *,
    check: bool = True,
    farfield_max: float = FARFIELD_MAX_DEFAULT,
    nearfield_min: float = NEARFIELD_MIN_DEFAULT,
) -> float:
    """Capacity gain for a nearfield lens against farfield free space."""
    if check:
        _require_pair(geom, Regime.NEARFIELD, Regime.FARFIELD, farfield_max, nearfield_min)
    return mixed_gain_formula(
        lens_fresnel_number(geom), free_space_fresnel_number(geom), total
    )


@dataclass(frozen=True)
class ThermalGainResult:
    """Thermal-noise gain plus which noise ordering held and what it predicts."""

    gain: float
    regime_pair: str  # "farfield", "nearfield", or "mixed"
    noise_ordering: str  # "noise-dominated", "weak-noise-window", or "other"
    predicted_asymptote: float | None
    predicted_name: str | None
    lens_nats: float
    free_space_nats: float


def thermal_gain(
    geom: OpticalGeometry,
    total: float,
    thermal: float,
    *,
    check: bool = True,
    farfield_max: float = FARFIELD_MAX_DEFAULT,
    nearfield_min: float = NEARFIELD_MIN_DEFAULT,
) -> ThermalGainResult:
    """Capacity gain with a thermal floor, using the regime pair's closed forms.

    At thermal = 0 this reduces exactly to the pure-loss gains.  The
    diagnostics report which of the two noise orderings holds --
    noise-dominated (t >> max(1, per-mode signal)) or the weak-noise window
    (1 >> t >> per-mode signal) -- and the asymptote associated with that
    ordering, when there is one for the regime pair.
    """
    lens_regime, fs_regime, fresnel, fresnel_fs = _regime_pair(
        geom, farfield_max, nearfield_min
    )
    if lens_regime == Regime.FARFIELD and fs_regime == Regime.FARFIELD:
        pair = "farfield"
        lens_eta, lens_nu = fresnel**2, 1.0
        fs_eta, fs_nu = fresnel_fs, 1.0
    elif lens_regime == Regime.NEARFIELD and fs_regime == Regime.NEARFIELD:
        pair = "nearfield"
        lens_eta, lens_nu = 1.0, fresnel
        fs_eta, fs_nu = 1.0, fresnel_fs
    elif lens_regime == Regime.NEARFIELD and fs_regime == Regime.FARFIELD:
        pair = "mixed"
        lens_eta, lens_nu = 1.0, fresnel
        fs_eta, fs_nu = fresnel_fs, 1.0
    else:
        if check:
            raise RegimeError(
                f"no closed-form gain for regime pair ({lens_regime.value}, "
                f"{fs_regime.value}) at F = {fresnel:.6g}, F_fs = {fresnel_fs:.6g}"
            )
        pair = "farfield"
        lens_eta, lens_nu = fresnel**2, 1.0
        fs_eta, fs_nu = fresnel_fs, 1.0

    lens_nats = capacity_thermal(min(lens_eta, 1.0), lens_nu, total, thermal)
    fs_nats = capacity_thermal(min(fs_eta, 1.0), fs_nu, total, thermal)

    signal_per_mode = lens_eta * total / lens_nu
    if thermal >= 10.0 * max(1.0, signal_per_mode):
        ordering = "noise-dominated"
    elif thermal <= 0.1 and thermal >= 10.0 * signal_per_mode:
        ordering = "weak-noise-window"
    else:
        ordering = "other"

    predictions = {
        ("farfield", "noise-dominated"): (farfield_loss_ratio(geom), "r1"),
        ("mixed", "noise-dominated"): (1.0 / fresnel_fs, "1/eta_fs"),
        ("nearfield", "weak-noise-window"): (nearfield_mode_ratio(geom), "r2"),
        ("mixed", "weak-noise-window"): (fresnel, "nu"),
    }
    predicted = predictions.get((pair, ordering))
    return ThermalGainResult(
        gain=lens_nats / fs_nats,
        regime_pair=pair,
        noise_ordering=ordering,
        predicted_asymptote=predicted[0] if predicted else None,
        predicted_name=predicted[1] if predicted else None,
        lens_nats=lens_nats,
        free_space_nats=fs_nats,
    )


@dataclass(frozen=True, eq=False)
class GainCurve:
    """Sampled lens and free-space capacities with their ratio along a photon sweep."""

    photon_totals: np.ndarray
    lens_nats: np.ndarray
    free_space_nats: np.ndarray
    gain: np.ndarray
    regime_pair: str
    method: str
    lens_converged: bool
    free_space_converged: bool
    closed_form_name: str | None = None
    closed_form_gain: np.ndarray | None = None


def _closed_form_for_pair(
    geom: OpticalGeometry,
    totals: np.ndarray,
    lens_regime: Regime,
    fs_regime: Regime,
) -> tuple[str | None, np.ndarray | None]:
    if lens_regime == Regime.FARFIELD and fs_regime == Regime.FARFIELD:
        name = "farfield"
        values = [farfield_gain(geom, float(n), check=False) for n in totals]
    elif lens_regime == Regime.NEARFIELD and fs_regime == Regime.NEARFIELD:
        name = "nearfield"
        values = [nearfield_gain(geom, float(n), check=False) for n in totals]
    elif lens_regime == Regime.NEARFIELD and fs_regime == Regime.FARFIELD:
        name = "mixed"
        values = [mixed_gain(geom, float(n), check=False) for n in totals]
    else:
        return None, None
    return name, np.array(values)


def compare_numerical(
    geom: OpticalGeometry,
    photon_totals: Sequence[float] | np.ndarray,
    *,
    thermal: float = 0.0,
    initial_order: int = 8,
    rtol: float = 1e-4,
    max_order: int = 48,
    farfield_max: float = FARFIELD_MAX_DEFAULT,
    nearfield_min: float = NEARFIELD_MIN_DEFAULT,
    force_closed_form: bool = False,
) -> GainCurve:
    """Numerical gain curve: converged spectra + water-filling on both scenarios.

    The closed-form gain column is attached when the regime pairing admits
    one (or unconditionally under ``force_closed_form``); unconverged
    spectra flag the curve rather than failing it.
    """
    totals = np.asarray(photon_totals, dtype=float)
    lens_spectrum = scenario_spectrum(
        KernelSpec(Scenario.LENS, geom),
        initial_order=initial_order,
        rtol=rtol,
        max_order=max_order,
    )
    fs_spectrum = scenario_spectrum(
        KernelSpec(Scenario.FREE_SPACE, geom),
        initial_order=initial_order,
        rtol=rtol,
        max_order=max_order,
    )

    lens_nats = np.empty(totals.size)
    fs_nats = np.empty(totals.size)
    for idx, n in enumerate(totals):
        budget = PhotonBudget(total=float(n), thermal=thermal)
        lens_nats[idx] = capacity_of(
            water_fill(lens_spectrum, budget), lens_spectrum, thermal
        ).total_nats
        fs_nats[idx] = capacity_of(
            water_fill(fs_spectrum, budget), fs_spectrum, thermal
        ).total_nats
    with np.errstate(divide="ignore", invalid="ignore"):
        gain = np.where(fs_nats > 0.0, lens_nats / fs_nats, np.nan)

    lens_regime, fs_regime, _, _ = _regime_pair(geom, farfield_max, nearfield_min)
    name, closed = _closed_form_for_pair(geom, totals, lens_regime, fs_regime)
    if name is None and force_closed_form:
        # Nearest pairing by whether each Fresnel number exceeds 1.
        ff = lambda f: Regime.FARFIELD if f <= 1.0 else Regime.NEARFIELD
        name, closed = _closed_form_for_pair(
            geom,
            totals,
            ff(lens_fresnel_number(geom)),
            ff(free_space_fresnel_number(geom)),
        )
        name = f"{name}(forced)" if name else None
    return GainCurve(
        photon_totals=totals,
        lens_nats=lens_nats,
        free_space_nats=fs_nats,
        gain=gain,
        regime_pair=f"{lens_regime.value}/{fs_regime.value}",
        method="numerical",
        lens_converged=lens_spectrum.converged,
        free_space_converged=fs_spectrum.converged,
        closed_form_name=name,
        closed_form_gain=closed,
    )


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_gain_csv(curve: GainCurve, path: str | Path) -> None:
    """Write ``N,C_lens_nats,C_fs_nats,gain,method,converged`` rows (+ closed form)."""
    path = Path(path)
    converged = "true" if (curve.lens_converged and curve.free_space_converged) else "false"
    header = "N,C_lens_nats,C_fs_nats,gain,method,converged"
    with_closed = curve.closed_form_gain is not None
    if with_closed:
        header += ",closed_form,gain_closed"
    lines = [header]
    for i in range(curve.photon_totals.size):
        row = (
            f"{_fmt(float(curve.photon_totals[i]))},{_fmt(float(curve.lens_nats[i]))},"
            f"{_fmt(float(curve.free_space_nats[i]))},{_fmt(float(curve.gain[i]))},"
            f"{curve.method},{converged}"
        )
        if with_closed:
            row += f",{curve.closed_form_name},{_fmt(float(curve.closed_form_gain[i]))}"
        lines.append(row)
    path.write_text("\n".join(lines) + "\n")


@dataclass(frozen=True)
class ScreenReport:
    """Numerical screen-negligibility analysis of the hole scenario.

    Farfield geometries compare top transmissivities against the stage
    product bound and the direct free-space loss; nearfield geometries
    compare threshold mode counts against the stage minimum.  The
    ``screen_negligible`` flag uses the 0.9 hole/free-space ratio as the
    reporting convention, and ``prediction_consistent`` records whether a
    negligible screen indeed came with the corresponding ratio >= 1.
    """

    fresnel: float
    fresnel_fs: float
    lens_regime: str
    loss_ratio: float  # r1
    mode_ratio: float  # r2
    hole_top: float
    stage_tops: tuple[float, float]
    stage_product_bound: float
    free_space_top: float
    hole_modes: int
    stage_modes: tuple[int, int]
    free_space_modes: int
    eta_bound_ok: bool
    mode_bound_ok: bool
    screen_negligible: bool
    prediction_consistent: bool


def screen_negligibility(
    geom: OpticalGeometry,
    *,
    initial_order: int = 8,
    rtol: float = 1e-3,
    max_order: int = 32,
    pupil_order: int = 16,
    farfield_max: float = FARFIELD_MAX_DEFAULT,
    nearfield_min: float = NEARFIELD_MIN_DEFAULT,
) -> ScreenReport:
    """Compare the hole channel against its stage bounds and direct free space."""
    fresnel = lens_fresnel_number(geom)
    fresnel_fs = free_space_fresnel_number(geom)
    lens_regime = classify_regime(fresnel, farfield_max, nearfield_min).regime

    hole_spec = KernelSpec(Scenario.HOLE, geom, pupil_order=pupil_order)
    hole = scenario_spectrum(
        hole_spec, initial_order=initial_order, rtol=rtol, max_order=max_order
    )
    fs = scenario_spectrum(
        KernelSpec(Scenario.FREE_SPACE, geom),
        initial_order=initial_order,
        rtol=rtol,
        max_order=max_order,
    )

    stage1_fn, stage2_fn = hole_stage_kernels(hole_spec)
    tracked = max(10, math.ceil(2.0 * fresnel))
    pupil = Domain("disk", geom.pupil_radius)

    def stage_assembler(stage_fn, inward: bool):
        def assemble_at(order: int):
            square = build_grid(stage_fn.domain_in if inward else stage_fn.domain_out, order)
            disk = build_grid(pupil, max(pupil_order, order))
            if inward:
                return assemble(stage_fn, square, disk)
            return assemble(stage_fn, disk, square)

        return assemble_at

    stage1 = converge_spectrum(
        stage_assembler(stage1_fn, inward=True),
        tracked=tracked,
        initial_order=initial_order,
        rtol=rtol,
        max_order=max_order,
    )
    stage2 = converge_spectrum(
        stage_assembler(stage2_fn, inward=False),
        tracked=tracked,
        initial_order=initial_order,
        rtol=rtol,
        max_order=max_order,
    )

    hole_top = float(hole.eta[0])
    tops = (float(stage1.eta[0]), float(stage2.eta[0]))
    bound = tops[0] * tops[1]
    fs_top = float(fs.eta[0])
    counts = (stage1.nu_threshold, stage2.nu_threshold)

    # "Negligible screen" means the hole channel looks like direct free space;
    # a hole can also exceed free space (zone-plate focusing), which is not that.
    if lens_regime == Regime.NEARFIELD:
        negligible = (
            fs.nu_threshold > 0
            and hole.nu_threshold >= 0.9 * fs.nu_threshold
            and hole.nu_threshold <= fs.nu_threshold + 1
        )
        prediction = nearfield_mode_ratio(geom) >= 1.0
    else:
        negligible = fs_top > 0.0 and 0.9 <= hole_top / fs_top <= 1.0 / 0.9
        prediction = farfield_loss_ratio(geom) >= 1.0

    return ScreenReport(
        fresnel=fresnel,
        fresnel_fs=fresnel_fs,
        lens_regime=lens_regime.value,
        loss_ratio=farfield_loss_ratio(geom),
        mode_ratio=nearfield_mode_ratio(geom),
        hole_top=hole_top,
        stage_tops=tops,
        stage_product_bound=bound,
        free_space_top=fs_top,
        hole_modes=hole.nu_threshold,
        stage_modes=counts,
        free_space_modes=fs.nu_threshold,
        eta_bound_ok=hole_top <= 1.05 * bound,
        mode_bound_ok=hole.nu_threshold <= min(counts) + 1,
        screen_negligible=negligible,
        prediction_consistent=(not negligible) or prediction,
    )
