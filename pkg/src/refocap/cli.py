"""Command-line front end.

Subcommands:

  * ``classify`` -- Fresnel numbers, ratios, and regime labels for a geometry.
  * ``spectrum`` -- converged mode spectrum to CSV (+ JSON sidecar, + PNG).
  * ``capacity`` -- water-filled capacity report to CSV (+ PNG).
  * ``compare``  -- lens vs free-space gain sweep to CSV (+ PNG).

Exit codes: 0 success, 2 configuration error, 3 spectrum unconverged (files
are still written), 4 numerical failure.  Identical configurations produce
byte-identical CSV output.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import plotting
from .capacity import (
    PhotonBudget,
    capacity_of,
    capacity_thermal,
    water_fill,
    write_capacity_csv,
)
from .config import RunConfig, load_config
from .errors import ConfigError, NumericalError, RefocapError, RegimeError
from .geometry import (
    Regime,
    Scenario,
    check_mixed_regime,
    classify_regime,
    farfield_loss_ratio,
    free_space_fresnel_number,
    lens_fresnel_number,
    nearfield_mode_ratio,
    rayleigh_length,
)
from .kernels import KernelSpec, scenario_spectrum
from .scenarios import compare_numerical, write_gain_csv
from .spectra import read_spectrum_csv, write_spectrum_csv

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_UNCONVERGED = 3
EXIT_NUMERICAL = 4


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _geometry_meta(config: RunConfig) -> dict:
    g = config.geometry
    return {
        "wavelength": g.wavelength,
        "object_distance": g.object_distance,
        "image_distance": g.image_distance,
        "focal_length": g.focal_length,
        "magnification": g.magnification,
        "pupil_radius": g.pupil_radius,
        "patch_side": g.patch_side,
    }


def _out_path(config: RunConfig, args) -> Path:
    if args.out is not None:
        return Path(args.out)
    if config.output is not None:
        return Path(config.output)
    raise ConfigError("output.path: no output file given (use --out or the config block)")


def _mirror_json(path: Path, rows: list[dict]) -> None:
    path.with_suffix(".json").write_text(json.dumps(rows, indent=2) + "\n")


def _csv_rows_as_dicts(path: Path) -> list[dict]:
    lines = [ln for ln in path.read_text().splitlines() if ln and not ln.startswith("#")]
    header = lines[0].split(",")
    return [dict(zip(header, ln.split(","))) for ln in lines[1:]]


def cmd_classify(config: RunConfig, args) -> int:
    geom = config.geometry
    fresnel = lens_fresnel_number(geom)
    fresnel_fs = free_space_fresnel_number(geom)
    lens_label = classify_regime(fresnel, config.farfield_max, config.nearfield_min)
    fs_label = classify_regime(fresnel_fs, config.farfield_max, config.nearfield_min)
    window = check_mixed_regime(geom)
    report = {
        "fresnel_lens": fresnel,
        "fresnel_free_space": fresnel_fs,
        "rayleigh_length_m": rayleigh_length(geom),
        "farfield_loss_ratio_r1": farfield_loss_ratio(geom),
        "nearfield_mode_ratio_r2": nearfield_mode_ratio(geom),
        "lens_regime": lens_label.regime.value,
        "free_space_regime": fs_label.regime.value,
        "mixed_regime_window": window.ok,
        "mixed_window_slack_low": window.slack_low,
        "mixed_window_slack_high": window.slack_high,
    }
    if args.json:
        print(json.dumps(report, indent=2))
    else:
        for key, value in report.items():
            print(f"{key} = {_fmt(value) if isinstance(value, float) else value}")
    return EXIT_OK


def _spectrum_for(config: RunConfig, args):
    initial = args.grid_order if args.grid_order is not None else config.grid.initial_order
    spec = KernelSpec(
        config.scenario, config.geometry, pupil_order=config.grid.pupil_order
    )
    return scenario_spectrum(
        spec,
        initial_order=initial,
        rtol=config.grid.rtol,
        max_order=max(config.grid.max_order, initial),
    )


def cmd_spectrum(config: RunConfig, args) -> int:
    out = _out_path(config, args)
    spectrum = _spectrum_for(config, args)
    meta = {
        "geometry": _geometry_meta(config),
        "rtol": config.grid.rtol,
        "pupil_order": config.grid.pupil_order,
        "seed": args.seed,
    }
    write_spectrum_csv(spectrum, out, metadata=meta)
    if args.json:
        _mirror_json(out, _csv_rows_as_dicts(out))
    if not args.no_plot:
        plotting.save_spectrum_plot(spectrum, out.with_suffix(".png"))
    if not spectrum.converged:
        print(f"warning: spectrum not converged at max order; wrote {out}", file=sys.stderr)
        return EXIT_UNCONVERGED
    print(f"wrote {out}")
    return EXIT_OK


def _closed_form_capacity(config: RunConfig, total: float) -> float | None:
    """Equal-split closed form for the configured scenario, when its regime permits."""
    geom = config.geometry
    if config.scenario == Scenario.LENS:
        fresnel = lens_fresnel_number(geom)
        farfield_eta = fresnel**2
    elif config.scenario == Scenario.FREE_SPACE:
        fresnel = free_space_fresnel_number(geom)
        farfield_eta = fresnel
    else:
        return None
    regime = classify_regime(fresnel, config.farfield_max, config.nearfield_min).regime
    if regime == Regime.FARFIELD:
        eta, nu = farfield_eta, 1.0
    elif regime == Regime.NEARFIELD:
        eta, nu = 1.0, fresnel
    else:
        return None
    return capacity_thermal(eta, nu, total, config.budget.thermal)


def cmd_capacity(config: RunConfig, args) -> int:
    out = _out_path(config, args)
    if config.budget.total is None:
        raise ConfigError("budget.total: required for the capacity command")
    unconverged = False
    if args.spectrum is not None:
        spectrum = read_spectrum_csv(args.spectrum)
    else:
        spectrum = _spectrum_for(config, args)
        unconverged = not spectrum.converged
    budget = PhotonBudget(total=config.budget.total, thermal=config.budget.thermal)
    allocation = water_fill(spectrum, budget)
    report = capacity_of(allocation, spectrum, thermal=budget.thermal)
    extra = {"N": _fmt(budget.total), "N_thermal": _fmt(budget.thermal)}
    closed = _closed_form_capacity(config, budget.total)
    if closed is not None:
        extra["closed_form_nats"] = _fmt(closed)
    write_capacity_csv(report, out, extra_summary=extra)
    if args.json:
        _mirror_json(out, _csv_rows_as_dicts(out))
    if not args.no_plot:
        plotting.save_capacity_plot(report, out.with_suffix(".png"))
    if unconverged:
        print(f"warning: spectrum not converged at max order; wrote {out}", file=sys.stderr)
        return EXIT_UNCONVERGED
    print(f"wrote {out}")
    return EXIT_OK


def cmd_compare(config: RunConfig, args) -> int:
    out = _out_path(config, args)
    if config.budget.sweep is None:
        raise ConfigError("budget.sweep: required for the compare command")
    totals = config.budget.sweep.values()
    initial = args.grid_order if args.grid_order is not None else config.grid.initial_order
    curve = compare_numerical(
        config.geometry,
        totals,
        thermal=config.budget.thermal,
        initial_order=initial,
        rtol=config.grid.rtol,
        max_order=max(config.grid.max_order, initial),
        farfield_max=config.farfield_max,
        nearfield_min=config.nearfield_min,
        force_closed_form=args.force,
    )
    write_gain_csv(curve, out)
    if args.json:
        _mirror_json(out, _csv_rows_as_dicts(out))
    if not args.no_plot:
        plotting.save_gain_plot(curve, out.with_suffix(".png"))
    if not (curve.lens_converged and curve.free_space_converged):
        print(f"warning: spectra not converged at max order; wrote {out}", file=sys.stderr)
        return EXIT_UNCONVERGED
    print(f"wrote {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="refocap",
        description=(
            "Capacity of diffraction-limited optical channels. All configuration "
            "values are SI (meters); capacities are reported in nats (and bits)."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, handler, needs_out in (
        ("classify", cmd_classify, False),
        ("spectrum", cmd_spectrum, True),
        ("capacity", cmd_capacity, True),
        ("compare", cmd_compare, True),
    ):
        p = sub.add_parser(name)
        p.add_argument("--config", required=True, help="path to the JSON run configuration")
        p.add_argument("--json", action="store_true", help="mirror tabular output as JSON")
        p.add_argument(
            "--seed",
            type=int,
            default=0,
            help="seed for randomized test utilities; never affects results",
        )
        if needs_out:
            p.add_argument("--out", help="output CSV path (overrides output.path)")
            p.add_argument(
                "--grid-order", type=int, default=None, help="override the initial grid order"
            )
            p.add_argument(
                "--no-plot", action="store_true", help="skip the companion PNG figure"
            )
        if name in ("capacity",):
            p.add_argument(
                "--spectrum", default=None, help="ingest an existing k,sigma,eta CSV"
            )
        if name in ("compare",):
            p.add_argument(
                "--force",
                action="store_true",
                help="attach the nearest closed-form gain even outside its regime",
            )
        p.set_defaults(handler=handler)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        return args.handler(config, args)
    except (ConfigError, RegimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except RefocapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def entry_point() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entry_point()
