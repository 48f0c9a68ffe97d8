"""Run configuration: a single JSON file with SI units throughout.

Schema (see README for a worked example):

    {
      "geometry": {"wavelength": ..., "object_distance": ...,
                   "pupil_radius": ..., "patch_side": ...,
                   one or more of "image_distance" | "focal_length" | "magnification"},
      "scenario": "lens" | "free_space" | "hole",
      "grid":     {"initial_order": 8, "max_order": 48, "rtol": 1e-4, "pupil_order": 16},
      "budget":   {"total": 1.0, "thermal": 0.0}
                  or {"sweep": {"min": ..., "max": ..., "points": ..., "log": true},
                      "thermal": 0.0},
      "regime":   {"farfield_max": 0.1, "nearfield_min": 10.0},
      "output":   {"path": "out.csv"}
    }

All blocks except "geometry" and "scenario" are optional and default as
shown.  Validation errors name the offending field.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .geometry import (
    FARFIELD_MAX_DEFAULT,
    NEARFIELD_MIN_DEFAULT,
    OpticalGeometry,
    Scenario,
    make_geometry,
)


@dataclass(frozen=True)
class GridConfig:
    initial_order: int = 8
    max_order: int = 48
    rtol: float = 1e-4
    pupil_order: int = 16


@dataclass(frozen=True)
class SweepConfig:
    minimum: float
    maximum: float
    points: int
    log: bool = True

    def values(self) -> np.ndarray:
        if self.log:
            return np.logspace(math.log10(self.minimum), math.log10(self.maximum), self.points)
        return np.linspace(self.minimum, self.maximum, self.points)


@dataclass(frozen=True)
class BudgetConfig:
    total: float | None = None
    sweep: SweepConfig | None = None
    thermal: float = 0.0


@dataclass(frozen=True)
class RunConfig:
    geometry: OpticalGeometry
    scenario: Scenario
    grid: GridConfig
    budget: BudgetConfig
    farfield_max: float
    nearfield_min: float
    output: str | None


def _number(block: dict, field: str, context: str, *, positive: bool = True) -> float:
    if field not in block:
        raise ConfigError(f"{context}.{field}: required field missing")
    value = block[field]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{context}.{field}: expected a number, got {value!r}")
    value = float(value)
    if not math.isfinite(value) or (positive and value <= 0.0):
        raise ConfigError(f"{context}.{field}: must be positive and finite, got {value!r}")
    return value


def _optional_number(
    block: dict, field: str, context: str, default: float, *, positive: bool = True
) -> float:
    if field not in block:
        return default
    return _number(block, field, context, positive=positive)


def _optional_int(block: dict, field: str, context: str, default: int) -> int:
    if field not in block:
        return default
    value = block[field]
    if not isinstance(value, int) or isinstance(value, bool):
        raise ConfigError(f"{context}.{field}: expected an integer, got {value!r}")
    return value


def parse_config(raw: dict) -> RunConfig:
    """Validate a parsed JSON tree into a RunConfig."""
    if not isinstance(raw, dict):
        raise ConfigError("config: top level must be a JSON object")

    geo = raw.get("geometry")
    if not isinstance(geo, dict):
        raise ConfigError("geometry: required block missing or not an object")
    optics = {}
    for field in ("image_distance", "focal_length", "magnification"):
        if field in geo:
            optics[field] = _number(geo, field, "geometry")
    if not optics:
        raise ConfigError(
            "geometry: provide at least one of image_distance, focal_length, magnification"
        )
    geometry = make_geometry(
        wavelength=_number(geo, "wavelength", "geometry"),
        object_distance=_number(geo, "object_distance", "geometry"),
        pupil_radius=_number(geo, "pupil_radius", "geometry"),
        patch_side=_number(geo, "patch_side", "geometry"),
        **optics,
    )

    scenario_raw = raw.get("scenario")
    try:
        scenario = Scenario(scenario_raw)
    except ValueError:
        raise ConfigError(
            f"scenario: expected one of 'lens', 'free_space', 'hole', got {scenario_raw!r}"
        ) from None

    grid_block = raw.get("grid", {})
    if not isinstance(grid_block, dict):
        raise ConfigError("grid: must be an object")
    grid = GridConfig(
        initial_order=_optional_int(grid_block, "initial_order", "grid", 8),
        max_order=_optional_int(grid_block, "max_order", "grid", 48),
        rtol=_optional_number(grid_block, "rtol", "grid", 1e-4),
        pupil_order=_optional_int(grid_block, "pupil_order", "grid", 16),
    )
    if grid.initial_order < 4:
        raise ConfigError(f"grid.initial_order: must be >= 4, got {grid.initial_order}")
    if grid.max_order < grid.initial_order:
        raise ConfigError("grid.max_order: must be >= grid.initial_order")

    budget_block = raw.get("budget", {})
    if not isinstance(budget_block, dict):
        raise ConfigError("budget: must be an object")
    sweep = None
    total = None
    if "sweep" in budget_block:
        sweep_block = budget_block["sweep"]
        if not isinstance(sweep_block, dict):
            raise ConfigError("budget.sweep: must be an object")
        points = _optional_int(sweep_block, "points", "budget.sweep", 0)
        if points < 2:
            raise ConfigError(f"budget.sweep.points: must be >= 2, got {points}")
        sweep = SweepConfig(
            minimum=_number(sweep_block, "min", "budget.sweep"),
            maximum=_number(sweep_block, "max", "budget.sweep"),
            points=points,
            log=bool(sweep_block.get("log", True)),
        )
        if not sweep.minimum < sweep.maximum:
            raise ConfigError(
                f"budget.sweep: min must be < max, got ({sweep.minimum!r}, {sweep.maximum!r})"
            )
    if "total" in budget_block:
        total = _number(budget_block, "total", "budget", positive=False)
        if total < 0.0:
            raise ConfigError(f"budget.total: must be >= 0, got {total!r}")
    budget = BudgetConfig(
        total=total,
        sweep=sweep,
        thermal=_optional_number(budget_block, "thermal", "budget", 0.0, positive=False),
    )
    if budget.thermal < 0.0:
        raise ConfigError(f"budget.thermal: must be >= 0, got {budget.thermal!r}")

    regime_block = raw.get("regime", {})
    if not isinstance(regime_block, dict):
        raise ConfigError("regime: must be an object")
    farfield_max = _optional_number(
        regime_block, "farfield_max", "regime", FARFIELD_MAX_DEFAULT
    )
    nearfield_min = _optional_number(
        regime_block, "nearfield_min", "regime", NEARFIELD_MIN_DEFAULT
    )
    if not farfield_max < nearfield_min:
        raise ConfigError(
            f"regime: farfield_max must be < nearfield_min, got "
            f"({farfield_max!r}, {nearfield_min!r})"
        )

    output_block = raw.get("output", {})
    if not isinstance(output_block, dict):
        raise ConfigError("output: must be an object")
    output = output_block.get("path")
    if output is not None and not isinstance(output, str):
        raise ConfigError(f"output.path: expected a string, got {output!r}")

    return RunConfig(
        geometry=geometry,
        scenario=scenario,
        grid=grid,
        budget=budget,
        farfield_max=farfield_max,
        nearfield_min=nearfield_min,
        output=output,
    )


def load_config(path: str | Path) -> RunConfig:
    """Read and validate a JSON configuration file."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"config file {path}: {exc}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path}: invalid JSON ({exc})") from exc
    return parse_config(raw)
