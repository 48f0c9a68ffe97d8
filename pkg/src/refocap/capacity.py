"""Capacity of parallel lossy bosonic modes under a total photon budget.

The per-mode rate with mean signal s and thermal floor t is
bosonic_entropy(s + t) - bosonic_entropy(t).  With nu identical modes of
transmissivity eta and an equal split of N photons this gives the closed
form nu * g(eta N / nu) (pure loss) and its thermal generalization.  For
an arbitrary spectrum the optimal split solves the KKT condition

    eta_k * ln(1 + 1/(eta_k n_k + t)) = mu        (active modes)

for a common multiplier mu, found here by bracketed root-finding on the
strictly decreasing map mu -> sum_k n_k(mu).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.optimize import brentq

from .errors import ConfigError, NoChannelError, NumericalError
from .mathfn import bosonic_entropy, bosonic_entropy_increment
from .spectra import ModeSpectrum

# Modes below this transmissivity would overflow exp(mu/eta); their possible
# contribution is bounded by g(eta*N) and reported instead of allocated.
ETA_ALLOCATION_FLOOR = 1e-30

_BUDGET_RTOL = 1e-9


@dataclass(frozen=True)
class PhotonBudget:
    """Total mean photon number plus the thermal photon floor per mode."""

    total: float
    thermal: float = 0.0

    def __post_init__(self) -> None:
        if not (math.isfinite(self.total) and self.total >= 0.0):
            raise ConfigError(f"budget.total: must be finite and >= 0, got {self.total!r}")
        if not (math.isfinite(self.thermal) and self.thermal >= 0.0):
            raise ConfigError(f"budget.thermal: must be finite and >= 0, got {self.thermal!r}")


@dataclass(frozen=True, eq=False)
class Allocation:
    """Per-mode mean photon numbers plus the optimizer's state at the optimum."""

    photons: np.ndarray
    multiplier: float
    active_count: int
    truncation_bound_nats: float = 0.0

    def __post_init__(self) -> None:
        photons = np.asarray(self.photons, dtype=float)
        if photons.ndim != 1 or np.any(photons < 0.0):
            raise ConfigError("allocation: photons must be a 1-d nonnegative array")
        object.__setattr__(self, "photons", photons)

    @property
    def total(self) -> float:
        return float(self.photons.sum())


@dataclass(frozen=True, eq=False)
class CapacityReport:
    """Total capacity with its per-mode breakdown and provenance tags."""

    total_nats: float
    contributions: np.ndarray
    allocation: Allocation
    spectrum: ModeSpectrum
    method: str  # "equal" or "waterfill"
    noise: str  # "pure-loss" or "thermal"

    @property
    def total_bits(self) -> float:
        return self.total_nats / math.log(2.0)


def capacity_equal(eta: float, nu: float, total: float) -> float:
    """Equal-split capacity nu * g(eta * N / nu) in nats.

    ``nu`` is treated as a real mode count, matching the closed-form use
    where the nearfield count is a continuous Fresnel number.
    """
    if not (0.0 <= eta <= 1.0):
        raise ValueError(f"transmissivity must lie in [0, 1], got {eta!r}")
    if not (math.isfinite(nu) and nu > 0.0):
        raise ValueError(f"mode count must be positive, got {nu!r}")
    if not (math.isfinite(total) and total >= 0.0):
        raise ValueError(f"photon number must be finite and >= 0, got {total!r}")
    return nu * bosonic_entropy(eta * total / nu)


def capacity_thermal(eta: float, nu: float, total: float, thermal: float) -> float:
    """Equal-split capacity with a thermal floor: nu * (g(eta N/nu + t) - g(t)).

    Reduces exactly to ``capacity_equal`` at thermal = 0.
    """
    if not (0.0 <= eta <= 1.0):
        raise ValueError(f"transmissivity must lie in [0, 1], got {eta!r}")
    if not (math.isfinite(nu) and nu > 0.0):
        raise ValueError(f"mode count must be positive, got {nu!r}")
    if not (math.isfinite(total) and total >= 0.0):
        raise ValueError(f"photon number must be finite and >= 0, got {total!r}")
    return nu * bosonic_entropy_increment(eta * total / nu, thermal)


def _photons_at(mu: float, eta: np.ndarray, thermal: float) -> np.ndarray:
    """KKT photon loads n_k(mu) for transmissivities eta; zero below threshold."""
    with np.errstate(over="ignore"):
        growth = np.expm1(mu / eta)  # inf for far-below-threshold modes is fine
    if thermal == 0.0:
        with np.errstate(divide="ignore"):
            n = 1.0 / (eta * growth)
        return np.where(np.isfinite(n), n, 0.0)
    n = (1.0 / growth - thermal) / eta
    return np.clip(np.where(np.isfinite(n), n, 0.0), 0.0, None)


def water_fill(spectrum: ModeSpectrum, budget: PhotonBudget) -> Allocation:
    """Optimal photon split across the spectrum's modes.

    Pure loss: every mode with eta > 0 is active (the marginal rate diverges
    at zero load) and n_k = 1/(eta_k (exp(mu/eta_k) - 1)).  Thermal: modes
    whose zero-load marginal eta_k ln(1 + 1/t) falls below mu stay empty.
    The multiplier is bracketed around the single-mode scale and refined
    until the budget matches to 1e-9 * max(N, 1).
    """
    eta = spectrum.eta
    usable = eta >= ETA_ALLOCATION_FLOOR
    if not np.any(eta > 0.0):
        raise NoChannelError("every mode has zero transmissivity")
    total = budget.total
    thermal = budget.thermal

    truncated = (~usable) & (eta > 0.0)
    truncation_bound = float(
        sum(bosonic_entropy(float(e) * total) for e in eta[truncated])
    )

    n = np.zeros(len(eta))
    if total == 0.0:
        return Allocation(
            photons=n,
            multiplier=math.inf,
            active_count=0,
            truncation_bound_nats=truncation_bound,
        )

    live = eta[usable]
    eta_max = float(live.max())
    mu_scale = eta_max * math.log1p(1.0 / (eta_max * total))

    def excess(log_mu: float) -> float:
        return float(_photons_at(math.exp(log_mu), live, thermal).sum()) - total

    lo = math.log(mu_scale) + math.log(1e-3)
    hi = math.log(mu_scale) + math.log(1e3)
    for _ in range(200):
        if excess(lo) > 0.0:
            break
        lo -= math.log(10.0)
    else:
        raise NumericalError(
            f"could not bracket the multiplier from below (log mu = {lo:.3f})"
        )
    for _ in range(200):
        if excess(hi) < 0.0:
            break
        hi += math.log(10.0)
    else:
        raise NumericalError(
            f"could not bracket the multiplier from above (log mu = {hi:.3f})"
        )

    log_mu = brentq(excess, lo, hi, xtol=1e-300, rtol=8.9e-16, maxiter=300)
    mu = math.exp(log_mu)
    loads = _photons_at(mu, live, thermal)
    residual = abs(float(loads.sum()) - total)
    if residual > _BUDGET_RTOL * max(total, 1.0):
        raise NumericalError(
            f"budget residual {residual:.3e} after root-finding "
            f"(bracket log mu in [{lo:.3f}, {hi:.3f}])"
        )
    n[usable] = loads
    return Allocation(
        photons=n,
        multiplier=mu,
        active_count=int(np.count_nonzero(loads > 0.0)),
        truncation_bound_nats=truncation_bound,
    )


def capacity_of(
    allocation: Allocation,
    spectrum: ModeSpectrum,
    thermal: float = 0.0,
    method: str = "waterfill",
) -> CapacityReport:
    """Sum per-mode rates g(eta_k n_k + t) - g(t) for a given allocation."""
    if allocation.photons.shape != spectrum.eta.shape:
        raise ConfigError(
            f"allocation length {allocation.photons.shape[0]} does not match "
            f"spectrum length {len(spectrum)}"
        )
    contributions = np.array(
        [
            bosonic_entropy_increment(float(e * load), thermal)
            for e, load in zip(spectrum.eta, allocation.photons)
        ]
    )
    return CapacityReport(
        total_nats=float(contributions.sum()),
        contributions=contributions,
        allocation=allocation,
        spectrum=spectrum,
        method=method,
        noise="thermal" if thermal > 0.0 else "pure-loss",
    )


def uniform_allocation(spectrum: ModeSpectrum, budget: PhotonBudget) -> Allocation:
    """Equal split of the budget over all modes (the closed-form baseline)."""
    count = len(spectrum)
    n = np.full(count, budget.total / count)
    return Allocation(photons=n, multiplier=math.nan, active_count=count)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_capacity_csv(
    report: CapacityReport, path: str | Path, extra_summary: dict | None = None
) -> None:
    """Write ``k,eta,n,contribution_nats`` rows plus a summary comment line."""
    path = Path(path)
    lines = ["k,eta,n,contribution_nats"]
    for k in range(len(report.spectrum)):
        lines.append(
            f"{k},{_fmt(float(report.spectrum.eta[k]))},"
            f"{_fmt(float(report.allocation.photons[k]))},"
            f"{_fmt(float(report.contributions[k]))}"
        )
    summary = {
        "total_nats": _fmt(report.total_nats),
        "total_bits": _fmt(report.total_bits),
        "mu": _fmt(report.allocation.multiplier),
        "active_modes": str(report.allocation.active_count),
        "method": report.method,
        "noise": report.noise,
    }
    if extra_summary:
        summary.update({k: str(v) for k, v in extra_summary.items()})
    lines.append("# " + " ".join(f"{k}={v}" for k, v in summary.items()))
    path.write_text("\n".join(lines) + "\n")
