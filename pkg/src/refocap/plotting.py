"""Figure rendering for the CLI report path.

Each report CSV gets a companion PNG next to it: mode spectra as stem-style
transmissivity plots, capacity reports as per-mode allocation/contribution
bars, and gain sweeps as capacity and gain curves over the photon budget.
Figures carry no timestamps so reruns stay reproducible.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .capacity import CapacityReport
from .scenarios import GainCurve
from .spectra import ModeSpectrum

_SAVE_OPTS = {"dpi": 150, "bbox_inches": "tight", "metadata": {"Software": "refocap"}}


def save_spectrum_plot(spectrum: ModeSpectrum, path: str | Path) -> Path:
    """Transmissivity per mode index, on a log scale once values span decades."""
    path = Path(path)
    eta = spectrum.eta[spectrum.eta > 0.0]
    k = np.arange(eta.size)
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(k, eta, "o-", ms=3, lw=1.0, color="C0")
    if eta.size and eta.min() < 1e-3 * eta.max():
        ax.set_yscale("log")
    ax.axhline(0.5, color="0.6", lw=0.8, ls="--")
    ax.set_xlabel("mode index $k$")
    ax.set_ylabel(r"transmissivity $\eta_k$")
    title = f"mode spectrum ({spectrum.scenario or 'channel'})"
    if not spectrum.converged:
        title += " [unconverged]"
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path


def save_capacity_plot(report: CapacityReport, path: str | Path) -> Path:
    """Photon allocation and per-mode capacity contribution, side by side."""
    path = Path(path)
    shown = min(len(report.spectrum), 40)
    k = np.arange(shown)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax1.bar(k, report.allocation.photons[:shown], color="C0")
    ax1.set_xlabel("mode index $k$")
    ax1.set_ylabel("photons $n_k$")
    ax1.set_title(f"allocation ({report.method})")
    ax2.bar(k, report.contributions[:shown], color="C1")
    ax2.set_xlabel("mode index $k$")
    ax2.set_ylabel("contribution (nats)")
    ax2.set_title(f"total {report.total_nats:.4g} nats ({report.noise})")
    for ax in (ax1, ax2):
        ax.grid(True, alpha=0.3, axis="y")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path


def save_gain_plot(curve: GainCurve, path: str | Path) -> Path:
    """Capacities of both scenarios and their ratio across the photon sweep."""
    path = Path(path)
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax1.loglog(curve.photon_totals, curve.lens_nats, "o-", ms=3, label="lens")
    ax1.loglog(curve.photon_totals, curve.free_space_nats, "s-", ms=3, label="free space")
    ax1.set_xlabel("total photons $N$")
    ax1.set_ylabel("capacity (nats)")
    ax1.legend()
    ax2.semilogx(curve.photon_totals, curve.gain, "o-", ms=3, label="numerical")
    if curve.closed_form_gain is not None:
        ax2.semilogx(
            curve.photon_totals,
            curve.closed_form_gain,
            "--",
            label=f"closed form ({curve.closed_form_name})",
        )
        ax2.legend()
    ax2.set_xlabel("total photons $N$")
    ax2.set_ylabel("gain $C_\\mathrm{lens}/C_\\mathrm{fs}$")
    ax2.set_title(curve.regime_pair)
    for ax in (ax1, ax2):
        ax.grid(True, alpha=0.3, which="both")
    fig.tight_layout()
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)
    return path
