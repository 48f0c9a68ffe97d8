"""Quadrature grids, sampled transfer matrices, and mode spectra.

A propagation kernel K(r_out, r_in) is discretized by the symmetrized
Nystrom rule

    K~[j, i] = sqrt(w_j) * K(r_j, r_i) * sqrt(w_i)

so that the singular values of the matrix converge to the singular values
of the underlying integral operator.  Squared singular values are the
per-mode transmissivities of the channel; they are clamped to [0, 1] with
a small roundoff allowance, and anything beyond that allowance is treated
as evidence of a mis-scaled kernel rather than forgiven.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Protocol, Sequence

import numpy as np

from .errors import ConfigError, NumericalError, PhysicalityError

# Transmissivities may exceed 1 by at most this before clamping is refused.
OVERSHOOT_TOL = 1e-6
# Modes below this transmissivity are dropped from CSV export.
EXPORT_FLOOR = 1e-30
# Below this, spectrum convergence is judged in absolute rather than relative terms.
ABS_COMPARE_FLOOR = 1e-12

MIN_GRID_ORDER = 4


@dataclass(frozen=True)
class Domain:
    """Integration domain on a transverse plane: a centered square or a disk."""

    kind: str  # "square" or "disk"
    size: float  # full side length for squares, radius for disks

    def __post_init__(self) -> None:
        if self.kind not in ("square", "disk"):
            raise ConfigError(f"domain.kind: expected 'square' or 'disk', got {self.kind!r}")
        if not (math.isfinite(self.size) and self.size > 0.0):
            raise ConfigError(f"domain.size: must be positive and finite, got {self.size!r}")

    @property
    def area(self) -> float:
        if self.kind == "square":
            return self.size * self.size
        return math.pi * self.size * self.size


@dataclass(frozen=True, eq=False)
class QuadratureGrid:
    """Nodes and positive weights integrating functions over a Domain.

    Weights carry units of area (m^2) so that kernels with dimension 1/m^2
    produce dimensionless singular values.
    """

    nodes: np.ndarray  # (n, 2) point coordinates in meters
    weights: np.ndarray  # (n,) positive weights in m^2
    domain: Domain
    order: int

    def __post_init__(self) -> None:
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if nodes.ndim != 2 or nodes.shape[1] != 2 or weights.shape != (nodes.shape[0],):
            raise ConfigError("quadrature grid: nodes must be (n, 2) with matching weights")
        if not np.all(weights > 0.0):
            raise ConfigError("quadrature grid: all weights must be positive")
        total = float(weights.sum())
        if abs(total - self.domain.area) > 1e-10 * self.domain.area:
            raise ConfigError(
                f"quadrature grid: weights sum to {total!r}, expected area {self.domain.area!r}"
            )
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return self.nodes.shape[0]


def grids_equal(a: QuadratureGrid, b: QuadratureGrid) -> bool:
    """True when two grids share the same domain, nodes, and weights."""
    return (
        a.domain == b.domain
        and a.nodes.shape == b.nodes.shape
        and np.array_equal(a.nodes, b.nodes)
        and np.array_equal(a.weights, b.weights)
    )


def build_grid(domain: Domain, order: int) -> QuadratureGrid:
    """Build a quadrature grid of the given order over a square or disk.

    Squares use a tensor Gauss-Legendre rule with ``order`` nodes per axis.
    Disks use Gauss-Legendre in radius (with the polar Jacobian folded into
    the weights) tensored with a uniform periodic rule in angle, which keeps
    the circular boundary exact instead of staircasing it.
    """
    if order < MIN_GRID_ORDER:
        raise ConfigError(f"grid order must be >= {MIN_GRID_ORDER}, got {order}")
    xi, wi = np.polynomial.legendre.leggauss(order)
    if domain.kind == "square":
        half = domain.size / 2.0
        x = half * xi
        w = half * wi
        xx, yy = np.meshgrid(x, x, indexing="ij")
        ww = np.outer(w, w)
        nodes = np.column_stack([xx.ravel(), yy.ravel()])
        weights = ww.ravel()
    else:
        radius = domain.size
        r = radius * (xi + 1.0) / 2.0
        wr = (radius / 2.0) * wi * r  # polar Jacobian
        n_theta = 2 * order + 1
        theta = 2.0 * np.pi * np.arange(n_theta) / n_theta
        w_theta = 2.0 * np.pi / n_theta
        rr, tt = np.meshgrid(r, theta, indexing="ij")
        nodes = np.column_stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()])
        weights = np.repeat(wr, n_theta) * w_theta
    return QuadratureGrid(nodes=nodes, weights=weights, domain=domain, order=order)


class KernelFunction(Protocol):
    """A propagation kernel with declared endpoint domains.

    Calling convention: ``fn(r_out, r_in)`` with broadcastable arrays of
    shape (..., 2), returning the complex (or real) amplitude per point pair.
    """

    domain_in: Domain
    domain_out: Domain

    def __call__(self, r_out: np.ndarray, r_in: np.ndarray) -> np.ndarray: ...


@dataclass(frozen=True)
class _WrappedKernel:
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray]
    domain_in: Domain
    domain_out: Domain

    def __call__(self, r_out: np.ndarray, r_in: np.ndarray) -> np.ndarray:
        return self.fn(r_out, r_in)


def as_kernel(
    fn: Callable[[np.ndarray, np.ndarray], np.ndarray],
    domain_in: Domain,
    domain_out: Domain,
) -> KernelFunction:
    """Attach endpoint domains to a bare kernel callable."""
    return _WrappedKernel(fn=fn, domain_in=domain_in, domain_out=domain_out)


@dataclass(frozen=True, eq=False)
class SampledKernel:
    """Symmetrized transfer matrix together with the grids that produced it."""

    matrix: np.ndarray  # (out_nodes, in_nodes)
    grid_in: QuadratureGrid
    grid_out: QuadratureGrid
    scenario: str | None = None

    def __post_init__(self) -> None:
        m = np.asarray(self.matrix)
        if m.shape != (len(self.grid_out), len(self.grid_in)):
            raise ConfigError(
                f"sampled kernel: matrix shape {m.shape} does not match grids "
                f"({len(self.grid_out)}, {len(self.grid_in)})"
            )
        if not np.all(np.isfinite(m.real)) or (
            np.iscomplexobj(m) and not np.all(np.isfinite(m.imag))
        ):
            raise NumericalError("sampled kernel: non-finite matrix entries")
        object.__setattr__(self, "matrix", m)


def assemble(
    kernel: KernelFunction,
    grid_in: QuadratureGrid,
    grid_out: QuadratureGrid,
    scenario: str | None = None,
) -> SampledKernel:
    """Sample a kernel on a grid pair with sqrt-weight symmetrization."""
    if kernel.domain_in != grid_in.domain:
        raise ConfigError(
            f"assemble: kernel input domain {kernel.domain_in} != grid domain {grid_in.domain}"
        )
    if kernel.domain_out != grid_out.domain:
        raise ConfigError(
            f"assemble: kernel output domain {kernel.domain_out} != grid domain {grid_out.domain}"
        )
    values = kernel(grid_out.nodes[:, None, :], grid_in.nodes[None, :, :])
    matrix = np.sqrt(grid_out.weights)[:, None] * values * np.sqrt(grid_in.weights)[None, :]
    return SampledKernel(matrix=matrix, grid_in=grid_in, grid_out=grid_out, scenario=scenario)


def compose_spectra_matrix(
    stage1: SampledKernel, pupil_grid: QuadratureGrid, stage2: SampledKernel
) -> SampledKernel:
    """Two-stage composition through a shared pupil grid.

    Because each stage already carries sqrt(w) factors on the pupil side,
    the plain matrix product realizes the quadrature-weighted operator
    composition K2 * W * K1.
    """
    if not grids_equal(stage1.grid_out, pupil_grid):
        raise ConfigError("compose: stage1 output grid does not match the pupil grid")
    if not grids_equal(stage2.grid_in, pupil_grid):
        raise ConfigError("compose: stage2 input grid does not match the pupil grid")
    return SampledKernel(
        matrix=stage2.matrix @ stage1.matrix,
        grid_in=stage1.grid_in,
        grid_out=stage2.grid_out,
        scenario="hole",
    )


@dataclass(frozen=True, eq=False)
class ModeSpectrum:
    """Descending per-mode transmissivities; the channel's identity.

    ``eta`` holds clamped values in [0, 1]; ``sigma`` the raw singular
    values.  ``nu_asymptotic`` carries the unrounded closed-form mode count
    when the spectrum came from an asymptotic formula rather than an SVD.
    """

    eta: np.ndarray
    sigma: np.ndarray
    grid_orders: tuple[int, ...] | None = None
    converged: bool = True
    clamped_count: int = 0
    max_overshoot: float = 0.0
    scenario: str | None = None
    nu_asymptotic: float | None = None

    def __post_init__(self) -> None:
        eta = np.asarray(self.eta, dtype=float)
        sigma = np.asarray(self.sigma, dtype=float)
        if eta.ndim != 1 or sigma.shape != eta.shape:
            raise ConfigError("mode spectrum: eta and sigma must be matching 1-d arrays")
        if np.any(eta < 0.0) or np.any(eta > 1.0):
            raise PhysicalityError("mode spectrum: transmissivities outside [0, 1]")
        if np.any(np.diff(eta) > 0.0):
            raise ConfigError("mode spectrum: transmissivities must be descending")
        object.__setattr__(self, "eta", eta)
        object.__setattr__(self, "sigma", sigma)

    @classmethod
    def from_singular_values(
        cls,
        singular_values: Sequence[float] | np.ndarray,
        *,
        grid_orders: tuple[int, ...] | None = None,
        converged: bool = True,
        scenario: str | None = None,
    ) -> "ModeSpectrum":
        sigma = np.sort(np.asarray(singular_values, dtype=float))[::-1].copy()
        eta = sigma**2
        overshoot = float(eta.max(initial=0.0) - 1.0)
        if overshoot > OVERSHOOT_TOL:
            raise PhysicalityError(
                f"top transmissivity {1.0 + overshoot:.9g} exceeds 1 beyond the "
                f"{OVERSHOOT_TOL:g} roundoff allowance; kernel or weights are mis-scaled"
            )
        clamped = int(np.count_nonzero(eta > 1.0))
        eta = np.clip(eta, 0.0, 1.0)
        return cls(
            eta=eta,
            sigma=sigma,
            grid_orders=grid_orders,
            converged=converged,
            clamped_count=clamped,
            max_overshoot=max(overshoot, 0.0),
            scenario=scenario,
        )

    def __len__(self) -> int:
        return int(self.eta.shape[0])

    @property
    def nu_threshold(self) -> int:
        """Number of modes with transmissivity above one half."""
        return int(np.count_nonzero(self.eta > 0.5))

    @property
    def nu_sum(self) -> float:
        """Sum of all transmissivities (the soft mode count)."""
        return float(self.eta.sum())


def singular_spectrum(sampled: SampledKernel) -> ModeSpectrum:
    """Dense SVD of the sampled kernel, returned as a clamped mode spectrum."""
    try:
        sigma = np.linalg.svd(sampled.matrix, compute_uv=False)
    except np.linalg.LinAlgError as exc:
        norm = float(np.linalg.norm(sampled.matrix))
        raise NumericalError(
            f"SVD failed on a {sampled.matrix.shape} matrix with Frobenius norm {norm:.3e}: {exc}"
        ) from exc
    orders = (sampled.grid_out.order,) if sampled.grid_out.order == sampled.grid_in.order else (
        sampled.grid_in.order,
        sampled.grid_out.order,
    )
    return ModeSpectrum.from_singular_values(
        sigma, grid_orders=orders, converged=True, scenario=sampled.scenario
    )


def _spectra_close(coarse: np.ndarray, fine: np.ndarray, tracked: int, rtol: float) -> bool:
    a = np.zeros(tracked)
    b = np.zeros(tracked)
    a[: min(tracked, coarse.size)] = coarse[:tracked]
    b[: min(tracked, fine.size)] = fine[:tracked]
    scale = np.maximum(a, b)
    small = scale < ABS_COMPARE_FLOOR
    diff = np.abs(a - b)
    ok_small = diff[small] < rtol
    ok_rel = diff[~small] < rtol * scale[~small]
    return bool(np.all(ok_small) and np.all(ok_rel))


def converge_spectrum(
    assemble_at: Callable[[int], SampledKernel],
    *,
    tracked: int = 10,
    initial_order: int = 8,
    rtol: float = 1e-4,
    max_order: int = 64,
) -> ModeSpectrum:
    """Refine the grid by doubling until the leading transmissivities settle.

    ``assemble_at(order)`` must return the sampled kernel at that order.
    The top ``tracked`` transmissivities are compared between successive
    refinements (relative below ``rtol``, absolute for values under 1e-12).
    Under-resolved intermediate grids occasionally overshoot eta = 1; those
    are skipped and refinement continues.  If the budget runs out, the best
    spectrum is returned with ``converged=False``; if no physical spectrum
    was obtained at all, the overshoot error propagates.
    """
    if rtol <= 0.0:
        raise ConfigError(f"rtol must be positive, got {rtol!r}")
    if initial_order < MIN_GRID_ORDER:
        raise ConfigError(f"initial order must be >= {MIN_GRID_ORDER}, got {initial_order}")
    if max_order < initial_order:
        raise ConfigError("max order must be >= initial order")

    orders_used: list[int] = []
    previous: ModeSpectrum | None = None
    best: ModeSpectrum | None = None
    last_overshoot: PhysicalityError | None = None
    order = initial_order
    while True:
        sampled = assemble_at(order)
        orders_used.append(order)
        try:
            current = singular_spectrum(sampled)
        except PhysicalityError as exc:
            current = None
            last_overshoot = exc
        if current is not None:
            if previous is not None and _spectra_close(previous.eta, current.eta, tracked, rtol):
                return replace(current, grid_orders=tuple(orders_used), converged=True)
            previous = current
            best = current
        if 2 * order > max_order:
            break
        order *= 2
    if best is None:
        assert last_overshoot is not None
        raise last_overshoot
    return replace(best, grid_orders=tuple(orders_used), converged=False)


def power_iteration_top_sigma(
    matrix: np.ndarray, iterations: int = 2000, tol: float = 1e-12, seed: int = 7
) -> float:
    """Top singular value by power iteration on K^H K; independent check on the SVD."""
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(matrix.shape[1])
    v = v / np.linalg.norm(v)
    gram = matrix.conj().T @ matrix
    value = 0.0
    for _ in range(iterations):
        w = gram @ v
        new_value = float(np.linalg.norm(w))
        if new_value == 0.0:
            return 0.0
        v = w / new_value
        if abs(new_value - value) <= tol * new_value:
            value = new_value
            break
        value = new_value
    return math.sqrt(value)


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def write_spectrum_csv(
    spectrum: ModeSpectrum, path: str | Path, metadata: dict | None = None
) -> Path:
    """Write ``k,sigma,eta`` rows (transmissivities >= 1e-30 only) plus a JSON sidecar."""
    path = Path(path)
    keep = spectrum.eta >= EXPORT_FLOOR
    lines = ["k,sigma,eta"]
    for k in np.flatnonzero(keep):
        lines.append(f"{k},{_fmt(float(spectrum.sigma[k]))},{_fmt(float(spectrum.eta[k]))}")
    path.write_text("\n".join(lines) + "\n")
    sidecar = {
        "scenario": spectrum.scenario,
        "grid_orders": list(spectrum.grid_orders) if spectrum.grid_orders else None,
        "converged": spectrum.converged,
        "modes_written": int(keep.sum()),
        "nu_threshold": spectrum.nu_threshold,
        "nu_sum": spectrum.nu_sum,
        "clamped_count": spectrum.clamped_count,
        "max_overshoot": spectrum.max_overshoot,
    }
    if metadata:
        sidecar.update(metadata)
    sidecar_path = path.with_suffix(".meta.json")
    sidecar_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return sidecar_path


def read_spectrum_csv(path: str | Path) -> ModeSpectrum:
    """Re-ingest a spectrum CSV written by ``write_spectrum_csv``."""
    lines = [ln for ln in Path(path).read_text().splitlines() if ln and not ln.startswith("#")]
    if not lines or lines[0] != "k,sigma,eta":
        raise ConfigError(f"{path}: expected a 'k,sigma,eta' spectrum CSV")
    sigma = []
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != 3:
            raise ConfigError(f"{path}: malformed spectrum row {ln!r}")
        sigma.append(float(parts[1]))
    if not sigma:
        raise ConfigError(f"{path}: spectrum CSV contains no modes")
    return ModeSpectrum.from_singular_values(sigma, grid_orders=None, converged=True)
