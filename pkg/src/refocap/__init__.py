"""Capacity of diffraction-limited optical channels.

Decomposes the propagation kernel of a thin lens, direct free space, or a
bare pupil hole into parallel lossy bosonic modes (SVD of the sampled
kernel) and allocates a mean-photon budget across them, either equally or
by water-filling, with optional thermal noise.
"""

from .capacity import (
    Allocation,
    CapacityReport,
    PhotonBudget,
    capacity_equal,
    capacity_of,
    capacity_thermal,
    uniform_allocation,
    water_fill,
)
from .errors import (
    ConfigError,
    NoChannelError,
    NumericalError,
    PhysicalityError,
    RefocapError,
    RegimeError,
)
from .geometry import (
    MixedRegimeWindow,
    OpticalGeometry,
    Regime,
    RegimeLabel,
    Scenario,
    asymptotic_spectrum,
    check_mixed_regime,
    classify_regime,
    farfield_loss_ratio,
    free_space_fresnel_number,
    lens_fresnel_number,
    make_geometry,
    nearfield_mode_ratio,
    rayleigh_length,
)
from .kernels import (
    KernelSpec,
    PlanarPoint,
    free_space_kernel,
    hole_composite_kernel,
    kernel_function,
    lens_psf,
    scenario_spectrum,
)
from .mathfn import (
    bessel_j1,
    bosonic_entropy,
    bosonic_entropy_increment,
    bosonic_entropy_marginal,
    jinc_psf,
)
from .scenarios import (
    GainCurve,
    ScreenReport,
    ThermalGainResult,
    compare_numerical,
    farfield_gain,
    mixed_gain,
    nearfield_gain,
    screen_negligibility,
    thermal_gain,
)
from .spectra import (
    Domain,
    ModeSpectrum,
    QuadratureGrid,
    SampledKernel,
    assemble,
    build_grid,
    compose_spectra_matrix,
    converge_spectrum,
    read_spectrum_csv,
    singular_spectrum,
    write_spectrum_csv,
)

__version__ = "0.1.0"
