"""Exception types shared across the package.

The CLI maps these onto process exit codes, so library code should raise
the most specific class that applies.
"""


class RefocapError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(RefocapError):
    """Invalid configuration: bad field values, mismatched grids, inverted thresholds."""


class RegimeError(RefocapError):
    """A closed-form result was requested outside the regime where it holds."""


class NumericalError(RefocapError):
    """A numerical procedure failed (SVD breakdown, root bracketing failure)."""


class PhysicalityError(NumericalError):
    """A computed transmissivity exceeded 1 by more than roundoff allows."""


class NoChannelError(RefocapError):
    """Every mode of the spectrum has zero transmissivity; nothing to allocate."""
