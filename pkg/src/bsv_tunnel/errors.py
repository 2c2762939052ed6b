"""Exception types raised by the simulation layers.

Numerical failures are kept distinct from configuration problems so the
command line runner can map them to different exit codes.
"""


class BsvTunnelError(Exception):
    """Base class for all package errors."""


class ConfigError(BsvTunnelError):
    """Base for problems with run configuration."""


class ParseError(ConfigError):
    """Config file could not be parsed (bad syntax, unknown key)."""


class ValidationError(ConfigError):
    """Config parsed but a value is out of its allowed range."""


class NumericalError(BsvTunnelError):
    """Base for runtime numerical failures."""


class NotConverged(NumericalError):
    """Saddle point iteration did not reach the residual tolerance."""

    def __init__(self, message, residual_norm=None, t0=None):
        super().__init__(message)
        self.residual_norm = residual_norm
        self.t0 = t0


class SignViolation(NumericalError):
    """Saddle converged to the wrong half plane (Im t0 <= 0)."""


class NoValidWindow(NumericalError):
    """No launch window exists: the field never pushes the electron
    toward the barrier (x_i >= 0, or a zero-field realization)."""


class NegativeImAction(NumericalError):
    """Imaginary part of the action came out negative, which would mean
    probability > 1.  Always a bug or a broken contour, never physics."""


class BranchAmbiguity(NumericalError):
    """Branch of sqrt(u) could not be tracked continuously along the
    requested path (contour too close to a zero of u)."""


class QuadratureNotConverged(NumericalError):
    """Adaptive contour quadrature hit its depth limit with the error
    estimate still far above tolerance."""


class NoInteriorMax(NumericalError):
    """Weighted tunneling density has no interior maximum in the scanned
    initial-value window."""


class RootNotBracketed(NumericalError):
    """Level-set root for the requested fraction is not bracketed inside
    the scan window."""


class DivisionByZeroField(NumericalError):
    """Adiabaticity parameter requested for a vanishing peak field."""
