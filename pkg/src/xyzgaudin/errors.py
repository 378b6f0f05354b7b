"""Exception types shared across the library."""


class XyzGaudinError(Exception):
    """Base class for all library-specific failures."""


class PoleError(XyzGaudinError, ValueError):
    """Evaluation requested too close to a pole / lattice point."""


class TruncationError(XyzGaudinError, ValueError):
    """Requested tolerance cannot be met by the truncated q-series."""


class ConditionError(XyzGaudinError, RuntimeError):
    """A linear system (basis gram, gauge matrix, Jacobian) is too ill-conditioned."""


class InterpolationError(XyzGaudinError, RuntimeError):
    """A function expected to lie in a theta space failed to interpolate."""


class ConvergenceError(XyzGaudinError, RuntimeError):
    """An iterative solver (Newton, homotopy, quadrature doubling) did not converge."""


class NullStateError(XyzGaudinError, RuntimeError):
    """A constructed state vector is numerically zero."""


class ConfigError(XyzGaudinError, ValueError):
    """Invalid chain specification or job configuration."""
