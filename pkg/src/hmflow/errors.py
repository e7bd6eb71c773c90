"""Exception types shared across the package."""


class HmflowError(Exception):
    """Base class for all package errors."""


class ConstraintViolationError(HmflowError):
    """A unit-vector or other pointwise constraint is violated."""


class DegenerateFieldError(HmflowError):
    """A field value collapsed toward zero; usually the time step was too large."""


class ResolutionError(HmflowError):
    """The field is too rough for the requested stencil (neighbor jump > pi/2)."""


class ParameterError(HmflowError):
    """Invalid construction parameters (k <= 0, lambda <= 0, ...)."""


class NoScaleError(HmflowError):
    """Scale is undefined (constant map)."""


class OutOfRegimeError(HmflowError):
    """Argument outside the validity regime of the requested bound."""


class AdmissibilityError(HmflowError):
    """Radii vectors violate an admissibility constraint; message names it."""


class RangeError(HmflowError):
    """Requested times/records fall outside the stored series."""


class DegenerateStepError(HmflowError):
    """The integrator produced NaN/Inf or an unrecoverable state."""


class SnapshotFormatError(HmflowError):
    """A snapshot file is corrupt or has the wrong magic string."""


class ConfigError(HmflowError):
    """Run-configuration file could not be parsed or fails validation."""
