"""Exception types shared across the package."""


class DimensionError(ValueError):
    """Array shape incompatible with the requested operation."""


class ParameterError(ValueError):
    """Out-of-range or malformed parameter."""


class ValidationError(ValueError):
    """Input data fails a content check (NaN, non-unit phase, ...)."""


class ScaleError(ValueError):
    """Scale index outside the configured range."""


class ConsistencyError(ValueError):
    """Objects from different forward passes were mixed."""


class UnsupportedOrderError(ValueError):
    """Scattering order outside the supported range."""


class FormatError(ValueError):
    """Malformed tensor file."""
