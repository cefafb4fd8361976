"""Exception types raised by randcech."""


class RandCechError(Exception):
    """Base class for all package errors."""


class InvalidArgument(RandCechError, ValueError):
    pass


class DomainError(RandCechError, ValueError):
    """A parameter point lies outside a chart's domain."""


class DegenerateChartError(RandCechError):
    pass


class DegenerateInputError(RandCechError, ValueError):
    pass


class UnsupportedError(RandCechError, ValueError):
    pass


class UnsupportedDimension(UnsupportedError):
    pass


class InvalidDensity(RandCechError, ValueError):
    pass


class EnvelopeTooLoose(RandCechError):
    """Rejection sampling accepted too few candidates."""


class InsufficientComplex(RandCechError, ValueError):
    """The complex was not built high enough for the requested homology."""


class InsufficientSamples(RandCechError, ValueError):
    pass


class ResourceCapExceeded(RandCechError):
    """A complex would exceed the configured simplex cap."""


class ResolutionWarning(UserWarning):
    """Quadrature did not converge between the coarse and fine grids."""
