class SphericalRMTException(Exception):
    """Base exception for library errors"""

    pass


class DomainError(SphericalRMTException):
    """Argument outside the domain of an operation"""

    pass


class InconsistencyError(SphericalRMTException):
    """A mass, normalization or constant contract does not hold"""

    pass


class SamplingError(SphericalRMTException):
    """Base exception for Monte Carlo sampling errors"""

    pass


class NumericalFailureError(SphericalRMTException):
    """Quadrature or interpolation drifted beyond its tolerance"""

    pass


class ArtifactException(SphericalRMTException):
    """Base exception for output file errors"""

    pass
