"""Exception types shared across the toolkit."""


class CpquadError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(CpquadError, ValueError):
    """Invalid run configuration (bad shape parameters, grid, flags...)."""


class EmptyBandError(CpquadError, RuntimeError):
    """No grid node falls inside the requested narrow band."""


class PreconditionError(CpquadError, RuntimeError):
    """A numerical validity condition is violated (e.g. band too wide
    for the shape's curvature)."""


class SingularConfigurationError(CpquadError, RuntimeError):
    """Query point sits on or beyond the focal set, where the closest
    point is not unique or a closed-form reference does not apply."""


class StudyAborted(CpquadError, RuntimeError):
    """A convergence study row failed; carries the partial report."""

    def __init__(self, message, partial_report=None):
        super().__init__(message)
        self.partial_report = partial_report
