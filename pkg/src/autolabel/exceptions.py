"""Exception types shared across the package."""


class AutoLabelError(Exception):
    """Base class for errors raised by this package."""


class DegenerateGeometryError(AutoLabelError):
    """Geometry has no well-defined answer (ray parallel to plane,
    rotation at the angle-pi singularity, rank-deficient point sets, ...)."""


class NotVisibleError(AutoLabelError):
    """A 3D point lies behind the camera and cannot be projected."""


class LocalizationError(AutoLabelError):
    """Camera pose could not be recovered from fiducial observations."""


class ConfigurationError(AutoLabelError):
    """Invalid or inconsistent run/scene configuration."""


class UndefinedMetricError(AutoLabelError):
    """A metric is undefined for the given inputs (e.g. empty ground truth)."""
