"""
Define exceptions raised by the package.

All of them are subclasses of `ValueError`, because each one reports an invalid value
passed by a caller.
"""


class SaturnetError(ValueError):
    """Base class for all errors raised by the package."""


class NonUnitProjection(SaturnetError):
    """A projection vector does not have unit Euclidean norm."""


class NonIncreasingBoundaries(SaturnetError):
    """Boundaries of intervals are not strictly increasing."""


class DegenerateInterval(SaturnetError):
    """An interval becomes empty after its margins are removed."""


class NonPositiveMargin(SaturnetError):
    """Margin is zero or negative."""


class LabelOutOfRange(SaturnetError):
    """A label does not belong to `[1:c]`."""


class NonInjectiveEncoding(SaturnetError):
    """Two labels share the same code vector."""


class NonOneHotEncoding(SaturnetError):
    """An operation that requires one-hot encoding has got another encoding."""


class DimensionMismatch(SaturnetError):
    """Shapes of vectors, matrices, specs, models, or datasets are inconsistent."""


class NonPositiveEpsilon(SaturnetError):
    """Allowed output error is zero or negative."""


class AxisOutOfRange(SaturnetError):
    """Axis index does not belong to `[1:n]`."""


class IndexOutOfRange(SaturnetError):
    """A component of a multi-index does not belong to `[1:k_s]`."""


class RegionLabelMissing(SaturnetError):
    """A region of a multi-projection spec has no label."""


class AxesExceedDimension(SaturnetError):
    """More orthonormal projection vectors are requested than the input dimension allows."""


class InvalidSamplerConfig(SaturnetError):
    """Parameters of sampling are inconsistent."""


class InvalidGrid(SaturnetError):
    """A grid of scaling factors is malformed."""


class NonOrthonormalAxes(SaturnetError):
    """Projection vectors of a multi-projection spec are not orthonormal."""
