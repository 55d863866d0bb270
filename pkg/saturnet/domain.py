"""
Define data structures shared by network builders, samplers, and verifiers.

All structures are immutable after construction: their arrays are copied and marked
as read-only, so they can be safely shared between threads and processes.
"""


import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Iterator, Optional, Union

import numpy as np

from .constants import ACTIVATIONS, IDENTITY_ACTIVATION, UNIT_NORM_TOLERANCE
from .errors import (
    DegenerateInterval,
    DimensionMismatch,
    IndexOutOfRange,
    LabelOutOfRange,
    NonIncreasingBoundaries,
    NonInjectiveEncoding,
    NonPositiveMargin,
    NonUnitProjection,
    RegionLabelMissing,
)


def to_label(value: Any) -> int:
    """Convert label to `int`, rejecting values that are not integral."""
    label = int(value)
    if label != value:
        raise LabelOutOfRange(f"Label must be an integer, got {value}.")
    return label


def to_index(value: Any) -> int:
    """Convert interval index to `int`, rejecting values that are not integral."""
    index = int(value)
    if index != value:
        raise IndexOutOfRange(f"Interval index must be an integer, got {value}.")
    return index


def freeze(values: Any, dtype: type = float) -> np.ndarray:
    """
    Copy values to a read-only array.

    :param values:
        array-like object
    :param dtype:
        type of array elements
    :return:
        read-only array
    """
    array = np.array(values, dtype=dtype)
    array.flags.writeable = False
    return array


@dataclass(frozen=True, eq=False)
class SeparabilitySpec1D:
    """
    Distribution support that is k-separable with δ-margin by a single projection vector.

    Interval `i` (1-based) is the set of `x` such that
    `boundaries[i-1] + margin < a @ x < boundaries[i] - margin`,
    and all points from it have label `interval_labels[i-1]`.
    """
    dim: int
    a: np.ndarray
    boundaries: np.ndarray
    margin: float
    interval_labels: tuple[int, ...]
    num_classes: int

    def __post_init__(self):
        object.__setattr__(self, 'a', freeze(self.a))
        object.__setattr__(self, 'boundaries', freeze(self.boundaries))
        labels = tuple(to_label(x) for x in self.interval_labels)
        object.__setattr__(self, 'interval_labels', labels)
        object.__setattr__(self, 'margin', float(self.margin))

    @property
    def n_intervals(self) -> int:
        return len(self.boundaries) - 1

    def __eq__(self, other: Any):
        if not isinstance(other, SeparabilitySpec1D):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.a, other.a)
            and np.array_equal(self.boundaries, other.boundaries)
            and self.margin == other.margin
            and self.interval_labels == other.interval_labels
            and self.num_classes == other.num_classes
        )


@dataclass(frozen=True, eq=False)
class ProjectionAxis:
    """Projection vector and boundaries of intervals along it."""
    a: np.ndarray
    boundaries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, 'a', freeze(self.a))
        object.__setattr__(self, 'boundaries', freeze(self.boundaries))

    @property
    def n_intervals(self) -> int:
        return len(self.boundaries) - 1

    def __eq__(self, other: Any):
        if not isinstance(other, ProjectionAxis):
            return NotImplemented
        return np.array_equal(self.a, other.a) and np.array_equal(self.boundaries, other.boundaries)


@dataclass(frozen=True, eq=False)
class SeparabilitySpecND:
    """
    Distribution support that is (k_1, ..., k_n)-separable with δ-margin.

    Region `(i_1, ..., i_n)` (1-based) is the intersection of interval `i_s` of every axis `s`,
    and all points from it have label `region_labels[(i_1, ..., i_n)]`.
    """
    dim: int
    axes: tuple[ProjectionAxis, ...]
    margin: float
    region_labels: dict[tuple[int, ...], int]
    num_classes: int

    def __post_init__(self):
        object.__setattr__(self, 'axes', tuple(self.axes))
        object.__setattr__(self, 'margin', float(self.margin))
        labels = {
            tuple(to_index(i) for i in key): to_label(value)
            for key, value in self.region_labels.items()
        }
        object.__setattr__(self, 'region_labels', labels)

    @property
    def axis_sizes(self) -> tuple[int, ...]:
        return tuple(axis.n_intervals for axis in self.axes)

    @property
    def n_regions(self) -> int:
        return math.prod(self.axis_sizes)

    def __eq__(self, other: Any):
        if not isinstance(other, SeparabilitySpecND):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.axes == other.axes
            and self.margin == other.margin
            and self.region_labels == other.region_labels
            and self.num_classes == other.num_classes
        )


Spec = Union[SeparabilitySpec1D, SeparabilitySpecND]


@dataclass(frozen=True, eq=False)
class LabelEncoding:
    """Injective map from labels `[1:c]` to code vectors; `codes[j-1]` is the code of label `j`."""
    codes: np.ndarray

    def __post_init__(self):
        codes = freeze(self.codes)
        if codes.ndim != 2 or codes.shape[0] < 1:
            raise DimensionMismatch(f"Codes must form a non-empty matrix, got shape {codes.shape}.")
        object.__setattr__(self, 'codes', codes)
        validate_encoding(self)

    @property
    def num_classes(self) -> int:
        return self.codes.shape[0]

    @property
    def out_dim(self) -> int:
        return self.codes.shape[1]

    @property
    def is_one_hot(self) -> bool:
        return self.num_classes == self.out_dim and np.array_equal(
            self.codes, np.eye(self.num_classes)
        )

    def encode(self, label: int) -> np.ndarray:
        """Return code vector of a label from `[1:c]`."""
        if not 1 <= label <= self.num_classes:
            raise LabelOutOfRange(f"Label {label} is not in [1:{self.num_classes}].")
        return self.codes[label - 1]


@dataclass(frozen=True)
class BuildInfo:
    """Metadata of a constructed network."""
    kind: str
    scaling_mode: str
    c_s_used: float
    epsilon: Optional[float]
    formula_param_count: int
    dense_param_count: int
    per_column_weight_norms: tuple[float, ...]
    subnetwork_c_s: tuple[float, ...] = ()


@dataclass(frozen=True, eq=False)
class DenseLayer:
    """Fully connected layer computing `activation(weights @ x + biases)`."""
    weights: np.ndarray
    biases: np.ndarray
    activation: str

    def __post_init__(self):
        object.__setattr__(self, 'weights', freeze(np.atleast_2d(self.weights)))
        object.__setattr__(self, 'biases', freeze(self.biases).reshape(-1))

    @property
    def n_inputs(self) -> int:
        return self.weights.shape[1]

    @property
    def n_outputs(self) -> int:
        return self.weights.shape[0]

    def __eq__(self, other: Any):
        if not isinstance(other, DenseLayer):
            return NotImplemented
        return (
            np.array_equal(self.weights, other.weights)
            and np.array_equal(self.biases, other.biases)
            and self.activation == other.activation
        )


@dataclass(frozen=True, eq=False)
class SigmoidNetwork:
    """Feedforward network with sigmoid hidden layers and a linear output layer."""
    layers: tuple[DenseLayer, ...]
    info: Optional[BuildInfo] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, 'layers', tuple(self.layers))
        validate_network(self)

    @property
    def input_dim(self) -> int:
        return self.layers[0].n_inputs

    @property
    def output_dim(self) -> int:
        return self.layers[-1].n_outputs

    def __eq__(self, other: Any):
        if not isinstance(other, SigmoidNetwork):
            return NotImplemented
        return self.layers == other.layers


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Points with labels from `[1:c]` and optional information about their origin."""
    dim: int
    points: np.ndarray
    labels: np.ndarray
    seed: Optional[int] = None
    spec: Optional[Spec] = None

    def __post_init__(self):
        points = freeze(self.points)
        if points.size == 0:
            points = points.reshape(0, self.dim)
        if points.ndim != 2 or points.shape[1] != self.dim:
            raise DimensionMismatch(
                f"Points of shape {points.shape} are not {self.dim}-dimensional."
            )
        labels = freeze(self.labels, dtype=np.int64).reshape(-1)
        if len(points) != len(labels):
            raise DimensionMismatch(
                f"Dataset has {len(points)} points, but {len(labels)} labels."
            )
        object.__setattr__(self, 'points', points)
        object.__setattr__(self, 'labels', labels)

    def __len__(self) -> int:
        return len(self.labels)

    def __iter__(self) -> Iterator[tuple[np.ndarray, int]]:
        for x, y in zip(self.points, self.labels):
            yield x, int(y)

    def __eq__(self, other: Any):
        if not isinstance(other, LabeledDataset):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.points, other.points)
            and np.array_equal(self.labels, other.labels)
        )


def validate_margin(margin: float) -> None:
    """
    Validate that margin is positive.

    :param margin:
        margin δ
    :return:
        None
    """
    if not margin > 0:
        raise NonPositiveMargin(f"Margin must be positive, got {margin}.")


def validate_axis(a: np.ndarray, boundaries: np.ndarray, margin: float, dim: int) -> None:
    """
    Validate a projection vector and boundaries of intervals along it.

    :param a:
        projection vector
    :param boundaries:
        boundaries of intervals
    :param margin:
        margin δ
    :param dim:
        dimensionality of input space
    :return:
        None
    """
    if a.shape != (dim,):
        raise DimensionMismatch(f"Projection vector has shape {a.shape}, but dim is {dim}.")
    if not np.all(np.isfinite(a)):
        raise NonUnitProjection(f"Projection vector must be finite, got {a}.")
    norm = float(np.linalg.norm(a))
    if not abs(norm - 1) <= UNIT_NORM_TOLERANCE:
        raise NonUnitProjection(f"Projection vector must have unit norm, got {norm}.")
    if len(boundaries) < 2:
        raise NonIncreasingBoundaries("At least two boundaries are required.")
    if not np.all(np.isfinite(boundaries)):
        raise NonIncreasingBoundaries(f"Boundaries must be finite, got {boundaries}.")
    for left, right in zip(boundaries, boundaries[1:]):
        if not left < right:
            raise NonIncreasingBoundaries(
                f"Boundaries must be strictly increasing, got {left} before {right}."
            )
    for left, right in zip(boundaries, boundaries[1:]):
        if not left + margin < right - margin:
            raise DegenerateInterval(
                f"Interval ({left}, {right}) is empty after removal of {margin}-margins."
            )


def validate_label(label: int, num_classes: int) -> None:
    """
    Validate that label belongs to `[1:c]`.

    :param label:
        label
    :param num_classes:
        number of classes c
    :return:
        None
    """
    if not 1 <= label <= num_classes:
        raise LabelOutOfRange(f"Label {label} is not in [1:{num_classes}].")


def validate_spec_1d(spec: SeparabilitySpec1D) -> None:
    """
    Validate all invariants of a single-projection spec.

    :param spec:
        spec to be validated
    :return:
        None
    """
    if spec.dim < 1:
        raise DimensionMismatch(f"Dimensionality must be positive, got {spec.dim}.")
    validate_margin(spec.margin)
    validate_axis(spec.a, spec.boundaries, spec.margin, spec.dim)
    if len(spec.interval_labels) != spec.n_intervals:
        raise DimensionMismatch(
            f"There are {spec.n_intervals} intervals, but {len(spec.interval_labels)} labels."
        )
    for label in spec.interval_labels:
        validate_label(label, spec.num_classes)


def validate_spec_nd(spec: SeparabilitySpecND) -> None:
    """
    Validate all invariants of a multi-projection spec.

    :param spec:
        spec to be validated
    :return:
        None
    """
    if spec.dim < 1:
        raise DimensionMismatch(f"Dimensionality must be positive, got {spec.dim}.")
    if not spec.axes:
        raise DimensionMismatch("At least one projection axis is required.")
    validate_margin(spec.margin)
    for axis in spec.axes:
        validate_axis(axis.a, axis.boundaries, spec.margin, spec.dim)
    sizes = spec.axis_sizes
    for multi_index in spec.region_labels:
        if len(multi_index) != len(sizes):
            raise IndexOutOfRange(f"Region {multi_index} must have {len(sizes)} components.")
        if not all(1 <= i <= k for i, k in zip(multi_index, sizes)):
            raise IndexOutOfRange(f"Region {multi_index} is outside of axis sizes {sizes}.")
    for multi_index in itertools.product(*(range(1, k + 1) for k in sizes)):
        if multi_index not in spec.region_labels:
            raise RegionLabelMissing(f"Region {multi_index} has no label.")
        validate_label(spec.region_labels[multi_index], spec.num_classes)


def validate_spec(spec: Spec) -> None:
    """Validate a spec of any kind."""
    if isinstance(spec, SeparabilitySpecND):
        validate_spec_nd(spec)
    else:
        validate_spec_1d(spec)


def validate_encoding(encoding: LabelEncoding) -> None:
    """
    Validate that no two labels share the same code vector.

    :param encoding:
        encoding to be validated
    :return:
        None
    """
    n_distinct_codes = np.unique(encoding.codes, axis=0).shape[0]
    if n_distinct_codes != encoding.num_classes:
        raise NonInjectiveEncoding(
            f"Only {n_distinct_codes} distinct codes for {encoding.num_classes} labels."
        )


def validate_network(network: SigmoidNetwork) -> None:
    """
    Validate that layers of a network chain and that its output layer is linear.

    :param network:
        network to be validated
    :return:
        None
    """
    if not network.layers:
        raise DimensionMismatch("Network must have at least one layer.")
    previous_layer = None
    for layer in network.layers:
        if layer.activation not in ACTIVATIONS:
            raise ValueError(f"Unknown activation: {layer.activation}.")
        if len(layer.biases) != layer.n_outputs:
            raise DimensionMismatch(
                f"Layer has {layer.n_outputs} outputs, but {len(layer.biases)} biases."
            )
        if previous_layer is not None and layer.n_inputs != previous_layer.n_outputs:
            raise DimensionMismatch(
                f"Layer with {layer.n_inputs} inputs follows layer "
                f"with {previous_layer.n_outputs} outputs."
            )
        previous_layer = layer
    if network.layers[-1].activation != IDENTITY_ACTIVATION:
        raise ValueError("Output layer of a network must be linear.")


def one_hot_encoding(num_classes: int) -> LabelEncoding:
    """
    Create encoding that maps label `j` to the j-th standard basis vector.

    :param num_classes:
        number of classes c
    :return:
        one-hot encoding
    """
    if num_classes < 1:
        raise LabelOutOfRange(f"Number of classes must be positive, got {num_classes}.")
    return LabelEncoding(np.eye(num_classes))


def scalar_encoding(values: list[float]) -> LabelEncoding:
    """
    Create encoding that maps label `j` to a one-dimensional code `values[j-1]`.

    :param values:
        distinct real values
    :return:
        encoding with one-dimensional codes
    """
    return LabelEncoding(np.asarray(values, dtype=float).reshape(-1, 1))
