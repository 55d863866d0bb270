"""
Construct sigmoid networks that classify separable distributions without errors.

A 2-layer network is built for a single projection vector: its hidden layer indicates
which boundaries lie below the projection of an input and its output layer turns these
indicators into desired outputs. A 4-layer network for several projection vectors puts
one 2-layer subnetwork per axis in parallel, so that their outputs are separable along
the diagonal direction, and then applies a 2-layer network to the result.
"""


import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .constants import IDENTITY_ACTIVATION, SIGMOID_ACTIVATION, SUBNETWORK_TOLERANCE_FACTOR
from .domain import (
    BuildInfo,
    DenseLayer,
    LabelEncoding,
    SeparabilitySpec1D,
    SeparabilitySpecND,
    SigmoidNetwork,
    Spec,
    scalar_encoding,
    validate_spec_1d,
    validate_spec_nd,
)
from .errors import AxisOutOfRange, IndexOutOfRange, LabelOutOfRange, NonPositiveEpsilon


logger = logging.getLogger(__name__)

SUFFICIENT_MODE = 'sufficient'
EXPLICIT_MODE = 'explicit'


@dataclass(frozen=True)
class ScalingPolicy:
    """
    Rule for choosing scaling factor of hidden layer.

    In 'sufficient' mode, `value` is the allowed output error ε and the factor is derived from it;
    in 'explicit' mode, `value` is the factor itself.
    """
    mode: str
    value: float

    def __post_init__(self):
        if self.mode == SUFFICIENT_MODE and not self.value > 0:
            raise NonPositiveEpsilon(f"Allowed error must be positive, got {self.value}.")
        if self.mode == EXPLICIT_MODE and not self.value >= 0:
            raise ValueError(f"Scaling factor must be non-negative, got {self.value}.")
        if not math.isfinite(self.value):
            raise ValueError(f"Value of scaling policy must be finite, got {self.value}.")
        if self.mode not in (SUFFICIENT_MODE, EXPLICIT_MODE):
            raise ValueError(f"Unknown scaling mode: {self.mode}.")

    @classmethod
    def sufficient_for_epsilon(cls, epsilon: float) -> 'ScalingPolicy':
        return cls(SUFFICIENT_MODE, epsilon)

    @classmethod
    def explicit(cls, c_s: float) -> 'ScalingPolicy':
        return cls(EXPLICIT_MODE, c_s)

    @property
    def epsilon(self) -> Optional[float]:
        return self.value if self.mode == SUFFICIENT_MODE else None


def lower_triangular_ones(k: int) -> np.ndarray:
    """
    Get matrix of hidden layer outputs in the saturation limit.

    Row `i` is the output for inputs from interval `i`: the first `i` neurons are on.

    :param k:
        number of intervals
    :return:
        lower triangular matrix of ones with shape (k, k)
    """
    return np.tril(np.ones((k, k)))


def desired_outputs(spec: SeparabilitySpec1D, encoding: LabelEncoding) -> np.ndarray:
    """
    Stack codes of interval labels.

    :param spec:
        single-projection spec
    :param encoding:
        encoding of labels
    :return:
        matrix with shape (k, m) such that its i-th row is the code of label of interval `i`
    """
    if encoding.num_classes < spec.num_classes:
        raise LabelOutOfRange(
            f"Encoding covers {encoding.num_classes} classes, but spec has {spec.num_classes}."
        )
    return np.vstack([encoding.encode(label) for label in spec.interval_labels])


def output_weight_matrix(spec: SeparabilitySpec1D, encoding: LabelEncoding) -> np.ndarray:
    """
    Compute output layer weights `W` that solve `H @ W = Y` for lower triangular matrix of ones.

    Inverse of `H` is a difference operator, so the first row of `W` is the first desired output
    and every next row is the difference between consecutive desired outputs.
    For integer codes, the result is exact.

    :param spec:
        single-projection spec
    :param encoding:
        encoding of labels
    :return:
        matrix with shape (k, m)
    """
    targets = desired_outputs(spec, encoding)
    return np.vstack([targets[:1], np.diff(targets, axis=0)])


def column_norms(weights: np.ndarray) -> np.ndarray:
    """Compute Euclidean norms of columns of a matrix."""
    return np.linalg.norm(weights, axis=0)


def sufficient_scaling(spec: SeparabilitySpec1D, weights: np.ndarray, epsilon: float) -> float:
    """
    Compute scaling factor that keeps every output within `epsilon` from the desired one.

    The factor is `log(sqrt(k) * max_j ||w_j|| / epsilon) / margin` with natural logarithm
    and columns `w_j` of `weights`. If the argument of logarithm does not exceed 1
    (in particular, if `weights` is zero), the error bound holds without scaling and 0 is returned.

    :param spec:
        single-projection spec
    :param weights:
        output layer weights with shape (k, m)
    :param epsilon:
        allowed output error
    :return:
        non-negative scaling factor
    """
    if not epsilon > 0:
        raise NonPositiveEpsilon(f"Allowed error must be positive, got {epsilon}.")
    k = weights.shape[0]
    max_norm = float(np.max(column_norms(weights)))
    argument = math.sqrt(k) * max_norm / epsilon
    if argument <= 1:
        return 0.0
    return math.log(argument) / spec.margin


def formula_parameter_count_1d(dim: int, n_intervals: int, out_dim: int) -> int:
    """Count parameters of a 2-layer network: `d` for projection and `m + 1` per interval."""
    return dim + (out_dim + 1) * n_intervals


def formula_parameter_count_nd(dim: int, axis_sizes: tuple[int, ...], out_dim: int) -> int:
    """Count parameters of a 4-layer network: `n(d + 1) + 2 * sum(k_s) + (m + 1) * prod(k_s)`."""
    n_axes = len(axis_sizes)
    return n_axes * (dim + 1) + 2 * sum(axis_sizes) + (out_dim + 1) * math.prod(axis_sizes)


def dense_parameter_count(layers: Sequence[DenseLayer]) -> int:
    """Count all stored weights and biases of layers."""
    return sum(layer.weights.size + layer.biases.size for layer in layers)


def resolve_scaling(spec: SeparabilitySpec1D, weights: np.ndarray, policy: ScalingPolicy) -> float:
    """Get scaling factor according to a policy."""
    if policy.mode == SUFFICIENT_MODE:
        return sufficient_scaling(spec, weights, policy.value)
    return float(policy.value)


def make_hidden_layer(spec: SeparabilitySpec1D, c_s: float) -> DenseLayer:
    """
    Create hidden layer with one sigmoid neuron per interval.

    Neuron `l` computes `sigmoid(c_s * (a @ x - b_l))` for the first `k` boundaries.

    :param spec:
        single-projection spec
    :param c_s:
        scaling factor
    :return:
        hidden layer
    """
    k = spec.n_intervals
    weights = np.tile(c_s * spec.a, (k, 1))
    biases = -c_s * spec.boundaries[:k]
    return DenseLayer(weights, biases, SIGMOID_ACTIVATION)


def build_theorem1(
        spec: SeparabilitySpec1D, encoding: LabelEncoding, policy: ScalingPolicy
) -> SigmoidNetwork:
    """
    Build 2-layer network that maps inputs from interval `i` to the code of its label.

    :param spec:
        single-projection spec
    :param encoding:
        encoding of labels
    :param policy:
        rule for choosing scaling factor
    :return:
        network with a sigmoid hidden layer and a linear output layer
    """
    validate_spec_1d(spec)
    weights = output_weight_matrix(spec, encoding)
    c_s = resolve_scaling(spec, weights, policy)
    hidden_layer = make_hidden_layer(spec, c_s)
    output_layer = DenseLayer(weights.T, np.zeros(encoding.out_dim), IDENTITY_ACTIVATION)
    layers = (hidden_layer, output_layer)
    info = BuildInfo(
        kind='theorem1',
        scaling_mode=policy.mode,
        c_s_used=c_s,
        epsilon=policy.epsilon,
        formula_param_count=formula_parameter_count_1d(
            spec.dim, spec.n_intervals, encoding.out_dim
        ),
        dense_param_count=dense_parameter_count(layers),
        per_column_weight_norms=tuple(float(x) for x in column_norms(weights)),
    )
    logger.debug(
        f"Built 2-layer network: k={spec.n_intervals}, m={encoding.out_dim}, c_s={c_s:.6f}, "
        f"parameters={info.formula_param_count}."
    )
    return SigmoidNetwork(layers, info)


def subnetwork_targets(axis_sizes: tuple[int, ...], axis: int) -> list[int]:
    """
    Get desired outputs of subnetwork for an axis.

    Interval `i` of axis `s` is mapped to `(i - 1) * k_1 * ... * k_{s-1}`,
    i.e., to the value of the s-th digit in mixed radix notation.

    :param axis_sizes:
        numbers of intervals along each axis
    :param axis:
        1-based index of axis
    :return:
        desired outputs for intervals `1, ..., k_s`
    """
    if not 1 <= axis <= len(axis_sizes):
        raise AxisOutOfRange(f"Axis {axis} is not in [1:{len(axis_sizes)}].")
    stride = math.prod(axis_sizes[:axis - 1])
    return [(i - 1) * stride for i in range(1, axis_sizes[axis - 1] + 1)]


def tilde_k(axis_sizes: tuple[int, ...], multi_index: tuple[int, ...]) -> int:
    """
    Rank a region by its multi-index.

    :param axis_sizes:
        numbers of intervals along each axis
    :param multi_index:
        1-based indices of intervals along each axis
    :return:
        rank from `[0 : prod(k_s) - 1]`
    """
    if len(multi_index) != len(axis_sizes):
        raise IndexOutOfRange(
            f"Multi-index {multi_index} must have {len(axis_sizes)} components."
        )
    rank = 0
    stride = 1
    for i, k in zip(multi_index, axis_sizes):
        if not 1 <= i <= k:
            raise IndexOutOfRange(f"Index {i} is not in [1:{k}].")
        rank += (i - 1) * stride
        stride *= k
    return rank


def decode_rank(axis_sizes: tuple[int, ...], rank: int) -> tuple[int, ...]:
    """
    Find multi-index of a region by its rank (inverse of `tilde_k`).

    :param axis_sizes:
        numbers of intervals along each axis
    :param rank:
        rank from `[0 : prod(k_s) - 1]`
    :return:
        1-based indices of intervals along each axis
    """
    if not 0 <= rank < math.prod(axis_sizes):
        raise IndexOutOfRange(f"Rank {rank} is not in [0:{math.prod(axis_sizes) - 1}].")
    multi_index = []
    for k in axis_sizes:
        rank, digit = divmod(rank, k)
        multi_index.append(digit + 1)
    return tuple(multi_index)


def is_rank_bijective(axis_sizes: tuple[int, ...]) -> bool:
    """Check by enumeration that `tilde_k` maps regions onto `[0 : prod(k_s) - 1]` one-to-one."""
    ranks = [
        tilde_k(axis_sizes, multi_index)
        for multi_index in itertools.product(*(range(1, k + 1) for k in axis_sizes))
    ]
    return sorted(ranks) == list(range(math.prod(axis_sizes)))


def make_axis_spec(spec: SeparabilitySpecND, axis: int) -> SeparabilitySpec1D:
    """Make single-projection spec where labels are indices of intervals along an axis."""
    projection_axis = spec.axes[axis - 1]
    n_intervals = projection_axis.n_intervals
    return SeparabilitySpec1D(
        dim=spec.dim,
        a=projection_axis.a,
        boundaries=projection_axis.boundaries,
        margin=spec.margin,
        interval_labels=tuple(range(1, n_intervals + 1)),
        num_classes=n_intervals,
    )


def build_subnetworks(spec: SeparabilitySpecND) -> SigmoidNetwork:
    """
    Build parallel subnetworks that map inputs from region `(i_1, ..., i_n)` to ranks of `i_s`.

    Every subnetwork is a 2-layer network for its axis with one-dimensional output and
    allowed error `1 / (4n)`. Subnetworks are stored as block diagonal layers.

    :param spec:
        multi-projection spec
    :return:
        network with `n` outputs
    """
    validate_spec_nd(spec)
    n_axes = len(spec.axes)
    tolerance = 1 / (SUBNETWORK_TOLERANCE_FACTOR * n_axes)
    hidden_weights = []
    hidden_biases = []
    output_blocks = []
    scaling_factors = []
    for axis in range(1, n_axes + 1):
        axis_spec = make_axis_spec(spec, axis)
        encoding = scalar_encoding(subnetwork_targets(spec.axis_sizes, axis))
        subnetwork = build_theorem1(
            axis_spec, encoding, ScalingPolicy.sufficient_for_epsilon(tolerance)
        )
        hidden_layer, output_layer = subnetwork.layers
        hidden_weights.append(hidden_layer.weights)
        hidden_biases.append(hidden_layer.biases)
        output_blocks.append(output_layer.weights)
        scaling_factors.append(subnetwork.info.c_s_used)

    output_weights = np.zeros((n_axes, sum(spec.axis_sizes)))
    offset = 0
    for axis_index, block in enumerate(output_blocks):
        output_weights[axis_index, offset:offset + block.shape[1]] = block[0]
        offset += block.shape[1]
    layers = (
        DenseLayer(np.vstack(hidden_weights), np.concatenate(hidden_biases), SIGMOID_ACTIVATION),
        DenseLayer(output_weights, np.zeros(n_axes), IDENTITY_ACTIVATION),
    )
    info = BuildInfo(
        kind='subnetworks',
        scaling_mode=SUFFICIENT_MODE,
        c_s_used=max(scaling_factors),
        epsilon=tolerance,
        formula_param_count=sum(spec.dim + 2 * k for k in spec.axis_sizes),
        dense_param_count=dense_parameter_count(layers),
        per_column_weight_norms=(),
        subnetwork_c_s=tuple(scaling_factors),
    )
    return SigmoidNetwork(layers, info)


def derived_spec_1d(spec: SeparabilitySpecND) -> SeparabilitySpec1D:
    """
    Describe distribution of subnetwork outputs as a single-projection spec.

    Region with rank `r` is mapped close to `r / sqrt(n)` along the diagonal direction,
    so boundaries are `(i - 1.5) / sqrt(n)` and margin is `1 / (4 * sqrt(n))`.

    :param spec:
        multi-projection spec
    :return:
        spec in the space of subnetwork outputs
    """
    n_axes = len(spec.axes)
    root = math.sqrt(n_axes)
    n_regions = spec.n_regions
    labels = tuple(
        spec.region_labels[decode_rank(spec.axis_sizes, rank)] for rank in range(n_regions)
    )
    return SeparabilitySpec1D(
        dim=n_axes,
        a=np.ones(n_axes) / root,
        boundaries=[(i - 1.5) / root for i in range(1, n_regions + 2)],
        margin=1 / (SUBNETWORK_TOLERANCE_FACTOR * root),
        interval_labels=labels,
        num_classes=spec.num_classes,
    )


def build_theorem2(
        spec: SeparabilitySpecND,
        encoding: LabelEncoding,
        epsilon: float = 0.5,
        output_policy: Optional[ScalingPolicy] = None
) -> SigmoidNetwork:
    """
    Build 4-layer network that maps inputs from each region to the code of its label.

    :param spec:
        multi-projection spec
    :param encoding:
        encoding of labels
    :param epsilon:
        allowed output error
    :param output_policy:
        rule for choosing scaling factor of the last two layers;
        if it is passed, `epsilon` is ignored
    :return:
        network with layers: sigmoid, linear, sigmoid, linear
    """
    output_policy = output_policy or ScalingPolicy.sufficient_for_epsilon(epsilon)
    subnetworks = build_subnetworks(spec)
    head = build_theorem1(derived_spec_1d(spec), encoding, output_policy)
    layers = subnetworks.layers + head.layers
    info = BuildInfo(
        kind='theorem2',
        scaling_mode=output_policy.mode,
        c_s_used=head.info.c_s_used,
        epsilon=output_policy.epsilon,
        formula_param_count=formula_parameter_count_nd(
            spec.dim, spec.axis_sizes, encoding.out_dim
        ),
        dense_param_count=dense_parameter_count(layers),
        per_column_weight_norms=head.info.per_column_weight_norms,
        subnetwork_c_s=subnetworks.info.subnetwork_c_s,
    )
    logger.debug(
        f"Built 4-layer network: axis sizes {spec.axis_sizes}, "
        f"subnetwork c_s={info.subnetwork_c_s}, output c_s={info.c_s_used:.6f}, "
        f"parameters={info.formula_param_count}."
    )
    return SigmoidNetwork(layers, info)


def build_network(spec: Spec, encoding: LabelEncoding, policy: ScalingPolicy) -> SigmoidNetwork:
    """
    Build 2-layer or 4-layer network depending on kind of spec.

    :param spec:
        single-projection or multi-projection spec
    :param encoding:
        encoding of labels
    :param policy:
        rule for choosing scaling factor of the last sigmoid layer
    :return:
        constructed network
    """
    if isinstance(spec, SeparabilitySpecND):
        return build_theorem2(spec, encoding, output_policy=policy)
    return build_theorem1(spec, encoding, policy)
