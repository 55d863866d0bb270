"""
Test `saturnet.construction` module.
"""


import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.linalg import solve_triangular

from saturnet.construction import (
    ScalingPolicy,
    build_network,
    build_subnetworks,
    build_theorem1,
    build_theorem2,
    column_norms,
    decode_rank,
    dense_parameter_count,
    derived_spec_1d,
    desired_outputs,
    formula_parameter_count_1d,
    formula_parameter_count_nd,
    is_rank_bijective,
    lower_triangular_ones,
    make_hidden_layer,
    output_weight_matrix,
    subnetwork_targets,
    sufficient_scaling,
    tilde_k,
)
from saturnet.domain import (
    ProjectionAxis,
    SeparabilitySpec1D,
    SeparabilitySpecND,
    one_hot_encoding,
    scalar_encoding,
)
from saturnet.errors import (
    AxisOutOfRange,
    IndexOutOfRange,
    LabelOutOfRange,
    NonPositiveEpsilon,
)
from saturnet.network import classify, forward, forward_layers
from .conftest import SIMPLE_SPEC_1D, SIMPLE_SPEC_ND, TEN_CLASSES_SPEC_ND, THREE_INTERVALS_SPEC_1D


def make_line_spec(labels: list[int], num_classes: int) -> SeparabilitySpec1D:
    """Make spec on a line with unit intervals and given labels."""
    return SeparabilitySpec1D(
        dim=1,
        a=[1.0],
        boundaries=np.arange(len(labels) + 1, dtype=float),
        margin=0.1,
        interval_labels=tuple(labels),
        num_classes=num_classes,
    )


@pytest.mark.parametrize(
    "mode, value, expected_error",
    [
        ('sufficient', 0.0, NonPositiveEpsilon),
        ('sufficient', -1.0, NonPositiveEpsilon),
        ('explicit', -0.5, ValueError),
        ('exact', 1.0, ValueError),
        ('explicit', math.inf, ValueError),
        ('sufficient', math.inf, ValueError),
    ]
)
def test_scaling_policy_with_invalid_values(
        mode: str, value: float, expected_error: type
) -> None:
    """Test validation of `ScalingPolicy` class."""
    with pytest.raises(expected_error):
        ScalingPolicy(mode, value)


def test_scaling_policy_epsilon() -> None:
    """Test `ScalingPolicy.epsilon` property."""
    assert ScalingPolicy.sufficient_for_epsilon(0.25).epsilon == 0.25
    assert ScalingPolicy.explicit(3.0).epsilon is None


def test_lower_triangular_ones() -> None:
    """Test `lower_triangular_ones` function."""
    np.testing.assert_array_equal(
        lower_triangular_ones(3),
        [[1, 0, 0], [1, 1, 0], [1, 1, 1]]
    )


@pytest.mark.parametrize(
    "spec, expected",
    [
        (
            # `spec`
            SIMPLE_SPEC_1D,
            # `expected`
            [[1, 0], [-1, 1]]
        ),
        (
            # `spec`
            THREE_INTERVALS_SPEC_1D,
            # `expected`
            [[1, 0], [-1, 1], [1, -1]]
        ),
        (
            # `spec`
            make_line_spec([2, 2, 2], 2),
            # `expected`
            [[0, 1], [0, 0], [0, 0]]
        ),
    ]
)
def test_output_weight_matrix(spec: SeparabilitySpec1D, expected: list[list[float]]) -> None:
    """Test `output_weight_matrix` function."""
    result = output_weight_matrix(spec, one_hot_encoding(2))
    np.testing.assert_array_equal(result, expected)


@given(labels=st.lists(st.integers(min_value=1, max_value=10), min_size=1, max_size=64))
@settings(max_examples=500, deadline=None)
def test_output_weight_matrix_solves_triangular_system(labels: list[int]) -> None:
    """Test that `output_weight_matrix` function solves `H @ W = Y` exactly."""
    spec = make_line_spec(labels, 10)
    encoding = one_hot_encoding(10)
    weights = output_weight_matrix(spec, encoding)
    targets = desired_outputs(spec, encoding)
    hidden_outputs = lower_triangular_ones(len(labels))
    np.testing.assert_array_equal(hidden_outputs @ weights, targets)
    oracle = solve_triangular(hidden_outputs, targets, lower=True)
    np.testing.assert_allclose(weights, oracle, atol=1e-12)


def test_desired_outputs_with_small_encoding() -> None:
    """Test that `desired_outputs` function rejects encodings with too few classes."""
    with pytest.raises(LabelOutOfRange):
        desired_outputs(THREE_INTERVALS_SPEC_1D, one_hot_encoding(1))


def test_column_norms() -> None:
    """Test `column_norms` function."""
    np.testing.assert_allclose(column_norms(np.array([[3.0, 1.0], [4.0, 0.0]])), [5.0, 1.0])


@pytest.mark.parametrize(
    "spec, weights, epsilon, expected",
    [
        (
            # `spec`
            SIMPLE_SPEC_1D,
            # `weights`
            np.array([[1.0, 0.0], [-1.0, 1.0]]),
            # `epsilon`
            0.5,
            # `expected`
            math.log(4) / 0.1
        ),
        (
            # `spec`
            THREE_INTERVALS_SPEC_1D,
            # `weights`
            np.array([[1.0, 0.0], [-1.0, 1.0], [1.0, -1.0]]),
            # `epsilon`
            0.1,
            # `expected`
            math.log(math.sqrt(3) * math.sqrt(3) / 0.1) / 0.1
        ),
        (
            # `spec`
            make_line_spec([1], 1),
            # `weights`
            np.array([[0.0]]),
            # `epsilon`
            0.5,
            # `expected`
            0.0
        ),
        (
            # `spec`
            make_line_spec([1], 1),
            # `weights`
            np.array([[1.0]]),
            # `epsilon`
            2.0,
            # `expected`
            0.0
        ),
    ]
)
def test_sufficient_scaling(
        spec: SeparabilitySpec1D, weights: np.ndarray, epsilon: float, expected: float
) -> None:
    """Test `sufficient_scaling` function."""
    assert sufficient_scaling(spec, weights, epsilon) == pytest.approx(expected, rel=1e-12)


def test_sufficient_scaling_with_invalid_epsilon() -> None:
    """Test that `sufficient_scaling` function rejects non-positive allowed error."""
    with pytest.raises(NonPositiveEpsilon):
        sufficient_scaling(SIMPLE_SPEC_1D, np.eye(2), 0.0)


@pytest.mark.parametrize(
    "dim, n_intervals, out_dim, expected",
    [
        (2, 20, 10, 222),
        (2, 2, 2, 8),
        (1, 1, 1, 3),
    ]
)
def test_formula_parameter_count_1d(
        dim: int, n_intervals: int, out_dim: int, expected: int
) -> None:
    """Test `formula_parameter_count_1d` function."""
    assert formula_parameter_count_1d(dim, n_intervals, out_dim) == expected


@pytest.mark.parametrize(
    "dim, axis_sizes, out_dim, expected",
    [
        (2, (3, 4), 10, 152),
        (2, (3, 4), 12, 176),
        (5, (2, 2, 2), 3, 18 + 12 + 32),
    ]
)
def test_formula_parameter_count_nd(
        dim: int, axis_sizes: tuple[int, ...], out_dim: int, expected: int
) -> None:
    """Test `formula_parameter_count_nd` function."""
    assert formula_parameter_count_nd(dim, axis_sizes, out_dim) == expected


def test_make_hidden_layer() -> None:
    """Test `make_hidden_layer` function."""
    layer = make_hidden_layer(THREE_INTERVALS_SPEC_1D, 2.0)
    np.testing.assert_allclose(layer.weights, [[1.2, 1.6]] * 3)
    np.testing.assert_allclose(layer.biases, [0.0, -2.0, -5.0])


def test_build_theorem1() -> None:
    """Test `build_theorem1` function."""
    encoding = one_hot_encoding(2)
    network = build_theorem1(
        SIMPLE_SPEC_1D, encoding, ScalingPolicy.sufficient_for_epsilon(0.5)
    )
    assert len(network.layers) == 2
    assert network.info.kind == 'theorem1'
    assert network.info.c_s_used == pytest.approx(math.log(4) / 0.1)
    assert network.info.epsilon == 0.5
    assert network.info.formula_param_count == 2 + 3 * 2
    assert network.info.dense_param_count == dense_parameter_count(network.layers) == 12
    assert network.info.per_column_weight_norms == pytest.approx((math.sqrt(2), 1.0))
    np.testing.assert_array_equal(network.layers[1].weights, [[1, -1], [0, 1]])
    np.testing.assert_array_equal(network.layers[1].biases, [0, 0])


def test_build_theorem1_with_explicit_scaling() -> None:
    """Test that `build_theorem1` function uses explicitly passed scaling factor."""
    network = build_theorem1(
        THREE_INTERVALS_SPEC_1D, one_hot_encoding(2), ScalingPolicy.explicit(0.0)
    )
    assert network.info.c_s_used == 0.0
    assert network.info.scaling_mode == 'explicit'
    assert network.info.epsilon is None
    np.testing.assert_array_equal(network.layers[0].weights, np.zeros((3, 2)))


@pytest.mark.parametrize("epsilon", [0.5, 0.1, 0.01])
def test_build_theorem1_keeps_outputs_within_epsilon(epsilon: float) -> None:
    """Test that outputs of a network with sufficient scaling are within allowed error."""
    spec = THREE_INTERVALS_SPEC_1D
    encoding = one_hot_encoding(2)
    network = build_theorem1(spec, encoding, ScalingPolicy.sufficient_for_epsilon(epsilon))
    for index in range(1, spec.n_intervals + 1):
        low = spec.boundaries[index - 1] + spec.margin
        high = spec.boundaries[index] - spec.margin
        expected = encoding.encode(spec.interval_labels[index - 1])
        for t in np.linspace(low, high, 50)[1:-1]:
            output = forward(network, t * spec.a)
            assert np.max(np.abs(output - expected)) <= epsilon


@pytest.mark.parametrize(
    "axis_sizes, axis, expected",
    [
        ((3, 4), 1, [0, 1, 2]),
        ((3, 4), 2, [0, 3, 6, 9]),
        ((2, 3, 2), 3, [0, 6]),
        ((5,), 1, [0, 1, 2, 3, 4]),
    ]
)
def test_subnetwork_targets(axis_sizes: tuple[int, ...], axis: int, expected: list[int]) -> None:
    """Test `subnetwork_targets` function."""
    assert subnetwork_targets(axis_sizes, axis) == expected


@pytest.mark.parametrize("axis", [0, 3])
def test_subnetwork_targets_with_invalid_axis(axis: int) -> None:
    """Test that `subnetwork_targets` function rejects invalid axes."""
    with pytest.raises(AxisOutOfRange):
        subnetwork_targets((3, 4), axis)


@pytest.mark.parametrize(
    "axis_sizes, multi_index, expected",
    [
        ((3, 4), (1, 1), 0),
        ((3, 4), (2, 3), 7),
        ((3, 4), (3, 4), 11),
        ((2, 3, 2), (2, 1, 2), 7),
    ]
)
def test_tilde_k_and_decode_rank(
        axis_sizes: tuple[int, ...], multi_index: tuple[int, ...], expected: int
) -> None:
    """Test `tilde_k` function and `decode_rank` function."""
    assert tilde_k(axis_sizes, multi_index) == expected
    assert decode_rank(axis_sizes, expected) == multi_index


@pytest.mark.parametrize(
    "multi_index",
    [(1,), (0, 1), (4, 1), (1, 5)]
)
def test_tilde_k_with_invalid_index(multi_index: tuple[int, ...]) -> None:
    """Test that `tilde_k` function rejects invalid multi-indices."""
    with pytest.raises(IndexOutOfRange):
        tilde_k((3, 4), multi_index)


@pytest.mark.parametrize("rank", [-1, 12])
def test_decode_rank_with_invalid_rank(rank: int) -> None:
    """Test that `decode_rank` function rejects invalid ranks."""
    with pytest.raises(IndexOutOfRange):
        decode_rank((3, 4), rank)


@given(
    axis_sizes=st.lists(st.integers(min_value=1, max_value=5), min_size=1, max_size=4)
)
@settings(max_examples=100, deadline=None)
def test_is_rank_bijective(axis_sizes: list[int]) -> None:
    """Test `is_rank_bijective` function."""
    assert is_rank_bijective(tuple(axis_sizes))


def test_derived_spec_1d() -> None:
    """Test `derived_spec_1d` function."""
    result = derived_spec_1d(SIMPLE_SPEC_ND)
    root = math.sqrt(2)
    assert result.dim == 2
    np.testing.assert_allclose(result.a, [1 / root, 1 / root])
    np.testing.assert_allclose(result.boundaries, [(i - 1.5) / root for i in range(1, 14)])
    assert result.margin == pytest.approx(1 / (4 * root))
    assert result.interval_labels == tuple(range(1, 13))
    assert result.num_classes == 12


def test_build_subnetworks() -> None:
    """Test that subnetworks map inputs to per-axis ranks within `1 / (4n)`."""
    network = build_subnetworks(SIMPLE_SPEC_ND)
    assert network.info.kind == 'subnetworks'
    assert network.info.epsilon == pytest.approx(1 / 8)
    assert len(network.info.subnetwork_c_s) == 2
    assert network.layers[0].weights.shape == (7, 2)
    assert network.layers[1].weights.shape == (2, 7)
    for i in range(1, 4):
        for j in range(1, 5):
            output = forward(network, np.array([i - 0.5, j - 0.5]))
            np.testing.assert_allclose(output, [i - 1, 3 * (j - 1)], atol=1 / 8)


def test_build_theorem2() -> None:
    """Test that 4-layer network classifies centers of all regions correctly."""
    encoding = one_hot_encoding(10)
    network = build_theorem2(TEN_CLASSES_SPEC_ND, encoding, epsilon=0.5)
    assert len(network.layers) == 4
    assert network.info.kind == 'theorem2'
    assert network.info.formula_param_count == 152
    assert network.info.dense_param_count == dense_parameter_count(network.layers)
    for (i, j), label in TEN_CLASSES_SPEC_ND.region_labels.items():
        x = np.array([i - 0.5, j - 0.5])
        assert classify(network, encoding, x) == label
        rank_outputs = forward_layers(network, x)[1]
        np.testing.assert_allclose(rank_outputs, [i - 1, 3 * (j - 1)], atol=1 / 8)


def test_build_theorem2_with_single_axis() -> None:
    """Test that 4-layer network for one axis works as a 2-layer network."""
    spec = SeparabilitySpecND(
        dim=2,
        axes=(ProjectionAxis([0.6, 0.8], [0.0, 1.0, 2.5, 3.0]),),
        margin=0.1,
        region_labels={(1,): 1, (2,): 2, (3,): 1},
        num_classes=2,
    )
    encoding = one_hot_encoding(2)
    network = build_theorem2(spec, encoding)
    for t, label in [(0.5, 1), (1.7, 2), (2.75, 1)]:
        assert classify(network, encoding, t * np.array([0.6, 0.8])) == label


def test_build_theorem2_with_scalar_codes() -> None:
    """Test that outputs of 4-layer network are close to scalar codes of labels."""
    encoding = scalar_encoding([float(x) for x in range(12)])
    network = build_theorem2(SIMPLE_SPEC_ND, encoding, epsilon=0.25)
    for (i, j), label in SIMPLE_SPEC_ND.region_labels.items():
        output = forward(network, np.array([i - 0.5, j - 0.5]))
        assert abs(output[0] - (label - 1)) <= 0.25


@pytest.mark.parametrize(
    "spec, n_layers, kind",
    [
        (SIMPLE_SPEC_1D, 2, 'theorem1'),
        (SIMPLE_SPEC_ND, 4, 'theorem2'),
    ]
)
def test_build_network(spec: SeparabilitySpec1D, n_layers: int, kind: str) -> None:
    """Test `build_network` function."""
    encoding = one_hot_encoding(spec.num_classes)
    network = build_network(spec, encoding, ScalingPolicy.explicit(5.0))
    assert len(network.layers) == n_layers
    assert network.info.kind == kind
    assert network.info.c_s_used == 5.0
