"""
Generate random separable specs and draw labeled datasets from them.

Projection of a sampled point is uniform inside the margined interval (or region),
and its component orthogonal to projection vectors is uniform in a ball.
"""


import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import ORTHONORMALITY_TOLERANCE, WEIGHTS_SUM_TOLERANCE
from .construction import decode_rank
from .domain import (
    LabeledDataset,
    ProjectionAxis,
    SeparabilitySpec1D,
    SeparabilitySpecND,
    validate_margin,
    validate_spec_1d,
    validate_spec_nd,
)
from .errors import (
    AxesExceedDimension,
    DimensionMismatch,
    IndexOutOfRange,
    InvalidSamplerConfig,
    LabelOutOfRange,
    NonOrthonormalAxes,
)
from .evaluation import interval_lookup, region_lookup


logger = logging.getLogger(__name__)

MAX_ATTEMPTS_PER_POINT = 100


@dataclass(frozen=True)
class SamplerConfig:
    """
    Parameters of sampling.

    `orth_radius` bounds the component of a point orthogonal to projection vectors.
    `interval_weights` are probabilities of intervals (or of regions in the order of their ranks);
    if they are not passed, all intervals are equiprobable.
    """
    seed: int
    n_samples: int
    orth_radius: float = 1.0
    interval_weights: Optional[tuple[float, ...]] = None

    def __post_init__(self):
        if self.n_samples < 1:
            raise InvalidSamplerConfig(f"Number of samples must be positive, got {self.n_samples}.")
        if not self.orth_radius >= 0:
            raise InvalidSamplerConfig(f"Radius must be non-negative, got {self.orth_radius}.")
        if self.interval_weights is not None:
            weights = tuple(float(x) for x in self.interval_weights)
            object.__setattr__(self, 'interval_weights', weights)
            if any(x < 0 for x in weights):
                raise InvalidSamplerConfig(f"Weights must be non-negative, got {weights}.")
            if abs(sum(weights) - 1) > WEIGHTS_SUM_TOLERANCE:
                raise InvalidSamplerConfig(f"Weights must sum to 1, got {sum(weights)}.")


def validate_spec_parameters(
        dim: int, axis_sizes: tuple[int, ...], num_classes: int, margin: float
) -> None:
    """
    Validate parameters of random spec generation.

    :param dim:
        dimensionality of input space
    :param axis_sizes:
        numbers of intervals along each axis
    :param num_classes:
        number of classes c
    :param margin:
        margin δ
    :return:
        None
    """
    if dim < 1:
        raise DimensionMismatch(f"Dimensionality must be positive, got {dim}.")
    if not axis_sizes or any(k < 1 for k in axis_sizes):
        raise IndexOutOfRange(f"Numbers of intervals must be positive, got {axis_sizes}.")
    if num_classes < 1:
        raise LabelOutOfRange(f"Number of classes must be positive, got {num_classes}.")
    validate_margin(margin)


def draw_boundaries(
        rng: np.random.Generator,
        n_intervals: int,
        margin: float,
        min_gap_factor: float,
        max_gap_factor: float
) -> np.ndarray:
    """
    Draw boundaries starting from 0 with gaps from `[2δ + g_min, 2δ + g_max]`.

    :param rng:
        random numbers generator
    :param n_intervals:
        number of intervals k
    :param margin:
        margin δ
    :param min_gap_factor:
        ratio of g_min to δ
    :param max_gap_factor:
        ratio of g_max to δ
    :return:
        k + 1 strictly increasing boundaries
    """
    if not 0 < min_gap_factor <= max_gap_factor:
        raise InvalidSamplerConfig(
            f"Gap factors must satisfy 0 < min <= max, got {min_gap_factor} and {max_gap_factor}."
        )
    gaps = rng.uniform(
        2 * margin + min_gap_factor * margin,
        2 * margin + max_gap_factor * margin,
        size=n_intervals
    )
    return np.concatenate([[0.0], np.cumsum(gaps)])


def random_spec_1d(
        dim: int,
        n_intervals: int,
        num_classes: int,
        margin: float,
        seed: int,
        min_gap_factor: float = 1.0,
        max_gap_factor: float = 10.0
) -> SeparabilitySpec1D:
    """
    Generate random single-projection spec.

    :param dim:
        dimensionality of input space
    :param n_intervals:
        number of intervals k
    :param num_classes:
        number of classes c
    :param margin:
        margin δ
    :param seed:
        seed of random numbers generator
    :param min_gap_factor:
        ratio of the smallest extra gap between boundaries to δ
    :param max_gap_factor:
        ratio of the largest extra gap between boundaries to δ
    :return:
        valid spec with normalized Gaussian projection vector and uniformly drawn labels
    """
    validate_spec_parameters(dim, (n_intervals,), num_classes, margin)
    rng = np.random.default_rng(seed)
    a = draw_unit_vector(rng, dim)
    boundaries = draw_boundaries(rng, n_intervals, margin, min_gap_factor, max_gap_factor)
    labels = rng.integers(1, num_classes + 1, size=n_intervals)
    spec = SeparabilitySpec1D(dim, a, boundaries, margin, tuple(labels), num_classes)
    validate_spec_1d(spec)
    return spec


def draw_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Draw normalized standard Gaussian vector."""
    while True:
        vector = rng.standard_normal(dim)
        norm = np.linalg.norm(vector)
        if norm > 0:
            return vector / norm


def draw_orthonormal_axes(rng: np.random.Generator, dim: int, n_axes: int) -> np.ndarray:
    """
    Draw random orthonormal vectors with QR decomposition of a Gaussian matrix.

    :param rng:
        random numbers generator
    :param dim:
        dimensionality of input space
    :param n_axes:
        number of vectors
    :return:
        matrix with shape (dim, n_axes) and orthonormal columns
    """
    if n_axes > dim:
        raise AxesExceedDimension(
            f"{n_axes} orthonormal vectors do not exist in {dim}-dimensional space."
        )
    q, r = np.linalg.qr(rng.standard_normal((dim, n_axes)))
    signs = np.where(np.diag(r) < 0, -1.0, 1.0)
    return q * signs


def random_spec_nd(
        dim: int,
        axis_sizes: tuple[int, ...],
        num_classes: int,
        margin: float,
        seed: int,
        min_gap_factor: float = 1.0,
        max_gap_factor: float = 10.0
) -> SeparabilitySpecND:
    """
    Generate random multi-projection spec with orthonormal projection vectors.

    :param dim:
        dimensionality of input space
    :param axis_sizes:
        numbers of intervals along each axis
    :param num_classes:
        number of classes c
    :param margin:
        margin δ
    :param seed:
        seed of random numbers generator
    :param min_gap_factor:
        ratio of the smallest extra gap between boundaries to δ
    :param max_gap_factor:
        ratio of the largest extra gap between boundaries to δ
    :return:
        valid spec where labels of regions are drawn uniformly
    """
    axis_sizes = tuple(int(k) for k in axis_sizes)
    validate_spec_parameters(dim, axis_sizes, num_classes, margin)
    rng = np.random.default_rng(seed)
    vectors = draw_orthonormal_axes(rng, dim, len(axis_sizes))
    axes = tuple(
        ProjectionAxis(
            vectors[:, index],
            draw_boundaries(rng, k, margin, min_gap_factor, max_gap_factor)
        )
        for index, k in enumerate(axis_sizes)
    )
    n_regions = math.prod(axis_sizes)
    labels = rng.integers(1, num_classes + 1, size=n_regions)
    region_labels = {
        decode_rank(axis_sizes, rank): int(label) for rank, label in enumerate(labels)
    }
    spec = SeparabilitySpecND(dim, axes, margin, region_labels, num_classes)
    validate_spec_nd(spec)
    return spec


def get_probabilities(config: SamplerConfig, n_outcomes: int) -> np.ndarray:
    """Get probabilities of intervals or regions."""
    if config.interval_weights is None:
        return np.full(n_outcomes, 1 / n_outcomes)
    if len(config.interval_weights) != n_outcomes:
        raise InvalidSamplerConfig(
            f"There are {n_outcomes} intervals, but {len(config.interval_weights)} weights."
        )
    weights = np.array(config.interval_weights)
    return weights / weights.sum()


def draw_orthogonal_noise(
        rng: np.random.Generator, basis: np.ndarray, radius: float
) -> np.ndarray:
    """
    Draw point uniformly from a ball lying in orthogonal complement of a subspace.

    :param rng:
        random numbers generator
    :param basis:
        matrix with shape (dim, n) whose columns form orthonormal basis of the subspace
    :param radius:
        radius of the ball
    :return:
        vector of length dim that is orthogonal to every column of `basis`
    """
    dim, n_axes = basis.shape
    direction = rng.standard_normal(dim)
    scale = rng.uniform()
    n_free_dims = dim - n_axes
    direction -= basis @ (basis.T @ direction)
    norm = np.linalg.norm(direction)
    if n_free_dims == 0 or radius == 0 or norm == 0:
        return np.zeros(dim)
    return radius * scale ** (1 / n_free_dims) * direction / norm


def draw_inner_coordinate(
        rng: np.random.Generator, boundaries: np.ndarray, index: int, margin: float
) -> float:
    """Draw projection uniformly from the open margined interval `index` (1-based)."""
    low = boundaries[index - 1] + margin
    high = boundaries[index] - margin
    while True:
        value = rng.uniform(low, high)
        if low < value < high:
            return float(value)


def sample_1d(spec: SeparabilitySpec1D, config: SamplerConfig) -> LabeledDataset:
    """
    Draw labeled points from distribution that is separable by a single projection vector.

    Points whose computed projection falls out of the margined interval due to rounding
    are redrawn.

    :param spec:
        single-projection spec
    :param config:
        parameters of sampling
    :return:
        dataset
    """
    validate_spec_1d(spec)
    rng = np.random.default_rng(config.seed)
    probabilities = get_probabilities(config, spec.n_intervals)
    intervals = rng.choice(spec.n_intervals, size=config.n_samples, p=probabilities) + 1
    basis = spec.a.reshape(-1, 1)
    points = np.empty((config.n_samples, spec.dim))
    labels = np.empty(config.n_samples, dtype=np.int64)
    for point_index, interval in enumerate(intervals):
        for _ in range(MAX_ATTEMPTS_PER_POINT):
            t = draw_inner_coordinate(rng, spec.boundaries, interval, spec.margin)
            x = t * spec.a + draw_orthogonal_noise(rng, basis, config.orth_radius)
            if interval_lookup(spec, x) == interval:
                break
        else:
            raise RuntimeError(f"Failed to draw a point from interval {interval}.")
        points[point_index] = x
        labels[point_index] = spec.interval_labels[interval - 1]
    logger.debug(f"Sampled {config.n_samples} points from {spec.n_intervals} intervals.")
    return LabeledDataset(spec.dim, points, labels, seed=config.seed, spec=spec)


def validate_orthonormality(spec: SeparabilitySpecND) -> np.ndarray:
    """
    Check that projection vectors of a spec are orthonormal.

    :param spec:
        multi-projection spec
    :return:
        matrix with projection vectors as columns
    """
    basis = np.column_stack([axis.a for axis in spec.axes])
    gram = basis.T @ basis
    deviation = float(np.max(np.abs(gram - np.eye(len(spec.axes)))))
    if deviation >= ORTHONORMALITY_TOLERANCE:
        raise NonOrthonormalAxes(
            f"Projection vectors deviate from orthonormality by {deviation}."
        )
    return basis


def sample_nd(spec: SeparabilitySpecND, config: SamplerConfig) -> LabeledDataset:
    """
    Draw labeled points from distribution that is separable by several projection vectors.

    :param spec:
        multi-projection spec with orthonormal projection vectors
    :param config:
        parameters of sampling
    :return:
        dataset
    """
    validate_spec_nd(spec)
    basis = validate_orthonormality(spec)
    rng = np.random.default_rng(config.seed)
    probabilities = get_probabilities(config, spec.n_regions)
    ranks = rng.choice(spec.n_regions, size=config.n_samples, p=probabilities)
    points = np.empty((config.n_samples, spec.dim))
    labels = np.empty(config.n_samples, dtype=np.int64)
    for point_index, rank in enumerate(ranks):
        multi_index = decode_rank(spec.axis_sizes, int(rank))
        for _ in range(MAX_ATTEMPTS_PER_POINT):
            coordinates = np.array([
                draw_inner_coordinate(rng, axis.boundaries, i, spec.margin)
                for axis, i in zip(spec.axes, multi_index)
            ])
            x = basis @ coordinates + draw_orthogonal_noise(rng, basis, config.orth_radius)
            if region_lookup(spec, x) == multi_index:
                break
        else:
            raise RuntimeError(f"Failed to draw a point from region {multi_index}.")
        points[point_index] = x
        labels[point_index] = spec.region_labels[multi_index]
    logger.debug(f"Sampled {config.n_samples} points from {spec.n_regions} regions.")
    return LabeledDataset(spec.dim, points, labels, seed=config.seed, spec=spec)
