"""
Run experiments with constructed networks: scaling factor sweeps and guarantee suites.
"""


import itertools
import logging
import math
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .constants import GRID_TOLERANCE
from .construction import (
    ScalingPolicy,
    build_theorem1,
    build_theorem2,
    is_rank_bijective,
    output_weight_matrix,
    sufficient_scaling,
)
from .domain import (
    LabelEncoding,
    LabeledDataset,
    SeparabilitySpec1D,
    one_hot_encoding,
    validate_spec_1d,
)
from .errors import InvalidGrid
from .evaluation import (
    AgreementReport,
    EvalReport,
    evaluate,
    lemma_margin_gap,
    oracle_agreement,
)
from .sampling import SamplerConfig, random_spec_1d, random_spec_nd, sample_1d, sample_nd
from .utils import starmap_in_parallel


logger = logging.getLogger(__name__)

BOUND_SUITE_DIMS = (1, 2, 5, 20)
BOUND_SUITE_N_INTERVALS = (1, 2, 5, 20, 50)
SUITE_NUM_CLASSES = (2, 10)
SUITE_MARGINS = (0.01, 0.1, 1.0)
LEMMA_SUITE_N_AXES = (2, 3)
LEMMA_SUITE_MAX_AXIS_SIZE = 5
LEMMA_SUITE_MAX_DIM = 5


@dataclass(frozen=True)
class SweepPoint:
    """Results for one value of scaling factor."""
    c_s: float
    n_misclassified: int
    max_deviation: float
    bound_max: float


@dataclass(frozen=True)
class SweepResult:
    """Misclassification curve and scaling factor that is sufficient for allowed error 1/2."""
    points: tuple[SweepPoint, ...]
    sufficient_c_s: float


@dataclass(frozen=True)
class BoundSuiteRow:
    """Results for one random single-projection configuration."""
    seed: int
    dim: int
    n_intervals: int
    num_classes: int
    margin: float
    c_s: float
    report: EvalReport

    @property
    def passed(self) -> bool:
        return (
            self.report.n_misclassified == 0
            and self.report.max_output_deviation <= self.report.epsilon_used
            and self.report.bound_violations.total == 0
            and self.report.n_unsupported == 0
        )


@dataclass(frozen=True)
class LemmaSuiteRow:
    """Results for one random multi-projection configuration."""
    seed: int
    dim: int
    axis_sizes: tuple[int, ...]
    num_classes: int
    margin: float
    agreement: AgreementReport
    max_lemma_gap: float
    rank_bijective: bool
    report: EvalReport

    @property
    def passed(self) -> bool:
        return (
            self.agreement.fraction == 1.0
            and self.report.lemma_margin_violations == 0
            and self.report.n_misclassified == 0
            and self.report.n_unsupported == 0
            and self.rank_bijective
        )


def parse_grid(grid: str) -> list[float]:
    """
    Parse grid of scaling factors from 'lo:hi:step' notation.

    The grid starts at `lo` and contains `hi` if `hi - lo` is a multiple of `step`
    up to a tolerance.

    :param grid:
        string with three numbers separated by colons
    :return:
        strictly increasing positive values
    """
    parts = grid.split(':')
    if len(parts) != 3:
        raise InvalidGrid(f"Grid must have form 'lo:hi:step', got '{grid}'.")
    try:
        low, high, step = (float(x) for x in parts)
    except ValueError:
        raise InvalidGrid(f"Grid must consist of numbers, got '{grid}'.") from None
    if not (low > 0 and step > 0 and high >= low) or not math.isfinite(high):
        raise InvalidGrid(f"Grid '{grid}' must satisfy 0 < lo <= hi and step > 0.")
    n_steps = math.floor((high - low) / step + GRID_TOLERANCE)
    return [round(low + i * step, 12) for i in range(n_steps + 1)]


def validate_grid(grid: list[float]) -> None:
    """Check that grid is non-empty and strictly increasing."""
    if not grid:
        raise InvalidGrid("Grid of scaling factors is empty.")
    if any(not left < right for left, right in zip(grid, grid[1:])):
        raise InvalidGrid(f"Grid of scaling factors must be strictly increasing, got {grid}.")


def split_among_processes(items: list[Any], n_processes: int) -> list[list[Any]]:
    """
    Distribute items among processes preserving their order.

    :param items:
        items to be processed
    :param n_processes:
        number of processes
    :return:
        non-empty contiguous chunks of items
    """
    n_items_per_process = max(math.ceil(len(items) / max(n_processes, 1)), 1)
    return [
        items[i:i + n_items_per_process] for i in range(0, len(items), n_items_per_process)
    ]


def evaluate_grid_points(
        spec: SeparabilitySpec1D,
        encoding: LabelEncoding,
        dataset: LabeledDataset,
        grid: list[float],
        epsilon: float
) -> list[SweepPoint]:
    """
    Build and evaluate one 2-layer network per scaling factor.

    :param spec:
        single-projection spec
    :param encoding:
        encoding of labels
    :param dataset:
        dataset drawn from distribution described by `spec`
    :param grid:
        scaling factors
    :param epsilon:
        allowed output error
    :return:
        results for each scaling factor
    """
    points = []
    for c_s in grid:
        network = build_theorem1(spec, encoding, ScalingPolicy.explicit(c_s))
        report = evaluate(network, encoding, spec, dataset, epsilon)
        max_norm = max(network.info.per_column_weight_norms)
        bound = max_norm * math.sqrt(spec.n_intervals) * math.exp(-c_s * spec.margin)
        points.append(
            SweepPoint(c_s, report.n_misclassified, report.max_output_deviation, bound)
        )
    return points


def sweep_scaling(
        spec: SeparabilitySpec1D,
        encoding: LabelEncoding,
        dataset: LabeledDataset,
        grid: list[float],
        epsilon: float = 0.5,
        n_processes: int = 1
) -> SweepResult:
    """
    Count misclassified points for each scaling factor from a grid.

    :param spec:
        single-projection spec
    :param encoding:
        encoding of labels
    :param dataset:
        dataset drawn from distribution described by `spec`
    :param grid:
        strictly increasing positive scaling factors
    :param epsilon:
        allowed output error that is used for counting points with too large deviations
    :param n_processes:
        number of processes
    :return:
        misclassification curve and scaling factor that is sufficient for allowed error 1/2
    """
    validate_spec_1d(spec)
    validate_grid(grid)
    sufficient_c_s = sufficient_scaling(spec, output_weight_matrix(spec, encoding), 0.5)
    if n_processes <= 1:
        points = evaluate_grid_points(spec, encoding, dataset, grid, epsilon)
    else:
        args = [
            (spec, encoding, dataset, chunk, epsilon)
            for chunk in split_among_processes(grid, n_processes)
        ]
        nested_points = starmap_in_parallel(
            evaluate_grid_points, args, {'n_processes': n_processes}
        )
        points = [point for chunk_points in nested_points for point in chunk_points]
    logger.info(
        f"Swept {len(grid)} scaling factors; sufficient scaling factor is {sufficient_c_s:.6f}."
    )
    return SweepResult(tuple(points), sufficient_c_s)


def run_bound_config(
        dim: int,
        n_intervals: int,
        num_classes: int,
        margin: float,
        seed: int,
        n_samples: int,
        epsilon: float
) -> BoundSuiteRow:
    """Build 2-layer network with sufficient scaling for a random spec and evaluate it."""
    spec = random_spec_1d(dim, n_intervals, num_classes, margin, seed)
    dataset = sample_1d(spec, SamplerConfig(seed, n_samples))
    encoding = one_hot_encoding(num_classes)
    network = build_theorem1(spec, encoding, ScalingPolicy.sufficient_for_epsilon(epsilon))
    report = evaluate(network, encoding, spec, dataset, epsilon)
    return BoundSuiteRow(
        seed, dim, n_intervals, num_classes, margin, network.info.c_s_used, report
    )


def run_lemma_config(
        dim: int,
        axis_sizes: tuple[int, ...],
        num_classes: int,
        margin: float,
        seed: int,
        n_samples: int,
        epsilon: float
) -> LemmaSuiteRow:
    """Build 4-layer network for a random spec and check its subnetworks and predictions."""
    spec = random_spec_nd(dim, axis_sizes, num_classes, margin, seed)
    dataset = sample_nd(spec, SamplerConfig(seed, n_samples))
    encoding = one_hot_encoding(num_classes)
    network = build_theorem2(spec, encoding, epsilon)
    report = evaluate(network, encoding, spec, dataset, epsilon)
    agreement = oracle_agreement(network, encoding, spec, dataset)
    gaps = [lemma_margin_gap(network, spec, x) for x, _ in dataset]
    max_gap = max((gap for gap in gaps if gap is not None), default=0.0)
    return LemmaSuiteRow(
        seed, dim, spec.axis_sizes, num_classes, margin, agreement, max_gap,
        is_rank_bijective(spec.axis_sizes), report
    )


def run_configs(fn: Any, args: list[tuple], n_processes: int) -> list[Any]:
    """Run configurations sequentially or in parallel."""
    if n_processes <= 1:
        return [fn(*x) for x in args]
    return starmap_in_parallel(fn, args, {'n_processes': n_processes})


def run_bound_suite(
        n_configs: int = 100,
        n_samples: int = 200,
        seed: int = 0,
        epsilon: float = 0.5,
        n_processes: int = 1
) -> list[BoundSuiteRow]:
    """
    Check guarantees of 2-layer networks on random single-projection specs.

    Configurations are taken from a shuffled product of dimensionalities, numbers of intervals,
    numbers of classes, and margins; if more configurations are requested, the product is
    traversed again.

    :param n_configs:
        number of random specs
    :param n_samples:
        number of points per spec
    :param seed:
        seed of random numbers generator
    :param epsilon:
        allowed output error
    :param n_processes:
        number of processes
    :return:
        results for each configuration
    """
    combinations = list(itertools.product(
        BOUND_SUITE_DIMS, BOUND_SUITE_N_INTERVALS, SUITE_NUM_CLASSES, SUITE_MARGINS
    ))
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(combinations))
    seeds = rng.integers(0, 2 ** 32, size=n_configs)
    args = []
    for config_index in range(n_configs):
        dim, n_intervals, num_classes, margin = combinations[order[config_index % len(order)]]
        args.append((
            dim, n_intervals, num_classes, margin, int(seeds[config_index]), n_samples, epsilon
        ))
    rows = run_configs(run_bound_config, args, n_processes)
    n_passed = sum(row.passed for row in rows)
    logger.info(f"{n_passed} of {len(rows)} single-projection configurations passed.")
    return rows


def run_lemma_suite(
        n_specs: int = 30,
        n_samples: int = 200,
        seed: int = 0,
        epsilon: float = 0.5,
        n_processes: int = 1
) -> list[LemmaSuiteRow]:
    """
    Check guarantees of 4-layer networks on random multi-projection specs.

    :param n_specs:
        number of random specs
    :param n_samples:
        number of points per spec
    :param seed:
        seed of random numbers generator
    :param epsilon:
        allowed output error
    :param n_processes:
        number of processes
    :return:
        results for each spec
    """
    rng = np.random.default_rng(seed)
    args = []
    for _ in range(n_specs):
        n_axes = int(rng.choice(LEMMA_SUITE_N_AXES))
        axis_sizes = tuple(
            int(x) for x in rng.integers(1, LEMMA_SUITE_MAX_AXIS_SIZE + 1, size=n_axes)
        )
        dim = int(rng.integers(n_axes, LEMMA_SUITE_MAX_DIM + 1))
        num_classes = int(rng.choice(SUITE_NUM_CLASSES))
        margin = float(rng.choice(SUITE_MARGINS))
        spec_seed = int(rng.integers(0, 2 ** 32))
        args.append((dim, axis_sizes, num_classes, margin, spec_seed, n_samples, epsilon))
    rows = run_configs(run_lemma_config, args, n_processes)
    n_passed = sum(row.passed for row in rows)
    logger.info(f"{n_passed} of {len(rows)} multi-projection configurations passed.")
    return rows


def find_zero_threshold(points: tuple[SweepPoint, ...]) -> Optional[float]:
    """
    Find the smallest scaling factor starting from which no points are misclassified.

    :param points:
        results of a sweep
    :return:
        scaling factor or `None` if the last grid point still has errors
    """
    threshold = None
    for point in reversed(points):
        if point.n_misclassified != 0:
            break
        threshold = point.c_s
    return threshold
