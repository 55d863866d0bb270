"""
Check constructed networks against oracles and theoretical bounds.
"""


import dataclasses
import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Union

import numpy as np

from .constants import LEMMA_MARGIN_SLACK, SUBNETWORK_TOLERANCE_FACTOR
from .construction import tilde_k
from .domain import (
    LabelEncoding,
    LabeledDataset,
    SeparabilitySpec1D,
    SeparabilitySpecND,
    SigmoidNetwork,
    Spec,
)
from .errors import DimensionMismatch, NonPositiveEpsilon
from .network import classify, decode_output, forward_layers, infer_scaling
from .utils import starmap_in_parallel


logger = logging.getLogger(__name__)

DEFAULT_BOUND_SLACK = 1e-12


class Placement(Enum):
    """Location of a point that does not belong to any margined interval or region."""
    MARGIN_BAND = 'margin_band'
    OUT_OF_SUPPORT = 'out_of_support'


Lookup1D = Union[int, Placement]
LookupND = Union[tuple[int, ...], Placement]
Lookup = Union[int, tuple[int, ...], Placement]


@dataclass(frozen=True)
class BoundViolations:
    """Numbers of points that break saturation bounds of hidden neurons or output error bound."""
    lower_saturation: int = 0
    upper_saturation: int = 0
    error_bound: int = 0

    @property
    def total(self) -> int:
        return self.lower_saturation + self.upper_saturation + self.error_bound


@dataclass(frozen=True)
class EvalReport:
    """
    Results of evaluation of a network on a dataset.

    Points that lie in margin bands or out of support are counted in `n_unsupported` only.
    """
    n_points: int
    n_misclassified: int
    max_output_deviation: float
    bound_violations: BoundViolations
    epsilon_used: float
    c_s_used: Optional[float]
    n_unsupported: int = 0
    n_epsilon_violations: int = 0
    lemma_margin_violations: int = 0

    @classmethod
    def empty(cls, epsilon: float, c_s: Optional[float]) -> 'EvalReport':
        return cls(0, 0, 0.0, BoundViolations(), epsilon, c_s)


@dataclass(frozen=True)
class AgreementReport:
    """Agreement between predictions of a network and labels assigned by an oracle."""
    fraction: float
    n_agree: int
    n_compared: int
    n_margin_band: int
    n_out_of_support: int


def locate_projection(boundaries: np.ndarray, margin: float, projection: float) -> Lookup1D:
    """
    Find margined interval containing a projection.

    :param boundaries:
        strictly increasing boundaries of intervals
    :param margin:
        margin δ
    :param projection:
        value of `a @ x`
    :return:
        1-based index of interval or placement of a point outside of all margined intervals
    """
    if not boundaries[0] <= projection <= boundaries[-1]:
        return Placement.OUT_OF_SUPPORT
    index = int(np.searchsorted(boundaries, projection, side='right'))
    index = min(index, len(boundaries) - 1)
    if boundaries[index - 1] + margin < projection < boundaries[index] - margin:
        return index
    return Placement.MARGIN_BAND


def check_point_dimension(x: np.ndarray, dim: int) -> np.ndarray:
    """Convert point to array and check its shape."""
    x = np.asarray(x, dtype=float)
    if x.shape != (dim,):
        raise DimensionMismatch(f"Point of shape {x.shape} is not {dim}-dimensional.")
    return x


def interval_lookup(spec: SeparabilitySpec1D, x: np.ndarray) -> Lookup1D:
    """
    Find interval of a single-projection spec that contains a point.

    :param spec:
        single-projection spec
    :param x:
        point
    :return:
        1-based index of interval, `Placement.MARGIN_BAND` if the point is within margin
        from a boundary, or `Placement.OUT_OF_SUPPORT` if its projection is out of
        `[b_1, b_{k+1}]`
    """
    x = check_point_dimension(x, spec.dim)
    return locate_projection(spec.boundaries, spec.margin, float(spec.a @ x))


def region_lookup(spec: SeparabilitySpecND, x: np.ndarray) -> LookupND:
    """
    Find region of a multi-projection spec that contains a point.

    :param spec:
        multi-projection spec
    :param x:
        point
    :return:
        multi-index of region, `Placement.MARGIN_BAND` if the point is within margin
        from a boundary along any axis, or `Placement.OUT_OF_SUPPORT` otherwise
    """
    x = check_point_dimension(x, spec.dim)
    placements = [
        locate_projection(axis.boundaries, spec.margin, float(axis.a @ x))
        for axis in spec.axes
    ]
    if Placement.MARGIN_BAND in placements:
        return Placement.MARGIN_BAND
    if Placement.OUT_OF_SUPPORT in placements:
        return Placement.OUT_OF_SUPPORT
    return tuple(placements)


def oracle_label(spec: Spec, x: np.ndarray) -> tuple[Lookup, Optional[int]]:
    """
    Find interval or region of a point and its true label.

    :param spec:
        spec of any kind
    :param x:
        point
    :return:
        result of lookup and label (`None` for points outside of support)
    """
    if isinstance(spec, SeparabilitySpecND):
        placement = region_lookup(spec, x)
        labels = spec.region_labels
    else:
        placement = interval_lookup(spec, x)
        labels = dict(enumerate(spec.interval_labels, start=1))
    if isinstance(placement, Placement):
        return placement, None
    return placement, labels[placement]


def combine_reports(first: EvalReport, second: EvalReport) -> EvalReport:
    """
    Merge reports on two disjoint parts of a dataset.

    :param first:
        report on the first part
    :param second:
        report on the second part
    :return:
        report on the whole dataset
    """
    violations = BoundViolations(
        *(
            getattr(first.bound_violations, x.name) + getattr(second.bound_violations, x.name)
            for x in dataclasses.fields(BoundViolations)
        )
    )
    return EvalReport(
        n_points=first.n_points + second.n_points,
        n_misclassified=first.n_misclassified + second.n_misclassified,
        max_output_deviation=max(first.max_output_deviation, second.max_output_deviation),
        bound_violations=violations,
        epsilon_used=first.epsilon_used,
        c_s_used=first.c_s_used,
        n_unsupported=first.n_unsupported + second.n_unsupported,
        n_epsilon_violations=first.n_epsilon_violations + second.n_epsilon_violations,
        lemma_margin_violations=first.lemma_margin_violations + second.lemma_margin_violations,
    )


def get_scaling(network: SigmoidNetwork) -> Optional[float]:
    """Get scaling factor of the last sigmoid layer."""
    if network.info is not None:
        return network.info.c_s_used
    return infer_scaling(network)


def has_saturation_structure(network: SigmoidNetwork, spec: Optional[Spec]) -> bool:
    """Check that a network is a 2-layer network with one hidden neuron per interval of a spec."""
    return (
        isinstance(spec, SeparabilitySpec1D)
        and len(network.layers) == 2
        and network.layers[0].n_outputs == spec.n_intervals
    )


def has_subnetwork_structure(network: SigmoidNetwork, spec: Optional[Spec]) -> bool:
    """Check that a network is a 4-layer network whose second layer has one output per axis."""
    return (
        isinstance(spec, SeparabilitySpecND)
        and len(network.layers) == 4
        and network.layers[1].n_outputs == len(spec.axes)
    )


def count_saturation_violations(
        hidden_outputs: np.ndarray, interval: int, decay: float, slack: float
) -> tuple[int, int]:
    """
    Check that neurons below the interval of a point are almost on and others are almost off.

    :param hidden_outputs:
        outputs of hidden layer
    :param interval:
        1-based index of interval containing the point
    :param decay:
        `exp(-c_s * δ)`
    :param slack:
        tolerance to rounding errors
    :return:
        1 or 0 for each of the two bounds
    """
    lower = hidden_outputs[:interval]
    upper = hidden_outputs[interval:]
    lower_violated = bool(np.any(lower <= 1 - decay - slack))
    upper_violated = bool(np.any(upper >= decay + slack))
    return int(lower_violated), int(upper_violated)


def lemma_margin_bound(n_axes: int) -> float:
    """Get the largest allowed distance between projection of subnetwork outputs and its target."""
    return 1 / (SUBNETWORK_TOLERANCE_FACTOR * math.sqrt(n_axes))


def compute_lemma_gap(
        subnetwork_outputs: np.ndarray, axis_sizes: tuple[int, ...], multi_index: tuple[int, ...]
) -> float:
    """Compute distance between diagonal projection of subnetwork outputs and rank of region."""
    root = math.sqrt(len(axis_sizes))
    projection = float(np.sum(subnetwork_outputs)) / root
    return abs(projection - tilde_k(axis_sizes, multi_index) / root)


def evaluate_points(
        network: SigmoidNetwork,
        encoding: LabelEncoding,
        spec: Optional[Spec],
        points: np.ndarray,
        labels: np.ndarray,
        epsilon: float,
        slack: float = DEFAULT_BOUND_SLACK
) -> EvalReport:
    """
    Evaluate network on a batch of points.

    :param network:
        network
    :param encoding:
        encoding of labels
    :param spec:
        spec the points are drawn from; if it is passed, points outside of support are skipped
        and bounds specific to `spec` are checked
    :param points:
        matrix of points
    :param labels:
        labels of points
    :param epsilon:
        allowed output error
    :param slack:
        tolerance to rounding errors in bound checks
    :return:
        report
    """
    c_s = get_scaling(network)
    check_saturation = has_saturation_structure(network, spec) and c_s is not None
    check_lemma = has_subnetwork_structure(network, spec)
    if check_saturation:
        decay = math.exp(-c_s * spec.margin)
        output_weights = network.layers[-1].weights
        max_norm = float(np.max(np.linalg.norm(output_weights, axis=1)))
        error_bound = max_norm * math.sqrt(spec.n_intervals) * decay
    if check_lemma:
        lemma_bound = lemma_margin_bound(len(spec.axes)) + LEMMA_MARGIN_SLACK

    counts = {
        'n_misclassified': 0, 'n_unsupported': 0, 'n_epsilon_violations': 0,
        'lemma_margin_violations': 0, 'lower_saturation': 0, 'upper_saturation': 0,
        'error_bound': 0,
    }
    max_deviation = 0.0
    for x, y in zip(points, labels):
        placement = None
        if spec is not None:
            placement, _ = oracle_label(spec, x)
            if isinstance(placement, Placement):
                counts['n_unsupported'] += 1
                continue
        layer_outputs = forward_layers(network, x)
        output = layer_outputs[-1]
        deviation = float(np.max(np.abs(output - encoding.encode(int(y)))))
        max_deviation = max(max_deviation, deviation)
        counts['n_epsilon_violations'] += int(deviation > epsilon)
        counts['n_misclassified'] += int(decode_output(encoding, output) != y)
        if check_saturation:
            lower, upper = count_saturation_violations(layer_outputs[0], placement, decay, slack)
            counts['lower_saturation'] += lower
            counts['upper_saturation'] += upper
            counts['error_bound'] += int(deviation > error_bound + slack)
        if check_lemma:
            gap = compute_lemma_gap(layer_outputs[1], spec.axis_sizes, placement)
            counts['lemma_margin_violations'] += int(gap > lemma_bound)

    return EvalReport(
        n_points=len(labels),
        n_misclassified=counts['n_misclassified'],
        max_output_deviation=max_deviation,
        bound_violations=BoundViolations(
            counts['lower_saturation'], counts['upper_saturation'], counts['error_bound']
        ),
        epsilon_used=epsilon,
        c_s_used=c_s,
        n_unsupported=counts['n_unsupported'],
        n_epsilon_violations=counts['n_epsilon_violations'],
        lemma_margin_violations=counts['lemma_margin_violations'],
    )


def check_dimensions(
        network: SigmoidNetwork,
        encoding: LabelEncoding,
        spec: Optional[Spec],
        dataset: LabeledDataset
) -> None:
    """Check that network, encoding, spec, and dataset are consistent with each other."""
    if dataset.dim != network.input_dim:
        raise DimensionMismatch(
            f"Network expects {network.input_dim}-dimensional inputs, "
            f"but dataset is {dataset.dim}-dimensional."
        )
    if encoding.out_dim != network.output_dim:
        raise DimensionMismatch(
            f"Network has {network.output_dim} outputs, but codes have length {encoding.out_dim}."
        )
    if spec is not None and spec.dim != dataset.dim:
        raise DimensionMismatch(
            f"Spec is {spec.dim}-dimensional, but dataset is {dataset.dim}-dimensional."
        )


def evaluate(
        network: SigmoidNetwork,
        encoding: LabelEncoding,
        spec: Optional[Spec],
        dataset: LabeledDataset,
        epsilon: float,
        slack: float = DEFAULT_BOUND_SLACK,
        n_processes: int = 1
) -> EvalReport:
    """
    Evaluate network on a dataset.

    For a 2-layer network and a single-projection spec, saturation of hidden neurons
    and the output error bound `max_j ||w_j|| * sqrt(k) * exp(-c_s * δ)` are checked.
    For a 4-layer network and a multi-projection spec, it is checked that diagonal
    projection of subnetwork outputs stays within `1 / (4 * sqrt(n))` from
    the scaled rank of region.

    :param network:
        network
    :param encoding:
        encoding of labels
    :param spec:
        spec the dataset is drawn from (if it is known)
    :param dataset:
        dataset
    :param epsilon:
        allowed output error
    :param slack:
        tolerance to rounding errors in bound checks
    :param n_processes:
        number of processes; if it is more than 1, dataset is split into chunks
        that are evaluated in parallel
    :return:
        report
    """
    if not epsilon > 0:
        raise NonPositiveEpsilon(f"Allowed error must be positive, got {epsilon}.")
    check_dimensions(network, encoding, spec, dataset)
    if n_processes <= 1 or len(dataset) < n_processes:
        return evaluate_points(
            network, encoding, spec, dataset.points, dataset.labels, epsilon, slack
        )
    chunks = np.array_split(np.arange(len(dataset)), n_processes)
    args = [
        (network, encoding, spec, dataset.points[chunk], dataset.labels[chunk], epsilon, slack)
        for chunk in chunks
    ]
    reports = starmap_in_parallel(evaluate_points, args, {'n_processes': n_processes})
    report = reports[0]
    for other_report in reports[1:]:
        report = combine_reports(report, other_report)
    logger.debug(f"Evaluated {len(dataset)} points in {n_processes} processes.")
    return report


def oracle_agreement(
        network: SigmoidNetwork, encoding: LabelEncoding, spec: Spec, dataset: LabeledDataset
) -> AgreementReport:
    """
    Compare predictions of a network with labels of intervals or regions containing points.

    :param network:
        network with one output per class
    :param encoding:
        one-hot encoding of labels
    :param spec:
        spec of any kind
    :param dataset:
        dataset drawn from distribution described by `spec`
    :return:
        agreement statistics; points outside of margined intervals or regions
        are counted separately and are not compared
    """
    check_dimensions(network, encoding, spec, dataset)
    n_agree = 0
    n_compared = 0
    n_margin_band = 0
    n_out_of_support = 0
    for x, _ in dataset:
        placement, label = oracle_label(spec, x)
        if placement == Placement.MARGIN_BAND:
            n_margin_band += 1
        elif placement == Placement.OUT_OF_SUPPORT:
            n_out_of_support += 1
        else:
            n_compared += 1
            n_agree += int(classify(network, encoding, x) == label)
    fraction = n_agree / n_compared if n_compared else 1.0
    return AgreementReport(fraction, n_agree, n_compared, n_margin_band, n_out_of_support)


def lemma_margin_gap(
        network: SigmoidNetwork, spec: SeparabilitySpecND, x: np.ndarray
) -> Optional[float]:
    """
    Measure how far diagonal projection of subnetwork outputs is from the scaled rank of region.

    :param network:
        4-layer network built for `spec`
    :param spec:
        multi-projection spec
    :param x:
        point
    :return:
        `|sum(p(x)) / sqrt(n) - rank / sqrt(n)|` where `p(x)` are outputs of the second layer,
        or `None` if the point is out of all regions
    """
    if not has_subnetwork_structure(network, spec):
        raise DimensionMismatch("Network has no layer with one output per axis of spec.")
    multi_index = region_lookup(spec, x)
    if isinstance(multi_index, Placement):
        return None
    subnetwork_outputs = forward_layers(network, x)[1]
    return compute_lemma_gap(subnetwork_outputs, spec.axis_sizes, multi_index)


def format_report(report: EvalReport) -> str:
    """
    Represent report as aligned lines.

    :param report:
        report
    :return:
        lines with names and values of statistics
    """
    values = dataclasses.asdict(report)
    violations = values.pop('bound_violations')
    values.update({f'{k}_violations': v for k, v in violations.items()})
    return '\n'.join(f'{name:>40}: {value}' for name, value in values.items())
