"""
Save and load specs, datasets, networks, reports, sweeps, and run manifests.

All files are written atomically. Floats are stored with enough digits to be restored exactly,
so saving the same object twice produces identical bytes.
"""


import dataclasses
import io
import json
import logging
import warnings
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from .constants import FLOAT_FORMAT, LABEL_FORMAT
from .construction import tilde_k
from .domain import (
    BuildInfo,
    DenseLayer,
    LabeledDataset,
    ProjectionAxis,
    SeparabilitySpec1D,
    SeparabilitySpecND,
    SigmoidNetwork,
    Spec,
    validate_spec,
)
from .errors import DimensionMismatch
from .experiments import SweepPoint, SweepResult
from .utils import write_atomically


logger = logging.getLogger(__name__)

SPEC_1D_KIND = '1d'
SPEC_ND_KIND = 'nd'
SUFFICIENT_C_S_MARKER = '# sufficient_c_s'
SWEEP_COLUMNS = ('c_s', 'n_misclassified', 'max_deviation', 'bound_max')


@dataclass(frozen=True)
class RunManifest:
    """Description of a CLI run that is sufficient to reproduce its outputs."""
    command: str
    flags: dict[str, Any]
    seed: Optional[int]
    inputs: list[str]
    outputs: list[str]
    version: str
    duration_in_seconds: float = field(default=0.0)


def dump_json(data: Any) -> str:
    """Serialize object to JSON text with stable formatting."""
    return json.dumps(data, indent=2) + '\n'


def write_json(data: Any, path: str) -> None:
    """Write object to JSON file atomically."""
    write_atomically(path, dump_json(data))
    logger.info(f"Saved {path}.")


def read_json(path: str) -> Any:
    """Read JSON file."""
    with open(path) as in_file:
        return json.load(in_file)


def spec_to_dict(spec: Spec) -> dict[str, Any]:
    """
    Convert spec to JSON-compatible dictionary.

    Regions of a multi-projection spec are listed in the order of their ranks.

    :param spec:
        spec of any kind
    :return:
        dictionary
    """
    if isinstance(spec, SeparabilitySpecND):
        regions = sorted(spec.region_labels.items(), key=lambda x: tilde_k(spec.axis_sizes, x[0]))
        return {
            'kind': SPEC_ND_KIND,
            'dim': spec.dim,
            'axes': [
                {'a': axis.a.tolist(), 'boundaries': axis.boundaries.tolist()}
                for axis in spec.axes
            ],
            'margin': spec.margin,
            'region_labels': [
                {'index': list(multi_index), 'label': label} for multi_index, label in regions
            ],
            'num_classes': spec.num_classes,
        }
    return {
        'kind': SPEC_1D_KIND,
        'dim': spec.dim,
        'a': spec.a.tolist(),
        'boundaries': spec.boundaries.tolist(),
        'margin': spec.margin,
        'interval_labels': list(spec.interval_labels),
        'num_classes': spec.num_classes,
    }


def spec_from_dict(data: dict[str, Any]) -> Spec:
    """
    Restore spec from dictionary and validate it.

    :param data:
        dictionary created by `spec_to_dict`
    :return:
        spec
    """
    kind = data.get('kind', SPEC_1D_KIND)
    if kind == SPEC_ND_KIND:
        spec = SeparabilitySpecND(
            dim=int(data['dim']),
            axes=tuple(ProjectionAxis(x['a'], x['boundaries']) for x in data['axes']),
            margin=data['margin'],
            region_labels={tuple(x['index']): x['label'] for x in data['region_labels']},
            num_classes=int(data['num_classes']),
        )
    elif kind == SPEC_1D_KIND:
        spec = SeparabilitySpec1D(
            dim=int(data['dim']),
            a=data['a'],
            boundaries=data['boundaries'],
            margin=data['margin'],
            interval_labels=tuple(data['interval_labels']),
            num_classes=int(data['num_classes']),
        )
    else:
        raise ValueError(f"Unknown kind of spec: {kind}.")
    validate_spec(spec)
    return spec


def save_spec(spec: Spec, path: str) -> None:
    """Save spec to JSON file."""
    write_json(spec_to_dict(spec), path)


def load_spec(path: str) -> Spec:
    """Load spec from JSON file."""
    return spec_from_dict(read_json(path))


def save_dataset(dataset: LabeledDataset, path: str) -> None:
    """
    Save dataset to CSV file with header `x1,...,xd,y`.

    :param dataset:
        dataset
    :param path:
        path to the file
    :return:
        None
    """
    header = ','.join([f'x{i}' for i in range(1, dataset.dim + 1)] + ['y'])
    table = np.column_stack([dataset.points, dataset.labels.astype(float)])
    buffer = io.StringIO()
    np.savetxt(
        buffer,
        table.reshape(-1, dataset.dim + 1),
        fmt=[FLOAT_FORMAT] * dataset.dim + [LABEL_FORMAT],
        delimiter=',',
        header=header,
        comments=''
    )
    write_atomically(path, buffer.getvalue())
    logger.info(f"Saved {len(dataset)} points to {path}.")


def load_dataset(path: str) -> LabeledDataset:
    """
    Load dataset from CSV file.

    :param path:
        path to the file
    :return:
        dataset
    """
    with open(path) as in_file:
        header = in_file.readline().strip().split(',')
    dim = len(header) - 1
    expected_header = [f'x{i}' for i in range(1, dim + 1)] + ['y']
    if dim < 1 or header != expected_header:
        raise DimensionMismatch(f"Header of {path} is not of form 'x1,...,xd,y': {header}.")
    with warnings.catch_warnings():
        warnings.simplefilter('ignore', UserWarning)
        table = np.loadtxt(path, delimiter=',', skiprows=1, ndmin=2)
    if table.size == 0:
        table = table.reshape(0, dim + 1)
    if table.shape[1] != dim + 1:
        raise DimensionMismatch(f"Rows of {path} do not match its header.")
    labels = table[:, -1]
    if not np.array_equal(labels, np.round(labels)):
        raise ValueError(f"Labels in {path} must be integers.")
    return LabeledDataset(dim, table[:, :-1], labels.astype(np.int64))


def network_to_dict(network: SigmoidNetwork) -> dict[str, Any]:
    """Convert network to JSON-compatible dictionary."""
    return {
        'layers': [
            {
                'weights': layer.weights.tolist(),
                'biases': layer.biases.tolist(),
                'activation': layer.activation,
            }
            for layer in network.layers
        ]
    }


def network_from_dict(data: dict[str, Any]) -> SigmoidNetwork:
    """Restore network from dictionary."""
    layers = tuple(
        DenseLayer(np.array(x['weights'], dtype=float), x['biases'], x['activation'])
        for x in data['layers']
    )
    return SigmoidNetwork(layers)


def save_network(network: SigmoidNetwork, path: str) -> None:
    """Save network to JSON file."""
    write_json(network_to_dict(network), path)


def load_network(path: str) -> SigmoidNetwork:
    """Load network from JSON file."""
    return network_from_dict(read_json(path))


def save_build_info(info: BuildInfo, path: str) -> None:
    """Save metadata of a constructed network to JSON file."""
    data = dataclasses.asdict(info)
    data['per_column_weight_norms'] = list(info.per_column_weight_norms)
    data['subnetwork_c_s'] = list(info.subnetwork_c_s)
    write_json(data, path)


def save_dataclass(instance: Any, path: str) -> None:
    """Save report or manifest to JSON file."""
    write_json(dataclasses.asdict(instance), path)


def save_sweep(result: SweepResult, path: str) -> None:
    """
    Save misclassification curve to CSV file.

    Sufficient scaling factor is stored in a trailing comment row.

    :param result:
        results of a sweep
    :param path:
        path to the file
    :return:
        None
    """
    lines = [','.join(SWEEP_COLUMNS)]
    for point in result.points:
        lines.append(
            f'{point.c_s!r},{point.n_misclassified},'
            f'{point.max_deviation!r},{point.bound_max!r}'
        )
    lines.append(f'{SUFFICIENT_C_S_MARKER},{result.sufficient_c_s!r}')
    write_atomically(path, '\n'.join(lines) + '\n')
    logger.info(f"Saved sweep over {len(result.points)} scaling factors to {path}.")


def load_sweep(path: str) -> SweepResult:
    """
    Load misclassification curve from CSV file.

    :param path:
        path to the file
    :return:
        results of a sweep
    """
    points = []
    sufficient_c_s = float('nan')
    with open(path) as in_file:
        lines = in_file.read().splitlines()
    if not lines or lines[0] != ','.join(SWEEP_COLUMNS):
        raise ValueError(f"File {path} has no sweep header.")
    for line in lines[1:]:
        if line.startswith(SUFFICIENT_C_S_MARKER):
            sufficient_c_s = float(line.split(',')[1])
            continue
        c_s, n_misclassified, max_deviation, bound_max = line.split(',')
        points.append(
            SweepPoint(float(c_s), int(n_misclassified), float(max_deviation), float(bound_max))
        )
    return SweepResult(tuple(points), sufficient_c_s)
