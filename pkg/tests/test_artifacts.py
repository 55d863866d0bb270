"""
Test `saturnet.artifacts` module.
"""


import json
import math

import numpy as np
import pytest

from saturnet.artifacts import (
    RunManifest,
    load_dataset,
    load_network,
    load_spec,
    load_sweep,
    read_json,
    save_build_info,
    save_dataclass,
    save_dataset,
    save_network,
    save_spec,
    save_sweep,
    spec_from_dict,
    spec_to_dict,
)
from saturnet.construction import ScalingPolicy, build_theorem1, build_theorem2
from saturnet.domain import LabeledDataset, Spec, one_hot_encoding
from saturnet.errors import (
    DegenerateInterval,
    DimensionMismatch,
    LabelOutOfRange,
    RegionLabelMissing,
)
from saturnet.experiments import SweepPoint, SweepResult
from saturnet.sampling import SamplerConfig, random_spec_1d, random_spec_nd, sample_1d
from .conftest import SIMPLE_SPEC_1D, SIMPLE_SPEC_ND


@pytest.mark.parametrize(
    "spec",
    [
        SIMPLE_SPEC_1D,
        SIMPLE_SPEC_ND,
        random_spec_1d(5, 20, 10, 0.1, seed=0),
        random_spec_nd(4, (2, 3, 2), 5, 0.01, seed=0),
    ]
)
def test_save_and_load_spec(
        spec: Spec, path_to_tmp_file: str, path_to_another_tmp_file: str
) -> None:
    """Test that spec is restored exactly and is saved to identical bytes."""
    save_spec(spec, path_to_tmp_file)
    restored_spec = load_spec(path_to_tmp_file)
    assert restored_spec == spec
    save_spec(restored_spec, path_to_another_tmp_file)
    with open(path_to_tmp_file, 'rb') as first_file:
        first_content = first_file.read()
    with open(path_to_another_tmp_file, 'rb') as second_file:
        assert second_file.read() == first_content


def test_spec_to_dict_for_regions() -> None:
    """Test that regions are listed in the order of their ranks."""
    data = spec_to_dict(SIMPLE_SPEC_ND)
    assert data['kind'] == 'nd'
    assert data['region_labels'][:4] == [
        {'index': [1, 1], 'label': 1},
        {'index': [2, 1], 'label': 2},
        {'index': [3, 1], 'label': 3},
        {'index': [1, 2], 'label': 4},
    ]


@pytest.mark.parametrize(
    "changes, expected_error",
    [
        ({'boundaries': [0.0, 0.1, 2.0]}, DegenerateInterval),
        ({'kind': 'unknown'}, ValueError),
    ]
)
def test_spec_from_dict_with_invalid_data(changes: dict, expected_error: type) -> None:
    """Test that `spec_from_dict` function validates restored spec."""
    data = spec_to_dict(SIMPLE_SPEC_1D)
    data.update(changes)
    with pytest.raises(expected_error):
        spec_from_dict(data)


def test_spec_from_dict_with_fractional_label() -> None:
    """Test that `spec_from_dict` function does not truncate fractional labels."""
    data = spec_to_dict(SIMPLE_SPEC_1D)
    data['interval_labels'][-1] = 1.5
    with pytest.raises(LabelOutOfRange):
        spec_from_dict(data)


def test_spec_from_dict_with_missing_region() -> None:
    """Test that `spec_from_dict` function rejects specs without label of a region."""
    data = spec_to_dict(SIMPLE_SPEC_ND)
    data['region_labels'] = data['region_labels'][:-1]
    with pytest.raises(RegionLabelMissing):
        spec_from_dict(data)


def test_save_and_load_dataset(path_to_tmp_file: str, path_to_another_tmp_file: str) -> None:
    """Test that dataset is restored exactly and is saved to identical bytes."""
    spec = random_spec_1d(3, 5, 4, 0.1, seed=1)
    dataset = sample_1d(spec, SamplerConfig(seed=1, n_samples=100))
    save_dataset(dataset, path_to_tmp_file)
    restored_dataset = load_dataset(path_to_tmp_file)
    assert restored_dataset == dataset
    assert restored_dataset.labels.dtype == np.int64
    save_dataset(restored_dataset, path_to_another_tmp_file)
    with open(path_to_tmp_file) as first_file, open(path_to_another_tmp_file) as second_file:
        first_content = first_file.read()
        assert first_content == second_file.read()
    lines = first_content.splitlines()
    assert lines[0] == 'x1,x2,x3,y'
    assert len(lines) == 101
    assert lines[1].split(',')[-1] == str(dataset.labels[0])


@pytest.mark.parametrize(
    "content, expected",
    [
        ('x1,y\n0.5,1\n', LabeledDataset(1, [[0.5]], [1])),
        (
            'x1,x2,y\n0.5,-1.25,2\n1e-20,3,1\n',
            LabeledDataset(2, [[0.5, -1.25], [1e-20, 3.0]], [2, 1])
        ),
        ('x1,x2,y\n', LabeledDataset(2, np.empty((0, 2)), [])),
    ]
)
def test_load_dataset(path_to_tmp_file: str, content: str, expected: LabeledDataset) -> None:
    """Test `load_dataset` function."""
    with open(path_to_tmp_file, 'w') as tmp_file:
        tmp_file.write(content)
    assert load_dataset(path_to_tmp_file) == expected


@pytest.mark.parametrize(
    "content, expected_error",
    [
        ('a,b,y\n0.5,1,1\n', DimensionMismatch),
        ('y\n1\n', DimensionMismatch),
        ('x1,x2,y\n0.5,1\n', DimensionMismatch),
        ('x1,y\n0.5,1.5\n', ValueError),
    ]
)
def test_load_dataset_with_invalid_content(
        path_to_tmp_file: str, content: str, expected_error: type
) -> None:
    """Test that `load_dataset` function rejects malformed files."""
    with open(path_to_tmp_file, 'w') as tmp_file:
        tmp_file.write(content)
    with pytest.raises(expected_error):
        load_dataset(path_to_tmp_file)


@pytest.mark.parametrize("kind", ['2-layer', '4-layer'])
def test_save_and_load_network(
        path_to_tmp_file: str, path_to_another_tmp_file: str, kind: str
) -> None:
    """Test that network is restored exactly and its metadata are saved."""
    if kind == '2-layer':
        network = build_theorem1(
            SIMPLE_SPEC_1D, one_hot_encoding(2), ScalingPolicy.sufficient_for_epsilon(0.5)
        )
    else:
        network = build_theorem2(SIMPLE_SPEC_ND, one_hot_encoding(12), epsilon=0.5)
    save_network(network, path_to_tmp_file)
    restored_network = load_network(path_to_tmp_file)
    assert restored_network == network
    assert restored_network.info is None
    save_build_info(network.info, path_to_another_tmp_file)
    info = read_json(path_to_another_tmp_file)
    assert info['c_s_used'] == network.info.c_s_used
    assert info['formula_param_count'] == network.info.formula_param_count
    assert info['per_column_weight_norms'] == list(network.info.per_column_weight_norms)


def test_save_and_load_sweep(path_to_tmp_file: str) -> None:
    """Test that sweep results are restored exactly."""
    result = SweepResult(
        points=(
            SweepPoint(0.5, 120, 0.9876543210123456, 14.142135623730951),
            SweepPoint(1.0, 3, 0.1, 1e-30),
        ),
        sufficient_c_s=29.957322735539908,
    )
    save_sweep(result, path_to_tmp_file)
    with open(path_to_tmp_file) as tmp_file:
        lines = tmp_file.read().splitlines()
    assert lines[0] == 'c_s,n_misclassified,max_deviation,bound_max'
    assert lines[1] == '0.5,120,0.9876543210123456,14.142135623730951'
    assert lines[-1] == '# sufficient_c_s,29.957322735539908'
    assert load_sweep(path_to_tmp_file) == result


def test_load_sweep_without_header(path_to_tmp_file: str) -> None:
    """Test that `load_sweep` function rejects files without header."""
    with open(path_to_tmp_file, 'w') as tmp_file:
        tmp_file.write('0.5,1,0.1,0.2\n')
    with pytest.raises(ValueError):
        load_sweep(path_to_tmp_file)


def test_load_sweep_without_sufficient_c_s(path_to_tmp_file: str) -> None:
    """Test that missing sufficient scaling factor is restored as NaN."""
    with open(path_to_tmp_file, 'w') as tmp_file:
        tmp_file.write('c_s,n_misclassified,max_deviation,bound_max\n0.5,1,0.1,0.2\n')
    result = load_sweep(path_to_tmp_file)
    assert len(result.points) == 1
    assert math.isnan(result.sufficient_c_s)


def test_save_dataclass(path_to_tmp_file: str) -> None:
    """Test that manifest is saved as JSON object with all its fields."""
    manifest = RunManifest(
        command='gen',
        flags={'seed': 7, 'mode': '1d'},
        seed=7,
        inputs=[],
        outputs=['spec.json', 'data.csv'],
        version='0.1.0',
        duration_in_seconds=0.25,
    )
    save_dataclass(manifest, path_to_tmp_file)
    with open(path_to_tmp_file) as tmp_file:
        content = tmp_file.read()
    assert content.endswith('}\n')
    assert json.loads(content) == {
        'command': 'gen',
        'flags': {'seed': 7, 'mode': '1d'},
        'seed': 7,
        'inputs': [],
        'outputs': ['spec.json', 'data.csv'],
        'version': '0.1.0',
        'duration_in_seconds': 0.25,
    }
