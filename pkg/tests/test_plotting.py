"""
Test `saturnet.plotting` module.
"""


import os
from typing import Any

import numpy as np
import pytest

pytest.importorskip('matplotlib')

from saturnet.domain import LabeledDataset  # noqa: E402
from saturnet.errors import DimensionMismatch  # noqa: E402
from saturnet.experiments import SweepPoint, SweepResult  # noqa: E402
from saturnet.plotting import plot_dataset, plot_sweep  # noqa: E402


@pytest.mark.parametrize("sufficient_c_s", [2.5, float('nan')])
def test_plot_sweep(tmp_path: Any, sufficient_c_s: float) -> None:
    """Test `plot_sweep` function."""
    points = tuple(SweepPoint(float(c_s), max(10 - 3 * c_s, 0), 0.0, 1.0) for c_s in range(1, 5))
    result = SweepResult(
        points=points,
        sufficient_c_s=sufficient_c_s,
    )
    path = os.path.join(tmp_path, 'sweep.png')
    plot_sweep(result, path)
    assert os.path.getsize(path) > 0


def test_plot_dataset(tmp_path: Any) -> None:
    """Test `plot_dataset` function."""
    rng = np.random.default_rng(0)
    dataset = LabeledDataset(2, rng.normal(size=(50, 2)), rng.integers(1, 4, size=50))
    path = os.path.join(tmp_path, 'data.png')
    plot_dataset(dataset, path)
    assert os.path.getsize(path) > 0


def test_plot_dataset_with_wrong_dimension(tmp_path: Any) -> None:
    """Test that `plot_dataset` function accepts only 2-dimensional datasets."""
    dataset = LabeledDataset(3, np.zeros((2, 3)), [1, 2])
    with pytest.raises(DimensionMismatch):
        plot_dataset(dataset, os.path.join(tmp_path, 'data.png'))
