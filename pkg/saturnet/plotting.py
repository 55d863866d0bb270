"""
Draw misclassification curves and datasets.

This module requires `matplotlib` which is installed with `saturnet[plot]`.
"""


import logging

import matplotlib as mpl
mpl.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .domain import LabeledDataset  # noqa: E402
from .errors import DimensionMismatch  # noqa: E402
from .experiments import SweepResult  # noqa: E402


logger = logging.getLogger(__name__)

FIGURE_SIZE = (6.4, 4.0)
DPI = 150


def plot_sweep(result: SweepResult, path: str) -> None:
    """
    Plot number of misclassified points against scaling factor.

    Sufficient scaling factor is marked with a vertical line.

    :param result:
        results of a sweep
    :param path:
        path where image is going to be saved
    :return:
        None
    """
    fig, ax = plt.subplots(figsize=FIGURE_SIZE)
    c_s_values = [point.c_s for point in result.points]
    counts = [point.n_misclassified for point in result.points]
    ax.plot(c_s_values, counts, marker='o', markersize=3, label='misclassified points')
    if np.isfinite(result.sufficient_c_s):
        ax.axvline(
            result.sufficient_c_s, color='gray', linestyle='--',
            label=f'sufficient $c_s$ = {result.sufficient_c_s:.2f}'
        )
    ax.set_xlabel('scaling factor $c_s$')
    ax.set_ylabel('number of misclassified points')
    ax.legend()
    fig.savefig(path, dpi=DPI, bbox_inches='tight')
    plt.close(fig)
    logger.info(f"Saved sweep plot to {path}.")


def plot_dataset(dataset: LabeledDataset, path: str) -> None:
    """
    Draw 2D points colored by their labels.

    :param dataset:
        2-dimensional dataset
    :param path:
        path where image is going to be saved
    :return:
        None
    """
    if dataset.dim != 2:
        raise DimensionMismatch(f"Only 2-dimensional datasets can be drawn, got {dataset.dim}.")
    fig, ax = plt.subplots(figsize=FIGURE_SIZE)
    scatter = ax.scatter(
        dataset.points[:, 0], dataset.points[:, 1], c=dataset.labels, cmap='tab20', s=4
    )
    fig.colorbar(scatter, ax=ax, label='label')
    ax.set_xlabel('$x_1$')
    ax.set_ylabel('$x_2$')
    ax.set_aspect('equal')
    fig.savefig(path, dpi=DPI, bbox_inches='tight')
    plt.close(fig)
    logger.info(f"Saved dataset plot to {path}.")
