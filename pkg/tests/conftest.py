"""
Define fixtures and constants.
"""


from tempfile import NamedTemporaryFile

import pytest

from saturnet.domain import ProjectionAxis, SeparabilitySpec1D, SeparabilitySpecND


SIMPLE_SPEC_1D = SeparabilitySpec1D(
    dim=2,
    a=[1.0, 0.0],
    boundaries=[0.0, 1.0, 2.0],
    margin=0.1,
    interval_labels=(1, 2),
    num_classes=2,
)
THREE_INTERVALS_SPEC_1D = SeparabilitySpec1D(
    dim=2,
    a=[0.6, 0.8],
    boundaries=[0.0, 1.0, 2.5, 3.0],
    margin=0.1,
    interval_labels=(1, 2, 1),
    num_classes=2,
)
SIMPLE_SPEC_ND = SeparabilitySpecND(
    dim=2,
    axes=(
        ProjectionAxis([1.0, 0.0], [0.0, 1.0, 2.0, 3.0]),
        ProjectionAxis([0.0, 1.0], [0.0, 1.0, 2.0, 3.0, 4.0]),
    ),
    margin=0.1,
    region_labels={
        (i, j): (i - 1) + 3 * (j - 1) + 1 for i in range(1, 4) for j in range(1, 5)
    },
    num_classes=12,
)
TEN_CLASSES_SPEC_ND = SeparabilitySpecND(
    dim=2,
    axes=SIMPLE_SPEC_ND.axes,
    margin=0.1,
    region_labels={
        (i, j): ((i - 1) + 3 * (j - 1)) % 10 + 1 for i in range(1, 4) for j in range(1, 5)
    },
    num_classes=10,
)
# Setup with 20 intervals, 10 classes, and margin 0.1 in the plane.
SWEEP_SETUP = {'dim': 2, 'n_intervals': 20, 'num_classes': 10, 'margin': 0.1, 'seed': 7}
SWEEP_N_SAMPLES = 6000
# Setup with 3 x 4 regions, 12 classes, and margin 0.1 in the plane.
GRID_SETUP = {'dim': 2, 'axis_sizes': (3, 4), 'num_classes': 12, 'margin': 0.1, 'seed': 7}
GRID_N_SAMPLES = 2000


@pytest.fixture()
def path_to_tmp_file() -> str:
    """Get path to empty temporary file."""
    with NamedTemporaryFile() as tmp_file:
        yield tmp_file.name


@pytest.fixture()
def path_to_another_tmp_file() -> str:
    """Get path to one more empty temporary file."""
    with NamedTemporaryFile() as tmp_file:
        yield tmp_file.name
