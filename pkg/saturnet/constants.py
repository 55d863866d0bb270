"""
Store numeric constants that are not meant to be tuned from a config.
"""


# Tolerance for checking that a projection vector has unit Euclidean norm.
UNIT_NORM_TOLERANCE = 1e-12
# Tolerance for checking that sampling weights sum up to one.
WEIGHTS_SUM_TOLERANCE = 1e-9
# Tolerance for deciding whether the upper end of a sweep grid is reached by whole steps.
GRID_TOLERANCE = 1e-9
# Slack added to the right-hand side of the check that subnetwork outputs stay near
# the diagonal position of their region.
LEMMA_MARGIN_SLACK = 1e-9
# Tolerance for checking that projection vectors of several axes are orthonormal.
ORTHONORMALITY_TOLERANCE = 1e-10

# Allowed error of each subnetwork that maps inputs to per-axis ranks is `1 / (4 * n)`.
SUBNETWORK_TOLERANCE_FACTOR = 4

# 17 significant digits are enough to restore any IEEE 754 double exactly.
FLOAT_FORMAT = '%.17g'
LABEL_FORMAT = '%d'

SIGMOID_ACTIVATION = 'sigmoid'
IDENTITY_ACTIVATION = 'identity'
ACTIVATIONS = (SIGMOID_ACTIVATION, IDENTITY_ACTIVATION)
