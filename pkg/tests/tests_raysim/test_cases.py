import numpy as np

from propnet import Profile
from propnet.exceptions import ShapeMismatch, DimensionMismatch

##########################
# TEST CASES FREE SPACE  #
##########################

TEST_FREE_SPACE_LOSS = [
    (1000.0, 1000.0, 92.44),
    (1000.0, 1.0, 32.44),
    (2000.0, 1000.0, 92.44 + 20.0 * np.log10(2.0)),
    (100.0, 900.0, 32.44 - 20.0 + 20.0 * np.log10(900.0)),
]

##########################
# TEST CASES KNIFE EDGE  #
##########################

TEST_KNIFE_EDGE_LOSS = [
    (-1.0, 0.0, 1e-12),
    (-0.78, 0.0, 1e-12),
    (0.0, 6.03, 0.01),
    (1.634, 17.44, 0.01),
    (-0.5, 6.9 + 20.0 * np.log10(np.sqrt(0.36 + 1.0) - 0.6), 1e-9),
]
TEST_KNIFE_EDGE_V = [
    (Profile([500.0], [10.0], 0.0, 0.0, 1000.0), 0, 1000.0, 1.634, 1e-3),
    (Profile([500.0], [0.0], 0.0, 0.0, 1000.0), 0, 1000.0, 0.0, 1e-12),
    (Profile([250.0], [25.0], 0.0, 100.0, 1000.0), 0, 900.0, 0.0, 1e-12),
    (Profile([100.0, 500.0], [0.0, -10.0], 0.0, 0.0, 1000.0), -1, 1000.0, -1.634, 1e-3),
]

#####################
# TEST CASES MATRIX #
#####################

TEST_MATRIX_CONSTRUCTOR_ERROR = [
    (np.zeros(4), None, DimensionMismatch, "Expected a two-dimensional array, but got 1 dimensions."),
    (np.zeros((2, 2)), np.ones((2, 3)), ShapeMismatch, r"Expected a mask of shape \(2, 2\), but got \(2, 3\)."),
    (np.array([[np.nan, 1.0]]), None, ValueError, "Expected every valid pixel to hold a finite path loss."),
]
