import numpy as np

from propnet.exceptions import InvalidPattern

HORIZONTAL_SAMPLES: int = 360
VERTICAL_SAMPLES: int = 181


def _validate_cut(cut: np.ndarray, size: int, name: str) -> None:
    """Private method to check if an array is eligible as a cut of a radiation pattern.

    Recall that a cut must satisfy the following conditions:
        - it holds exactly one finite value per integer degree;
        - every value is a gain relative to the peak, hence not positive;
        - the value at boresight is 0.
    """
    if cut.shape != (size,):
        raise InvalidPattern(f"Expected {size} values in the {name} cut, but got shape {cut.shape}.")
    if not np.all(np.isfinite(cut)):
        raise InvalidPattern(f"Expected finite values in the {name} cut.")
    if np.any(cut > 0):
        raise InvalidPattern(f"Expected every value of the {name} cut to be at most 0, but got {cut.max()}.")


def _validate_pattern(horizontal_cut: np.ndarray, vertical_cut: np.ndarray, peak_gain_dbi: float) -> None:
    """Private method to check if two cuts and a peak gain define a radiation pattern."""
    _validate_cut(horizontal_cut, size=HORIZONTAL_SAMPLES, name="horizontal")
    _validate_cut(vertical_cut, size=VERTICAL_SAMPLES, name="vertical")
    if horizontal_cut[0] != 0 or vertical_cut[90] != 0:
        raise InvalidPattern(
            f"Expected both cuts to be 0 at boresight, but got {horizontal_cut[0]} and {vertical_cut[90]}."
        )
    if not np.isfinite(peak_gain_dbi):
        raise InvalidPattern(f"Expected a finite peak gain, but got {peak_gain_dbi}.")


def _check_positive(value: float, name: str) -> None:
    """Private method to check that a configuration value is strictly positive."""
    if isinstance(value, (int, float, np.integer, np.floating)) is False or isinstance(value, bool):
        raise TypeError(f"The parameter `{name}` must be a number, but {type(value)} was provided.")
    if not np.isfinite(value) or value <= 0:
        raise ValueError(f"The parameter `{name}` must be strictly positive, but got {value}.")
