import warnings
from typing import Dict, Tuple, Union

import numpy as np

from propnet.exceptions import RangeWarning, OutOfValidityRange
from propnet.geodata._validators import MAX_CLUTTER_CODE

_SUPPORTED_MODES: Tuple[str, ...] = ("strict", "permissive")
_SUPPORTED_CITY_SIZES: Tuple[str, ...] = ("small_medium", "large")

# validity box of the urban Hata model
HATA_VALIDITY: Dict[str, Tuple[float, float]] = {
    "f_mhz": (150.0, 1500.0),
    "h_b_m": (30.0, 200.0),
    "h_m_m": (1.0, 10.0),
    "d_km": (1.0, 10.0),
}


def _check_mode(value: str) -> None:
    """Private method to check the value provided for the parameter `mode`."""
    if value not in _SUPPORTED_MODES:
        raise ValueError(f"The given mode ({value}) is not supported. Supported modes are {_SUPPORTED_MODES}.")


def _check_city_size(value: str) -> None:
    """Private method to check the value provided for the parameter `city_size`."""
    if value not in _SUPPORTED_CITY_SIZES:
        raise ValueError(
            f"The given city size ({value}) is not supported. Supported sizes are {_SUPPORTED_CITY_SIZES}."
        )


def _check_validity(mode: str, **values: float) -> None:
    """Private method checking the given quantities against the validity box of the Hata model.

    In strict mode a violation raises ``OutOfValidityRange``; in permissive mode a single ``RangeWarning``
    lists all the violations.
    """
    _check_mode(mode)
    violations = []
    for name, value in values.items():
        low, high = HATA_VALIDITY[name]
        value = np.asarray(value, dtype=float)
        if np.any(value < low) or np.any(value > high):
            violations.append(f"`{name}` in [{low:g}, {high:g}], but got {value.min():g}..{value.max():g}")
    if not violations:
        return
    message = "Expected " + "; ".join(violations) + "."
    if mode == "strict":
        raise OutOfValidityRange(message)
    warnings.warn(message, RangeWarning, stacklevel=3)


def _check_clutter_codes(value: Union[int, np.ndarray]) -> np.ndarray:
    """Private method to check the clutter code(s) provided to the standard propagation model."""
    codes = np.asarray(value)
    invalid = (codes < 0) | (codes > MAX_CLUTTER_CODE) | (codes != np.rint(codes))
    if np.any(invalid):
        wrong = ", ".join(f"{code:g}" for code in np.unique(codes[invalid]))
        raise ValueError(f"Expected clutter codes as integers in [0, {MAX_CLUTTER_CODE}], but got {wrong}.")
    return codes.astype(int)
