from typing import Tuple

import numpy as np

from propnet.exceptions import ParseError, InvalidPatchSize, DimensionMismatch, InvalidResolution

_SUPPORTED_LAYERS: Tuple[str, ...] = ("clutter", "building", "terrain")

MAX_CLUTTER_CODE: int = 21


def _valid_cells(values: np.ndarray, nodata: float) -> np.ndarray:
    """Private method returning the boolean mask of the cells which are not `nodata`."""
    if np.isnan(nodata):
        return ~np.isnan(values)
    return values != nodata


def _validate_raster(values: np.ndarray, resolution_m: float, nodata: float) -> None:
    """Private method to check if an array is eligible as the cell values of a raster.

    Recall that the values of a raster must satisfy the following conditions:
        - the array is two-dimensional with at least one row and one column;
        - the resolution is strictly positive;
        - every cell is either finite or equal to the nodata sentinel.
    """
    if values.ndim != 2:
        raise DimensionMismatch(f"Expected a two-dimensional array, but got {values.ndim} dimensions.")
    if values.shape[0] < 1 or values.shape[1] < 1:
        raise DimensionMismatch(f"Expected at least one row and one column, but got shape {values.shape}.")
    if not np.isfinite(resolution_m) or resolution_m <= 0:
        raise InvalidResolution(f"Expected a strictly positive resolution, but got {resolution_m}.")
    valid = _valid_cells(values, nodata)
    if not np.all(np.isfinite(values[valid])):
        raise ValueError("Expected every cell to be finite or equal to the nodata value.")


def _check_layer_kind(value: str) -> None:
    """Private method to check the value provided for the parameter `layer_kind`."""
    if isinstance(value, str) is False:
        raise TypeError(f"The parameter `layer_kind` must be of type string, but {type(value)} was provided.")
    if value not in _SUPPORTED_LAYERS:
        raise ValueError(f"The given layer kind ({value}) is not supported. Supported layers are {_SUPPORTED_LAYERS}.")


def _check_layer_values(values: np.ndarray, nodata: float, layer_kind: str) -> None:
    """Private method to check the layer-specific conventions of a raster.

    Recall that:
        - clutter cells are integer codes between 0 and 21;
        - building cells are heights, hence non-negative.
    """
    cells = values[_valid_cells(values, nodata)]
    if layer_kind == "clutter":
        if np.any(cells != np.round(cells)) or np.any(cells < 0) or np.any(cells > MAX_CLUTTER_CODE):
            raise ParseError(f"Expected clutter codes to be integers in [0, {MAX_CLUTTER_CODE}].")
    elif layer_kind == "building":
        if np.any(cells < 0):
            raise ParseError(f"Expected non-negative building heights, but got {cells.min()}.")


def _check_patch_size(width: int, height: int) -> None:
    """Private method to check the size of a requested patch."""
    for name, value in (("width", width), ("height", height)):
        if isinstance(value, (int, np.integer)) is False:
            raise TypeError(f"The parameter `{name}` must be of type int, but {type(value)} was provided.")
        if value < 8:
            raise InvalidPatchSize(f"Expected a patch {name} of at least 8 pixels, but got {value}.")
