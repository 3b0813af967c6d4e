from typing import Union
from pathlib import Path

import numpy as np
from PIL import Image

from propnet.raysim.matrix import PathLossMatrix

__all__ = ["PALETTE", "render_gray", "render_palette", "save_image"]

DEFAULT_MIN_DB: float = 60.0
DEFAULT_MAX_DB: float = 160.0

# eight color stops from low to high path loss
PALETTE = np.array(
    [
        (0, 0, 143),
        (0, 32, 255),
        (0, 160, 255),
        (32, 255, 223),
        (160, 255, 96),
        (255, 224, 0),
        (255, 96, 0),
        (160, 0, 0),
    ],
    dtype=float,
)


def _scaled(matrix: PathLossMatrix, min_db: float, max_db: float) -> np.ndarray:
    """Private method mapping the path loss linearly onto [0, 1], clipping outside the range."""
    if not max_db > min_db:
        raise ValueError(f"Expected `min_db` below `max_db`, but got {min_db} and {max_db}.")
    return np.clip((matrix.values - min_db) / (max_db - min_db), 0.0, 1.0)


def render_gray(
    matrix: PathLossMatrix, min_db: float = DEFAULT_MIN_DB, max_db: float = DEFAULT_MAX_DB
) -> np.ndarray:
    """Return the grayscale image of a path loss matrix.

    Valid pixels map linearly onto the gray levels 1 to 255, higher losses being brighter; invalid pixels are
    black.

    :example:
        >>> import numpy as np
        >>> from propnet import PathLossMatrix
        >>> from propnet.cli.render import render_gray
        ...
        >>> render_gray(PathLossMatrix(values=np.full((1, 2), 110.0), mask=np.array([[True, False]]))).tolist()
        [[128, 0]]
    """
    gray = np.rint(_scaled(matrix, min_db, max_db) * 254.0 + 1.0)
    return np.where(matrix.mask, gray, 0).astype(np.uint8)


def render_palette(
    matrix: PathLossMatrix, min_db: float = DEFAULT_MIN_DB, max_db: float = DEFAULT_MAX_DB
) -> np.ndarray:
    """Return the RGB image of a path loss matrix, interpolating the eight stops of the palette."""
    position = _scaled(matrix, min_db, max_db) * (len(PALETTE) - 1)
    stops = np.arange(len(PALETTE))
    rgb = np.stack([np.interp(position, stops, PALETTE[:, channel]) for channel in range(3)], axis=-1)
    rgb = np.where(matrix.mask[..., None], np.rint(rgb), 0)
    return rgb.astype(np.uint8)


def save_image(image: np.ndarray, path: Union[str, Path]) -> None:
    """Write a grayscale image as PGM, or an RGB image as PPM."""
    Image.fromarray(np.ascontiguousarray(image, dtype=np.uint8)).save(path, format="PPM")
