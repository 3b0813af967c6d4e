import struct
import logging
from typing import Tuple, Union, Optional
from pathlib import Path
from collections import OrderedDict

import numpy as np

from propnet._base import _Record
from propnet._utils import _freeze, _pretty_print_table
from propnet.exceptions import ParseError, ShapeMismatch, DimensionMismatch

__all__ = ["PathLossMatrix", "save_matrix", "load_matrix"]

logger = logging.getLogger(__name__)

INVALID_SENTINEL: float = 0.0

_MAGIC = b"PLM1"
_HEADER = struct.Struct("<4sII")


class PathLossMatrix(_Record):
    """The ``PathLossMatrix`` class represents the path loss, in dB, from an antenna to every pixel of a patch.

    Pixels without a value, e.g., pixels off the drive-test roads of a measurement campaign, are marked as
    invalid by the validity mask. They carry the sentinel 0 and never enter any statistic.

    :param values: Path loss values with shape (height, width).
    :type values: np.ndarray
    :param mask: Boolean validity mask with the same shape; all pixels are valid if omitted.
    :type mask: Optional[np.ndarray]

    :raises DimensionMismatch: If `values` is not two-dimensional.
    :raises ShapeMismatch: If `mask` and `values` have different shapes.
    :raises ValueError: If a valid pixel is not finite.

    :example:
        >>> import numpy as np
        >>> from propnet import PathLossMatrix
        ...
        >>> matrix = PathLossMatrix(values=np.full((2, 2), 100.0), mask=np.array([[True, False], [True, True]]))
        >>> matrix.valid_count()
        3
    """

    __slots__ = ["_values", "_mask"]

    def __new__(cls, values: np.ndarray, mask: Optional[np.ndarray] = None) -> "PathLossMatrix":
        values = np.asarray(values, dtype=float)
        if values.ndim != 2:
            raise DimensionMismatch(f"Expected a two-dimensional array, but got {values.ndim} dimensions.")
        if mask is not None and np.shape(mask) != values.shape:
            raise ShapeMismatch(f"Expected a mask of shape {values.shape}, but got {np.shape(mask)}.")
        valid = np.ones(values.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
        if not np.all(np.isfinite(values[valid])):
            raise ValueError("Expected every valid pixel to hold a finite path loss.")
        return super().__new__(cls)

    def __init__(self, values: np.ndarray, mask: Optional[np.ndarray] = None) -> None:
        values = np.asarray(values, dtype=float)
        mask = np.ones(values.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)
        self._values: np.ndarray = _freeze(np.where(mask, values, INVALID_SENTINEL))
        self._mask: np.ndarray = _freeze(mask)

    def __eq__(self, other: object) -> bool:
        """Check if the matrix is equal to `another` object, i.e., same mask and same values."""
        if isinstance(other, PathLossMatrix):
            return bool(np.array_equal(self._mask, other._mask)) and bool(np.array_equal(self._values, other._values))
        return False

    def __repr__(self) -> str:
        return f"PathLossMatrix(width={self.width}, height={self.height}, valid={self.valid_count()})"

    def describe(self) -> str:
        """Return a table describing the matrix.

        :return: A table with the size, the coverage and the statistics of the valid pixels.
        :rtype: str
        """
        cells = self.valid_values()
        return _pretty_print_table(
            title=self.rep(),
            body=OrderedDict(
                {
                    "coverage": f"{self.valid_count() / self._mask.size:.2%}",
                    "min": f"{cells.min():.2f} dB" if cells.size else "-",
                    "mean": f"{cells.mean():.2f} dB" if cells.size else "-",
                    "max": f"{cells.max():.2f} dB" if cells.size else "-",
                }
            ),
        )

    @property
    def height(self) -> int:
        """Return the number of rows."""
        return self._values.shape[0]

    @property
    def mask(self) -> np.ndarray:
        """Return the (read-only) validity mask."""
        return self._mask

    @property
    def shape(self) -> Tuple[int, int]:
        """Return the shape (height, width) of the matrix."""
        return self._values.shape

    def valid_count(self) -> int:
        """Return the number of valid pixels."""
        return int(self._mask.sum())

    def valid_values(self) -> np.ndarray:
        """Return the one-dimensional array of the values of the valid pixels, in row-major order."""
        return self._values[self._mask]

    @property
    def values(self) -> np.ndarray:
        """Return the (read-only) values, invalid pixels holding the sentinel."""
        return self._values

    @property
    def width(self) -> int:
        """Return the number of columns."""
        return self._values.shape[1]

    def with_mask(self, mask: np.ndarray) -> "PathLossMatrix":
        """Return the matrix restricted to the pixels valid both here and in `mask`."""
        return PathLossMatrix(values=self._values, mask=self._mask & np.asarray(mask, dtype=bool))


def save_matrix(matrix: PathLossMatrix, path: Union[str, Path]) -> None:
    """Write a path loss matrix in the binary ``PLM1`` format.

    The file holds the magic ``PLM1``, the little-endian u32 height and width, the float32 values in row-major
    order and one u8 mask byte per pixel.
    """
    with Path(path).open("wb") as handle:
        handle.write(_HEADER.pack(_MAGIC, matrix.height, matrix.width))
        handle.write(matrix.values.astype("<f4").tobytes())
        handle.write(matrix.mask.astype(np.uint8).tobytes())


def load_matrix(path: Union[str, Path]) -> PathLossMatrix:
    """Read a path loss matrix written by :func:`save_matrix`.

    :raises ParseError: If the magic or the size of the file is wrong.
    """
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ParseError(f"The file {path} is too short to be a path loss matrix.")
    magic, height, width = _HEADER.unpack_from(data)
    if magic != _MAGIC:
        raise ParseError(f"Expected the magic {_MAGIC!r} in {path}, but got {magic!r}.")
    cells = height * width
    if len(data) != _HEADER.size + 5 * cells:
        raise ParseError(f"Expected {_HEADER.size + 5 * cells} bytes in {path}, but got {len(data)}.")
    values = np.frombuffer(data, dtype="<f4", count=cells, offset=_HEADER.size).reshape(height, width)
    mask = np.frombuffer(data, dtype=np.uint8, count=cells, offset=_HEADER.size + 4 * cells).reshape(height, width)
    return PathLossMatrix(values=values.astype(float), mask=mask.astype(bool))
