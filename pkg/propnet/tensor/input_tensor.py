import struct
from typing import Tuple, Union
from pathlib import Path
from collections import OrderedDict

import numpy as np

from propnet._base import _Record
from propnet._utils import _freeze, _pretty_print_table
from propnet.exceptions import ParseError, DimensionMismatch

__all__ = ["CHANNELS", "InputTensor", "save_tensor", "load_tensor"]

CHANNELS: Tuple[str, ...] = (
    "clutter",
    "building",
    "terrain",
    "azimuth",
    "tilt",
    "antenna_height",
    "frequency",
    "antenna_gain",
)

_MAGIC = b"PLT1"
_HEADER = struct.Struct("<4sIII")


class InputTensor(_Record):
    """The ``InputTensor`` class is the image fed to the network: one unit-scaled channel per input feature.

    Storage is channel x row x column; the channels are, in order, clutter, building, terrain, azimuth
    difference, tilt difference, antenna height, frequency and antenna gain.

    :param data: Array of shape (8, height, width).
    :type data: np.ndarray

    :raises DimensionMismatch: If `data` does not have 8 channels and two spatial dimensions.
    :raises ValueError: If a value is not finite.
    """

    __slots__ = ["_data"]

    def __new__(cls, data: np.ndarray) -> "InputTensor":
        data = np.asarray(data)
        if data.ndim != 3 or data.shape[0] != len(CHANNELS):
            raise DimensionMismatch(f"Expected an array of shape ({len(CHANNELS)}, H, W), but got {data.shape}.")
        if not np.all(np.isfinite(data)):
            raise ValueError("Expected every value of the input tensor to be finite.")
        return super().__new__(cls)

    def __init__(self, data: np.ndarray) -> None:
        self._data: np.ndarray = _freeze(np.asarray(data, dtype=float))

    def __eq__(self, other: object) -> bool:
        """Check if the tensor is equal to `another` object."""
        if isinstance(other, InputTensor):
            return bool(np.array_equal(self._data, other._data))
        return False

    def __repr__(self) -> str:
        return f"InputTensor(channels={self.channels}, width={self.width}, height={self.height})"

    def channel(self, name: str) -> np.ndarray:
        """Return the channel called `name`, e.g., ``tensor.channel("frequency")``."""
        if name not in CHANNELS:
            raise ValueError(f"The given channel ({name}) does not exist. Available channels are {CHANNELS}.")
        return self._data[CHANNELS.index(name)]

    @property
    def channels(self) -> int:
        """Return the number of channels."""
        return self._data.shape[0]

    @property
    def data(self) -> np.ndarray:
        """Return the (read-only) array of shape (channels, height, width)."""
        return self._data

    def describe(self) -> str:
        """Return a table with the range of every channel."""
        return _pretty_print_table(
            title=self.rep(),
            body=OrderedDict(
                {name: f"[{values.min():.3f}, {values.max():.3f}]" for name, values in zip(CHANNELS, self._data)}
            ),
        )

    @property
    def height(self) -> int:
        """Return the number of rows."""
        return self._data.shape[1]

    @property
    def width(self) -> int:
        """Return the number of columns."""
        return self._data.shape[2]


def save_tensor(tensor: InputTensor, path: Union[str, Path]) -> None:
    """Write an input tensor in the binary ``PLT1`` format.

    The file holds the magic ``PLT1``, the little-endian u32 channels, height and width, then the float32
    values, channel-major.
    """
    with Path(path).open("wb") as handle:
        handle.write(_HEADER.pack(_MAGIC, tensor.channels, tensor.height, tensor.width))
        handle.write(tensor.data.astype("<f4").tobytes())


def load_tensor(path: Union[str, Path]) -> InputTensor:
    """Read an input tensor written by :func:`save_tensor`.

    :raises ParseError: If the magic or the size of the file is wrong.
    """
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ParseError(f"The file {path} is too short to be an input tensor.")
    magic, channels, height, width = _HEADER.unpack_from(data)
    if magic != _MAGIC:
        raise ParseError(f"Expected the magic {_MAGIC!r} in {path}, but got {magic!r}.")
    count = channels * height * width
    if len(data) != _HEADER.size + 4 * count:
        raise ParseError(f"Expected {_HEADER.size + 4 * count} bytes in {path}, but got {len(data)}.")
    values = np.frombuffer(data, dtype="<f4", count=count, offset=_HEADER.size)
    return InputTensor(data=values.reshape(channels, height, width).astype(float))
