import logging
from typing import Tuple, Union
from pathlib import Path
from itertools import islice
from collections import OrderedDict

import numpy as np
import rasterio
from rasterio._err import CPLE_BaseError
from rasterio.errors import RasterioError
from rasterio.transform import from_origin

from propnet._base import _Record
from propnet._utils import _freeze, _pretty_print_table
from propnet.exceptions import ParseError, DimensionMismatch, InvalidResolution
from propnet.geodata._validators import (
    _valid_cells,
    _validate_raster,
    _check_layer_kind,
    _check_layer_values,
)

__all__ = ["RasterGrid", "load_raster", "save_raster"]

logger = logging.getLogger(__name__)

# header lines scanned for the cell size before handing the file to GDAL
_HEADER_LINES: int = 8
_CELLSIZE_KEYS: Tuple[str, ...] = ("cellsize", "dx", "dy")

SIGNIFICANT_DIGITS: int = 6

DEFAULT_NODATA: float = -9999.0


class RasterGrid(_Record):
    r"""The ``RasterGrid`` class represents one georeferenced GIS layer, i.e., a grid of cells of
    :math:`m \times m` meters where every cell holds one number.

    Row 0 is the northernmost row and column 0 the westernmost column. The origin is the
    (easting, northing) of the top-left corner of the top-left cell.

    :param values: Cell values with shape (height, width).
    :type values: np.ndarray
    :param resolution_m: Cell size in meters.
    :type resolution_m: float
    :param origin: Easting and northing of the top-left corner, in meters.
    :type origin: Tuple[float, float]
    :param nodata: Sentinel value of missing cells.
    :type nodata: float

    :raises DimensionMismatch: If `values` is not a non-empty two-dimensional array.
    :raises InvalidResolution: If the resolution is not strictly positive.
    :raises ValueError: If a cell is neither finite nor the nodata sentinel.

    :example:
        >>> import numpy as np
        >>> from propnet import RasterGrid
        ...
        >>> grid = RasterGrid(values=np.array([[1.0, 2.0], [3.0, 4.0]]), resolution_m=5.0)
    """

    __slots__ = ["_values", "_resolution_m", "_origin", "_nodata"]

    def __new__(
        cls,
        values: np.ndarray,
        resolution_m: float,
        origin: Tuple[float, float] = (0.0, 0.0),
        nodata: float = DEFAULT_NODATA,
    ) -> "RasterGrid":
        _validate_raster(values=np.asarray(values, dtype=float), resolution_m=resolution_m, nodata=nodata)
        return super().__new__(cls)

    def __init__(
        self,
        values: np.ndarray,
        resolution_m: float,
        origin: Tuple[float, float] = (0.0, 0.0),
        nodata: float = DEFAULT_NODATA,
    ) -> None:
        self._values: np.ndarray = _freeze(np.asarray(values, dtype=float))
        self._resolution_m: float = float(resolution_m)
        self._origin: Tuple[float, float] = (float(origin[0]), float(origin[1]))
        self._nodata: float = float(nodata)

    def __eq__(self, other: object) -> bool:
        """Check if the raster is equal to `another` object, i.e., same geometry and same cells."""
        if isinstance(other, RasterGrid):
            return (
                self.shape == other.shape
                and self.resolution_m == other.resolution_m
                and self.origin == other.origin
                and (self.nodata == other.nodata or bool(np.isnan(self.nodata) and np.isnan(other.nodata)))
                and bool(np.array_equal(self.values, other.values, equal_nan=True))
            )
        return False

    def __reduce__(self) -> Tuple[type, Tuple[np.ndarray, float, Tuple[float, float], float]]:
        return RasterGrid, (self._values, self._resolution_m, self._origin, self._nodata)

    def __repr__(self) -> str:
        return f"RasterGrid(width={self.width}, height={self.height}, resolution_m={self.resolution_m})"

    def describe(self) -> str:
        """Return a table describing the raster."""
        valid = self.valid_mask()
        cells = self._values[valid]
        return _pretty_print_table(
            title=self.rep(),
            body=OrderedDict(
                {
                    "origin": str(self.origin),
                    "nodata": str(self.nodata),
                    "valid cells": f"{int(valid.sum())}/{valid.size}",
                    "min": f"{cells.min():.6g}" if cells.size else "-",
                    "max": f"{cells.max():.6g}" if cells.size else "-",
                }
            ),
        )

    def filled(self, value: float = 0.0) -> np.ndarray:
        """Return a copy of the cell values where nodata cells are replaced by `value`.

        :param value: The replacement of the nodata cells.
        :type value: float

        :return: The filled cell values.
        :rtype: np.ndarray
        """
        return np.where(self.valid_mask(), self._values, value)

    @property
    def height(self) -> int:
        """Return the number of rows."""
        return self._values.shape[0]

    @property
    def nodata(self) -> float:
        """Return the nodata sentinel."""
        return self._nodata

    @property
    def origin(self) -> Tuple[float, float]:
        """Return the easting and northing of the top-left corner."""
        return self._origin

    @property
    def resolution_m(self) -> float:
        """Return the cell size in meters."""
        return self._resolution_m

    @property
    def shape(self) -> Tuple[int, int]:
        """Return the shape (height, width) of the grid."""
        return self._values.shape

    def valid_mask(self) -> np.ndarray:
        """Return the boolean mask of the cells which are not nodata."""
        return _valid_cells(self._values, self._nodata)

    @property
    def values(self) -> np.ndarray:
        """Return the (read-only) cell values."""
        return self._values

    @property
    def width(self) -> int:
        """Return the number of columns."""
        return self._values.shape[1]

    def with_values(self, values: np.ndarray) -> "RasterGrid":
        """Return a raster with the same georeferencing and the given cell values."""
        return RasterGrid(values=values, resolution_m=self._resolution_m, origin=self._origin, nodata=self._nodata)

    def world_to_pixel(self, easting: float, northing: float) -> Tuple[int, int]:
        """Return the (row, column) of the cell containing the given world coordinates.

        Every cell represents the whole square area it covers, hence the coordinates are mapped by floor division.
        The returned indices may fall outside the grid.

        :example:
            >>> import numpy as np
            >>> from propnet import RasterGrid
            ...
            >>> grid = RasterGrid(values=np.zeros((4, 4)), resolution_m=5.0, origin=(0.0, 20.0))
            >>> grid.world_to_pixel(easting=7.0, northing=19.0)
            (0, 1)
        """
        col = int(np.floor((easting - self._origin[0]) / self._resolution_m))
        row = int(np.floor((self._origin[1] - northing) / self._resolution_m))
        return row, col


def _check_header_cellsize(path: Path) -> None:
    """Private method to check the ``cellsize`` (or ``dx`` / ``dy``) entries of an ASCII grid header."""
    with path.open() as handle:
        for line in islice(handle, _HEADER_LINES):
            tokens = line.split()
            if len(tokens) == 2 and tokens[0].lower() in _CELLSIZE_KEYS:
                try:
                    cellsize = float(tokens[1])
                except ValueError:
                    raise ParseError(f"Expected a number for `{tokens[0]}`, but got `{tokens[1]}`.") from None
                if cellsize <= 0:
                    raise InvalidResolution(f"Expected a strictly positive `cellsize`, but got {cellsize}.")


def load_raster(path: Union[str, Path], layer_kind: str) -> RasterGrid:
    """Load a raster layer from an ESRI ASCII grid file.

    The header holds ``ncols``, ``nrows``, the lower-left corner (``xllcorner`` / ``yllcorner``) or the center of
    the lower-left cell (``xllcenter`` / ``yllcenter``), ``cellsize`` and optionally ``nodata_value``. It is
    followed by ``nrows`` lines of ``ncols`` numbers, the first line being the northernmost row.

    :param path: Path of the ASCII grid file.
    :type path: Union[str, Path]
    :param layer_kind: One of ``clutter``, ``building`` or ``terrain``.
    :type layer_kind: str

    :return: The raster layer.
    :rtype: RasterGrid

    :raises ParseError: If the file is not an ASCII grid or its values are malformed.
    :raises DimensionMismatch: If the file holds fewer values than ``ncols * nrows``.
    :raises InvalidResolution: If ``cellsize`` is not strictly positive.
    :raises FileNotFoundError: If the file does not exist.
    """
    _check_layer_kind(value=layer_kind)
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"No raster file at {path}.")
    _check_header_cellsize(path)

    try:
        with rasterio.Env(GDAL_PAM_ENABLED="NO"), rasterio.open(path, driver="AAIGrid", DATATYPE="Float64") as src:
            transform, nodata = src.transform, src.nodata
            nrows, ncols = src.height, src.width
            try:
                values = src.read(1).astype(float)
            except (RasterioError, CPLE_BaseError) as error:
                if "short" in str(error).lower():
                    raise DimensionMismatch(f"Expected {nrows * ncols} cells in {path}: {error}") from None
                raise ParseError(f"Malformed cell values in {path}: {error}") from None
    except (RasterioError, CPLE_BaseError) as error:
        raise ParseError(f"Expected an ESRI ASCII grid in {path}: {error}") from None

    if transform.a <= 0 or transform.e >= 0:
        raise InvalidResolution(f"Expected a strictly positive `cellsize`, but got {transform.a}.")
    nodata = DEFAULT_NODATA if nodata is None else float(nodata)
    _check_layer_values(values=values, nodata=nodata, layer_kind=layer_kind)
    logger.debug("loaded %s layer %s (%dx%d)", layer_kind, path, nrows, ncols)
    return RasterGrid(values=values, resolution_m=transform.a, origin=(transform.c, transform.f), nodata=nodata)


def save_raster(grid: RasterGrid, path: Union[str, Path]) -> None:
    """Write a raster layer to an ESRI ASCII grid file, with values rounded to 6 significant digits.

    :param grid: The raster to write.
    :type grid: RasterGrid
    :param path: Destination path.
    :type path: Union[str, Path]
    """
    west, north = grid.origin
    profile = {
        "driver": "AAIGrid",
        "height": grid.height,
        "width": grid.width,
        "count": 1,
        "dtype": "float64",
        "transform": from_origin(west, north, grid.resolution_m, grid.resolution_m),
        "nodata": grid.nodata,
    }
    with rasterio.Env(GDAL_PAM_ENABLED="NO"):
        with rasterio.open(Path(path), "w", SIGNIFICANT_DIGITS=SIGNIFICANT_DIGITS, **profile) as dst:
            dst.write(np.asarray(grid.values, dtype=np.float64), 1)
