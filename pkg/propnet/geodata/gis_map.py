import logging
from typing import Tuple, Union, Optional
from pathlib import Path
from collections import OrderedDict

import numpy as np

from propnet._base import _Record
from propnet._utils import _pretty_print_table
from propnet.exceptions import AllNoData, AntennaOutsideMap, DimensionMismatch
from propnet.geodata.raster import RasterGrid, load_raster, save_raster
from propnet.geodata._validators import _check_patch_size, _check_layer_values

__all__ = ["GisMap", "GisPatch", "extract_patch", "normalize_terrain", "load_gis_map", "save_gis_map"]

logger = logging.getLogger(__name__)

LAYER_FILES = OrderedDict({"clutter": "clutter.asc", "building": "building.asc", "terrain": "terrain.asc"})


def _check_aligned(clutter: RasterGrid, building: RasterGrid, terrain: RasterGrid, compare_origin: bool) -> None:
    """Private method to check that the three layers share the same geometry."""
    for name, layer in (("building", building), ("terrain", terrain)):
        if layer.shape != clutter.shape or layer.resolution_m != clutter.resolution_m:
            raise DimensionMismatch(
                f"Expected the {name} layer to match the clutter layer {clutter.shape} at {clutter.resolution_m} m, "
                f"but got {layer.shape} at {layer.resolution_m} m."
            )
        if compare_origin and layer.origin != clutter.origin:
            raise DimensionMismatch(f"Expected the {name} layer origin {clutter.origin}, but got {layer.origin}.")


class GisMap(_Record):
    """The ``GisMap`` class bundles the clutter, building and terrain layers of one area.

    :param clutter: Land-use codes between 0 (unknown) and 21.
    :type clutter: RasterGrid
    :param building: Building heights in meters, 0 where there is no building.
    :type building: RasterGrid
    :param terrain: Ground altitude in meters.
    :type terrain: RasterGrid
    :param name: Identifier of the map, e.g., the name of its directory.
    :type name: str

    :raises DimensionMismatch: If the layers do not share width, height, resolution and origin.
    :raises ParseError: If clutter codes or building heights are invalid.
    """

    __slots__ = ["_clutter", "_building", "_terrain", "_name"]

    def __new__(cls, clutter: RasterGrid, building: RasterGrid, terrain: RasterGrid, name: str = "map") -> "GisMap":
        _check_aligned(clutter=clutter, building=building, terrain=terrain, compare_origin=True)
        _check_layer_values(values=clutter.values, nodata=clutter.nodata, layer_kind="clutter")
        _check_layer_values(values=building.values, nodata=building.nodata, layer_kind="building")
        return super().__new__(cls)

    def __init__(self, clutter: RasterGrid, building: RasterGrid, terrain: RasterGrid, name: str = "map") -> None:
        self._clutter = clutter
        self._building = building
        self._terrain = terrain
        self._name = str(name)

    def __repr__(self) -> str:
        return f"GisMap(name={self._name!r}, width={self.width}, height={self.height})"

    def bounds(self) -> Tuple[float, float, float, float]:
        """Return the bounds (west, south, east, north) of the map in meters."""
        west, north = self._clutter.origin
        return (
            west,
            north - self.height * self.resolution_m,
            west + self.width * self.resolution_m,
            north,
        )

    @property
    def building(self) -> RasterGrid:
        """Return the building layer."""
        return self._building

    @property
    def clutter(self) -> RasterGrid:
        """Return the clutter layer."""
        return self._clutter

    def contains(self, easting: float, northing: float) -> bool:
        """Check if the given world coordinates fall inside a cell of the map."""
        row, col = self._clutter.world_to_pixel(easting=easting, northing=northing)
        return 0 <= row < self.height and 0 <= col < self.width

    def describe(self) -> str:
        """Return a table describing the map."""
        west, south, east, north = self.bounds()
        return _pretty_print_table(
            title=self.rep(),
            body=OrderedDict(
                {
                    "resolution": f"{self.resolution_m:g} m",
                    "bounds": f"({west:g}, {south:g}, {east:g}, {north:g})",
                    "max building": f"{self._building.filled(0.0).max():g} m",
                    "terrain range": f"{np.ptp(self._terrain.values[self._terrain.valid_mask()]):g} m",
                }
            ),
        )

    @property
    def height(self) -> int:
        """Return the number of rows of the map."""
        return self._clutter.height

    @property
    def name(self) -> str:
        """Return the identifier of the map."""
        return self._name

    @property
    def resolution_m(self) -> float:
        """Return the cell size in meters."""
        return self._clutter.resolution_m

    @property
    def terrain(self) -> RasterGrid:
        """Return the terrain layer."""
        return self._terrain

    @property
    def width(self) -> int:
        """Return the number of columns of the map."""
        return self._clutter.width


class GisPatch(_Record):
    """The ``GisPatch`` class represents the three map layers cut out around an antenna.

    The antenna sits at ``center_pixel``, which defaults to ``(height // 2, width // 2)``. Patches produced by
    :func:`extract_patch` always use the default; rotated or mirrored copies of a patch carry the antenna
    pixel to wherever the transform moves it.

    :param clutter: Clutter layer of the patch.
    :type clutter: RasterGrid
    :param building: Building layer of the patch.
    :type building: RasterGrid
    :param terrain: Terrain layer of the patch.
    :type terrain: RasterGrid
    :param center_pixel: (row, column) of the antenna.
    :type center_pixel: Optional[Tuple[int, int]]

    :raises DimensionMismatch: If the layers do not share the same geometry or the antenna pixel is outside.
    """

    __slots__ = ["_clutter", "_building", "_terrain", "_center_pixel"]

    def __new__(
        cls,
        clutter: RasterGrid,
        building: RasterGrid,
        terrain: RasterGrid,
        center_pixel: Optional[Tuple[int, int]] = None,
    ) -> "GisPatch":
        _check_aligned(clutter=clutter, building=building, terrain=terrain, compare_origin=False)
        if center_pixel is not None:
            row, col = center_pixel
            if not (0 <= row < clutter.height and 0 <= col < clutter.width):
                raise DimensionMismatch(f"Expected the antenna pixel inside the patch, but got {center_pixel}.")
        return super().__new__(cls)

    def __init__(
        self,
        clutter: RasterGrid,
        building: RasterGrid,
        terrain: RasterGrid,
        center_pixel: Optional[Tuple[int, int]] = None,
    ) -> None:
        self._clutter = clutter
        self._building = building
        self._terrain = terrain
        if center_pixel is None:
            center_pixel = (clutter.height // 2, clutter.width // 2)
        self._center_pixel: Tuple[int, int] = (int(center_pixel[0]), int(center_pixel[1]))

    def __eq__(self, other: object) -> bool:
        """Check if the patch is equal to `another` object."""
        if isinstance(other, GisPatch):
            return (
                self._center_pixel == other._center_pixel
                and self._clutter == other._clutter
                and self._building == other._building
                and self._terrain == other._terrain
            )
        return False

    def __reduce__(self) -> Tuple[type, Tuple[RasterGrid, RasterGrid, RasterGrid, Tuple[int, int]]]:
        return GisPatch, (self._clutter, self._building, self._terrain, self._center_pixel)

    def __repr__(self) -> str:
        return f"GisPatch(width={self.width}, height={self.height}, center_pixel={self._center_pixel})"

    @property
    def building(self) -> RasterGrid:
        """Return the building layer."""
        return self._building

    @property
    def center_pixel(self) -> Tuple[int, int]:
        """Return the (row, column) of the antenna."""
        return self._center_pixel

    @property
    def clutter(self) -> RasterGrid:
        """Return the clutter layer."""
        return self._clutter

    @property
    def height(self) -> int:
        """Return the number of rows of the patch."""
        return self._clutter.height

    def offsets_m(self) -> Tuple[np.ndarray, np.ndarray]:
        """Return the east and north offsets, in meters, of every pixel center from the antenna pixel center."""
        rows = np.arange(self.height, dtype=float)[:, None]
        cols = np.arange(self.width, dtype=float)[None, :]
        center_row, center_col = self._center_pixel
        east = np.broadcast_to((cols - center_col) * self.resolution_m, (self.height, self.width))
        north = np.broadcast_to((center_row - rows) * self.resolution_m, (self.height, self.width))
        return np.array(east), np.array(north)

    @property
    def resolution_m(self) -> float:
        """Return the cell size in meters."""
        return self._clutter.resolution_m

    @property
    def terrain(self) -> RasterGrid:
        """Return the terrain layer."""
        return self._terrain

    @property
    def width(self) -> int:
        """Return the number of columns of the patch."""
        return self._clutter.width


def extract_patch(gis_map: GisMap, antenna_xy: Tuple[float, float], width: int, height: int) -> GisPatch:
    """Cut a ``width`` x ``height`` patch centered on the pixel containing the antenna.

    Cells of the patch falling outside the map are padded: clutter and building with 0, terrain with the nearest
    edge value of the map. The terrain of the returned patch is normalized.

    :param gis_map: The source map.
    :type gis_map: GisMap
    :param antenna_xy: Easting and northing of the antenna in meters.
    :type antenna_xy: Tuple[float, float]
    :param width: Width of the patch in pixels, at least 8.
    :type width: int
    :param height: Height of the patch in pixels, at least 8.
    :type height: int

    :return: The normalized patch.
    :rtype: GisPatch

    :raises InvalidPatchSize: If width or height is smaller than 8.
    :raises AntennaOutsideMap: If the antenna does not lie inside the map.
    """
    _check_patch_size(width=width, height=height)
    easting, northing = antenna_xy
    if not gis_map.contains(easting=easting, northing=northing):
        raise AntennaOutsideMap(f"The antenna at {antenna_xy} lies outside the map bounds {gis_map.bounds()}.")
    antenna_row, antenna_col = gis_map.clutter.world_to_pixel(easting=easting, northing=northing)

    rows = antenna_row + np.arange(height) - height // 2
    cols = antenna_col + np.arange(width) - width // 2
    inside = ((rows >= 0) & (rows < gis_map.height))[:, None] & ((cols >= 0) & (cols < gis_map.width))[None, :]
    window = np.ix_(np.clip(rows, 0, gis_map.height - 1), np.clip(cols, 0, gis_map.width - 1))

    resolution = gis_map.resolution_m
    west, north = gis_map.clutter.origin
    origin = (west + cols[0] * resolution, north - rows[0] * resolution)

    def _layer(source: RasterGrid, pad: Optional[float]) -> RasterGrid:
        values = source.values[window]
        if pad is not None:
            values = np.where(inside, values, pad)
        return RasterGrid(values=values, resolution_m=resolution, origin=origin, nodata=source.nodata)

    patch = GisPatch(
        clutter=_layer(gis_map.clutter, pad=0.0),
        building=_layer(gis_map.building, pad=0.0),
        terrain=_layer(gis_map.terrain, pad=None),
    )
    return normalize_terrain(patch)


def normalize_terrain(patch: GisPatch) -> GisPatch:
    """Subtract the lowest valid terrain altitude of the patch from its terrain layer.

    Nodata cells stay nodata; the other layers are untouched.

    :param patch: The patch to normalize.
    :type patch: GisPatch

    :return: The patch with a terrain minimum of exactly 0.
    :rtype: GisPatch

    :raises AllNoData: If the terrain layer holds no valid cell.
    """
    valid = patch.terrain.valid_mask()
    if not np.any(valid):
        raise AllNoData("Expected at least one valid terrain cell in the patch.")
    terrain = patch.terrain.values
    shifted = np.where(valid, terrain - terrain[valid].min(), terrain)
    return GisPatch(
        clutter=patch.clutter,
        building=patch.building,
        terrain=patch.terrain.with_values(shifted),
        center_pixel=patch.center_pixel,
    )


def load_gis_map(directory: Union[str, Path]) -> GisMap:
    """Load a map from a directory holding ``clutter.asc``, ``building.asc`` and ``terrain.asc``.

    The name of the map is the name of the directory.
    """
    directory = Path(directory)
    layers = {kind: load_raster(path=directory / filename, layer_kind=kind) for kind, filename in LAYER_FILES.items()}
    logger.info("loaded map %s", directory.name)
    return GisMap(name=directory.name, **layers)


def save_gis_map(gis_map: GisMap, directory: Union[str, Path]) -> Path:
    """Write the three layers of a map into `directory`, creating it if needed."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    for kind, filename in LAYER_FILES.items():
        save_raster(grid=getattr(gis_map, kind), path=directory / filename)
    return directory
