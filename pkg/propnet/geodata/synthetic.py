import logging
from typing import Tuple

import numpy as np

from propnet._utils import _rng
from propnet.geodata.raster import RasterGrid
from propnet.geodata.gis_map import GisMap

__all__ = ["synth_gis_map"]

logger = logging.getLogger(__name__)

# clutter codes used by the synthetic city, see raysim.clutter for the full table
OPEN_LAND = 1
WATER = 2
FOREST = 5
SUBURBAN = 13
URBAN = 14
DENSE_URBAN = 15

BUILDING_HEIGHT_RANGE_M: Tuple[float, float] = (5.0, 60.0)


def _hills(rng: np.random.Generator, height: int, width: int, resolution_m: float) -> np.ndarray:
    """Private method returning a smooth terrain made of a sum of Gaussian hills."""
    rows, cols = np.mgrid[0:height, 0:width].astype(float)
    terrain = np.full((height, width), rng.uniform(0.0, 200.0))
    for _ in range(int(rng.integers(2, 6))):
        row, col = rng.uniform(0, height), rng.uniform(0, width)
        sigma = rng.uniform(0.15, 0.4) * max(height, width)
        amplitude = rng.uniform(5.0, 60.0) / max(1.0, resolution_m / 5.0)
        terrain += amplitude * np.exp(-((rows - row) ** 2 + (cols - col) ** 2) / (2 * sigma**2))
    return terrain


def _blobs(rng: np.random.Generator, height: int, width: int, count: int) -> np.ndarray:
    """Private method returning a mask made of `count` random ellipses."""
    rows, cols = np.mgrid[0:height, 0:width].astype(float)
    mask = np.zeros((height, width), dtype=bool)
    for _ in range(count):
        row, col = rng.uniform(0, height), rng.uniform(0, width)
        radius_r, radius_c = rng.uniform(0.05, 0.15) * height, rng.uniform(0.05, 0.15) * width
        mask |= ((rows - row) / radius_r) ** 2 + ((cols - col) / radius_c) ** 2 <= 1.0
    return mask


def synth_gis_map(name: str, width: int, height: int, resolution_m: float, seed: int) -> GisMap:
    """Generate a deterministic synthetic city map.

    The terrain is a sum of Gaussian hills; the city is a grid of streets with rectangular buildings of height
    between 5 and 60 meters, taller towards the center; water and forest patches are scattered outside of it.
    Clutter codes follow the building density.

    :param name: Name of the map.
    :type name: str
    :param width: Number of columns.
    :type width: int
    :param height: Number of rows.
    :type height: int
    :param resolution_m: Cell size in meters.
    :type resolution_m: float
    :param seed: Seed of the PCG64 generator.
    :type seed: int

    :return: The synthetic map, with origin (0, height * resolution_m).
    :rtype: GisMap

    :example:
        >>> from propnet import synth_gis_map
        ...
        >>> synth_gis_map(name="demo", width=32, height=32, resolution_m=5.0, seed=0).rep()
        "GisMap(name='demo', width=32, height=32)"
    """
    rng = _rng(seed)
    terrain = _hills(rng, height=height, width=width, resolution_m=resolution_m)

    rows, cols = np.mgrid[0:height, 0:width].astype(float)
    center_row, center_col = rng.uniform(0.3, 0.7) * height, rng.uniform(0.3, 0.7) * width
    radius = np.hypot((rows - center_row) / height, (cols - center_col) / width)
    city = radius < rng.uniform(0.3, 0.5)

    building = np.zeros((height, width))
    block = max(3, int(round(30.0 / resolution_m)))
    street = max(1, block // 3)
    pitch = block + street
    for top in range(0, height, pitch):
        for left in range(0, width, pitch):
            lot = (slice(top, min(top + block, height)), slice(left, min(left + block, width)))
            if not city[lot].any() or rng.random() < 0.2:
                continue
            shrink = 1.0 - radius[lot].mean()
            low, high = BUILDING_HEIGHT_RANGE_M
            building[lot] = np.where(city[lot], low + (high - low) * shrink * rng.random(), 0.0)

    water = _blobs(rng, height=height, width=width, count=int(rng.integers(0, 3))) & ~city
    forest = _blobs(rng, height=height, width=width, count=int(rng.integers(1, 4))) & ~city & ~water

    density = (building > 0).astype(float)
    kernel = np.ones(2 * street + 1) / (2 * street + 1)
    for axis in (0, 1):
        density = np.apply_along_axis(lambda line: np.convolve(line, kernel, mode="same"), axis, density)
    clutter = np.full((height, width), float(OPEN_LAND))
    clutter[city] = SUBURBAN
    clutter[city & (density > 0.3)] = URBAN
    clutter[city & (building > 30.0)] = DENSE_URBAN
    clutter[forest] = FOREST
    clutter[water] = WATER
    building[water] = 0.0

    logger.debug("synthesized map %s (%dx%d, seed %d)", name, height, width, seed)
    origin = (0.0, height * resolution_m)
    return GisMap(
        clutter=RasterGrid(values=clutter, resolution_m=resolution_m, origin=origin),
        building=RasterGrid(values=np.round(building, 1), resolution_m=resolution_m, origin=origin),
        terrain=RasterGrid(values=np.round(terrain, 2), resolution_m=resolution_m, origin=origin),
        name=name,
    )
