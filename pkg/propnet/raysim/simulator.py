import logging
from typing import Optional, Sequence
from itertools import repeat
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from propnet.antenna.config import MobileConfig, AntennaConfig
from propnet.antenna.pattern import pattern_gain
from propnet.tensor.builder import compute_los_angles
from propnet.raysim.matrix import PathLossMatrix
from propnet.raysim.clutter import ClutterLossTable, default_clutter_table
from propnet.geodata.gis_map import GisPatch
from propnet.raysim.diffraction import free_space_loss, extract_profile, diffraction_loss

__all__ = ["simulate"]

logger = logging.getLogger(__name__)


def _diffraction_rows(patch: GisPatch, ant: AntennaConfig, mobile: MobileConfig, rows: Sequence[int]) -> np.ndarray:
    """Private method returning the diffraction loss of the given rows of the patch, zero at the antenna pixel."""
    diffraction = np.zeros((len(rows), patch.width))
    for idx, row in enumerate(rows):
        for col in range(patch.width):
            if (row, col) == patch.center_pixel:
                continue
            profile = extract_profile(patch=patch, ant=ant, target_pixel=(int(row), col), mobile=mobile)
            diffraction[idx, col] = diffraction_loss(profile, f_mhz=ant.frequency_mhz)
    return diffraction


def simulate(
    patch: GisPatch,
    ant: AntennaConfig,
    mobile: MobileConfig,
    clutter_table: Optional[ClutterLossTable] = None,
    workers: int = 1,
) -> PathLossMatrix:
    """Simulate the path loss from the antenna to every pixel of a patch.

    The path loss of a pixel is the free space loss over the 3-D distance between antenna and receiver, plus the
    diffraction loss of the obstructions in between, plus the loss of the clutter class of the pixel, minus the
    antenna gain in the direction of the pixel. At the antenna pixel the horizontal distance is half the
    resolution and there is no diffraction. Every pixel of the result is valid.

    The diffraction losses, one terrain profile per pixel, are split by rows over `workers` processes. Each process
    owns a disjoint block of rows, so the result does not depend on the number of workers.

    :param patch: The patch, whose center pixel holds the antenna.
    :type patch: GisPatch
    :param ant: The antenna.
    :type ant: AntennaConfig
    :param mobile: The mobile station.
    :type mobile: MobileConfig
    :param clutter_table: Losses of the clutter classes, the synthetic default table if omitted.
    :type clutter_table: Optional[ClutterLossTable]
    :param workers: Number of processes computing the diffraction losses.
    :type workers: int

    :raises ValueError: If `workers` is not a positive integer.

    :return: The simulated path loss matrix.
    :rtype: PathLossMatrix
    """
    if isinstance(workers, bool) or not isinstance(workers, int) or workers < 1:
        raise ValueError(f"Expected a positive number of workers, but got {workers!r}.")
    clutter_table = default_clutter_table() if clutter_table is None else clutter_table
    angles = compute_los_angles(patch=patch, ant=ant)
    terrain = patch.terrain.filled(0.0)
    center = patch.center_pixel

    vertical = (terrain[center] + ant.height_m) - (terrain + mobile.height_m)
    loss = free_space_loss(np.hypot(angles.distance_m, vertical), ant.frequency_mhz)
    loss = loss + clutter_table.lookup(patch.clutter.filled(0.0))
    loss = loss - pattern_gain(ant.pattern, angles.az_off, angles.el_off)

    if workers > 1:
        blocks = np.array_split(np.arange(patch.height), min(workers, patch.height))
        with ProcessPoolExecutor(max_workers=len(blocks)) as executor:
            rows = list(executor.map(_diffraction_rows, repeat(patch), repeat(ant), repeat(mobile), blocks))
        diffraction = np.concatenate(rows, axis=0)
    else:
        diffraction = _diffraction_rows(patch=patch, ant=ant, mobile=mobile, rows=range(patch.height))
    logger.debug("simulated %dx%d patch, mean diffraction %.2f dB", patch.height, patch.width, diffraction.mean())
    return PathLossMatrix(values=loss + diffraction)
