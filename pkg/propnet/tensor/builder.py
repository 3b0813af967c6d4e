import logging

import numpy as np

from propnet._base import _Record
from propnet._utils import _freeze
from propnet.exceptions import ScaleOverflow
from propnet.antenna.angles import wrap_angle
from propnet.antenna.config import AntennaConfig
from propnet.antenna.pattern import pattern_gain
from propnet.geodata.gis_map import GisPatch
from propnet.tensor.input_tensor import CHANNELS, InputTensor
from propnet.geodata._validators import MAX_CLUTTER_CODE

__all__ = ["LosAngles", "compute_los_angles", "build_input_tensor"]

logger = logging.getLogger(__name__)

HEIGHT_SCALE_M: float = 100.0
AZIMUTH_SCALE_DEG: float = 180.0
ELEVATION_SCALE_DEG: float = 90.0
FREQUENCY_SCALE_MHZ: float = 3000.0
GAIN_SCALE_DB: float = 30.0
MAX_SCALED_MAGNITUDE: float = 10.0

# offsets assigned to the antenna pixel, where the line of sight is undefined
ANTENNA_PIXEL_AZ_OFF: float = 0.0
ANTENNA_PIXEL_EL_OFF: float = -90.0


class LosAngles(_Record):
    """The ``LosAngles`` class holds, for every pixel of a patch, the direction of the line of sight from the
    antenna relative to its main lobe.

    :param az_off: Horizontal offsets in (-180, 180], in degrees.
    :type az_off: np.ndarray
    :param el_off: Vertical offsets in [-90, 90], in degrees, positive below the main lobe.
    :type el_off: np.ndarray
    :param distance_m: Horizontal distances from the antenna pixel center, in meters.
    :type distance_m: np.ndarray
    """

    __slots__ = ["_az_off", "_el_off", "_distance_m"]

    def __new__(cls, az_off: np.ndarray, el_off: np.ndarray, distance_m: np.ndarray) -> "LosAngles":
        if not (np.shape(az_off) == np.shape(el_off) == np.shape(distance_m)):
            raise ValueError("Expected the offsets and the distances to share the same shape.")
        return super().__new__(cls)

    def __init__(self, az_off: np.ndarray, el_off: np.ndarray, distance_m: np.ndarray) -> None:
        self._az_off = _freeze(az_off)
        self._el_off = _freeze(el_off)
        self._distance_m = _freeze(distance_m)

    def __repr__(self) -> str:
        return f"LosAngles(shape={self._az_off.shape})"

    @property
    def az_off(self) -> np.ndarray:
        """Return the horizontal offsets in degrees."""
        return self._az_off

    @property
    def distance_m(self) -> np.ndarray:
        """Return the horizontal distances in meters."""
        return self._distance_m

    @property
    def el_off(self) -> np.ndarray:
        """Return the vertical offsets in degrees."""
        return self._el_off


def compute_los_angles(patch: GisPatch, ant: AntennaConfig) -> LosAngles:
    """Compute the line-of-sight offsets from the antenna main lobe for every pixel of a patch.

    The azimuth offset is the compass bearing from the antenna to the pixel minus the antenna azimuth, wrapped in
    (-180, 180]. The elevation offset is the depression angle from the antenna, at ``terrain + height_m`` above
    the antenna pixel, to the ground of the pixel, minus the antenna tilt. At the antenna pixel itself the
    azimuth offset is 0, the elevation offset -90 and the distance half the resolution.

    :param patch: The patch, whose center pixel holds the antenna.
    :type patch: GisPatch
    :param ant: The antenna.
    :type ant: AntennaConfig

    :return: The offsets and the horizontal distances.
    :rtype: LosAngles

    :example:
        >>> import numpy as np
        >>> from propnet import AntennaConfig, GisPatch, RasterGrid, compute_los_angles
        ...
        >>> layer = RasterGrid(values=np.zeros((9, 9)), resolution_m=100.0)
        >>> patch = GisPatch(clutter=layer, building=layer, terrain=layer)
        >>> ant = AntennaConfig(easting_m=0.0, northing_m=0.0, height_m=100.0, tilt_deg=45.0)
        >>> float(compute_los_angles(patch, ant).el_off[4, 5])
        0.0
    """
    east, north = patch.offsets_m()
    distance = np.hypot(east, north)
    center = patch.center_pixel
    distance[center] = patch.resolution_m / 2.0

    az_off = wrap_angle(np.degrees(np.arctan2(east, north)) - ant.azimuth_deg)
    az_off[center] = ANTENNA_PIXEL_AZ_OFF

    terrain = patch.terrain.filled(0.0)
    antenna_altitude = terrain[center] + ant.height_m
    depression = np.degrees(np.arctan2(antenna_altitude - terrain, distance))
    el_off = np.clip(depression - ant.tilt_deg, -90.0, 90.0)
    el_off[center] = ANTENNA_PIXEL_EL_OFF
    return LosAngles(az_off=az_off, el_off=el_off, distance_m=distance)


def build_input_tensor(patch: GisPatch, ant: AntennaConfig) -> InputTensor:
    """Build the 8-channel input tensor of a patch and an antenna.

    Every channel is scaled by a fixed constant: clutter code / 21, building height / 100 m,
    terrain altitude / 100 m, azimuth offset / 180, elevation offset / 90, antenna height / 100 m,
    frequency / 3000 MHz and antenna gain / 30 dB. Nodata cells count as 0.

    :param patch: The normalized patch centered on the antenna.
    :type patch: GisPatch
    :param ant: The antenna.
    :type ant: AntennaConfig

    :return: The input tensor.
    :rtype: InputTensor

    :raises ScaleOverflow: If a scaled value exceeds 10 in magnitude, which signals wrong units.
    """
    angles = compute_los_angles(patch=patch, ant=ant)
    shape = (patch.height, patch.width)
    channels = {
        "clutter": patch.clutter.filled(0.0) / MAX_CLUTTER_CODE,
        "building": patch.building.filled(0.0) / HEIGHT_SCALE_M,
        "terrain": patch.terrain.filled(0.0) / HEIGHT_SCALE_M,
        "azimuth": angles.az_off / AZIMUTH_SCALE_DEG,
        "tilt": angles.el_off / ELEVATION_SCALE_DEG,
        "antenna_height": np.full(shape, ant.height_m / HEIGHT_SCALE_M),
        "frequency": np.full(shape, ant.frequency_mhz / FREQUENCY_SCALE_MHZ),
        "antenna_gain": pattern_gain(ant.pattern, angles.az_off, angles.el_off) / GAIN_SCALE_DB,
    }
    for name, values in channels.items():
        peak = float(np.max(np.abs(values)))
        if peak > MAX_SCALED_MAGNITUDE:
            raise ScaleOverflow(f"Expected the scaled {name} channel within +-{MAX_SCALED_MAGNITUDE}, but got {peak:g}.")
    return InputTensor(data=np.stack([channels[name] for name in CHANNELS]))
