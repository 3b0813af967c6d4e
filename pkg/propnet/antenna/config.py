from typing import Any, Dict
from dataclasses import field, dataclass

import numpy as np

from propnet.antenna.pattern import RadiationPattern, omnidirectional_pattern
from propnet.antenna._validators import _check_positive

__all__ = ["AntennaConfig", "MobileConfig"]


@dataclass(frozen=True)
class AntennaConfig:
    """Engineering parameters of a base station antenna.

    :param easting_m: Easting of the antenna in meters.
    :type easting_m: float
    :param northing_m: Northing of the antenna in meters.
    :type northing_m: float
    :param height_m: Height of the antenna above the ground in meters.
    :type height_m: float
    :param azimuth_deg: Compass azimuth of the main lobe in [0, 360), clockwise from north.
    :type azimuth_deg: float
    :param tilt_deg: Downtilt of the main lobe in [-90, 90], positive when pointing down.
    :type tilt_deg: float
    :param frequency_mhz: Carrier frequency in MHz.
    :type frequency_mhz: float
    :param tx_power_dbm: Transmit power in dBm.
    :type tx_power_dbm: float
    :param pattern: The radiation pattern.
    :type pattern: RadiationPattern
    :param pattern_name: Name under which the pattern is referenced in datasets.
    :type pattern_name: str

    :raises ValueError: If a parameter lies outside its range.
    """

    easting_m: float
    northing_m: float
    height_m: float
    azimuth_deg: float = 0.0
    tilt_deg: float = 0.0
    frequency_mhz: float = 1800.0
    tx_power_dbm: float = 43.0
    pattern: RadiationPattern = field(default_factory=omnidirectional_pattern, compare=False)
    pattern_name: str = "omni"

    def __post_init__(self) -> None:
        _check_positive(self.height_m, name="height_m")
        _check_positive(self.frequency_mhz, name="frequency_mhz")
        if not 0.0 <= self.azimuth_deg < 360.0:
            raise ValueError(f"The parameter `azimuth_deg` must lie in [0, 360), but got {self.azimuth_deg}.")
        if not -90.0 <= self.tilt_deg <= 90.0:
            raise ValueError(f"The parameter `tilt_deg` must lie in [-90, 90], but got {self.tilt_deg}.")
        for name in ("easting_m", "northing_m", "tx_power_dbm"):
            if not np.isfinite(getattr(self, name)):
                raise ValueError(f"The parameter `{name}` must be finite, but got {getattr(self, name)}.")

    def to_dict(self) -> Dict[str, Any]:
        """Return the parameters of the antenna, with the pattern referenced by name."""
        return {
            "easting_m": float(self.easting_m),
            "northing_m": float(self.northing_m),
            "height_m": float(self.height_m),
            "azimuth_deg": float(self.azimuth_deg),
            "tilt_deg": float(self.tilt_deg),
            "frequency_mhz": float(self.frequency_mhz),
            "tx_power_dbm": float(self.tx_power_dbm),
            "pattern_name": self.pattern_name,
        }


@dataclass(frozen=True)
class MobileConfig:
    """Height of the mobile station antenna above the ground, in meters."""

    height_m: float = 1.5

    def __post_init__(self) -> None:
        _check_positive(self.height_m, name="height_m")
