from typing import Union
from dataclasses import dataclass

import numpy as np

from propnet.antenna.config import MobileConfig, AntennaConfig
from propnet.raysim.matrix import PathLossMatrix
from propnet.geodata.gis_map import GisPatch
from propnet.antenna._validators import _check_positive
from propnet.empirical._validators import _check_validity, _check_city_size

__all__ = ["HataInput", "hata_correction", "hata_urban", "hata_matrix"]

# distance floor applied to the pixels next to the antenna, in km
MIN_DISTANCE_KM: float = 0.01
# the large city branches meet at this frequency, which belongs to the low branch
LARGE_CITY_SEAM_MHZ: float = 200.0


@dataclass(frozen=True)
class HataInput:
    """Inputs of the urban Hata model.

    :param f_mhz: Carrier frequency in MHz.
    :param h_b_m: Base station antenna height in meters.
    :param h_m_m: Mobile station antenna height in meters.
    :param d_km: Distance in kilometers.
    :param city_size: Either ``small_medium`` or ``large``.
    """

    f_mhz: float
    h_b_m: float
    h_m_m: float
    d_km: float
    city_size: str = "small_medium"

    def __post_init__(self) -> None:
        for name in ("f_mhz", "h_b_m", "h_m_m", "d_km"):
            _check_positive(getattr(self, name), name=name)
        _check_city_size(self.city_size)


def _correction(
    f_mhz: Union[float, np.ndarray], h_m_m: Union[float, np.ndarray], city_size: str
) -> Union[float, np.ndarray]:
    """Private method evaluating the mobile antenna height correction without any range check."""
    if city_size == "small_medium":
        return (1.1 * np.log10(f_mhz) - 0.7) * h_m_m - (1.56 * np.log10(f_mhz) - 0.8)
    return np.where(
        np.asarray(f_mhz) <= LARGE_CITY_SEAM_MHZ,
        8.29 * np.log10(1.54 * h_m_m) ** 2 - 1.1,
        3.2 * np.log10(11.75 * h_m_m) ** 2 - 4.97,
    )


def _urban(
    f_mhz: float, h_b_m: float, h_m_m: float, d_km: Union[float, np.ndarray], city_size: str
) -> Union[float, np.ndarray]:
    """Private method evaluating the urban path loss without any range check."""
    return (
        69.55
        + 26.16 * np.log10(f_mhz)
        - 13.82 * np.log10(h_b_m)
        - _correction(f_mhz, h_m_m, city_size)
        + (44.9 - 6.55 * np.log10(h_b_m)) * np.log10(d_km)
    )


def hata_correction(f: float, h_M: float, city_size: str = "small_medium", mode: str = "strict") -> float:
    """Return the mobile antenna height correction factor of the Hata model, in dB.

    For small and medium cities the correction is ``(1.1 log f - 0.7) h_M - (1.56 log f - 0.8)``. For large
    cities it is ``8.29 (log 1.54 h_M)^2 - 1.1`` up to 200 MHz included and ``3.2 (log 11.75 h_M)^2 - 4.97``
    above.

    :param f: Carrier frequency in MHz.
    :type f: float
    :param h_M: Mobile station antenna height in meters.
    :type h_M: float
    :param city_size: Either ``small_medium`` or ``large``.
    :type city_size: str
    :param mode: ``strict`` raises outside the validity box, ``permissive`` warns.
    :type mode: str

    :return: The correction factor in dB.
    :rtype: float

    :raises OutOfValidityRange: In strict mode, if `f` or `h_M` lies outside the validity box.

    :example:
        >>> from propnet import hata_correction
        ...
        >>> round(hata_correction(f=900.0, h_M=1.5), 5)
        0.01588
    """
    _check_city_size(city_size)
    _check_validity(mode, f_mhz=f, h_m_m=h_M)
    return float(_correction(f, h_M, city_size))


def hata_urban(hata_input: HataInput, mode: str = "strict") -> float:
    """Return the urban path loss of the Hata model, in dB.

    The loss is ``69.55 + 26.16 log f - 13.82 log h_B - C_H + (44.9 - 6.55 log h_B) log d``, where ``C_H`` is
    the correction returned by :func:`hata_correction`. In permissive mode the distance is floored at 10 m.

    :param hata_input: The inputs of the model.
    :type hata_input: HataInput
    :param mode: ``strict`` raises outside the validity box, ``permissive`` warns.
    :type mode: str

    :return: The path loss in dB.
    :rtype: float

    :raises OutOfValidityRange: In strict mode, if an input lies outside the validity box.

    :example:
        >>> from propnet import HataInput, hata_urban
        ...
        >>> round(hata_urban(HataInput(f_mhz=900.0, h_b_m=30.0, h_m_m=1.5, d_km=1.0)), 2)
        126.4
    """
    _check_validity(
        mode,
        f_mhz=hata_input.f_mhz,
        h_b_m=hata_input.h_b_m,
        h_m_m=hata_input.h_m_m,
        d_km=hata_input.d_km,
    )
    d_km = max(hata_input.d_km, MIN_DISTANCE_KM)
    return float(_urban(hata_input.f_mhz, hata_input.h_b_m, hata_input.h_m_m, d_km, hata_input.city_size))


def hata_matrix(
    patch: GisPatch,
    ant: AntennaConfig,
    mobile: MobileConfig,
    city_size: str = "small_medium",
) -> PathLossMatrix:
    """Evaluate the urban Hata model at every pixel of a patch, in permissive mode.

    The distance of a pixel is its horizontal distance from the antenna pixel, floored at 10 m; every pixel of
    the returned matrix is valid. Frequencies and heights outside the validity box only trigger a warning.

    :param patch: The patch centered on the antenna.
    :type patch: GisPatch
    :param ant: The antenna, providing the frequency and the base station height.
    :type ant: AntennaConfig
    :param mobile: The mobile station.
    :type mobile: MobileConfig
    :param city_size: Either ``small_medium`` or ``large``.
    :type city_size: str

    :return: The path loss matrix.
    :rtype: PathLossMatrix
    """
    _check_city_size(city_size)
    _check_validity("permissive", f_mhz=ant.frequency_mhz, h_b_m=ant.height_m, h_m_m=mobile.height_m)
    east, north = patch.offsets_m()
    d_km = np.maximum(np.hypot(east, north) / 1000.0, MIN_DISTANCE_KM)
    return PathLossMatrix(values=_urban(ant.frequency_mhz, ant.height_m, mobile.height_m, d_km, city_size))

