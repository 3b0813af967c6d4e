import csv
import logging
from typing import List, Tuple, Union, Optional, Sequence, NamedTuple
from pathlib import Path
from dataclasses import field, dataclass

import numpy as np

from propnet.exceptions import ParseError, RankDeficient, NonPositiveDistance
from propnet.antenna.config import AntennaConfig
from propnet.raysim.matrix import PathLossMatrix
from propnet.empirical.hata import MIN_DISTANCE_KM, _correction
from propnet.geodata.gis_map import GisPatch
from propnet.geodata._validators import MAX_CLUTTER_CODE
from propnet.empirical._validators import _check_city_size, _check_clutter_codes

__all__ = ["Measurement", "SpmParams", "spm_predict", "spm_matrix", "calibrate_spm", "load_measurements"]

logger = logging.getLogger(__name__)

N_CLUTTER_CODES: int = MAX_CLUTTER_CODE + 1
MEASUREMENT_FIELDS: Tuple[str, ...] = ("d_km", "h_b_m", "clutter", "observed_db")


class Measurement(NamedTuple):
    """One calibration measurement: distance, base station height, clutter code and observed path loss."""

    d_km: float
    h_b_m: float
    clutter: int
    observed_db: float


@dataclass(frozen=True)
class SpmParams:
    """Coefficients of the standard propagation model.

    The path loss is ``K1 + K2 log d + K3 log h_B + K4 log d log h_B + clutter_offset[code]``, with `d` in km
    and `h_B` in meters.

    :param k1: Constant term.
    :param k2: Distance coefficient.
    :param k3: Base station height coefficient.
    :param k4: Cross coefficient.
    :param clutter_offset: The 22 additive offsets in dB, indexed by clutter code.
    :param rank_deficient: Whether the coefficients are the minimal-norm solution of a rank-deficient fit.

    :raises ValueError: If a coefficient is not finite or the offsets are not 22.
    """

    k1: float = 0.0
    k2: float = 0.0
    k3: float = 0.0
    k4: float = 0.0
    clutter_offset: Tuple[float, ...] = field(default=(0.0,) * N_CLUTTER_CODES)
    rank_deficient: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "clutter_offset", tuple(float(value) for value in self.clutter_offset))
        if len(self.clutter_offset) != N_CLUTTER_CODES:
            raise ValueError(f"Expected {N_CLUTTER_CODES} clutter offsets, but got {len(self.clutter_offset)}.")
        if not np.all(np.isfinite([self.k1, self.k2, self.k3, self.k4, *self.clutter_offset])):
            raise ValueError("Expected every coefficient of the model to be finite.")

    @property
    def coefficients(self) -> Tuple[float, float, float, float]:
        """Return (K1, K2, K3, K4)."""
        return self.k1, self.k2, self.k3, self.k4

    @classmethod
    def from_hata(cls, f_mhz: float, h_M: float, city_size: str = "small_medium") -> "SpmParams":
        """Return the uncalibrated model matching the urban Hata model at the given frequency.

        :example:
            >>> from propnet import SpmParams
            ...
            >>> params = SpmParams.from_hata(f_mhz=900.0, h_M=1.5)
            >>> params.k2, params.k3, params.k4
            (44.9, -13.82, -6.55)
        """
        _check_city_size(city_size)
        k1 = 69.55 + 26.16 * np.log10(f_mhz) - float(_correction(f_mhz, h_M, city_size))
        return cls(k1=float(k1), k2=44.9, k3=-13.82, k4=-6.55)


def spm_predict(
    p: SpmParams,
    d_km: Union[float, np.ndarray],
    h_B: Union[float, np.ndarray],
    clutter_code: Union[int, np.ndarray],
) -> Union[float, np.ndarray]:
    """Return the path loss predicted by the standard propagation model, in dB.

    :param p: The model coefficients.
    :type p: SpmParams
    :param d_km: Distance(s) in km.
    :type d_km: Union[float, np.ndarray]
    :param h_B: Base station height(s) in meters.
    :type h_B: Union[float, np.ndarray]
    :param clutter_code: Clutter code(s) between 0 and 21.
    :type clutter_code: Union[int, np.ndarray]

    :return: The path loss(es) in dB.
    :rtype: Union[float, np.ndarray]

    :raises NonPositiveDistance: If a distance is not strictly positive.
    :raises ValueError: If a clutter code is not an integer between 0 and 21.

    :example:
        >>> from propnet import SpmParams, spm_predict
        ...
        >>> spm_predict(SpmParams(k1=100.0, k2=30.0), d_km=10.0, h_B=30.0, clutter_code=0)
        130.0
    """
    d_km = np.asarray(d_km, dtype=float)
    if np.any(d_km <= 0):
        raise NonPositiveDistance(f"Expected strictly positive distances, but got {d_km.min():g} km.")
    h_B = np.asarray(h_B, dtype=float)
    if np.any(h_B <= 0):
        raise ValueError(f"Expected strictly positive base station heights, but got {h_B.min():g} m.")
    log_d, log_h = np.log10(d_km), np.log10(h_B)
    offsets = np.asarray(p.clutter_offset)[_check_clutter_codes(clutter_code)]
    loss = p.k1 + p.k2 * log_d + p.k3 * log_h + p.k4 * log_d * log_h + offsets
    if np.ndim(loss) == 0:
        return float(loss)
    return loss


def spm_matrix(
    patch: Union[GisPatch, np.ndarray],
    ant: AntennaConfig,
    params: SpmParams,
    resolution_m: Optional[float] = None,
) -> PathLossMatrix:
    """Evaluate the standard propagation model at every pixel of a patch.

    `patch` is either a patch centered on the antenna or the array of its clutter codes, in which case
    `resolution_m` is required and the antenna sits at the center pixel ``(H // 2, W // 2)``. Distances are
    floored at 10 m.

    :raises ValueError: If an array of codes is given without resolution.
    """
    if isinstance(patch, GisPatch):
        codes = patch.clutter.filled(0.0)
        east, north = patch.offsets_m()
    else:
        if resolution_m is None:
            raise ValueError("The parameter `resolution_m` is required when clutter codes are given as an array.")
        codes = np.asarray(patch, dtype=float)
        height, width = codes.shape
        rows, cols = np.mgrid[0:height, 0:width].astype(float)
        north = (height // 2 - rows) * resolution_m
        east = (cols - width // 2) * resolution_m
    d_km = np.maximum(np.hypot(east, north) / 1000.0, MIN_DISTANCE_KM)
    codes = np.clip(np.rint(codes), 0, MAX_CLUTTER_CODE).astype(int)
    return PathLossMatrix(values=spm_predict(params, d_km=d_km, h_B=ant.height_m, clutter_code=codes))


def calibrate_spm(measurements: Sequence[Measurement]) -> SpmParams:
    """Fit the standard propagation model to measurements by linear least squares.

    The free parameters are K1 to K4 and one clutter offset per observed code, except the smallest observed code
    whose offset is fixed at 0 and absorbed by K1. When the design matrix is rank deficient, e.g., when all
    measurements share the same base station height, the minimal-norm solution is returned and flagged.

    :param measurements: Tuples (d_km, h_b_m, clutter, observed_db).
    :type measurements: Sequence[Measurement]

    :return: The fitted coefficients.
    :rtype: SpmParams

    :raises RankDeficient: If there are fewer measurements than free parameters.
    :raises NonPositiveDistance: If a distance is not strictly positive.
    :raises ValueError: If a clutter code is not an integer between 0 and 21.
    """
    data = np.asarray([tuple(m) for m in measurements], dtype=float).reshape(-1, 4)
    d_km, h_b, codes, observed = data.T
    if np.any(d_km <= 0):
        raise NonPositiveDistance(f"Expected strictly positive distances, but got {d_km.min():g} km.")
    codes = _check_clutter_codes(codes)
    present = np.unique(codes)
    n_free = 4 + max(len(present) - 1, 0)
    if len(data) < n_free:
        raise RankDeficient(f"Expected at least {n_free} measurements to fit {n_free} parameters, but got {len(data)}.")

    log_d, log_h = np.log10(d_km), np.log10(h_b)
    columns = [np.ones_like(log_d), log_d, log_h, log_d * log_h]
    columns += [(codes == code).astype(float) for code in present[1:]]
    design = np.stack(columns, axis=1)
    solution, _, rank, _ = np.linalg.lstsq(design, observed, rcond=None)
    rank_deficient = bool(rank < n_free)
    if rank_deficient:
        logger.warning("calibration design matrix has rank %d < %d, using the minimal-norm solution", rank, n_free)

    offsets = np.zeros(N_CLUTTER_CODES)
    offsets[present[1:]] = solution[4:]
    k1, k2, k3, k4 = (float(value) for value in solution[:4])
    return SpmParams(k1=k1, k2=k2, k3=k3, k4=k4, clutter_offset=tuple(offsets), rank_deficient=rank_deficient)


def load_measurements(path: Union[str, Path]) -> List[Measurement]:
    """Load calibration measurements from a CSV file with header ``d_km,h_b_m,clutter,observed_db``.

    :raises ParseError: If the header or a row is malformed.
    """
    with Path(path).open(newline="") as handle:
        reader = csv.DictReader(handle)
        if tuple(reader.fieldnames or ()) != MEASUREMENT_FIELDS:
            header = ",".join(MEASUREMENT_FIELDS)
            raise ParseError(f"Expected the header {header} in {path}, but got {reader.fieldnames}.")
        try:
            return [
                Measurement(float(row["d_km"]), float(row["h_b_m"]), int(row["clutter"]), float(row["observed_db"]))
                for row in reader
            ]
        except (TypeError, ValueError):
            raise ParseError(f"Malformed measurement at line {reader.line_num} of {path}.") from None
