from typing import Tuple, Union

import numpy as np

from propnet._base import _Record
from propnet._utils import _freeze
from propnet.exceptions import SamePixel, NonPositiveInput, DegenerateGeometry
from propnet.antenna.config import MobileConfig, AntennaConfig
from propnet.geodata.gis_map import GisPatch

__all__ = [
    "free_space_loss",
    "Profile",
    "extract_profile",
    "knife_edge_v",
    "knife_edge_loss",
    "diffraction_loss",
]

SPEED_OF_LIGHT_M_MHZ: float = 299.792458
# below this Fresnel parameter an edge does not attenuate
KNIFE_EDGE_THRESHOLD: float = -0.78
# edges considered beyond the principal one on each side
DEYGOUT_SUB_EDGES_DEPTH: int = 1


def free_space_loss(d_m: Union[float, np.ndarray], f_mhz: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Return the free space loss ``32.44 + 20 log(d / 1000) + 20 log f`` in dB, for `d_m` in meters.

    :raises NonPositiveInput: If a distance or a frequency is not strictly positive.

    :example:
        >>> from propnet import free_space_loss
        ...
        >>> round(free_space_loss(d_m=1000.0, f_mhz=1000.0), 2)
        92.44
    """
    d_m, f_mhz = np.asarray(d_m, dtype=float), np.asarray(f_mhz, dtype=float)
    if np.any(d_m <= 0) or np.any(f_mhz <= 0):
        raise NonPositiveInput("Expected strictly positive distances and frequencies.")
    loss = 32.44 + 20.0 * np.log10(d_m / 1000.0) + 20.0 * np.log10(f_mhz)
    if np.ndim(loss) == 0:
        return float(loss)
    return loss


class Profile(_Record):
    """The ``Profile`` class represents the obstructions between an antenna and a receiver.

    :param distances_m: Horizontal distances of the samples from the antenna, strictly increasing.
    :type distances_m: np.ndarray
    :param obstruction_heights_m: Terrain plus building height of every sample.
    :type obstruction_heights_m: np.ndarray
    :param antenna_altitude_m: Altitude of the antenna, i.e., terrain plus antenna height.
    :type antenna_altitude_m: float
    :param receiver_altitude_m: Altitude of the receiver, i.e., terrain plus mobile height.
    :type receiver_altitude_m: float
    :param total_distance_m: Horizontal distance between antenna and receiver.
    :type total_distance_m: float

    :raises ValueError: If the distances are not strictly increasing inside (0, total distance).
    """

    __slots__ = ["_distances_m", "_obstruction_heights_m", "_antenna_altitude_m", "_receiver_altitude_m", "_total"]

    def __new__(
        cls,
        distances_m: np.ndarray,
        obstruction_heights_m: np.ndarray,
        antenna_altitude_m: float,
        receiver_altitude_m: float,
        total_distance_m: float,
    ) -> "Profile":
        distances_m = np.asarray(distances_m, dtype=float)
        if distances_m.shape != np.shape(obstruction_heights_m) or distances_m.ndim != 1:
            raise ValueError("Expected one obstruction height per distance.")
        if distances_m.size and (distances_m[0] <= 0 or np.any(np.diff(distances_m) <= 0)):
            raise ValueError("Expected strictly increasing and strictly positive distances.")
        if distances_m.size and distances_m[-1] >= total_distance_m:
            raise ValueError(f"Expected every sample before the receiver at {total_distance_m} m.")
        return super().__new__(cls)

    def __init__(
        self,
        distances_m: np.ndarray,
        obstruction_heights_m: np.ndarray,
        antenna_altitude_m: float,
        receiver_altitude_m: float,
        total_distance_m: float,
    ) -> None:
        self._distances_m = _freeze(np.asarray(distances_m, dtype=float))
        self._obstruction_heights_m = _freeze(np.asarray(obstruction_heights_m, dtype=float))
        self._antenna_altitude_m = float(antenna_altitude_m)
        self._receiver_altitude_m = float(receiver_altitude_m)
        self._total = float(total_distance_m)

    def __len__(self) -> int:
        """Return the number of samples."""
        return len(self._distances_m)

    def __repr__(self) -> str:
        return f"Profile(samples={len(self)}, total_distance_m={self._total:g})"

    @property
    def antenna_altitude_m(self) -> float:
        """Return the altitude of the antenna."""
        return self._antenna_altitude_m

    @property
    def distances_m(self) -> np.ndarray:
        """Return the distances of the samples from the antenna."""
        return self._distances_m

    @property
    def obstruction_heights_m(self) -> np.ndarray:
        """Return the obstruction heights of the samples."""
        return self._obstruction_heights_m

    @property
    def receiver_altitude_m(self) -> float:
        """Return the altitude of the receiver."""
        return self._receiver_altitude_m

    @property
    def total_distance_m(self) -> float:
        """Return the distance between antenna and receiver."""
        return self._total


def extract_profile(
    patch: GisPatch,
    ant: AntennaConfig,
    target_pixel: Tuple[int, int],
    mobile: MobileConfig,
) -> Profile:
    """Sample the obstructions on the straight line from the antenna pixel center to the target pixel center.

    The line is traversed across the pixel grid and every crossed pixel, antenna and target pixels excluded,
    gives one sample at the distance of the middle of the crossed chord.

    :param patch: The patch, whose center pixel holds the antenna.
    :type patch: GisPatch
    :param ant: The antenna.
    :type ant: AntennaConfig
    :param target_pixel: (row, column) of the receiver.
    :type target_pixel: Tuple[int, int]
    :param mobile: The mobile station.
    :type mobile: MobileConfig

    :return: The profile.
    :rtype: Profile

    :raises SamePixel: If the target is the antenna pixel.
    """
    start, target = patch.center_pixel, (int(target_pixel[0]), int(target_pixel[1]))
    if start == target:
        raise SamePixel(f"The target pixel {target} is the antenna pixel.")
    terrain = patch.terrain.filled(0.0)
    heights = terrain + patch.building.filled(0.0)

    d_row, d_col = target[0] - start[0], target[1] - start[1]
    crossings = [np.array([0.0, 1.0])]
    for origin, delta in ((start[0], d_row), (start[1], d_col)):
        if delta:
            lines = np.arange(min(origin, origin + delta) + 1, max(origin, origin + delta) + 1)
            crossings.append((lines - (origin + 0.5)) / delta)
    ts = np.unique(np.concatenate(crossings))
    middles = (ts[1:] + ts[:-1])[1:-1] / 2.0

    rows = np.floor(start[0] + 0.5 + middles * d_row).astype(int)
    cols = np.floor(start[1] + 0.5 + middles * d_col).astype(int)
    total = float(np.hypot(d_row, d_col) * patch.resolution_m)
    return Profile(
        distances_m=middles * total,
        obstruction_heights_m=heights[rows, cols],
        antenna_altitude_m=terrain[start] + ant.height_m,
        receiver_altitude_m=terrain[target] + mobile.height_m,
        total_distance_m=total,
    )


def _fresnel_v(
    distance: np.ndarray,
    height: np.ndarray,
    left: Tuple[float, float],
    right: Tuple[float, float],
    wavelength: float,
) -> np.ndarray:
    """Private method returning the Fresnel parameter of edges with respect to the line between two points."""
    d1 = distance - left[0]
    d2 = right[0] - distance
    if np.any(d1 <= 0) or np.any(d2 <= 0):
        raise DegenerateGeometry("Expected every edge strictly between the two end points.")
    clearance = height - (left[1] + (right[1] - left[1]) * d1 / (right[0] - left[0]))
    return clearance * np.sqrt(2.0 * (d1 + d2) / (wavelength * d1 * d2))


def knife_edge_v(profile: Profile, edge_index: int, f_mhz: float) -> float:
    """Return the Fresnel parameter of one sample of a profile.

    The parameter is ``h sqrt(2 (d1 + d2) / (lambda d1 d2))``, where `h` is the height of the edge above the line
    from the antenna to the receiver, `d1` and `d2` the distances of the edge from them and ``lambda`` the
    wavelength ``299.792458 / f``.

    :raises IndexError: If there is no sample `edge_index`.
    :raises DegenerateGeometry: If the edge coincides with one of the end points.
    """
    if not -len(profile) <= edge_index < len(profile):
        raise IndexError(f"The profile has {len(profile)} samples, but got the edge index {edge_index}.")
    v = _fresnel_v(
        distance=profile.distances_m[edge_index],
        height=profile.obstruction_heights_m[edge_index],
        left=(0.0, profile.antenna_altitude_m),
        right=(profile.total_distance_m, profile.receiver_altitude_m),
        wavelength=SPEED_OF_LIGHT_M_MHZ / f_mhz,
    )
    return float(v)


def knife_edge_loss(v: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """Return the single knife-edge loss ``6.9 + 20 log(sqrt((v - 0.1)^2 + 1) + v - 0.1)`` for ``v > -0.78``, else 0.

    :example:
        >>> from propnet import knife_edge_loss
        ...
        >>> round(knife_edge_loss(0.0), 2)
        6.03
        >>> knife_edge_loss(-1.0)
        0.0
    """
    v = np.asarray(v, dtype=float)
    shifted = np.maximum(v, KNIFE_EDGE_THRESHOLD) - 0.1
    loss = np.where(v > KNIFE_EDGE_THRESHOLD, 6.9 + 20.0 * np.log10(np.sqrt(shifted**2 + 1.0) + shifted), 0.0)
    if np.ndim(loss) == 0:
        return float(loss)
    return loss


def _deygout(
    distances: np.ndarray,
    heights: np.ndarray,
    left: Tuple[float, float],
    right: Tuple[float, float],
    wavelength: float,
    depth: int,
) -> float:
    """Private method computing the loss of the principal edge between two points plus, if `depth` is positive,
    the losses of the sub-paths on both of its sides."""
    if distances.size == 0:
        return 0.0
    v = _fresnel_v(distances, heights, left=left, right=right, wavelength=wavelength)
    principal = int(np.argmax(v))
    if v[principal] <= KNIFE_EDGE_THRESHOLD:
        return 0.0
    loss = float(knife_edge_loss(v[principal]))
    if depth > 0:
        edge = (distances[principal], heights[principal])
        loss += _deygout(distances[:principal], heights[:principal], left, edge, wavelength, depth - 1)
        loss += _deygout(distances[principal + 1 :], heights[principal + 1 :], edge, right, wavelength, depth - 1)
    return loss


def diffraction_loss(profile: Profile, f_mhz: float) -> float:
    """Return the diffraction loss of a profile with the Deygout construction, in dB.

    The principal edge is the sample with the largest Fresnel parameter. If it does not attenuate, the loss is 0;
    otherwise the loss is its knife-edge loss plus the loss of the principal edge of each of the two sub-paths,
    antenna to edge and edge to receiver, each one evaluated against its own end points.

    :param profile: The profile.
    :type profile: Profile
    :param f_mhz: The frequency in MHz.
    :type f_mhz: float

    :return: The loss in dB, non-negative.
    :rtype: float
    """
    return _deygout(
        distances=profile.distances_m,
        heights=profile.obstruction_heights_m,
        left=(0.0, profile.antenna_altitude_m),
        right=(profile.total_distance_m, profile.receiver_altitude_m),
        wavelength=SPEED_OF_LIGHT_M_MHZ / f_mhz,
        depth=DEYGOUT_SUB_EDGES_DEPTH,
    )
