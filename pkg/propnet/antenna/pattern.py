import logging
from typing import Dict, List, Tuple, Union
from pathlib import Path
from collections import OrderedDict

import numpy as np

from propnet._base import _Record
from propnet._utils import _freeze, _pretty_print_table
from propnet.exceptions import ParseError, MissingCut, AngleOutOfRange
from propnet.antenna.angles import wrap_angle
from propnet.antenna._validators import HORIZONTAL_SAMPLES, VERTICAL_SAMPLES, _validate_pattern

__all__ = [
    "RadiationPattern",
    "pattern_gain",
    "load_pattern",
    "save_pattern",
    "omnidirectional_pattern",
    "sector_pattern",
]

logger = logging.getLogger(__name__)

_AZIMUTH_GRID = np.arange(HORIZONTAL_SAMPLES + 1, dtype=float)
_ELEVATION_GRID = np.arange(-90, 91, dtype=float)


class RadiationPattern(_Record):
    """The ``RadiationPattern`` class describes how an antenna distributes its energy in space.

    The pattern is given by two cuts sampled at every integer degree, both in dB relative to the peak gain:
    the horizontal cut for the azimuth offsets 0, 1, ..., 359 and the vertical cut for the elevation offsets
    -90, -89, ..., 90. The gain in a direction is reconstructed as ``peak + H(az) + V(el)``.

    :param horizontal_cut: The 360 values of the horizontal cut.
    :type horizontal_cut: np.ndarray
    :param vertical_cut: The 181 values of the vertical cut.
    :type vertical_cut: np.ndarray
    :param peak_gain_dbi: The gain at boresight in dBi.
    :type peak_gain_dbi: float

    :raises InvalidPattern: If a cut has the wrong size, a positive value, or is not 0 at boresight.
    """

    __slots__ = ["_horizontal_cut", "_vertical_cut", "_peak_gain_dbi"]

    def __new__(cls, horizontal_cut: np.ndarray, vertical_cut: np.ndarray, peak_gain_dbi: float) -> "RadiationPattern":
        _validate_pattern(
            horizontal_cut=np.asarray(horizontal_cut, dtype=float),
            vertical_cut=np.asarray(vertical_cut, dtype=float),
            peak_gain_dbi=float(peak_gain_dbi),
        )
        return super().__new__(cls)

    def __init__(self, horizontal_cut: np.ndarray, vertical_cut: np.ndarray, peak_gain_dbi: float) -> None:
        self._horizontal_cut: np.ndarray = _freeze(np.asarray(horizontal_cut, dtype=float))
        self._vertical_cut: np.ndarray = _freeze(np.asarray(vertical_cut, dtype=float))
        self._peak_gain_dbi: float = float(peak_gain_dbi)

    def __eq__(self, other: object) -> bool:
        """Check if the pattern is equal to `another` object."""
        if isinstance(other, RadiationPattern):
            return (
                self._peak_gain_dbi == other._peak_gain_dbi
                and bool(np.array_equal(self._horizontal_cut, other._horizontal_cut))
                and bool(np.array_equal(self._vertical_cut, other._vertical_cut))
            )
        return False

    def __reduce__(self) -> Tuple[type, Tuple[np.ndarray, np.ndarray, float]]:
        return RadiationPattern, (self._horizontal_cut, self._vertical_cut, self._peak_gain_dbi)

    def __repr__(self) -> str:
        return f"RadiationPattern(peak_gain_dbi={self._peak_gain_dbi})"

    def describe(self) -> str:
        """Return a table describing the pattern, with the 3 dB beamwidth of each cut."""
        return _pretty_print_table(
            title=self.rep(),
            body=OrderedDict(
                {
                    "peak gain": f"{self._peak_gain_dbi:g} dBi",
                    "horizontal beamwidth": f"{int((self._horizontal_cut >= -3.0).sum())} deg",
                    "vertical beamwidth": f"{int((self._vertical_cut >= -3.0).sum())} deg",
                    "front-to-back": f"{-self._horizontal_cut[180]:g} dB",
                }
            ),
        )

    def gain(
        self, az_off_deg: Union[float, np.ndarray], el_off_deg: Union[float, np.ndarray]
    ) -> Union[float, np.ndarray]:
        """Shortcut for :func:`pattern_gain` on this pattern."""
        return pattern_gain(self, az_off_deg=az_off_deg, el_off_deg=el_off_deg)

    @property
    def horizontal_cut(self) -> np.ndarray:
        """Return the horizontal cut, indexed by the azimuth offset in degrees."""
        return self._horizontal_cut

    @property
    def peak_gain_dbi(self) -> float:
        """Return the gain at boresight in dBi."""
        return self._peak_gain_dbi

    @property
    def vertical_cut(self) -> np.ndarray:
        """Return the vertical cut, where index ``i`` is the elevation offset ``i - 90`` in degrees."""
        return self._vertical_cut


def pattern_gain(
    p: RadiationPattern,
    az_off_deg: Union[float, np.ndarray],
    el_off_deg: Union[float, np.ndarray],
) -> Union[float, np.ndarray]:
    """Return the gain of the antenna in the direction given by the offsets from its main lobe.

    Both cuts are linearly interpolated between integer degrees; the horizontal cut wraps around, so the
    gain is continuous across the 180/-180 seam.

    :param p: The radiation pattern.
    :type p: RadiationPattern
    :param az_off_deg: Horizontal offset(s) from the main lobe, in degrees.
    :type az_off_deg: Union[float, np.ndarray]
    :param el_off_deg: Vertical offset(s) from the main lobe in [-90, 90], in degrees.
    :type el_off_deg: Union[float, np.ndarray]

    :return: The gain(s) in dBi.
    :rtype: Union[float, np.ndarray]

    :raises AngleOutOfRange: If an elevation offset lies outside [-90, 90].

    :example:
        >>> from propnet import omnidirectional_pattern, pattern_gain
        ...
        >>> pattern_gain(omnidirectional_pattern(peak_gain_dbi=2.0), az_off_deg=37.0, el_off_deg=-12.0)
        2.0
    """
    elevation = np.asarray(el_off_deg, dtype=float)
    if np.any(elevation < -90.0) or np.any(elevation > 90.0):
        raise AngleOutOfRange(f"Expected elevation offsets in [-90, 90], but got {elevation.min()}..{elevation.max()}.")
    azimuth = np.mod(np.asarray(az_off_deg, dtype=float), 360.0)
    horizontal = np.interp(azimuth, _AZIMUTH_GRID, np.append(p.horizontal_cut, p.horizontal_cut[0]))
    vertical = np.interp(elevation, _ELEVATION_GRID, p.vertical_cut)
    gain = p.peak_gain_dbi + horizontal + vertical
    if np.ndim(gain) == 0:
        return float(gain)
    return gain


def _read_cut(lines: List[str], idx: int, name: str, degrees: range, path: Path) -> Tuple[np.ndarray, int]:
    """Private method reading the ``<deg> <dB>`` lines of one cut starting after its header at `idx`."""
    tokens = lines[idx].split()
    if len(tokens) != 2 or tokens[1] != str(len(degrees)):
        raise ParseError(f"Expected the header `{name} {len(degrees)}` in {path}, but got `{lines[idx]}`.")
    values: Dict[int, float] = {}
    for line in lines[idx + 1 : idx + 1 + len(degrees)]:
        entry = line.split()
        try:
            degree, gain = float(entry[0]), float(entry[1])
        except (ValueError, IndexError):
            raise ParseError(f"Malformed line `{line}` in the {name.lower()} cut of {path}.") from None
        if len(entry) != 2 or degree != int(degree) or int(degree) not in degrees or int(degree) in values:
            raise ParseError(f"Unexpected or repeated angle `{line}` in the {name.lower()} cut of {path}.")
        values[int(degree)] = gain
    if len(values) != len(degrees):
        raise ParseError(f"Expected {len(degrees)} values in the {name.lower()} cut of {path}, but got {len(values)}.")
    return np.array([values[degree] for degree in degrees]), idx + 1 + len(degrees)


def load_pattern(path: Union[str, Path]) -> RadiationPattern:
    """Load a radiation pattern from a text file.

    The file has the line ``GAIN <dBi>``, then ``HORIZONTAL 360`` followed by 360 lines ``<deg> <dB>``, then
    ``VERTICAL 181`` followed by 181 lines ``<deg> <dB>`` for the degrees -90 to 90. Both cuts go through
    boresight, where each must reach its maximum. Each cut is renormalized so that its maximum is 0, and the
    largest of the two maxima is folded into the peak gain.

    :param path: Path of the pattern file.
    :type path: Union[str, Path]

    :return: The radiation pattern.
    :rtype: RadiationPattern

    :raises ParseError: If the file is malformed or a cut peaks away from boresight.
    :raises MissingCut: If one of the two cuts is missing.
    """
    path = Path(path)
    lines = [line for line in path.read_text().splitlines() if line.strip()]
    if not lines or lines[0].split()[0].upper() != "GAIN" or len(lines[0].split()) != 2:
        raise ParseError(f"Expected the first line of {path} to be `GAIN <dBi>`.")
    try:
        peak = float(lines[0].split()[1])
    except ValueError:
        raise ParseError(f"Expected a number after `GAIN` in {path}.") from None

    cuts, idx = {}, 1
    while idx < len(lines):
        name = lines[idx].split()[0].upper()
        if name == "HORIZONTAL" and name not in cuts:
            cuts[name], idx = _read_cut(lines, idx, name, range(HORIZONTAL_SAMPLES), path)
        elif name == "VERTICAL" and name not in cuts:
            cuts[name], idx = _read_cut(lines, idx, name, range(-90, 91), path)
        else:
            raise ParseError(f"Unexpected line `{lines[idx]}` in {path}.")
    for name in ("HORIZONTAL", "VERTICAL"):
        if name not in cuts:
            raise MissingCut(f"The {name.lower()} cut is missing from {path}.")

    horizontal, vertical = cuts["HORIZONTAL"], cuts["VERTICAL"]
    for name, cut, boresight, first_degree in (("horizontal", horizontal, 0, 0), ("vertical", vertical, 90, -90)):
        if cut[boresight] < cut.max():
            raise ParseError(
                f"Expected the {name} cut of {path} to peak at boresight, but its maximum "
                f"{cut.max():g} dB lies at {int(np.argmax(cut)) + first_degree} degrees."
            )
    offset = max(horizontal.max(), vertical.max())
    if horizontal.max() != 0 or vertical.max() != 0:
        logger.debug("renormalized %s: %.3g dB folded into the peak gain", path, offset)
    return RadiationPattern(
        horizontal_cut=horizontal - horizontal.max(),
        vertical_cut=vertical - vertical.max(),
        peak_gain_dbi=peak + offset,
    )


def save_pattern(pattern: RadiationPattern, path: Union[str, Path]) -> None:
    """Write a radiation pattern in the text format read by :func:`load_pattern`."""
    lines = [f"GAIN {pattern.peak_gain_dbi:.10g}", f"HORIZONTAL {HORIZONTAL_SAMPLES}"]
    lines += [f"{degree} {value:.10g}" for degree, value in enumerate(pattern.horizontal_cut)]
    lines += [f"VERTICAL {VERTICAL_SAMPLES}"]
    lines += [f"{degree - 90} {value:.10g}" for degree, value in enumerate(pattern.vertical_cut)]
    Path(path).write_text("\n".join(lines) + "\n")


def omnidirectional_pattern(peak_gain_dbi: float = 0.0) -> RadiationPattern:
    """Return the pattern radiating the same gain in every direction."""
    return RadiationPattern(
        horizontal_cut=np.zeros(HORIZONTAL_SAMPLES),
        vertical_cut=np.zeros(VERTICAL_SAMPLES),
        peak_gain_dbi=peak_gain_dbi,
    )


def sector_pattern(
    peak_gain_dbi: float = 17.0,
    h_beamwidth_deg: float = 65.0,
    v_beamwidth_deg: float = 10.0,
    front_to_back_db: float = 25.0,
) -> RadiationPattern:
    r"""Return the pattern of a sector antenna with parabolic cuts.

    Each cut attenuates by :math:`\min(12 (\theta / \theta_{3dB})^2, A)` dB, where :math:`\theta_{3dB}` is the
    3 dB beamwidth and :math:`A` the front-to-back ratio.

    :param peak_gain_dbi: The gain at boresight in dBi.
    :type peak_gain_dbi: float
    :param h_beamwidth_deg: The horizontal 3 dB beamwidth in degrees.
    :type h_beamwidth_deg: float
    :param v_beamwidth_deg: The vertical 3 dB beamwidth in degrees.
    :type v_beamwidth_deg: float
    :param front_to_back_db: The maximum attenuation of both cuts.
    :type front_to_back_db: float

    :return: The sector pattern.
    :rtype: RadiationPattern

    :example:
        >>> from propnet import sector_pattern
        ...
        >>> float(sector_pattern(h_beamwidth_deg=60.0).horizontal_cut[30])
        -3.0
    """
    for name, value in (("h_beamwidth_deg", h_beamwidth_deg), ("v_beamwidth_deg", v_beamwidth_deg)):
        if value <= 0:
            raise ValueError(f"The parameter `{name}` must be strictly positive, but got {value}.")
    if front_to_back_db < 0:
        raise ValueError(f"The parameter `front_to_back_db` must be non-negative, but got {front_to_back_db}.")
    azimuth = wrap_angle(np.arange(HORIZONTAL_SAMPLES, dtype=float))
    elevation = np.arange(-90, 91, dtype=float)
    return RadiationPattern(
        horizontal_cut=-np.minimum(12.0 * (azimuth / h_beamwidth_deg) ** 2, front_to_back_db),
        vertical_cut=-np.minimum(12.0 * (elevation / v_beamwidth_deg) ** 2, front_to_back_db),
        peak_gain_dbi=peak_gain_dbi,
    )
