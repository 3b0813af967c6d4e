import logging
from typing import Any, Dict, List, Tuple, Mapping, Optional, Sequence
from dataclasses import dataclass
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from propnet._utils import _rng
from propnet.exceptions import PlacementExhausted
from propnet.raysim.roads import road_mask
from propnet.raysim.matrix import PathLossMatrix
from propnet.raysim.clutter import ClutterLossTable, default_clutter_table
from propnet.geodata.raster import RasterGrid
from propnet.tensor.builder import build_input_tensor
from propnet.antenna.config import MobileConfig, AntennaConfig
from propnet.antenna.pattern import RadiationPattern, sector_pattern, omnidirectional_pattern
from propnet.geodata.gis_map import GisMap, GisPatch, extract_patch
from propnet.raysim.simulator import simulate
from propnet.harness.dataset import SPLITS, Dataset, PathLossSample

__all__ = ["SynthRanges", "known_patterns", "synth_dataset"]

logger = logging.getLogger(__name__)

# rejection sampling gives up after this many draws for a single antenna
MAX_PLACEMENT_RETRIES: int = 1000


@dataclass(frozen=True)
class SynthRanges:
    """Sampling ranges of the antenna parameters of synthetic samples.

    Heights, azimuths, tilts and transmit powers are drawn uniformly from their intervals, the frequency
    uniformly from the given carriers. The defaults are synthetic choices.
    """

    height_m: Tuple[float, float] = (20.0, 60.0)
    azimuth_deg: Tuple[float, float] = (0.0, 360.0)
    tilt_deg: Tuple[float, float] = (0.0, 12.0)
    frequencies_mhz: Tuple[float, ...] = (900.0, 1800.0, 2600.0)
    tx_power_dbm: Tuple[float, float] = (40.0, 46.0)
    coverage_target: float = 0.075

    def __post_init__(self) -> None:
        for name in ("height_m", "azimuth_deg", "tilt_deg", "tx_power_dbm"):
            low, high = getattr(self, name)
            if low > high:
                raise ValueError(f"Expected an interval for `{name}`, but got ({low}, {high}).")
        if self.height_m[0] <= 0:
            raise ValueError(f"Expected strictly positive antenna heights, but got {self.height_m}.")
        if len(self.frequencies_mhz) == 0 or min(self.frequencies_mhz) <= 0:
            raise ValueError(f"Expected strictly positive carrier frequencies, but got {self.frequencies_mhz}.")


def known_patterns() -> Dict[str, RadiationPattern]:
    """Return the library of antennas synthetic samples draw their pattern from."""
    return {
        "omni": omnidirectional_pattern(peak_gain_dbi=2.0),
        "sector65": sector_pattern(peak_gain_dbi=17.0, h_beamwidth_deg=65.0, v_beamwidth_deg=10.0),
        "sector90": sector_pattern(peak_gain_dbi=15.0, h_beamwidth_deg=90.0, v_beamwidth_deg=12.0),
    }


def _place_antennas(
    rng: np.random.Generator, maps: Sequence[GisMap], n_samples: int, separation_m: float
) -> List[Tuple[int, float, float]]:
    """Private method to draw a map and an antenna position for every sample, by rejection sampling."""
    placed: Dict[int, List[Tuple[float, float]]] = {}
    placements = []
    for _ in range(n_samples):
        idx = int(rng.integers(len(maps)))
        west, south, east, north = maps[idx].bounds()
        for _ in range(MAX_PLACEMENT_RETRIES):
            x, y = float(rng.uniform(west, east)), float(rng.uniform(south, north))
            others = placed.get(idx, [])
            if all(np.hypot(x - u, y - v) >= separation_m for u, v in others):
                break
        else:
            raise PlacementExhausted(
                f"Could not place an antenna on map `{maps[idx].name}` at least {separation_m:g} m away from the "
                f"{len(placed.get(idx, []))} antennas already placed after {MAX_PLACEMENT_RETRIES} draws."
            )
        placed.setdefault(idx, []).append((x, y))
        placements.append((idx, x, y))
    return placements


def _simulate_job(job: Mapping[str, Any]) -> Tuple[np.ndarray, np.ndarray]:
    """Private method simulating one label from plain arrays, so that it can run in a worker process."""
    layers = {
        kind: RasterGrid(values=job[kind], resolution_m=job["resolution_m"], origin=job["origin"])
        for kind in ("clutter", "building", "terrain")
    }
    pattern = RadiationPattern(
        horizontal_cut=job["horizontal_cut"], vertical_cut=job["vertical_cut"], peak_gain_dbi=job["peak_gain_dbi"]
    )
    label = simulate(
        patch=GisPatch(**layers),
        ant=AntennaConfig(pattern=pattern, **job["antenna"]),
        mobile=MobileConfig(height_m=job["mobile_height_m"]),
        clutter_table=ClutterLossTable(losses=job["clutter_losses"]),
    )
    height, width = label.shape
    if job["mask_seed"] is None:
        mask = np.ones(label.shape, dtype=bool)
    else:
        mask = road_mask(W=width, H=height, seed=job["mask_seed"], coverage_target=job["coverage_target"])
    return label.values, mask


def synth_dataset(
    maps: Sequence[GisMap],
    n_samples: int,
    seed: int,
    field_mode: bool = False,
    split: str = "train",
    width: int = 64,
    height: int = 64,
    patterns: Optional[Mapping[str, RadiationPattern]] = None,
    mobile: Optional[MobileConfig] = None,
    clutter_table: Optional[ClutterLossTable] = None,
    ranges: Optional[SynthRanges] = None,
    workers: int = 1,
) -> Dataset:
    """Generate labeled samples by installing virtual antennas on the given maps.

    Antennas are placed uniformly at random, rejecting positions closer than one patch width to an antenna
    already installed on the same map. Their parameters and pattern are drawn uniformly from `ranges` and
    `patterns`; the labels come from the ray simulator. In field mode, only the pixels along a random
    drive-test road network are valid.

    Every random draw happens before the simulations start, so the result only depends on `seed`, never on
    `workers`.

    :param maps: The maps to install the antennas on.
    :type maps: Sequence[GisMap]
    :param n_samples: The number of samples.
    :type n_samples: int
    :param seed: Seed of the PCG64 generator.
    :type seed: int
    :param field_mode: Whether to mask the labels with drive-test roads.
    :type field_mode: bool
    :param split: The split tag of the samples.
    :type split: str
    :param width: Width of the patches in pixels.
    :type width: int
    :param height: Height of the patches in pixels.
    :type height: int
    :param patterns: Named radiation patterns, :func:`known_patterns` if omitted.
    :type patterns: Optional[Mapping[str, RadiationPattern]]
    :param mobile: The mobile station, 1.5 m high if omitted.
    :type mobile: Optional[MobileConfig]
    :param clutter_table: The clutter losses, the default table if omitted.
    :type clutter_table: Optional[ClutterLossTable]
    :param ranges: Sampling ranges of the antenna parameters.
    :type ranges: Optional[SynthRanges]
    :param workers: Number of processes simulating the labels.
    :type workers: int

    :return: The dataset.
    :rtype: Dataset

    :raises PlacementExhausted: If an antenna cannot be placed far enough from the others.
    :raises ValueError: If no map is given while samples are requested, or the split is unknown.
    """
    if n_samples < 0:
        raise ValueError(f"Expected a non-negative number of samples, but got {n_samples}.")
    if split not in SPLITS:
        raise ValueError(f"The given split ({split}) is not supported. Supported splits are {SPLITS}.")
    if n_samples == 0:
        return Dataset()
    if len(maps) == 0:
        raise ValueError("Expected at least one map to install antennas on.")
    patterns = known_patterns() if patterns is None else dict(patterns)
    mobile = MobileConfig() if mobile is None else mobile
    clutter_table = default_clutter_table() if clutter_table is None else clutter_table
    ranges = SynthRanges() if ranges is None else ranges

    rng = _rng(seed)
    separation = max(width, height) * max(gis_map.resolution_m for gis_map in maps)
    placements = _place_antennas(rng, maps=maps, n_samples=n_samples, separation_m=separation)
    names = sorted(patterns)

    samples, jobs = [], []
    for idx, easting, northing in placements:
        name = names[int(rng.integers(len(names)))]
        ant = AntennaConfig(
            easting_m=easting,
            northing_m=northing,
            height_m=float(rng.uniform(*ranges.height_m)),
            azimuth_deg=float(rng.uniform(*ranges.azimuth_deg)) % 360.0,
            tilt_deg=float(rng.uniform(*ranges.tilt_deg)),
            frequency_mhz=float(ranges.frequencies_mhz[int(rng.integers(len(ranges.frequencies_mhz)))]),
            tx_power_dbm=float(rng.uniform(*ranges.tx_power_dbm)),
            pattern=patterns[name],
            pattern_name=name,
        )
        mask_seed = int(rng.integers(2**32)) if field_mode else None
        patch = extract_patch(maps[idx], antenna_xy=(easting, northing), width=width, height=height)
        antenna = ant.to_dict()
        del antenna["pattern_name"]
        jobs.append(
            {
                "clutter": patch.clutter.values,
                "building": patch.building.values,
                "terrain": patch.terrain.values,
                "resolution_m": patch.resolution_m,
                "origin": patch.clutter.origin,
                "antenna": antenna,
                "horizontal_cut": ant.pattern.horizontal_cut,
                "vertical_cut": ant.pattern.vertical_cut,
                "peak_gain_dbi": ant.pattern.peak_gain_dbi,
                "mobile_height_m": mobile.height_m,
                "clutter_losses": clutter_table.losses,
                "mask_seed": mask_seed,
                "coverage_target": ranges.coverage_target,
            }
        )
        meta = {
            "map": maps[idx].name,
            "resolution_m": patch.resolution_m,
            "antenna": ant.to_dict(),
            "mobile_height_m": mobile.height_m,
            "field": bool(field_mode),
        }
        samples.append((build_input_tensor(patch=patch, ant=ant), meta))

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            labels = list(executor.map(_simulate_job, jobs))
    else:
        labels = [_simulate_job(job) for job in jobs]
    logger.info("simulated %d samples on %d maps with %d worker(s)", n_samples, len(maps), max(workers, 1))

    return Dataset(
        [
            PathLossSample(input=tensor, label=_as_stored(values, mask), meta=meta, split=split)
            for (tensor, meta), (values, mask) in zip(samples, labels)
        ]
    )


def _as_stored(values: np.ndarray, mask: np.ndarray) -> PathLossMatrix:
    """Private method rounding the label to the single precision of the ``PLM1`` format."""
    return PathLossMatrix(values=values.astype(np.float32), mask=mask)
