import logging
from typing import Dict, List, Union, Mapping, Optional, Sequence

import numpy as np

from propnet.exceptions import ConfigError
from propnet.empirical.spm import SpmParams, Measurement, spm_matrix, calibrate_spm
from propnet.empirical.hata import MIN_DISTANCE_KM, hata_matrix
from propnet.raysim.matrix import PathLossMatrix
from propnet.raysim.clutter import ClutterLossTable
from propnet.geodata.raster import RasterGrid
from propnet.tensor.builder import HEIGHT_SCALE_M
from propnet.antenna.config import MobileConfig, AntennaConfig
from propnet.antenna.pattern import RadiationPattern
from propnet.geodata.gis_map import GisMap, GisPatch, extract_patch
from propnet.raysim.simulator import simulate
from propnet.harness.dataset import Dataset, PathLossSample
from propnet.harness.synthesis import known_patterns
from propnet.geodata._validators import MAX_CLUTTER_CODE

__all__ = [
    "BASELINES",
    "sample_antenna",
    "sample_patch",
    "spm_measurements",
    "calibrate_spm_per_frequency",
    "baseline_predictions",
]

logger = logging.getLogger(__name__)

BASELINES = ("hata", "spm", "raysim")

Samples = Union[Dataset, Sequence[PathLossSample]]


def sample_antenna(sample: PathLossSample, patterns: Optional[Mapping[str, RadiationPattern]] = None) -> AntennaConfig:
    """Rebuild the antenna of a sample from its metadata, looking its pattern up by name.

    :raises ConfigError: If the metadata lacks the antenna or its pattern is unknown.
    """
    patterns = known_patterns() if patterns is None else patterns
    if "antenna" not in sample.meta:
        raise ConfigError("Expected antenna parameters in the metadata of the sample.")
    antenna = dict(sample.meta["antenna"])
    name = antenna.pop("pattern_name", "omni")
    if name not in patterns:
        raise ConfigError(f"Expected the pattern `{name}` among the known patterns {sorted(patterns)}.")
    return AntennaConfig(pattern=patterns[name], pattern_name=name, **antenna)


def sample_patch(sample: PathLossSample, maps: Optional[Mapping[str, GisMap]] = None) -> GisPatch:
    """Return the patch a sample was built from.

    The patch is cut out of its map again when the map is among `maps`; otherwise it is recovered from the
    clutter, building and terrain channels of the input tensor, up to single precision.
    """
    name = sample.meta.get("map")
    if maps is not None and name in maps:
        return extract_patch(
            maps[name], antenna_xy=sample.antenna_xy(), width=sample.input.width, height=sample.input.height
        )
    resolution = float(sample.meta.get("resolution_m", 0.0))
    if resolution <= 0:
        raise ConfigError("Expected the map resolution in the metadata of the sample.")
    layers = {
        "clutter": np.rint(sample.input.channel("clutter") * MAX_CLUTTER_CODE),
        "building": sample.input.channel("building") * HEIGHT_SCALE_M,
        "terrain": sample.input.channel("terrain") * HEIGHT_SCALE_M,
    }
    return GisPatch(**{kind: RasterGrid(values=values, resolution_m=resolution) for kind, values in layers.items()})


def _mobile(sample: PathLossSample) -> MobileConfig:
    return MobileConfig(height_m=float(sample.meta.get("mobile_height_m", 1.5)))


def spm_measurements(samples: Samples, maps: Optional[Mapping[str, GisMap]] = None) -> Dict[float, List[Measurement]]:
    """Turn the valid label pixels of the samples into calibration measurements, grouped by carrier frequency.

    The distance of a pixel is floored at 10 m, as in :func:`spm_matrix`.
    """
    groups: Dict[float, List[Measurement]] = {}
    for sample in samples:
        patch = sample_patch(sample, maps=maps)
        antenna = sample.meta["antenna"]
        east, north = patch.offsets_m()
        d_km = np.maximum(np.hypot(east, north) / 1000.0, MIN_DISTANCE_KM)
        codes = np.clip(np.rint(patch.clutter.filled(0.0)), 0, MAX_CLUTTER_CODE).astype(int)
        mask = sample.label.mask
        groups.setdefault(float(antenna["frequency_mhz"]), []).extend(
            Measurement(d_km=float(d), h_b_m=float(antenna["height_m"]), clutter=int(code), observed_db=float(obs))
            for d, code, obs in zip(d_km[mask], codes[mask], sample.label.values[mask])
        )
    return groups


def calibrate_spm_per_frequency(
    samples: Samples, maps: Optional[Mapping[str, GisMap]] = None
) -> Dict[float, SpmParams]:
    """Fit one standard propagation model per carrier frequency to the valid label pixels of the samples.

    :raises RankDeficient: If a carrier has fewer measurements than free parameters.
    """
    fitted = {}
    for frequency, measurements in sorted(spm_measurements(samples, maps=maps).items()):
        fitted[frequency] = calibrate_spm(measurements)
        logger.info("calibrated SPM at %g MHz on %d measurements", frequency, len(measurements))
    return fitted


def baseline_predictions(
    samples: Samples,
    model: str,
    maps: Optional[Mapping[str, GisMap]] = None,
    patterns: Optional[Mapping[str, RadiationPattern]] = None,
    clutter_table: Optional[ClutterLossTable] = None,
    spm_params: Optional[Mapping[float, SpmParams]] = None,
    city_size: str = "small_medium",
) -> List[PathLossMatrix]:
    """Predict the path loss of every sample with a conventional model.

    - ``hata``: the urban Hata model, in permissive mode.
    - ``spm``: the standard propagation model, with the parameters of `spm_params` for its carrier frequency,
      or the uncalibrated coefficients derived from Hata.
    - ``raysim``: the ray simulator, rounded to single precision like stored labels.

    :param samples: The samples.
    :type samples: Union[Dataset, Sequence[PathLossSample]]
    :param model: One of ``hata``, ``spm`` and ``raysim``.
    :type model: str
    :param maps: Maps by name, to cut the patches out of.
    :type maps: Optional[Mapping[str, GisMap]]
    :param patterns: Patterns by name, :func:`known_patterns` if omitted.
    :type patterns: Optional[Mapping[str, RadiationPattern]]
    :param clutter_table: The clutter losses of the ray simulator.
    :type clutter_table: Optional[ClutterLossTable]
    :param spm_params: Calibrated parameters by carrier frequency.
    :type spm_params: Optional[Mapping[float, SpmParams]]
    :param city_size: City size of the Hata model.
    :type city_size: str

    :return: One all-valid path loss matrix per sample.
    :rtype: List[PathLossMatrix]

    :raises ConfigError: If the model is unknown.
    """
    if model not in BASELINES:
        raise ConfigError(f"The given baseline ({model}) is not supported. Supported baselines are {BASELINES}.")
    spm_params = {} if spm_params is None else spm_params
    predictions = []
    for sample in samples:
        patch, ant, mobile = sample_patch(sample, maps=maps), sample_antenna(sample, patterns=patterns), _mobile(sample)
        if model == "hata":
            prediction = hata_matrix(patch, ant, mobile, city_size=city_size)
        elif model == "spm":
            params = spm_params.get(float(ant.frequency_mhz))
            if params is None:
                params = SpmParams.from_hata(ant.frequency_mhz, h_M=mobile.height_m, city_size=city_size)
            prediction = spm_matrix(patch, ant, params)
        else:
            simulated = simulate(patch, ant, mobile, clutter_table=clutter_table)
            prediction = PathLossMatrix(values=simulated.values.astype(np.float32))
        predictions.append(prediction)
    return predictions
