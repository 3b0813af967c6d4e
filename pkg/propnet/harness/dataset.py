import json
import logging
from typing import Any, Dict, List, Tuple, Union, Iterator, Sequence
from pathlib import Path
from itertools import combinations
from dataclasses import field, dataclass
from collections import OrderedDict

import numpy as np

from propnet._base import _Record
from propnet._utils import _rng, _pretty_print_table
from propnet.exceptions import ParseError
from propnet.raysim.roads import road_mask
from propnet.raysim.matrix import PathLossMatrix, load_matrix, save_matrix
from propnet.tensor.input_tensor import InputTensor, load_tensor, save_tensor

__all__ = ["SPLITS", "PathLossSample", "Dataset", "save_dataset", "load_dataset", "calibration_split"]

logger = logging.getLogger(__name__)

SPLITS: Tuple[str, ...] = ("train", "test", "calibrate", "holdout")
MANIFEST_NAME: str = "manifest.json"
MANIFEST_VERSION: int = 1


@dataclass(frozen=True)
class PathLossSample:
    """One labeled sample: the input tensor, the path loss matrix with its validity mask, and metadata.

    The metadata holds the map name (``map``), the map resolution (``resolution_m``), the antenna parameters
    (``antenna``) and the mobile height (``mobile_height_m``).
    """

    input: InputTensor
    label: PathLossMatrix
    meta: Dict[str, Any] = field(default_factory=dict, compare=False)
    split: str = "train"

    def __post_init__(self) -> None:
        if self.split not in SPLITS:
            raise ValueError(f"The given split ({self.split}) is not supported. Supported splits are {SPLITS}.")
        if (self.input.height, self.input.width) != self.label.shape:
            shape = (self.input.height, self.input.width)
            raise ValueError(f"Expected a label of shape {shape}, but got {self.label.shape}.")

    def antenna_xy(self) -> Tuple[float, float]:
        """Return the easting and northing of the antenna."""
        antenna = self.meta["antenna"]
        return float(antenna["easting_m"]), float(antenna["northing_m"])

    def with_label(self, label: PathLossMatrix, split: str) -> "PathLossSample":
        """Return a copy of the sample with another label and split tag."""
        return PathLossSample(input=self.input, label=label, meta=self.meta, split=split)


def _validate_dataset(samples: Sequence[PathLossSample]) -> None:
    """Private method to check the placement invariants of a dataset.

    Recall that:
        - within a split, two antennas on the same map are at least one patch width apart;
        - the train and test splits never share a map.
    """
    groups: Dict[Tuple[str, str], List[PathLossSample]] = {}
    for sample in samples:
        if "map" in sample.meta and "antenna" in sample.meta:
            groups.setdefault((sample.split, sample.meta["map"]), []).append(sample)
    for (split, name), group in groups.items():
        for a, b in combinations(group, 2):
            separation = max(a.input.width, a.input.height) * float(a.meta.get("resolution_m", 0.0))
            distance = float(np.hypot(*np.subtract(a.antenna_xy(), b.antenna_xy())))
            if distance < separation:
                raise ValueError(
                    f"Expected antennas of split `{split}` on map `{name}` at least {separation:g} m apart, "
                    f"but got {distance:g} m."
                )
    train = {name for split, name in groups if split == "train"}
    test = {name for split, name in groups if split == "test"}
    if train & test:
        raise ValueError(f"Expected the train and test splits on disjoint maps, but both use {sorted(train & test)}.")


class Dataset(_Record):
    """The ``Dataset`` class is an ordered collection of labeled samples tagged by split.

    :param samples: The samples.
    :type samples: Sequence[PathLossSample]

    :raises ValueError: If two antennas of the same split and map are closer than one patch width, or if the
        train and test splits share a map.
    """

    __slots__ = ["_samples"]

    def __new__(cls, samples: Sequence[PathLossSample] = ()) -> "Dataset":
        _validate_dataset(samples)
        return super().__new__(cls)

    def __init__(self, samples: Sequence[PathLossSample] = ()) -> None:
        self._samples: Tuple[PathLossSample, ...] = tuple(samples)

    def __add__(self, other: "Dataset") -> "Dataset":
        """Return the dataset holding the samples of both datasets."""
        if isinstance(other, Dataset):
            return Dataset(self._samples + other._samples)
        raise TypeError(f"Sum between types `Dataset` and {type(other)} is not implemented.")

    def __getitem__(self, idx: int) -> PathLossSample:
        """Return the sample at position `idx`."""
        return self._samples[idx]

    def __iter__(self) -> Iterator[PathLossSample]:
        """Return an iterator over the samples."""
        return iter(self._samples)

    def __len__(self) -> int:
        """Return the number of samples."""
        return len(self._samples)

    def __repr__(self) -> str:
        return f"Dataset(samples={len(self)})"

    def describe(self) -> str:
        """Return a table with the number of samples of every split."""
        return _pretty_print_table(
            title=self.rep(),
            body=OrderedDict({split: str(len(self.split(split))) for split in SPLITS}),
        )

    def maps(self) -> List[str]:
        """Return the sorted names of the maps the samples come from."""
        return sorted({sample.meta["map"] for sample in self._samples if "map" in sample.meta})

    def split(self, tag: str) -> "Dataset":
        """Return the dataset of the samples tagged `tag`."""
        if tag not in SPLITS:
            raise ValueError(f"The given split ({tag}) is not supported. Supported splits are {SPLITS}.")
        return Dataset([sample for sample in self._samples if sample.split == tag])


def save_dataset(dataset: Dataset, directory: Union[str, Path]) -> Path:
    """Write a dataset: one ``PLT1`` tensor file and one ``PLM1`` label file per sample, plus a JSON manifest.

    :return: The path of the manifest.
    :rtype: Path
    """
    directory = Path(directory)
    (directory / "samples").mkdir(parents=True, exist_ok=True)
    entries = []
    for idx, sample in enumerate(dataset):
        tensor_path, label_path = f"samples/{idx:05d}.plt", f"samples/{idx:05d}.plm"
        save_tensor(sample.input, directory / tensor_path)
        save_matrix(sample.label, directory / label_path)
        entries.append({"tensor": tensor_path, "label": label_path, "split": sample.split, "meta": sample.meta})
    manifest = directory / MANIFEST_NAME
    manifest.write_text(json.dumps({"version": MANIFEST_VERSION, "samples": entries}, sort_keys=True, indent=2) + "\n")
    logger.info("wrote %d samples to %s", len(entries), directory)
    return manifest


def load_dataset(path: Union[str, Path]) -> Dataset:
    """Read a dataset from its manifest, or from the directory holding ``manifest.json``.

    :raises ParseError: If the manifest is malformed.
    """
    path = Path(path)
    manifest = path / MANIFEST_NAME if path.is_dir() else path
    try:
        content = json.loads(manifest.read_text())
        entries = content["samples"]
        samples = [
            PathLossSample(
                input=load_tensor(manifest.parent / entry["tensor"]),
                label=load_matrix(manifest.parent / entry["label"]),
                meta=entry.get("meta", {}),
                split=entry["split"],
            )
            for entry in entries
        ]
    except (json.JSONDecodeError, KeyError, TypeError) as error:
        raise ParseError(f"Malformed dataset manifest {manifest}: {error}.") from None
    return Dataset(samples)


def calibration_split(dataset: Dataset, seed: int, coverage_target: float = 0.075) -> Dataset:
    """Split the labels of every sample along two disjoint sets of drive-test roads.

    For every sample, a first road mask gives a copy tagged ``calibrate`` and a second road mask, with the
    pixels of the first one removed, gives a copy tagged ``holdout``. Both copies keep only the pixels that
    were valid in the original label.

    :param dataset: The source samples.
    :type dataset: Dataset
    :param seed: Seed of the PCG64 generator drawing the road seeds.
    :type seed: int
    :param coverage_target: Coverage of each road mask.
    :type coverage_target: float

    :return: The calibrate and holdout samples, interleaved.
    :rtype: Dataset
    """
    rng = _rng(seed)
    samples = []
    for sample in dataset:
        first_seed, second_seed = (int(value) for value in rng.integers(2**32, size=2))
        height, width = sample.label.shape
        calibrate = road_mask(W=width, H=height, seed=first_seed, coverage_target=coverage_target)
        holdout = road_mask(W=width, H=height, seed=second_seed, coverage_target=coverage_target) & ~calibrate
        samples.append(sample.with_label(sample.label.with_mask(calibrate), split="calibrate"))
        samples.append(sample.with_label(sample.label.with_mask(holdout), split="holdout"))
    return Dataset(samples)
