import logging
from typing import List, Union, Sequence
from pathlib import Path
from dataclasses import dataclass

import numpy as np
from PIL import Image

from propnet.net.model import ModelWeights
from propnet.tensor.input_tensor import CHANNELS

__all__ = ["FilterImage", "export_first_layer_filters", "save_filter_images"]

logger = logging.getLogger(__name__)

FIRST_LAYER: str = "enc_0.kernel"
# gray level of a constant kernel
CONSTANT_KERNEL_LEVEL: float = 0.5


@dataclass(frozen=True)
class FilterImage:
    """One 3x3 kernel of the first convolution, seen from one input channel and normalized to [0, 1].

    ``kmin + image * (kmax - kmin)`` recovers the kernel, except for a constant kernel, whose image is 0.5.
    """

    channel: str
    index: int
    image: np.ndarray
    kmin: float
    kmax: float

    def kernel(self) -> np.ndarray:
        """Return the kernel the image was normalized from."""
        if self.kmax == self.kmin:
            return np.full(self.image.shape, self.kmin)
        return self.kmin + self.image * (self.kmax - self.kmin)


def export_first_layer_filters(w: ModelWeights) -> List[FilterImage]:
    """Slice the kernels of the first convolution per input channel and min-max normalize each of them.

    :param w: The weights.
    :type w: ModelWeights

    :return: ``base_channels`` images per input channel, grouped by channel.
    :rtype: List[FilterImage]

    :example:
        >>> from propnet import ArchSpec, init_weights, export_first_layer_filters
        ...
        >>> filters = export_first_layer_filters(init_weights(ArchSpec(base_channels=4, depth=2), seed=0))
        >>> len(filters), filters[0].channel, filters[0].image.shape
        (32, 'clutter', (3, 3))
    """
    kernels = np.asarray(w[FIRST_LAYER], dtype=float)
    n_out, n_in = kernels.shape[:2]
    names = CHANNELS if n_in == len(CHANNELS) else tuple(f"channel_{c}" for c in range(n_in))
    filters = []
    for c in range(n_in):
        for k in range(n_out):
            kernel = kernels[k, c]
            kmin, kmax = float(kernel.min()), float(kernel.max())
            if kmax == kmin:
                image = np.full(kernel.shape, CONSTANT_KERNEL_LEVEL)
            else:
                image = (kernel - kmin) / (kmax - kmin)
            filters.append(FilterImage(channel=names[c], index=k, image=image, kmin=kmin, kmax=kmax))
    return filters


def save_filter_images(filters: Sequence[FilterImage], directory: Union[str, Path], scale: int = 16) -> List[Path]:
    """Write every filter as a grayscale PGM image named ``<channel>_<index>.pgm``.

    :param filters: The filters.
    :type filters: Sequence[FilterImage]
    :param directory: The output directory, created if needed.
    :type directory: Union[str, Path]
    :param scale: Side of the square of pixels drawing one kernel entry.
    :type scale: int

    :return: The written paths.
    :rtype: List[Path]
    """
    if scale < 1:
        raise ValueError(f"Expected a scale of at least 1, but got {scale}.")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for item in filters:
        gray = np.rint(item.image * 255.0).astype(np.uint8)
        gray = np.kron(gray, np.ones((scale, scale), dtype=np.uint8))
        path = directory / f"{item.channel}_{item.index:03d}.pgm"
        Image.fromarray(gray).save(path, format="PPM")
        paths.append(path)
    logger.info("wrote %d filter images to %s", len(paths), directory)
    return paths
