from typing import Any, Tuple, Iterator

import numpy as np

from propnet._base import _Record
from propnet.exceptions import NonSquare
from propnet.geodata.gis_map import GisPatch
from propnet.raysim.matrix import PathLossMatrix
from propnet.tensor.input_tensor import CHANNELS, InputTensor

__all__ = ["AugmentTransform", "dihedral_transforms", "augment"]

_AZIMUTH_CHANNEL = CHANNELS.index("azimuth")
_ROTATIONS: Tuple[int, ...] = (0, 90, 180, 270)


class AugmentTransform(_Record):
    """The ``AugmentTransform`` class represents a symmetry of the square, used to augment the training data.

    The transform first mirrors the image left-right, if `mirror` is True, then rotates it counterclockwise by
    `rotation` degrees. The eight transforms form the dihedral group of order 8 under composition, where
    ``(a * b)(x) = a(b(x))``.

    :param rotation: Counterclockwise rotation in degrees, one of 0, 90, 180 and 270.
    :type rotation: int
    :param mirror: Whether the image is mirrored left-right before the rotation.
    :type mirror: bool

    :raises ValueError: If the rotation is not a multiple of 90 between 0 and 270.

    :example:
        >>> from propnet import AugmentTransform
        ...
        >>> AugmentTransform(rotation=90) * AugmentTransform(rotation=270)
        AugmentTransform(rotation=0, mirror=False)
        >>> AugmentTransform(mirror=True) * AugmentTransform(rotation=90)
        AugmentTransform(rotation=270, mirror=True)
    """

    __slots__ = ["_rotation", "_mirror"]

    def __new__(cls, rotation: int = 0, mirror: bool = False) -> "AugmentTransform":
        if isinstance(rotation, (int, np.integer)) is False or rotation not in _ROTATIONS:
            raise ValueError(f"Expected a rotation in {_ROTATIONS}, but got {rotation}.")
        return super().__new__(cls)

    def __init__(self, rotation: int = 0, mirror: bool = False) -> None:
        self._rotation: int = int(rotation)
        self._mirror: bool = bool(mirror)

    def __call__(self, item: Any) -> Any:
        """Apply the transform to `item`.

        - If `item` is an array, its last two axes are transformed.
        - If `item` is an input tensor, every channel is transformed and the azimuth channel is negated when
          the transform mirrors.
        - If `item` is a path loss matrix, its values and its mask are transformed.
        - If `item` is a patch, its layers are transformed and the antenna pixel moves with them.

        :param item: The object to transform.
        :type item: Any

        :return: The transformed object.
        :rtype: Any

        :raises NonSquare: If a rotation of 90 or 270 degrees is applied to a non-square object.
        :raises TypeError: If `item` is not of a supported type.
        """
        if isinstance(item, np.ndarray):
            return self._call_on_array(item)
        elif isinstance(item, InputTensor):
            data = self._call_on_array(item.data).copy()
            if self._mirror:
                data[_AZIMUTH_CHANNEL] = -data[_AZIMUTH_CHANNEL]
            return InputTensor(data=data)
        elif isinstance(item, PathLossMatrix):
            return PathLossMatrix(values=self._call_on_array(item.values), mask=self._call_on_array(item.mask))
        elif isinstance(item, GisPatch):
            return self._call_on_patch(item)
        raise TypeError(f"Calling an augmentation transform on {type(item)} is not supported.")

    def _call_on_array(self, array: np.ndarray) -> np.ndarray:
        """Private method to transform the last two axes of an array."""
        if self._rotation in (90, 270) and array.shape[-1] != array.shape[-2]:
            raise NonSquare(f"Cannot rotate by {self._rotation} degrees a non-square shape {array.shape[-2:]}.")
        if self._mirror:
            array = np.flip(array, axis=-1)
        return np.ascontiguousarray(np.rot90(array, k=self._rotation // 90, axes=(-2, -1)))

    def _call_on_patch(self, patch: GisPatch) -> GisPatch:
        """Private method to transform the layers of a patch, moving the antenna pixel with them."""
        row, col = patch.center_pixel
        height, width = patch.height, patch.width
        if self._mirror:
            col = width - 1 - col
        for _ in range(self._rotation // 90):
            row, col = width - 1 - col, row
            height, width = width, height
        return GisPatch(
            clutter=patch.clutter.with_values(self._call_on_array(patch.clutter.values)),
            building=patch.building.with_values(self._call_on_array(patch.building.values)),
            terrain=patch.terrain.with_values(self._call_on_array(patch.terrain.values)),
            center_pixel=(row, col),
        )

    def __eq__(self, other: Any) -> bool:
        """Check if the transform is equal to `another` object."""
        if isinstance(other, AugmentTransform):
            return self._rotation == other._rotation and self._mirror == other._mirror
        return False

    def __hash__(self) -> int:
        return hash((self._rotation, self._mirror))

    def __mul__(self, other: "AugmentTransform") -> "AugmentTransform":
        """Compose the transform with another one, `other` being applied first.

        :param other: The transform applied first.
        :type other: AugmentTransform

        :return: The composition of the two transforms.
        :rtype: AugmentTransform

        :raises TypeError: If the other object is not an augmentation transform.
        """
        if isinstance(other, AugmentTransform):
            steps = other._rotation // 90
            rotation = (self._rotation // 90 + (-steps if self._mirror else steps)) % 4
            return AugmentTransform(rotation=90 * rotation, mirror=self._mirror != other._mirror)
        raise TypeError(f"Product between types `AugmentTransform` and {type(other)} is not implemented.")

    def __pow__(self, power: int) -> "AugmentTransform":
        """Return the transform to the chosen power.

        :raises TypeError: If `power` is not an integer.

        :example:
            >>> from propnet import AugmentTransform
            ...
            >>> AugmentTransform(rotation=90) ** 3
            AugmentTransform(rotation=270, mirror=False)
            >>> AugmentTransform(rotation=90) ** -1
            AugmentTransform(rotation=270, mirror=False)
        """
        if isinstance(power, int) is False:
            raise TypeError(f"Power operation for type {type(power)} not supported.")
        elif power == 0:
            return AugmentTransform()
        elif power <= -1:
            return self.inverse() ** abs(power)
        return self * (self ** (power - 1))

    def __repr__(self) -> str:
        return f"AugmentTransform(rotation={self._rotation}, mirror={self._mirror})"

    def azimuth(self, deg: float) -> float:
        """Return the compass azimuth, in [0, 360), that a direction `deg` takes in the transformed image.

        :example:
            >>> from propnet import AugmentTransform
            ...
            >>> AugmentTransform(rotation=90).azimuth(30.0)
            300.0
            >>> AugmentTransform(mirror=True).azimuth(30.0)
            330.0
        """
        if self._mirror:
            deg = -deg
        return float(np.mod(deg - self._rotation, 360.0))

    def inverse(self) -> "AugmentTransform":
        """Return the inverse of the transform, i.e., the transform undoing it."""
        if self._mirror:
            return self
        return AugmentTransform(rotation=(360 - self._rotation) % 360)

    @property
    def mirror(self) -> bool:
        """Return whether the transform mirrors the image."""
        return self._mirror

    def order(self) -> int:
        """Return the order of the transform, i.e., the smallest power equal to the identity."""
        if self._mirror:
            return 2
        return {0: 1, 90: 4, 180: 2, 270: 4}[self._rotation]

    @property
    def rotation(self) -> int:
        """Return the counterclockwise rotation in degrees."""
        return self._rotation


def dihedral_transforms() -> Iterator[AugmentTransform]:
    """Return a generator over the 8 augmentation transforms, the identity first.

    :example:
        >>> from propnet import dihedral_transforms
        ...
        >>> len(list(dihedral_transforms()))
        8
    """
    for mirror in (False, True):
        for rotation in _ROTATIONS:
            yield AugmentTransform(rotation=rotation, mirror=mirror)


def augment(tensor: InputTensor, label: PathLossMatrix, t: AugmentTransform) -> Tuple[InputTensor, PathLossMatrix]:
    """Apply the same transform to an input tensor and its label.

    :param tensor: The input tensor.
    :type tensor: InputTensor
    :param label: The path loss matrix, with its validity mask.
    :type label: PathLossMatrix
    :param t: The transform.
    :type t: AugmentTransform

    :return: The transformed tensor and label.
    :rtype: Tuple[InputTensor, PathLossMatrix]

    :raises NonSquare: If `t` rotates by 90 or 270 degrees and the tensor is not square.
    """
    if (tensor.height, tensor.width) != label.shape:
        raise ValueError(f"Expected a label of shape {(tensor.height, tensor.width)}, but got {label.shape}.")
    return t(tensor), t(label)
