import struct
import logging
from typing import Any, Dict, List, Tuple, Union, Iterator
from pathlib import Path
from dataclasses import dataclass
from collections import OrderedDict

import numpy as np

from propnet._base import _Record
from propnet._utils import _rng, _freeze, _pretty_print_table
from propnet.exceptions import ParseError, ShapeMismatch, NonDivisibleSize
from propnet.net.layers import (
    KERNEL_SIZE,
    relu,
    conv_forward,
    conv_backward,
    relu_backward,
    deconv_forward,
    deconv_backward,
)
from propnet.raysim.matrix import PathLossMatrix
from propnet.tensor.input_tensor import CHANNELS, InputTensor

__all__ = [
    "ArchSpec",
    "ModelWeights",
    "init_weights",
    "plnet_forward",
    "plnet_backward",
    "save_weights",
    "load_weights",
]

logger = logging.getLogger(__name__)

# the network regresses (path loss - OFFSET) / SCALE
OUTPUT_OFFSET_DB: float = 120.0
OUTPUT_SCALE_DB: float = 40.0

FORMAT_VERSION: int = 1
_MAGIC = b"PLW1"
_HEADER = struct.Struct("<4sIIIIQI")


@dataclass(frozen=True)
class ArchSpec:
    """Architecture of the encoder-decoder network.

    The encoder has `depth` stride-2 convolutions, the first one with `base_channels` output channels and every
    following one doubling them. Each decoder stage upsamples with a stride-2 transposed convolution, concatenates
    the matching encoder output and fuses both with a stride-1 convolution; the last stage concatenates the input
    tensor and a stride-1 head convolution produces the single output channel.

    :param in_channels: Number of input channels.
    :param base_channels: Number of channels of the first encoder stage.
    :param depth: Number of encoder stages.
    """

    in_channels: int = len(CHANNELS)
    base_channels: int = 16
    depth: int = 4

    def __post_init__(self) -> None:
        for name in ("in_channels", "base_channels", "depth"):
            value = getattr(self, name)
            if isinstance(value, int) is False or value < 1:
                raise ValueError(f"The parameter `{name}` must be a strictly positive integer, but got {value}.")

    def channels(self, stage: int) -> int:
        """Return the number of output channels of the encoder stage `stage`."""
        return self.base_channels * 2**stage

    def check_input_shape(self, height: int, width: int) -> None:
        """Check that an input of the given size can flow through the network.

        :raises NonDivisibleSize: If height or width is not divisible by ``2 ** depth``.
        """
        factor = 2**self.depth
        if height % factor or width % factor:
            raise NonDivisibleSize(f"Expected height and width divisible by {factor}, but got {height}x{width}.")

    def layers(self) -> List[Tuple[str, str, Tuple[int, ...]]]:
        """Return the (name, kind, kernel shape) of every layer, in declaration order.

        The kind is ``conv2`` (stride-2 convolution), ``conv1`` (stride-1 convolution) or ``deconv``.

        :example:
            >>> from propnet import ArchSpec
            ...
            >>> [name for name, _, _ in ArchSpec(depth=2).layers()]
            ['enc_0', 'enc_1', 'up_1', 'fuse_1', 'up_0', 'head']
        """
        k = (KERNEL_SIZE, KERNEL_SIZE)
        plan = [("enc_0", "conv2", (self.channels(0), self.in_channels, *k))]
        plan += [(f"enc_{i}", "conv2", (self.channels(i), self.channels(i - 1), *k)) for i in range(1, self.depth)]
        for j in range(self.depth - 1, 0, -1):
            plan.append((f"up_{j}", "deconv", (self.channels(j), self.channels(j - 1), *k)))
            plan.append((f"fuse_{j}", "conv1", (self.channels(j - 1), 2 * self.channels(j - 1), *k)))
        plan.append(("up_0", "deconv", (self.channels(0), self.channels(0), *k)))
        plan.append(("head", "conv1", (1, self.channels(0) + self.in_channels, *k)))
        return plan


def _bias_size(kind: str, shape: Tuple[int, ...]) -> int:
    """Private method returning the number of biases of a layer."""
    return shape[1] if kind == "deconv" else shape[0]


class ModelWeights(_Record):
    """The ``ModelWeights`` class holds every learnable parameter of the network.

    Parameters are stored by name, ``<layer>.kernel`` and ``<layer>.bias``, in the declaration order of
    :meth:`ArchSpec.layers`.

    :param spec: The architecture.
    :type spec: ArchSpec
    :param params: The parameters by name.
    :type params: Dict[str, np.ndarray]
    :param seed: Seed used at initialization.
    :type seed: int
    :param version: Format version.
    :type version: int

    :raises ShapeMismatch: If a parameter is missing or does not have the shape required by the architecture.
    :raises ValueError: If a parameter is not finite.
    """

    __slots__ = ["_spec", "_params", "_seed", "_version"]

    def __new__(
        cls, spec: ArchSpec, params: Dict[str, np.ndarray], seed: int = 0, version: int = FORMAT_VERSION
    ) -> "ModelWeights":
        expected = OrderedDict()
        for name, kind, shape in spec.layers():
            expected[f"{name}.kernel"] = shape
            expected[f"{name}.bias"] = (_bias_size(kind, shape),)
        if list(expected) != list(params):
            raise ShapeMismatch(f"Expected the parameters {list(expected)}, but got {list(params)}.")
        for name, shape in expected.items():
            if np.shape(params[name]) != shape:
                raise ShapeMismatch(f"Expected `{name}` of shape {shape}, but got {np.shape(params[name])}.")
            if not np.all(np.isfinite(params[name])):
                raise ValueError(f"Expected finite values in `{name}`.")
        return super().__new__(cls)

    def __init__(
        self, spec: ArchSpec, params: Dict[str, np.ndarray], seed: int = 0, version: int = FORMAT_VERSION
    ) -> None:
        self._spec = spec
        self._params: "OrderedDict[str, np.ndarray]" = OrderedDict((k, _freeze(v)) for k, v in params.items())
        self._seed = int(seed)
        self._version = int(version)

    def __eq__(self, other: object) -> bool:
        """Check if the weights are equal to `another` object, i.e., same architecture and same values."""
        if isinstance(other, ModelWeights):
            return self._spec == other._spec and all(
                self._params[name].dtype == other._params[name].dtype
                and np.array_equal(self._params[name], other._params[name])
                for name in self._params
            )
        return False

    def __getitem__(self, name: str) -> np.ndarray:
        """Return the parameter called `name`."""
        return self._params[name]

    def __iter__(self) -> Iterator[str]:
        """Return an iterator over the parameter names, in declaration order."""
        return iter(self._params)

    def __len__(self) -> int:
        """Return the number of parameter arrays."""
        return len(self._params)

    def __repr__(self) -> str:
        spec = self._spec
        return f"ModelWeights(base_channels={spec.base_channels}, depth={spec.depth}, seed={self._seed})"

    def astype(self, dtype: Any) -> "ModelWeights":
        """Return a copy of the weights cast to `dtype`."""
        params = OrderedDict((name, value.astype(dtype)) for name, value in self._params.items())
        return ModelWeights(spec=self._spec, params=params, seed=self._seed, version=self._version)

    def describe(self) -> str:
        """Return a table describing the weights."""
        return _pretty_print_table(
            title=self.rep(),
            body=OrderedDict(
                {
                    "input channels": str(self._spec.in_channels),
                    "layers": str(len(self._spec.layers())),
                    "parameters": str(self.n_parameters()),
                    "dtype": str(next(iter(self._params.values())).dtype),
                    "format version": str(self._version),
                }
            ),
        )

    def n_parameters(self) -> int:
        """Return the number of scalar parameters."""
        return int(sum(value.size for value in self._params.values()))

    @property
    def params(self) -> "OrderedDict[str, np.ndarray]":
        """Return the parameters by name."""
        return self._params

    @property
    def seed(self) -> int:
        """Return the seed used at initialization."""
        return self._seed

    @property
    def spec(self) -> ArchSpec:
        """Return the architecture."""
        return self._spec

    @property
    def version(self) -> int:
        """Return the format version."""
        return self._version

    def with_params(self, params: Dict[str, np.ndarray]) -> "ModelWeights":
        """Return weights with the same architecture and the given parameters."""
        return ModelWeights(spec=self._spec, params=params, seed=self._seed, version=self._version)


def init_weights(spec: ArchSpec, seed: int) -> ModelWeights:
    """Initialize the weights of the network.

    Kernels are drawn from a normal distribution with standard deviation ``sqrt(2 / fan_in)``, where
    ``fan_in = 9 * C_in`` and ``C_in`` is the second axis of the kernel for convolutions and the first one for
    transposed convolutions. Biases are 0.

    :param spec: The architecture.
    :type spec: ArchSpec
    :param seed: Seed of the PCG64 generator.
    :type seed: int

    :return: The initial weights, in single precision.
    :rtype: ModelWeights
    """
    rng = _rng(seed)
    params = OrderedDict()
    for name, kind, shape in spec.layers():
        fan_in = KERNEL_SIZE**2 * (shape[0] if kind == "deconv" else shape[1])
        params[f"{name}.kernel"] = (rng.standard_normal(shape) * np.sqrt(2.0 / fan_in)).astype(np.float32)
        params[f"{name}.bias"] = np.zeros(_bias_size(kind, shape), dtype=np.float32)
    return ModelWeights(spec=spec, params=params, seed=seed)


def _as_array(x: Union[InputTensor, np.ndarray], dtype: Any) -> np.ndarray:
    """Private method returning the data of an input as an array of the given dtype."""
    data = x.data if isinstance(x, InputTensor) else np.asarray(x)
    return data.astype(dtype, copy=False)


def plnet_forward(
    w: ModelWeights, x: Union[InputTensor, np.ndarray], cache: bool = False
) -> Union[PathLossMatrix, Tuple[PathLossMatrix, Dict[str, Any]]]:
    """Run the network on one input tensor.

    The computation runs in the precision of the weights.

    :param w: The weights.
    :type w: ModelWeights
    :param x: The input tensor, or its array of shape (C, H, W).
    :type x: Union[InputTensor, np.ndarray]
    :param cache: Whether to also return the activations needed by :func:`plnet_backward`.
    :type cache: bool

    :return: The predicted path loss in dB, all pixels valid, and the activation cache if requested.
    :rtype: Union[PathLossMatrix, Tuple[PathLossMatrix, Dict[str, Any]]]

    :raises ShapeMismatch: If the number of channels differs from the architecture.
    :raises NonDivisibleSize: If height or width is not divisible by ``2 ** depth``.
    """
    spec, p = w.spec, w.params
    x = _as_array(x, p["head.kernel"].dtype)
    if x.ndim != 3 or x.shape[0] != spec.in_channels:
        raise ShapeMismatch(f"Expected an input with {spec.in_channels} channels, but got shape {x.shape}.")
    spec.check_input_shape(height=x.shape[1], width=x.shape[2])

    activations: Dict[str, Any] = {"input": x}
    encoded, h = [], x
    for i in range(spec.depth):
        activations[f"enc_{i}"] = h
        z = conv_forward(h, p[f"enc_{i}.kernel"], p[f"enc_{i}.bias"], stride=2)
        activations[f"enc_{i}.z"] = z
        h = relu(z)
        encoded.append(h)
    for j in range(spec.depth - 1, 0, -1):
        activations[f"up_{j}"] = h
        z = deconv_forward(h, p[f"up_{j}.kernel"], p[f"up_{j}.bias"])
        activations[f"up_{j}.z"] = z
        h = np.concatenate([relu(z), encoded[j - 1]])
        activations[f"fuse_{j}"] = h
        z = conv_forward(h, p[f"fuse_{j}.kernel"], p[f"fuse_{j}.bias"], stride=1)
        activations[f"fuse_{j}.z"] = z
        h = relu(z)
    activations["up_0"] = h
    z = deconv_forward(h, p["up_0.kernel"], p["up_0.bias"])
    activations["up_0.z"] = z
    h = np.concatenate([relu(z), x])
    activations["head"] = h
    y = conv_forward(h, p["head.kernel"], p["head.bias"], stride=1)[0]

    prediction = PathLossMatrix(values=OUTPUT_OFFSET_DB + OUTPUT_SCALE_DB * y)
    if cache:
        return prediction, activations
    return prediction


def plnet_backward(w: ModelWeights, cache: Dict[str, Any], grad_db: np.ndarray) -> "OrderedDict[str, np.ndarray]":
    """Backpropagate the gradient of a loss with respect to the predicted path loss.

    :param w: The weights of the forward call.
    :type w: ModelWeights
    :param cache: The activation cache returned by :func:`plnet_forward`.
    :type cache: Dict[str, Any]
    :param grad_db: Gradient with respect to the predicted path loss in dB, shape (H, W).
    :type grad_db: np.ndarray

    :return: The gradient of every parameter, by name in declaration order.
    :rtype: OrderedDict[str, np.ndarray]

    :raises ShapeMismatch: If `grad_db` does not have the shape of the prediction.
    """
    spec, p = w.spec, w.params
    dtype = p["head.kernel"].dtype
    if grad_db.shape != cache["input"].shape[1:]:
        raise ShapeMismatch(f"Expected a gradient of shape {cache['input'].shape[1:]}, but got {grad_db.shape}.")
    grads: Dict[str, np.ndarray] = {}

    def _store(name: str, kernel_grad: np.ndarray, bias_grad: np.ndarray) -> None:
        grads[f"{name}.kernel"], grads[f"{name}.bias"] = kernel_grad, bias_grad

    dy = (OUTPUT_SCALE_DB * grad_db).astype(dtype)[None]
    d_cat, *layer = conv_backward(dy, cache["head"], p["head.kernel"], stride=1)
    _store("head", *layer)
    d_z = relu_backward(d_cat[: spec.channels(0)], cache["up_0.z"])
    dh, *layer = deconv_backward(d_z, cache["up_0"], p["up_0.kernel"])
    _store("up_0", *layer)

    d_encoded = [np.zeros_like(cache[f"enc_{i}.z"]) for i in range(spec.depth)]
    for j in range(1, spec.depth):
        d_z = relu_backward(dh, cache[f"fuse_{j}.z"])
        d_cat, *layer = conv_backward(d_z, cache[f"fuse_{j}"], p[f"fuse_{j}.kernel"], stride=1)
        _store(f"fuse_{j}", *layer)
        width = spec.channels(j - 1)
        d_encoded[j - 1] += d_cat[width:]
        d_z = relu_backward(d_cat[:width], cache[f"up_{j}.z"])
        dh, *layer = deconv_backward(d_z, cache[f"up_{j}"], p[f"up_{j}.kernel"])
        _store(f"up_{j}", *layer)

    d_encoded[-1] += dh
    for i in range(spec.depth - 1, -1, -1):
        d_z = relu_backward(d_encoded[i], cache[f"enc_{i}.z"])
        d_in, *layer = conv_backward(d_z, cache[f"enc_{i}"], p[f"enc_{i}.kernel"], stride=2)
        _store(f"enc_{i}", *layer)
        if i > 0:
            d_encoded[i - 1] += d_in
    return OrderedDict((name, grads[name]) for name in p)


def save_weights(w: ModelWeights, path: Union[str, Path]) -> None:
    """Write weights in the binary ``PLW1`` format.

    The file holds the magic ``PLW1``, the format version, the architecture (input channels, base channels,
    depth), the seed and the number of arrays, then for every array in declaration order its number of
    dimensions, its dimensions and its float32 values. All integers are little-endian.
    """
    spec = w.spec
    with Path(path).open("wb") as handle:
        handle.write(
            _HEADER.pack(_MAGIC, w.version, spec.in_channels, spec.base_channels, spec.depth, w.seed, len(w))
        )
        for name in w:
            value = w[name]
            handle.write(struct.pack(f"<I{value.ndim}I", value.ndim, *value.shape))
            handle.write(value.astype("<f4").tobytes())


def load_weights(path: Union[str, Path]) -> ModelWeights:
    """Read weights written by :func:`save_weights`, in single precision.

    :raises ParseError: If the file is not a valid weights file.
    """
    data = Path(path).read_bytes()
    if len(data) < _HEADER.size:
        raise ParseError(f"The file {path} is too short to hold weights.")
    magic, version, in_channels, base_channels, depth, seed, count = _HEADER.unpack_from(data)
    if magic != _MAGIC:
        raise ParseError(f"Expected the magic {_MAGIC!r} in {path}, but got {magic!r}.")
    if version != FORMAT_VERSION:
        raise ParseError(f"Expected the format version {FORMAT_VERSION} in {path}, but got {version}.")
    spec = ArchSpec(in_channels=in_channels, base_channels=base_channels, depth=depth)
    names = [f"{name}.{part}" for name, _, _ in spec.layers() for part in ("kernel", "bias")]
    if count != len(names):
        raise ParseError(f"Expected {len(names)} arrays in {path}, but got {count}.")

    params, offset = OrderedDict(), _HEADER.size
    try:
        for name in names:
            (ndim,) = struct.unpack_from("<I", data, offset)
            shape = struct.unpack_from(f"<{ndim}I", data, offset + 4)
            offset += 4 * (ndim + 1)
            size = int(np.prod(shape))
            params[name] = np.frombuffer(data, dtype="<f4", count=size, offset=offset).reshape(shape).astype(np.float32)
            offset += 4 * size
    except (struct.error, ValueError):
        raise ParseError(f"Truncated weights file {path}.") from None
    if offset != len(data):
        raise ParseError(f"Unexpected trailing bytes in {path}.")
    logger.debug("loaded %d parameters from %s", sum(v.size for v in params.values()), path)
    return ModelWeights(spec=spec, params=params, seed=seed, version=version)
