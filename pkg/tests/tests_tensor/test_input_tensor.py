import numpy as np
import pytest

from propnet import InputTensor, load_tensor, save_tensor
from tests.test_utils import _check_values
from propnet.exceptions import ParseError, DimensionMismatch
from propnet.tensor.input_tensor import CHANNELS


@pytest.mark.parametrize(
    argnames="data, error, msg",
    argvalues=[
        (np.zeros((7, 4, 4)), DimensionMismatch, r"Expected an array of shape \(8, H, W\), but got \(7, 4, 4\)."),
        (np.zeros((8, 4)), DimensionMismatch, r"Expected an array of shape \(8, H, W\), but got \(8, 4\)."),
        (np.full((8, 2, 2), np.nan), ValueError, "Expected every value of the input tensor to be finite."),
    ],
    ids=["seven channels", "two dimensions", "not finite"],
)
def test_constructor_error(data, error, msg) -> None:
    """Tests for exceptions to the constructor of the class `InputTensor`."""
    with pytest.raises(error, match=msg):
        _ = InputTensor(data=data)


def test_channel() -> None:
    """Tests for the method `channel()`."""
    data = np.arange(8 * 2 * 3, dtype=float).reshape(8, 2, 3)
    tensor = InputTensor(data=data)
    _check_values(expression="tensor.width", evaluation=tensor.width, expected=3)
    _check_values(expression="tensor.height", evaluation=tensor.height, expected=2)
    for idx, name in enumerate(CHANNELS):
        np.testing.assert_array_equal(tensor.channel(name), data[idx])
    with pytest.raises(ValueError, match="The given channel"):
        _ = tensor.channel("rainfall")


def test_read_only() -> None:
    """Tests that the data of an input tensor cannot be modified in place."""
    tensor = InputTensor(data=np.zeros((8, 2, 2)))
    with pytest.raises(ValueError):
        tensor.data[0, 0, 0] = 1.0


def test_save_and_load_tensor(tmp_path) -> None:
    """Tests for the methods `save_tensor()` and `load_tensor()`."""
    tensor = InputTensor(data=np.linspace(-1.0, 1.0, 8 * 3 * 5).reshape(8, 3, 5).astype(np.float32))
    save_tensor(tensor, tmp_path / "x.plt")
    _check_values(
        expression="file size",
        evaluation=(tmp_path / "x.plt").stat().st_size,
        expected=16 + 4 * 8 * 3 * 5,
    )
    _check_values(expression="load_tensor(...)", evaluation=load_tensor(tmp_path / "x.plt"), expected=tensor)


@pytest.mark.parametrize(
    argnames="content, msg",
    argvalues=[
        (b"PLT1", "is too short to be an input tensor"),
        (b"PLM1" + bytes(12), "Expected the magic b'PLT1'"),
        (b"PLT1" + np.array([8, 1, 1], dtype="<u4").tobytes() + bytes(4), "Expected 48 bytes"),
    ],
    ids=["too short", "wrong magic", "truncated"],
)
def test_load_tensor_error(tmp_path, content, msg) -> None:
    """Tests for exceptions to the method `load_tensor()`."""
    path = tmp_path / "bad.plt"
    path.write_bytes(content)
    with pytest.raises(ParseError, match=msg):
        _ = load_tensor(path)
