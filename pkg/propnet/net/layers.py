"""Single-sample 3x3 convolution layers on arrays of shape (channels, height, width).

Every convolution is zero-padded by 1 on each side; the stride-2 transposed convolution is the exact adjoint of
the stride-2 convolution and doubles height and width.
"""

from typing import Tuple

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from propnet.exceptions import ShapeMismatch

__all__ = [
    "conv_forward",
    "conv_backward",
    "deconv_forward",
    "deconv_backward",
    "relu",
    "relu_backward",
]

KERNEL_SIZE: int = 3
PADDING: int = 1


def _output_size(size: int, stride: int) -> int:
    """Private method returning the output size of a padded 3x3 convolution."""
    return (size - 1) // stride + 1


def _im2col(x: np.ndarray, stride: int) -> np.ndarray:
    """Private method unfolding the 3x3 windows of `x` into the columns of a (C * 9, H' * W') matrix."""
    channels = x.shape[0]
    padded = np.pad(x, ((0, 0), (PADDING, PADDING), (PADDING, PADDING)))
    windows = sliding_window_view(padded, (KERNEL_SIZE, KERNEL_SIZE), axis=(1, 2))[:, ::stride, ::stride]
    rows, cols = windows.shape[1], windows.shape[2]
    return windows.transpose(0, 3, 4, 1, 2).reshape(channels * KERNEL_SIZE**2, rows * cols)


def _col2im(cols: np.ndarray, channels: int, height: int, width: int, stride: int) -> np.ndarray:
    """Private method folding columns back onto a (C, H, W) image, summing overlapping windows.

    This is the adjoint of :func:`_im2col`.
    """
    out_h, out_w = _output_size(height, stride), _output_size(width, stride)
    cols = cols.reshape(channels, KERNEL_SIZE, KERNEL_SIZE, out_h, out_w)
    padded = np.zeros((channels, height + 2 * PADDING, width + 2 * PADDING), dtype=cols.dtype)
    for ki in range(KERNEL_SIZE):
        for kj in range(KERNEL_SIZE):
            padded[:, ki : ki + stride * out_h : stride, kj : kj + stride * out_w : stride] += cols[:, ki, kj]
    return padded[:, PADDING:-PADDING, PADDING:-PADDING]


def _check_stride(stride: int) -> None:
    """Private method to check the value provided for the parameter `stride`."""
    if stride not in (1, 2):
        raise ValueError(f"Expected a stride of 1 or 2, but got {stride}.")


def _check_conv_shapes(x: np.ndarray, kernels: np.ndarray, bias: np.ndarray) -> None:
    """Private method to check that input, kernels and bias of a convolution agree."""
    if x.ndim != 3:
        raise ShapeMismatch(f"Expected an input of shape (C, H, W), but got {x.shape}.")
    if kernels.ndim != 4 or kernels.shape[1] != x.shape[0] or kernels.shape[2:] != (KERNEL_SIZE, KERNEL_SIZE):
        raise ShapeMismatch(f"Expected kernels of shape (C_out, {x.shape[0]}, 3, 3), but got {kernels.shape}.")
    if bias.shape != (kernels.shape[0],):
        raise ShapeMismatch(f"Expected a bias of shape ({kernels.shape[0]},), but got {bias.shape}.")


def conv_forward(x: np.ndarray, kernels: np.ndarray, bias: np.ndarray, stride: int = 1) -> np.ndarray:
    """Return the 3x3 cross-correlation of `x` with `kernels`, plus `bias`.

    :param x: Input of shape (C_in, H, W).
    :type x: np.ndarray
    :param kernels: Kernels of shape (C_out, C_in, 3, 3).
    :type kernels: np.ndarray
    :param bias: Bias of shape (C_out,).
    :type bias: np.ndarray
    :param stride: Either 1 or 2.
    :type stride: int

    :return: Output of shape (C_out, (H - 1) // stride + 1, (W - 1) // stride + 1).
    :rtype: np.ndarray

    :raises ShapeMismatch: If the shapes of input, kernels and bias do not agree.

    :example:
        >>> import numpy as np
        >>> from propnet.net.layers import conv_forward
        ...
        >>> conv_forward(np.ones((1, 4, 4)), np.ones((1, 1, 3, 3)), np.zeros(1), stride=2)[0].tolist()
        [[4.0, 6.0], [6.0, 9.0]]
    """
    _check_stride(stride)
    _check_conv_shapes(x, kernels, bias)
    out_h, out_w = _output_size(x.shape[1], stride), _output_size(x.shape[2], stride)
    out = kernels.reshape(kernels.shape[0], -1) @ _im2col(x, stride) + bias[:, None]
    return out.reshape(kernels.shape[0], out_h, out_w)


def conv_backward(
    upstream_grad: np.ndarray, cached_input: np.ndarray, kernels: np.ndarray, stride: int = 1
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return the gradients of a convolution with respect to its input, its kernels and its bias.

    :param upstream_grad: Gradient with respect to the output of the forward call.
    :type upstream_grad: np.ndarray
    :param cached_input: Input of the forward call.
    :type cached_input: np.ndarray
    :param kernels: Kernels of the forward call.
    :type kernels: np.ndarray
    :param stride: Stride of the forward call.
    :type stride: int

    :return: The input, kernel and bias gradients.
    :rtype: Tuple[np.ndarray, np.ndarray, np.ndarray]

    :raises ShapeMismatch: If the shapes are not those of a forward call.
    """
    _check_stride(stride)
    channels, height, width = cached_input.shape
    expected = (kernels.shape[0], _output_size(height, stride), _output_size(width, stride))
    if upstream_grad.shape != expected:
        raise ShapeMismatch(f"Expected an upstream gradient of shape {expected}, but got {upstream_grad.shape}.")
    grad = upstream_grad.reshape(kernels.shape[0], -1)
    kernel_grad = (grad @ _im2col(cached_input, stride).T).reshape(kernels.shape)
    bias_grad = grad.sum(axis=1)
    input_grad = _col2im(kernels.reshape(kernels.shape[0], -1).T @ grad, channels, height, width, stride)
    return input_grad, kernel_grad, bias_grad


def deconv_forward(x: np.ndarray, kernels: np.ndarray, bias: np.ndarray) -> np.ndarray:
    """Return the stride-2 transposed convolution of `x`, plus `bias`.

    Without bias, this is the adjoint of :func:`conv_forward` with stride 2 and the same kernels, read as
    (C_in, C_out, 3, 3) instead of (C_out, C_in, 3, 3).

    :param x: Input of shape (C_in, H, W).
    :type x: np.ndarray
    :param kernels: Kernels of shape (C_in, C_out, 3, 3).
    :type kernels: np.ndarray
    :param bias: Bias of shape (C_out,).
    :type bias: np.ndarray

    :return: Output of shape (C_out, 2 H, 2 W).
    :rtype: np.ndarray

    :raises ShapeMismatch: If the shapes of input, kernels and bias do not agree.
    """
    if x.ndim != 3 or kernels.ndim != 4 or kernels.shape[0] != x.shape[0]:
        raise ShapeMismatch(f"Expected kernels of shape ({x.shape[0]}, C_out, 3, 3), but got {kernels.shape}.")
    if bias.shape != (kernels.shape[1],):
        raise ShapeMismatch(f"Expected a bias of shape ({kernels.shape[1]},), but got {bias.shape}.")
    channels, height, width = x.shape
    cols = kernels.reshape(channels, -1).T @ x.reshape(channels, -1)
    return _col2im(cols, kernels.shape[1], 2 * height, 2 * width, stride=2) + bias[:, None, None]


def deconv_backward(
    upstream_grad: np.ndarray, cached_input: np.ndarray, kernels: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return the gradients of a transposed convolution with respect to its input, its kernels and its bias.

    :raises ShapeMismatch: If the shapes are not those of a forward call.
    """
    channels, height, width = cached_input.shape
    expected = (kernels.shape[1], 2 * height, 2 * width)
    if upstream_grad.shape != expected:
        raise ShapeMismatch(f"Expected an upstream gradient of shape {expected}, but got {upstream_grad.shape}.")
    cols = _im2col(upstream_grad, stride=2)
    input_grad = (kernels.reshape(channels, -1) @ cols).reshape(channels, height, width)
    kernel_grad = (cached_input.reshape(channels, -1) @ cols.T).reshape(kernels.shape)
    bias_grad = upstream_grad.sum(axis=(1, 2))
    return input_grad, kernel_grad, bias_grad


def relu(x: np.ndarray) -> np.ndarray:
    """Return ``max(x, 0)`` elementwise."""
    return np.maximum(x, 0)


def relu_backward(upstream_grad: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Return the gradient of :func:`relu` at `x`; the subgradient at 0 is 0.

    :example:
        >>> import numpy as np
        >>> from propnet.net.layers import relu_backward
        ...
        >>> relu_backward(np.array([5.0, 5.0, 5.0]), np.array([-1.0, 0.0, 2.0])).tolist()
        [0.0, 0.0, 5.0]
    """
    return np.where(x > 0, upstream_grad, 0)
