"""Dense, convolutional, normalization, and dropout layers.

Conventions: activations are (batch, time, channels) or (batch, channels)
float64 arrays; convolutions use valid (no-padding) cross-correlation; the
transposed convolution has kernel width equal to its stride, so a length-T
input maps to exactly stride*T outputs with no overlap.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .module import Module, Param, ShapeError, glorot_uniform


def relu(x: np.ndarray) -> np.ndarray:
    """Elementwise max(0, x)."""
    return np.maximum(0.0, x)


def relu_backward(dy: np.ndarray, x: np.ndarray) -> np.ndarray:
    return dy * (x > 0.0)


class Linear(Module):
    """Affine map y = x W^T + b applied over the last axis."""

    def __init__(self, in_dim: int, out_dim: int, rng: np.random.Generator):
        self.in_dim = in_dim
        self.out_dim = out_dim
        self.W = Param(glorot_uniform(rng, out_dim, in_dim))
        self.b = Param(np.zeros(out_dim))

    def forward(self, x: np.ndarray):
        if x.shape[-1] != self.in_dim:
            raise ShapeError(
                f"linear expects input channels {self.in_dim} "
                f"(weight shape {self.W.shape}), got input shape {x.shape}"
            )
        y = x @ self.W.data.T + self.b.data
        return y, x

    def backward(self, dy: np.ndarray, cache) -> np.ndarray:
        x = cache
        d2 = dy.reshape(-1, self.out_dim)
        x2 = x.reshape(-1, self.in_dim)
        self.W.grad += d2.T @ x2
        self.b.grad += d2.sum(axis=0)
        return dy @ self.W.data


class Conv1d(Module):
    """Valid cross-correlation over the time axis, kernel (out, in, k)."""

    def __init__(self, in_ch: int, out_ch: int, kernel: int = 1, stride: int = 1,
                 rng: np.random.Generator | None = None):
        if kernel < 1 or stride < 1:
            raise ValueError(f"kernel and stride must be >= 1, got {kernel}, {stride}")
        self.in_ch = in_ch
        self.out_ch = out_ch
        self.kernel = kernel
        self.stride = stride
        rng = rng if rng is not None else np.random.default_rng(0)
        self.K = Param(glorot_uniform(rng, out_ch, in_ch, kernel))
        self.b = Param(np.zeros(out_ch))

    def forward(self, x: np.ndarray):
        if x.ndim != 3 or x.shape[-1] != self.in_ch:
            raise ShapeError(
                f"conv1d expects (batch, time, {self.in_ch}), got {x.shape}"
            )
        if x.shape[1] < self.kernel:
            raise ShapeError(
                f"conv1d input time {x.shape[1]} shorter than kernel {self.kernel}"
            )
        if self.kernel == 1 and self.stride == 1:
            y = x @ self.K.data[:, :, 0].T + self.b.data
            return y, (x, None)
        win = sliding_window_view(x, self.kernel, axis=1)[:, :: self.stride]
        # win: (batch, t_out, in_ch, kernel)
        y = np.einsum("btik,oik->bto", win, self.K.data) + self.b.data
        return y, (x, win)

    def backward(self, dy: np.ndarray, cache) -> np.ndarray:
        x, win = cache
        if self.kernel == 1 and self.stride == 1:
            d2 = dy.reshape(-1, self.out_ch)
            x2 = x.reshape(-1, self.in_ch)
            self.K.grad[:, :, 0] += d2.T @ x2
            self.b.grad += d2.sum(axis=0)
            return dy @ self.K.data[:, :, 0]
        self.K.grad += np.einsum("bto,btik->oik", dy, win)
        self.b.grad += dy.sum(axis=(0, 1))
        dx = np.zeros_like(x)
        t_out = dy.shape[1]
        for j in range(self.kernel):
            dx[:, j : j + self.stride * t_out : self.stride] += dy @ self.K.data[:, :, j]
        return dx


class TransposedConv1d(Module):
    """Upsampling by an integer ratio: kernel width == stride == ratio.

    Each input position emits ratio consecutive output vectors; output time
    length is exactly ratio * input time length.
    """

    def __init__(self, in_ch: int, out_ch: int, ratio: int, rng: np.random.Generator):
        if ratio < 1:
            raise ValueError(f"upsampling ratio must be >= 1, got {ratio}")
        self.in_ch = in_ch
        self.out_ch = out_ch
        self.ratio = ratio
        self.K = Param(glorot_uniform(rng, out_ch, in_ch, ratio))
        self.b = Param(np.zeros(out_ch))

    def forward(self, x: np.ndarray):
        if x.ndim != 3 or x.shape[-1] != self.in_ch:
            raise ShapeError(
                f"tconv1d expects (batch, time, {self.in_ch}), got {x.shape}"
            )
        batch, t, _ = x.shape
        y = np.einsum("bti,oij->btjo", x, self.K.data) + self.b.data
        return y.reshape(batch, t * self.ratio, self.out_ch), x

    def backward(self, dy: np.ndarray, cache) -> np.ndarray:
        x = cache
        batch, t, _ = x.shape
        d4 = dy.reshape(batch, t, self.ratio, self.out_ch)
        self.K.grad += np.einsum("btjo,bti->oij", d4, x)
        self.b.grad += d4.sum(axis=(0, 1, 2))
        return np.einsum("btjo,oij->bti", d4, self.K.data)


class Dropout(Module):
    """Inverted dropout; identity in inference mode."""

    def __init__(self, p: float):
        if not 0.0 <= p < 1.0:
            raise ValueError(f"dropout rate must be in [0, 1), got {p}")
        self.p = p

    def forward(self, x: np.ndarray, train: bool = False,
                rng: np.random.Generator | None = None):
        if not train or self.p == 0.0:
            return x, None
        if rng is None:
            raise ValueError("training-mode dropout needs an rng")
        mask = rng.random(x.shape) >= self.p
        return x * mask / (1.0 - self.p), mask

    def backward(self, dy: np.ndarray, cache) -> np.ndarray:
        if cache is None:
            return dy
        return dy * cache / (1.0 - self.p)


class LayerNorm(Module):
    """Normalization over the last axis with learnable gain and shift."""

    def __init__(self, dim: int, eps: float = 1e-5):
        self.dim = dim
        self.eps = eps
        self.g = Param(np.ones(dim))
        self.b = Param(np.zeros(dim))

    def forward(self, x: np.ndarray):
        mu = x.mean(axis=-1, keepdims=True)
        var = x.var(axis=-1, keepdims=True)
        inv = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mu) * inv
        y = xhat * self.g.data + self.b.data
        return y, (xhat, inv)

    def backward(self, dy: np.ndarray, cache) -> np.ndarray:
        xhat, inv = cache
        d2 = dy.reshape(-1, self.dim)
        self.g.grad += (d2 * xhat.reshape(-1, self.dim)).sum(axis=0)
        self.b.grad += d2.sum(axis=0)
        dxhat = dy * self.g.data
        m1 = dxhat.mean(axis=-1, keepdims=True)
        m2 = (dxhat * xhat).mean(axis=-1, keepdims=True)
        return inv * (dxhat - m1 - xhat * m2)
