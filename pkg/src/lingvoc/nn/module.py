"""Parameter containers and the module base class for the layer library.

All numerics are float64 ndarrays. Layers implement an explicit
``forward(...) -> (y, cache)`` / ``backward(dy, cache) -> dx`` pair with
hand-coded gradients; there is no autodiff graph. Parameter gradients
accumulate into ``Param.grad`` until ``zero_grad`` is called.
"""

from __future__ import annotations

import numpy as np


class ShapeError(ValueError):
    """An operand's shape does not match what a layer expects."""


def as_f64(x) -> np.ndarray:
    """Coerce to a float64 ndarray of rank <= 3."""
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim > 3:
        raise ShapeError(f"expected rank <= 3, got shape {arr.shape}")
    return arr


def assert_finite(x, what: str = "tensor") -> np.ndarray:
    if not np.all(np.isfinite(x)):
        raise FloatingPointError(f"{what} contains non-finite values")
    return x


def glorot_uniform(rng: np.random.Generator, out_dim: int, in_dim: int, *extra) -> np.ndarray:
    """Uniform init in +-sqrt(6 / (fan_in + fan_out))."""
    fan_out = out_dim * int(np.prod(extra)) if extra else out_dim
    fan_in = in_dim * int(np.prod(extra)) if extra else in_dim
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=(out_dim, in_dim, *extra))


class Param:
    """A trainable tensor: float64 data plus an accumulated gradient."""

    __slots__ = ("data", "grad")

    def __init__(self, data):
        self.data = np.array(data, dtype=np.float64)
        self.grad = np.zeros_like(self.data)

    @property
    def shape(self):
        return self.data.shape

    @property
    def size(self):
        return self.data.size

    def __repr__(self):
        return f"Param(shape={self.data.shape})"


class Module:
    """Base class; finds Param and sub-Module attributes in definition order."""

    def named_params(self, prefix: str = ""):
        for name, value in vars(self).items():
            full = f"{prefix}{name}"
            if isinstance(value, Param):
                yield full, value
            elif isinstance(value, Module):
                yield from value.named_params(prefix=f"{full}.")
            elif isinstance(value, (list, tuple)):
                for i, item in enumerate(value):
                    if isinstance(item, Module):
                        yield from item.named_params(prefix=f"{full}.{i}.")

    def params(self) -> list[Param]:
        return [p for _, p in self.named_params()]

    def zero_grad(self) -> None:
        for p in self.params():
            p.grad[...] = 0.0

    def param_count(self) -> int:
        return sum(p.size for p in self.params())
