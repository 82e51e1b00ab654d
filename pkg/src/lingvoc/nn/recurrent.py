"""Gated recurrent cells with hand-coded backpropagation through time.

Gate conventions (documented here because the hand-computed test values
depend on them):

GRU, gate order [z, r, n] in the packed weights:
    z = sigmoid(W_z x + U_z h + b_z)          update gate
    r = sigmoid(W_r x + U_r h + b_r)          reset gate
    n = tanh(W_n x + r * (U_n h) + b_n)       candidate, reset-gated recurrence
    h' = (1 - z) * n + z * h

LSTM, gate order [i, f, g, o]:
    i, f, o = sigmoid(W x + U h + b) per gate; g = tanh(...)
    c' = f * c + i * g
    h' = o * tanh(c')

Sequence helpers unroll a cell over (batch, time, dim) inputs and run the
reverse pass over stacked per-step caches.
"""

from __future__ import annotations

import numpy as np

from .module import Module, Param, ShapeError, glorot_uniform


def _sigmoid(x: np.ndarray) -> np.ndarray:
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


class GruCell(Module):
    def __init__(self, in_dim: int, hidden: int, rng: np.random.Generator):
        self.in_dim = in_dim
        self.hidden = hidden
        self.W = Param(glorot_uniform(rng, 3 * hidden, in_dim))
        self.U = Param(glorot_uniform(rng, 3 * hidden, hidden))
        self.b = Param(np.zeros(3 * hidden))

    def step(self, x: np.ndarray, h_prev: np.ndarray):
        if x.shape[-1] != self.in_dim or h_prev.shape[-1] != self.hidden:
            raise ShapeError(
                f"gru expects x (*, {self.in_dim}) and h (*, {self.hidden}), "
                f"got {x.shape} and {h_prev.shape}"
            )
        H = self.hidden
        xw = x @ self.W.data.T + self.b.data
        hu = h_prev @ self.U.data.T
        z = _sigmoid(xw[..., :H] + hu[..., :H])
        r = _sigmoid(xw[..., H : 2 * H] + hu[..., H : 2 * H])
        hun = hu[..., 2 * H :]
        n = np.tanh(xw[..., 2 * H :] + r * hun)
        h_new = (1.0 - z) * n + z * h_prev
        return h_new, (x, h_prev, z, r, n, hun)

    def backward_step(self, dh: np.ndarray, cache):
        x, h_prev, z, r, n, hun = cache
        H = self.hidden
        dz = dh * (h_prev - n)
        dn = dh * (1.0 - z)
        dh_prev = dh * z

        da = np.empty_like(np.concatenate([dz, dz, dz], axis=-1))
        da_n = dn * (1.0 - n * n)
        dr = da_n * hun
        da[..., :H] = dz * z * (1.0 - z)
        da[..., H : 2 * H] = dr * r * (1.0 - r)
        da[..., 2 * H :] = da_n

        # recurrent-path pre-activations: plain for z/r, gated by r for n
        dhu = da.copy()
        dhu[..., 2 * H :] = da_n * r

        d2 = da.reshape(-1, 3 * H)
        du2 = dhu.reshape(-1, 3 * H)
        self.W.grad += d2.T @ x.reshape(-1, self.in_dim)
        self.U.grad += du2.T @ h_prev.reshape(-1, H)
        self.b.grad += d2.sum(axis=0)

        dx = da @ self.W.data
        dh_prev = dh_prev + dhu @ self.U.data
        return dx, dh_prev


class LstmCell(Module):
    def __init__(self, in_dim: int, hidden: int, rng: np.random.Generator):
        self.in_dim = in_dim
        self.hidden = hidden
        self.W = Param(glorot_uniform(rng, 4 * hidden, in_dim))
        self.U = Param(glorot_uniform(rng, 4 * hidden, hidden))
        self.b = Param(np.zeros(4 * hidden))

    def step(self, x: np.ndarray, h_prev: np.ndarray, c_prev: np.ndarray):
        if x.shape[-1] != self.in_dim or h_prev.shape[-1] != self.hidden:
            raise ShapeError(
                f"lstm expects x (*, {self.in_dim}) and h (*, {self.hidden}), "
                f"got {x.shape} and {h_prev.shape}"
            )
        H = self.hidden
        a = x @ self.W.data.T + h_prev @ self.U.data.T + self.b.data
        i = _sigmoid(a[..., :H])
        f = _sigmoid(a[..., H : 2 * H])
        g = np.tanh(a[..., 2 * H : 3 * H])
        o = _sigmoid(a[..., 3 * H :])
        c_new = f * c_prev + i * g
        tc = np.tanh(c_new)
        h_new = o * tc
        return h_new, c_new, (x, h_prev, c_prev, i, f, g, o, tc)

    def backward_step(self, dh: np.ndarray, dc: np.ndarray, cache):
        x, h_prev, c_prev, i, f, g, o, tc = cache
        H = self.hidden
        do = dh * tc
        dct = dc + dh * o * (1.0 - tc * tc)
        di = dct * g
        df = dct * c_prev
        dg = dct * i
        dc_prev = dct * f

        da = np.concatenate(
            [
                di * i * (1.0 - i),
                df * f * (1.0 - f),
                dg * (1.0 - g * g),
                do * o * (1.0 - o),
            ],
            axis=-1,
        )
        d2 = da.reshape(-1, 4 * H)
        self.W.grad += d2.T @ x.reshape(-1, self.in_dim)
        self.U.grad += d2.T @ h_prev.reshape(-1, H)
        self.b.grad += d2.sum(axis=0)

        dx = da @ self.W.data
        dh_prev = da @ self.U.data
        return dx, dh_prev, dc_prev


def unroll_gru(cell: GruCell, xs: np.ndarray, h0: np.ndarray):
    """Run a GRU over (batch, time, in); returns (hs, h_last, caches)."""
    batch, t, _ = xs.shape
    hs = np.empty((batch, t, cell.hidden))
    caches = []
    h = h0
    for step in range(t):
        h, cache = cell.step(xs[:, step], h)
        hs[:, step] = h
        caches.append(cache)
    return hs, h, caches


def backprop_gru(cell: GruCell, dhs: np.ndarray, caches, dh_last=None):
    """Reverse pass for unroll_gru; returns (dxs, dh0)."""
    batch, t, _ = dhs.shape
    dxs = np.empty((batch, t, cell.in_dim))
    dh = np.zeros((batch, cell.hidden)) if dh_last is None else dh_last
    for step in reversed(range(t)):
        dx, dh = cell.backward_step(dhs[:, step] + dh, caches[step])
        dxs[:, step] = dx
    return dxs, dh


def unroll_lstm(cell: LstmCell, xs: np.ndarray, h0: np.ndarray, c0: np.ndarray):
    batch, t, _ = xs.shape
    hs = np.empty((batch, t, cell.hidden))
    caches = []
    h, c = h0, c0
    for step in range(t):
        h, c, cache = cell.step(xs[:, step], h, c)
        hs[:, step] = h
        caches.append(cache)
    return hs, (h, c), caches


def backprop_lstm(cell: LstmCell, dhs: np.ndarray, caches, dh_last=None, dc_last=None):
    batch, t, _ = dhs.shape
    dxs = np.empty((batch, t, cell.in_dim))
    dh = np.zeros((batch, cell.hidden)) if dh_last is None else dh_last
    dc = np.zeros((batch, cell.hidden)) if dc_last is None else dc_last
    for step in reversed(range(t)):
        dx, dh, dc = cell.backward_step(dhs[:, step] + dh, dc, caches[step])
        dxs[:, step] = dx
    return dxs, dh, dc
