"""Multi-head self-attention, the position-wise feed-forward net, and the
pre-norm residual block that stacks them.

Block wiring: x + Drop(MHA(LN(x))), then + Drop(FFN(LN(.))). Attention
probabilities (pre-dropout) are kept in the cache so row-stochasticity can
be checked from outside.
"""

from __future__ import annotations

import numpy as np

from .layers import Dropout, LayerNorm, Linear, relu, relu_backward
from .module import Module, ShapeError


def _softmax_last(x: np.ndarray) -> np.ndarray:
    z = x - x.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


class MultiHeadAttention(Module):
    """Scaled dot-product self-attention with h parallel heads."""

    def __init__(self, width: int, heads: int, p_drop: float,
                 rng: np.random.Generator):
        if width % heads != 0:
            raise ShapeError(f"width {width} not divisible by heads {heads}")
        self.width = width
        self.heads = heads
        self.head_dim = width // heads
        self.wq = Linear(width, width, rng)
        self.wk = Linear(width, width, rng)
        self.wv = Linear(width, width, rng)
        self.wo = Linear(width, width, rng)
        self.drop = Dropout(p_drop)

    def _split(self, x: np.ndarray) -> np.ndarray:
        b, t, _ = x.shape
        return x.reshape(b, t, self.heads, self.head_dim).transpose(0, 2, 1, 3)

    def _merge(self, x: np.ndarray) -> np.ndarray:
        b, h, t, d = x.shape
        return x.transpose(0, 2, 1, 3).reshape(b, t, h * d)

    def forward(self, x: np.ndarray, train: bool = False,
                rng: np.random.Generator | None = None):
        if x.ndim != 3 or x.shape[-1] != self.width:
            raise ShapeError(f"attention expects (batch, time, {self.width}), got {x.shape}")
        q, cq = self.wq.forward(x)
        k, ck = self.wk.forward(x)
        v, cv = self.wv.forward(x)
        qh, kh, vh = self._split(q), self._split(k), self._split(v)
        scale = 1.0 / np.sqrt(self.head_dim)
        scores = (qh @ kh.transpose(0, 1, 3, 2)) * scale
        attn = _softmax_last(scores)
        attn_used, cdrop = self.drop.forward(attn, train=train, rng=rng)
        ctx = attn_used @ vh
        merged = self._merge(ctx)
        y, co = self.wo.forward(merged)
        cache = (cq, ck, cv, co, qh, kh, vh, attn, attn_used, cdrop, merged)
        return y, cache

    def attention_weights(self, cache) -> np.ndarray:
        """Pre-dropout attention probabilities, (batch, heads, time, time)."""
        return cache[7]

    def backward(self, dy: np.ndarray, cache) -> np.ndarray:
        cq, ck, cv, co, qh, kh, vh, attn, attn_used, cdrop, merged = cache
        scale = 1.0 / np.sqrt(self.head_dim)
        dmerged = self.wo.backward(dy, co)
        dctx = self._split(dmerged)
        dattn_used = dctx @ vh.transpose(0, 1, 3, 2)
        dvh = attn_used.transpose(0, 1, 3, 2) @ dctx
        dattn = self.drop.backward(dattn_used, cdrop)
        dscores = attn * (dattn - (dattn * attn).sum(axis=-1, keepdims=True))
        dqh = (dscores @ kh) * scale
        dkh = (dscores.transpose(0, 1, 3, 2) @ qh) * scale
        dx = self.wq.backward(self._merge(dqh), cq)
        dx = dx + self.wk.backward(self._merge(dkh), ck)
        dx = dx + self.wv.backward(self._merge(dvh), cv)
        return dx


class FeedForward(Module):
    """Two affine maps with a ReLU expansion to d_ff in between."""

    def __init__(self, width: int, d_ff: int, rng: np.random.Generator):
        self.expand = Linear(width, d_ff, rng)
        self.project = Linear(d_ff, width, rng)

    def forward(self, x: np.ndarray):
        a, c1 = self.expand.forward(x)
        h = relu(a)
        y, c2 = self.project.forward(h)
        return y, (c1, a, c2)

    def backward(self, dy: np.ndarray, cache) -> np.ndarray:
        c1, a, c2 = cache
        dh = self.project.backward(dy, c2)
        da = relu_backward(dh, a)
        return self.expand.backward(da, c1)


class AttentionBlock(Module):
    """Pre-norm residual block: attention sublayer then feed-forward sublayer."""

    def __init__(self, width: int, heads: int, d_ff: int,
                 p_attn: float, p_ffn: float, rng: np.random.Generator):
        self.ln1 = LayerNorm(width)
        self.mha = MultiHeadAttention(width, heads, p_attn, rng)
        self.drop1 = Dropout(p_attn)
        self.ln2 = LayerNorm(width)
        self.ffn = FeedForward(width, d_ff, rng)
        self.drop2 = Dropout(p_ffn)

    def forward(self, x: np.ndarray, train: bool = False,
                rng: np.random.Generator | None = None):
        n1, cl1 = self.ln1.forward(x)
        a, ca = self.mha.forward(n1, train=train, rng=rng)
        a, cd1 = self.drop1.forward(a, train=train, rng=rng)
        mid = x + a
        n2, cl2 = self.ln2.forward(mid)
        f, cf = self.ffn.forward(n2)
        f, cd2 = self.drop2.forward(f, train=train, rng=rng)
        y = mid + f
        return y, (cl1, ca, cd1, cl2, cf, cd2)

    def backward(self, dy: np.ndarray, cache) -> np.ndarray:
        cl1, ca, cd1, cl2, cf, cd2 = cache
        df = self.drop2.backward(dy, cd2)
        dn2 = self.ffn.backward(df, cf)
        dmid = dy + self.ln2.backward(dn2, cl2)
        da = self.drop1.backward(dmid, cd1)
        dn1 = self.mha.backward(da, ca)
        return dmid + self.ln1.backward(dn1, cl1)
