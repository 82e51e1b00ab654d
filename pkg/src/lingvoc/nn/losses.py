"""Categorical cross-entropy over logits, in nats."""

from __future__ import annotations

import numpy as np


def softmax_xent(logits: np.ndarray, target: int):
    """Loss -log softmax(logits)[target] and its gradient wrt logits.

    Returns (loss_nats, grad) for a single 1-D logit vector.
    """
    logits = np.asarray(logits, dtype=np.float64)
    if logits.ndim != 1:
        raise ValueError(f"expected a 1-D logit vector, got shape {logits.shape}")
    q = logits.shape[0]
    if not 0 <= target < q:
        raise ValueError(f"target class {target} out of range [0, {q})")
    z = logits - logits.max()
    logp = z - np.log(np.exp(z).sum())
    grad = np.exp(logp)
    grad[target] -= 1.0
    return -logp[target], grad


def softmax_xent_rows(logits: np.ndarray, targets: np.ndarray):
    """Row-wise cross-entropy: logits (n, q), targets (n,) ints.

    Returns (losses (n,), grads (n, q)); grads are per-row softmax - onehot,
    unscaled, so callers own any mean normalization.
    """
    logits = np.asarray(logits, dtype=np.float64)
    targets = np.asarray(targets)
    n, q = logits.shape
    if targets.shape != (n,):
        raise ValueError(f"targets shape {targets.shape} does not match logits rows {n}")
    if targets.min() < 0 or targets.max() >= q:
        raise ValueError(f"target classes outside [0, {q})")
    z = logits - logits.max(axis=1, keepdims=True)
    logp = z - np.log(np.exp(z).sum(axis=1, keepdims=True))
    rows = np.arange(n)
    losses = -logp[rows, targets]
    grads = np.exp(logp)
    grads[rows, targets] -= 1.0
    return losses, grads
