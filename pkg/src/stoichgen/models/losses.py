"""Reconstruction overlap loss: negative dice coefficient."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError


def dice_loss(a, b) -> float:
    """Negative continuous dice: -2*(a.b) / (sum(a) + sum(b)), in [-1, 0].

    Equal empty supports (both sums zero) count as perfect overlap: -1.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"dice_loss shapes differ: {a.shape} vs {b.shape}")
    if a.size and (min(a.min(), b.min()) < 0.0 or max(a.max(), b.max()) > 1.0):
        raise ValueError("dice_loss expects values in [0, 1]")
    denom = float(a.sum() + b.sum())
    if denom == 0.0:
        return -1.0
    return float(-2.0 * float((a * b).sum()) / denom)


def batched_dice_grad(targets: np.ndarray, outputs: np.ndarray):
    """Per-sample dice losses and d(loss_i)/d(outputs_i).

    Both arrays are (n, ...) with matching shapes; gradients are zero for
    samples where both supports are empty (the loss is constant there).
    """
    if targets.shape != outputs.shape:
        raise ShapeError(
            f"batched_dice_grad shapes differ: {targets.shape} vs {outputs.shape}"
        )
    n = targets.shape[0]
    t = targets.reshape(n, -1).astype(np.float64)
    o = outputs.reshape(n, -1).astype(np.float64)
    overlap = (t * o).sum(axis=1)
    denom = t.sum(axis=1) + o.sum(axis=1)
    safe = denom > 0.0
    losses = np.full(n, -1.0)
    np.divide(-2.0 * overlap, denom, out=losses, where=safe)
    grad = np.zeros_like(o)
    d = np.where(safe, denom, 1.0)
    grad[safe] = (-2.0 * t[safe] / d[safe, None]) + (
        2.0 * overlap[safe] / (d[safe] * d[safe])
    )[:, None]
    return losses, grad.reshape(outputs.shape)
