"""Central finite-difference verification of analytic gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class GradCheckEntry:
    name: str
    max_rel_err: float
    ok: bool


@dataclass
class GradCheckReport:
    entries: list[GradCheckEntry]
    tolerance: float

    @property
    def passed(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def worst(self) -> float:
        return max((e.max_rel_err for e in self.entries), default=0.0)


def _rel_err(a: float, b: float) -> float:
    denom = max(abs(a) + abs(b), 1e-8)
    return abs(a - b) / denom


def gradient_check(net, loss_fn, x, tolerance=1e-4, step=1e-5, check_input=True):
    """Compare every analytic gradient entry against (f(t+h)-f(t-h))/2h.

    loss_fn maps the network output to (scalar loss, dLoss/dOutput). The
    network should be built with dtype float64; running statistics are left
    untouched (update_stats=False) so repeated forwards are comparable.
    """
    x = np.asarray(x, dtype=np.float64)

    def evaluate():
        y, _ = net.forward(x, training=True, update_stats=False)
        loss, _ = loss_fn(y)
        return float(loss)

    y, caches = net.forward(x, training=True, update_stats=False)
    _, dy = loss_fn(y)
    grads, dx = net.backward(caches, dy)

    entries = []

    def check_array(name, arr, analytic):
        worst = 0.0
        flat = arr.reshape(-1)
        aflat = analytic.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + step
            up = evaluate()
            flat[i] = orig - step
            down = evaluate()
            flat[i] = orig
            numeric = (up - down) / (2.0 * step)
            worst = max(worst, _rel_err(float(aflat[i]), numeric))
        entries.append(GradCheckEntry(name, worst, worst <= tolerance))

    for name, param in net.parameters().items():
        check_array(name, param, grads.get(name, np.zeros_like(param)))
    if check_input:
        check_array("input", x, dx.reshape(x.shape))
    return GradCheckReport(entries, tolerance)
