"""Adam optimizer over named parameter dicts."""

from __future__ import annotations

import numpy as np

from ..errors import ShapeError


class Adam:
    """Standard Adam with bias correction, keyed by parameter name."""

    def __init__(self, params: dict[str, np.ndarray], lr: float,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        if lr <= 0:
            raise ValueError("learning rate must be positive")
        self.params = params
        self.lr = float(lr)
        self.beta1 = float(beta1)
        self.beta2 = float(beta2)
        self.eps = float(eps)
        self.t = 0
        self.m = {k: np.zeros_like(v) for k, v in params.items()}
        self.v = {k: np.zeros_like(v) for k, v in params.items()}

    def step(self, grads: dict[str, np.ndarray]) -> None:
        self.t += 1
        b1, b2 = self.beta1, self.beta2
        bias1 = 1.0 - b1**self.t
        bias2 = 1.0 - b2**self.t
        for name, g in grads.items():
            if name not in self.params:
                raise ShapeError(f"gradient for unknown parameter {name!r}")
            p = self.params[name]
            if g.shape != p.shape:
                raise ShapeError(
                    f"gradient shape {g.shape} != parameter shape {p.shape} for {name!r}"
                )
            g = g.astype(p.dtype, copy=False)
            m = self.m[name]
            v = self.v[name]
            m += (1.0 - b1) * (g - m)
            v += (1.0 - b2) * (g * g - v)
            mhat = m / bias1
            vhat = v / bias2
            p -= self.lr * mhat / (np.sqrt(vhat) + self.eps)

    def state(self) -> dict:
        return {
            "t": self.t,
            "lr": self.lr,
            "beta1": self.beta1,
            "beta2": self.beta2,
            "eps": self.eps,
            "m": {k: v.copy() for k, v in self.m.items()},
            "v": {k: v.copy() for k, v in self.v.items()},
        }

    def load_state(self, state: dict) -> None:
        self.t = int(state["t"])
        for name, arr in state["m"].items():
            self.m[name][...] = arr
        for name, arr in state["v"].items():
            self.v[name][...] = arr
