"""Networks: ordered layer stacks with validated shape chaining.

A LayerSpec list declares the stack. Consecutive shapes chain when they are
equal or hold the same number of elements (the network inserts the reshape),
so a fully-connected stage can feed a convolutional one. Construction fails
on any other mismatch.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import prod

import numpy as np

from ..errors import NumericError, ShapeError, StaleCacheError
from .layers import BatchNorm, Conv2d, Deconv2d, Dense, ReLU, Sigmoid

LAYER_KINDS = ("fully_connected", "conv2d", "deconv2d", "batch_norm", "relu", "sigmoid")


@dataclass(frozen=True)
class LayerSpec:
    kind: str
    out_features: int | None = None
    out_channels: int | None = None
    kernel: tuple[int, int] | None = None
    stride: tuple[int, int] = (1, 1)
    padding: tuple[int, int] = (0, 0)
    output_padding: tuple[int, int] = (0, 0)
    in_shape: tuple[int, ...] | None = None  # view incoming activations as this
    eps: float = 1e-5
    momentum: float = 0.1

    def __post_init__(self):
        if self.kind not in LAYER_KINDS:
            raise ShapeError(f"unknown layer kind {self.kind!r}")

    def to_dict(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "fully_connected":
            out["out_features"] = self.out_features
        elif self.kind in ("conv2d", "deconv2d"):
            out.update(
                out_channels=self.out_channels,
                kernel=list(self.kernel),
                stride=list(self.stride),
                padding=list(self.padding),
            )
            if self.kind == "deconv2d":
                out["output_padding"] = list(self.output_padding)
        elif self.kind == "batch_norm":
            out.update(eps=self.eps, momentum=self.momentum)
        if self.in_shape is not None:
            out["in_shape"] = list(self.in_shape)
        return out

    @classmethod
    def from_dict(cls, raw: dict) -> "LayerSpec":
        kw = dict(raw)
        kind = kw.pop("kind")
        for key in ("kernel", "stride", "padding", "output_padding"):
            if key in kw:
                kw[key] = tuple(kw[key])
        if "in_shape" in kw:
            kw["in_shape"] = tuple(kw["in_shape"])
        return cls(kind=kind, **kw)


def _build_layer(spec: LayerSpec, in_shape, rng, dtype):
    if spec.kind == "fully_connected":
        if spec.out_features is None:
            raise ShapeError("fully_connected needs out_features")
        flat = (prod(in_shape),)
        return Dense(flat, spec.out_features, rng, dtype)
    if spec.kind == "conv2d":
        return Conv2d(in_shape, spec.out_channels, spec.kernel, spec.stride,
                      spec.padding, rng, dtype)
    if spec.kind == "deconv2d":
        return Deconv2d(in_shape, spec.out_channels, spec.kernel, spec.stride,
                        spec.padding, spec.output_padding, rng, dtype)
    if spec.kind == "batch_norm":
        return BatchNorm(in_shape, spec.eps, spec.momentum, dtype)
    if spec.kind == "relu":
        layer = ReLU(in_shape)
        return layer
    layer = Sigmoid(in_shape)
    return layer


class Network:
    """An ordered stack of layers with a fixed input shape and dtype."""

    def __init__(self, specs, input_shape, seed=0, dtype=np.float32):
        self.specs = tuple(specs)
        self.input_shape = tuple(input_shape)
        self.dtype = np.dtype(dtype)
        rng = np.random.default_rng(seed)
        self.layers = []
        current = self.input_shape
        for i, spec in enumerate(self.specs):
            expected = spec.in_shape
            if expected is not None:
                if prod(expected) != prod(current):
                    raise ShapeError(
                        f"layer {i} ({spec.kind}): cannot view {current} as {expected}"
                    )
                current = tuple(expected)
            elif spec.kind in ("conv2d", "deconv2d", "batch_norm") and len(current) not in (1, 3):
                raise ShapeError(f"layer {i} ({spec.kind}): bad input rank {current}")
            if spec.kind == "fully_connected":
                current = (prod(current),)
            try:
                layer = _build_layer(spec, current, rng, self.dtype)
            except ShapeError as exc:
                raise ShapeError(f"layer {i}: {exc}") from None
            self.layers.append(layer)
            current = layer.out_shape
        self.output_shape = current

    def forward(self, x, training=False, update_stats=True):
        """Run the stack; returns (output, cache). Cache is None in inference."""
        x = np.asarray(x, dtype=self.dtype)
        if x.shape[1:] != self.input_shape:
            if prod(x.shape[1:]) != prod(self.input_shape):
                raise ShapeError(
                    f"input shape {x.shape[1:]} does not match network input "
                    f"{self.input_shape}"
                )
            x = x.reshape((x.shape[0],) + self.input_shape)
        if not np.isfinite(x).all():
            raise NumericError("non-finite values in network input")
        caches = [] if training else None
        n = x.shape[0]
        for layer in self.layers:
            if x.shape[1:] != layer.in_shape:
                x = x.reshape((n,) + layer.in_shape)
            x, cache = layer.forward(x, training, update_stats)
            if training:
                caches.append(cache)
        return x, caches

    def backward(self, caches, dy):
        """Propagate dLoss/dOutput back; returns (grads by name, dLoss/dInput)."""
        if caches is None:
            raise StaleCacheError("backward needs the cache list from forward(training=True)")
        grads: dict[str, np.ndarray] = {}
        n = dy.shape[0]
        for i in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[i]
            if dy.shape[1:] != layer.out_shape:
                dy = dy.reshape((n,) + layer.out_shape)
            layer_grads, dy = layer.backward(caches[i], dy)
            for pname, g in layer_grads.items():
                grads[f"{i}.{pname}"] = g
        return grads, dy

    def parameters(self) -> dict[str, np.ndarray]:
        return {
            f"{i}.{name}": arr
            for i, layer in enumerate(self.layers)
            for name, arr in layer.params.items()
        }

    def buffer_dict(self) -> dict[str, np.ndarray]:
        return {
            f"{i}.{name}": arr
            for i, layer in enumerate(self.layers)
            for name, arr in layer.buffers.items()
        }

    def clip_parameters(self, bound: float) -> None:
        """Clamp every parameter to [-bound, bound]; buffers are exempt."""
        if bound <= 0:
            raise ValueError("clip bound must be positive")
        for arr in self.parameters().values():
            np.clip(arr, -bound, bound, out=arr)

    def state(self) -> dict[str, np.ndarray]:
        out = {f"param.{k}": v.copy() for k, v in self.parameters().items()}
        out.update({f"buffer.{k}": v.copy() for k, v in self.buffer_dict().items()})
        return out

    def load_state(self, state: dict[str, np.ndarray]) -> None:
        params = self.parameters()
        buffers = self.buffer_dict()
        for key, value in state.items():
            scope, name = key.split(".", 1)
            target = params if scope == "param" else buffers
            if name not in target:
                raise ShapeError(f"unknown state entry {key!r}")
            if target[name].shape != value.shape:
                raise ShapeError(f"shape mismatch for {key!r}")
            target[name][...] = value.astype(target[name].dtype)
