"""Layer primitives with explicit forward/backward passes.

Forward passes are functional: they return (output, cache) and never store
activations on the layer, so several in-flight forwards (real/fake critic
batches, generator chains) can coexist. Parameters and batch-norm running
statistics are the only mutable state.
"""

from __future__ import annotations

import math

import numpy as np

from ..errors import ShapeError, StaleCacheError


def _pair(value) -> tuple[int, int]:
    if isinstance(value, int):
        return (value, value)
    pair = tuple(int(v) for v in value)
    if len(pair) != 2:
        raise ShapeError(f"expected an int or (h, w) pair, got {value!r}")
    return pair


def _glorot_uniform(rng, shape, fan_in, fan_out, dtype):
    bound = math.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-bound, bound, size=shape).astype(dtype)


def im2col(x, kh, kw, sh, sw, ph, pw):
    """Gather sliding kernel windows into (n, c*kh*kw, oh*ow) columns."""
    n, c, h, w = x.shape
    oh = (h + 2 * ph - kh) // sh + 1
    ow = (w + 2 * pw - kw) // sw + 1
    if ph or pw:
        x = np.pad(x, ((0, 0), (0, 0), (ph, ph), (pw, pw)))
    cols = np.empty((n, c, kh, kw, oh, ow), dtype=x.dtype)
    for i in range(kh):
        for j in range(kw):
            cols[:, :, i, j] = x[:, :, i : i + sh * oh : sh, j : j + sw * ow : sw]
    return cols.reshape(n, c * kh * kw, oh * ow), oh, ow


def col2im(cols, img_h, img_w, kh, kw, sh, sw, grid_h, grid_w):
    """Scatter-add columns back onto an (n, c, img_h, img_w) image."""
    n = cols.shape[0]
    c = cols.shape[1] // (kh * kw)
    out = np.zeros((n, c, img_h, img_w), dtype=cols.dtype)
    cols6 = cols.reshape(n, c, kh, kw, grid_h, grid_w)
    for i in range(kh):
        for j in range(kw):
            out[:, :, i : i + sh * grid_h : sh, j : j + sw * grid_w : sw] += cols6[
                :, :, i, j
            ]
    return out


class Layer:
    """Common interface; subclasses fill params/buffers at construction."""

    kind = "base"

    def __init__(self, in_shape):
        self.in_shape = tuple(in_shape)
        self.out_shape = self.in_shape
        self.params: dict[str, np.ndarray] = {}
        self.buffers: dict[str, np.ndarray] = {}

    def forward(self, x, training, update_stats=True):
        raise NotImplementedError

    def backward(self, cache, dy):
        raise NotImplementedError

    def _require_cache(self, cache):
        if cache is None:
            raise StaleCacheError(
                f"{self.kind} backward needs the cache from a training-mode forward"
            )


class Dense(Layer):
    kind = "fully_connected"

    def __init__(self, in_shape, out_features, rng, dtype):
        super().__init__(in_shape)
        if len(in_shape) != 1:
            raise ShapeError(f"fully_connected expects flat input, got {in_shape}")
        fan_in, fan_out = in_shape[0], int(out_features)
        self.out_shape = (fan_out,)
        self.params = {
            "W": _glorot_uniform(rng, (fan_in, fan_out), fan_in, fan_out, dtype),
            "b": np.zeros(fan_out, dtype=dtype),
        }

    def forward(self, x, training, update_stats=True):
        y = x @ self.params["W"] + self.params["b"]
        return y, (x if training else None)

    def backward(self, cache, dy):
        self._require_cache(cache)
        x = cache
        grads = {"W": x.T @ dy, "b": dy.sum(axis=0)}
        return grads, dy @ self.params["W"].T


class Conv2d(Layer):
    kind = "conv2d"

    def __init__(self, in_shape, out_channels, kernel, stride, padding, rng, dtype):
        super().__init__(in_shape)
        if len(in_shape) != 3:
            raise ShapeError(f"conv2d expects (C, H, W) input, got {in_shape}")
        c, h, w = in_shape
        self.kh, self.kw = _pair(kernel)
        self.sh, self.sw = _pair(stride)
        self.ph, self.pw = _pair(padding)
        oc = int(out_channels)
        oh = (h + 2 * self.ph - self.kh) // self.sh + 1
        ow = (w + 2 * self.pw - self.kw) // self.sw + 1
        if oh < 1 or ow < 1:
            raise ShapeError(
                f"conv2d kernel {self.kh}x{self.kw} does not fit input {in_shape}"
            )
        self.out_shape = (oc, oh, ow)
        fan_in = c * self.kh * self.kw
        fan_out = oc * self.kh * self.kw
        self.params = {
            "W": _glorot_uniform(rng, (oc, c, self.kh, self.kw), fan_in, fan_out, dtype),
            "b": np.zeros(oc, dtype=dtype),
        }

    def forward(self, x, training, update_stats=True):
        n = x.shape[0]
        oc, oh, ow = self.out_shape
        cols, _, _ = im2col(x, self.kh, self.kw, self.sh, self.sw, self.ph, self.pw)
        w2 = self.params["W"].reshape(oc, -1)
        y = np.matmul(w2, cols) + self.params["b"][:, None]
        y = y.reshape(n, oc, oh, ow)
        return y, (cols if training else None)

    def backward(self, cache, dy):
        self._require_cache(cache)
        cols = cache
        n = dy.shape[0]
        oc = self.out_shape[0]
        c, h, w = self.in_shape
        dy2 = dy.reshape(n, oc, -1)
        dw = np.tensordot(dy2, cols, axes=([0, 2], [0, 2]))
        grads = {
            "W": dw.reshape(self.params["W"].shape),
            "b": dy2.sum(axis=(0, 2)),
        }
        w2 = self.params["W"].reshape(oc, -1)
        dcols = np.matmul(w2.T, dy2)
        dx = col2im(
            dcols, h + 2 * self.ph, w + 2 * self.pw,
            self.kh, self.kw, self.sh, self.sw, *self.out_shape[1:],
        )
        if self.ph or self.pw:
            dx = dx[:, :, self.ph : self.ph + h, self.pw : self.pw + w]
        return grads, dx


class Deconv2d(Layer):
    kind = "deconv2d"

    def __init__(
        self, in_shape, out_channels, kernel, stride, padding, output_padding,
        rng, dtype,
    ):
        super().__init__(in_shape)
        if len(in_shape) != 3:
            raise ShapeError(f"deconv2d expects (C, H, W) input, got {in_shape}")
        c, h, w = in_shape
        self.kh, self.kw = _pair(kernel)
        self.sh, self.sw = _pair(stride)
        self.ph, self.pw = _pair(padding)
        self.oph, self.opw = _pair(output_padding)
        if self.oph >= self.sh or self.opw >= self.sw:
            raise ShapeError("output_padding must be smaller than stride")
        oc = int(out_channels)
        oh = (h - 1) * self.sh - 2 * self.ph + self.kh + self.oph
        ow = (w - 1) * self.sw - 2 * self.pw + self.kw + self.opw
        if oh < 1 or ow < 1:
            raise ShapeError(f"deconv2d output collapses for input {in_shape}")
        self.out_shape = (oc, oh, ow)
        # full scatter image before padding crop
        self._img_h = (h - 1) * self.sh + self.kh + self.oph
        self._img_w = (w - 1) * self.sw + self.kw + self.opw
        fan_in = c * self.kh * self.kw
        fan_out = oc * self.kh * self.kw
        self.params = {
            "W": _glorot_uniform(rng, (c, oc, self.kh, self.kw), fan_in, fan_out, dtype),
            "b": np.zeros(oc, dtype=dtype),
        }

    def forward(self, x, training, update_stats=True):
        n = x.shape[0]
        c, h, w = self.in_shape
        oc, oh, ow = self.out_shape
        x2 = x.reshape(n, c, h * w)
        wd = self.params["W"].reshape(c, -1)  # (c, oc*kh*kw)
        cols = np.matmul(wd.T, x2)  # (n, oc*kh*kw, h*w)
        img = col2im(cols, self._img_h, self._img_w, self.kh, self.kw, self.sh, self.sw, h, w)
        y = img[:, :, self.ph : self.ph + oh, self.pw : self.pw + ow]
        y = y + self.params["b"][:, None, None]
        return y, (x2 if training else None)

    def backward(self, cache, dy):
        self._require_cache(cache)
        x2 = cache
        n = dy.shape[0]
        c, h, w = self.in_shape
        oc, oh, ow = self.out_shape
        dimg = np.zeros((n, oc, self._img_h, self._img_w), dtype=dy.dtype)
        dimg[:, :, self.ph : self.ph + oh, self.pw : self.pw + ow] = dy
        dcols, gh, gw = im2col(dimg, self.kh, self.kw, self.sh, self.sw, 0, 0)
        # grid must land back on the input positions
        dcols = dcols.reshape(n, oc * self.kh * self.kw, gh * gw)[:, :, : h * w]
        wd = self.params["W"].reshape(c, -1)
        dx = np.matmul(wd, dcols).reshape(n, c, h, w)
        dw = np.tensordot(x2, dcols, axes=([0, 2], [0, 2]))
        grads = {
            "W": dw.reshape(self.params["W"].shape),
            "b": dy.sum(axis=(0, 2, 3)),
        }
        return grads, dx


class BatchNorm(Layer):
    kind = "batch_norm"

    def __init__(self, in_shape, eps, momentum, dtype):
        super().__init__(in_shape)
        if len(in_shape) not in (1, 3):
            raise ShapeError(f"batch_norm expects flat or (C, H, W) input, got {in_shape}")
        self.eps = float(eps)
        self.momentum = float(momentum)
        features = in_shape[0]
        self._axes = (0,) if len(in_shape) == 1 else (0, 2, 3)
        self._bshape = (1, features) if len(in_shape) == 1 else (1, features, 1, 1)
        self.params = {
            "gamma": np.ones(features, dtype=dtype),
            "beta": np.zeros(features, dtype=dtype),
        }
        self.buffers = {
            "running_mean": np.zeros(features, dtype=dtype),
            "running_var": np.ones(features, dtype=dtype),
        }

    def forward(self, x, training, update_stats=True):
        if training:
            mean = x.mean(axis=self._axes)
            var = x.var(axis=self._axes)
            if update_stats:
                m = self.momentum
                rm, rv = self.buffers["running_mean"], self.buffers["running_var"]
                rm += (m * (mean - rm)).astype(rm.dtype)
                rv += (m * (var - rv)).astype(rv.dtype)
        else:
            mean = self.buffers["running_mean"]
            var = self.buffers["running_var"]
        inv_std = 1.0 / np.sqrt(var + self.eps)
        xhat = (x - mean.reshape(self._bshape)) * inv_std.reshape(self._bshape)
        y = self.params["gamma"].reshape(self._bshape) * xhat
        y = y + self.params["beta"].reshape(self._bshape)
        cache = (xhat, inv_std, training) if training else None
        return y.astype(x.dtype, copy=False), cache

    def backward(self, cache, dy):
        self._require_cache(cache)
        xhat, inv_std, _ = cache
        axes = self._axes
        m = dy.size // dy.shape[1] if len(axes) == 3 else dy.shape[0]
        dgamma = (dy * xhat).sum(axis=axes)
        dbeta = dy.sum(axis=axes)
        dxhat = dy * self.params["gamma"].reshape(self._bshape)
        term = (
            m * dxhat
            - dxhat.sum(axis=axes, keepdims=True)
            - xhat * (dxhat * xhat).sum(axis=axes, keepdims=True)
        )
        dx = term * inv_std.reshape(self._bshape) / m
        return {"gamma": dgamma, "beta": dbeta}, dx


class ReLU(Layer):
    kind = "relu"

    def forward(self, x, training, update_stats=True):
        y = np.maximum(x, 0)
        return y, ((x > 0) if training else None)

    def backward(self, cache, dy):
        self._require_cache(cache)
        return {}, dy * cache


class Sigmoid(Layer):
    kind = "sigmoid"

    def forward(self, x, training, update_stats=True):
        y = np.empty_like(x)
        pos = x >= 0
        y[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
        ex = np.exp(x[~pos])
        y[~pos] = ex / (1.0 + ex)
        return y, (y if training else None)

    def backward(self, cache, dy):
        self._require_cache(cache)
        y = cache
        return {}, dy * y * (1.0 - y)
