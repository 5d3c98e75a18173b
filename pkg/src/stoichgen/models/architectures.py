"""Architecture configs: bundled named plans or user JSON files.

Layer dimensions in a config may be integers or symbolic products over
"d" (matrix rows), "s" (vocabulary size) and "latent" (bottleneck or input
width), e.g. "d*s" or "2*latent". They are resolved when a network is bound
to a concrete vocabulary.
"""

from __future__ import annotations

import json
from importlib import resources
from math import prod
from pathlib import Path

import numpy as np

from ..errors import ConfigError
from ..nn import LayerSpec, Network

MODEL_KINDS = ("generator", "critic", "autoencoder")


def resolve_architecture(model_kind: str, name_or_path: str) -> dict:
    """Load a config by bundled name ('small', 'conv7', ...) or file path."""
    if model_kind not in MODEL_KINDS:
        raise ConfigError(f"model_kind must be one of {MODEL_KINDS}")
    candidate = Path(name_or_path)
    if candidate.suffix == ".json" or candidate.exists():
        try:
            raw = json.loads(candidate.read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read architecture file {name_or_path}: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"bad architecture JSON in {name_or_path}: {exc}")
    else:
        resource = resources.files("stoichgen.data.arch").joinpath(
            f"{model_kind}_{name_or_path}.json"
        )
        try:
            raw = json.loads(resource.read_text("utf-8"))
        except FileNotFoundError:
            raise ConfigError(
                f"no bundled {model_kind} architecture named {name_or_path!r}"
            ) from None
    if raw.get("model_kind") != model_kind:
        raise ConfigError(
            f"architecture {name_or_path!r} is for model kind "
            f"{raw.get('model_kind')!r}, not {model_kind!r}"
        )
    if raw.get("input") not in ("latent", "matrix"):
        raise ConfigError("architecture input must be 'latent' or 'matrix'")
    if not raw.get("layers"):
        raise ConfigError("architecture declares no layers")
    return raw


def _resolve_dim(value, env: dict[str, int]) -> int:
    if isinstance(value, int):
        return value
    if isinstance(value, str):
        result = 1
        for factor in value.split("*"):
            factor = factor.strip()
            if factor in env:
                result *= env[factor]
            else:
                try:
                    result *= int(factor)
                except ValueError:
                    raise ConfigError(f"unknown dimension token {factor!r}") from None
        return result
    raise ConfigError(f"bad dimension value {value!r}")


def _resolve_layer(raw: dict, env: dict[str, int]) -> LayerSpec:
    rec = {k: v for k, v in raw.items() if k != "comment"}
    for key in ("out_features", "out_channels"):
        if key in rec:
            rec[key] = _resolve_dim(rec[key], env)
    if "in_shape" in rec:
        rec["in_shape"] = [_resolve_dim(v, env) for v in rec["in_shape"]]
    return LayerSpec.from_dict(rec)


def build_network(
    arch: dict,
    d: int,
    s: int,
    latent_dim: int | None = None,
    seed=0,
    dtype=np.float32,
) -> Network:
    """Bind an architecture config to concrete dimensions."""
    env = {"d": d, "s": s}
    if latent_dim is not None:
        env["latent"] = int(latent_dim)
    specs = [_resolve_layer(layer, env) for layer in arch["layers"]]
    if arch["input"] == "latent":
        if latent_dim is None:
            raise ConfigError("latent-input architecture needs latent_dim")
        input_shape = (int(latent_dim),)
    else:
        input_shape = (1, d, s)
    net = Network(specs, input_shape, seed=seed, dtype=dtype)
    if arch["model_kind"] in ("generator", "autoencoder"):
        if prod(net.output_shape) != d * s:
            raise ConfigError(
                f"{arch['model_kind']} architecture must end on d*s={d * s} values, "
                f"got {net.output_shape}"
            )
        if net.specs[-1].kind != "sigmoid":
            raise ConfigError(f"{arch['model_kind']} architecture must end in sigmoid")
    else:
        if prod(net.output_shape) != 1:
            raise ConfigError("critic architecture must end on a single score")
        if net.specs[-1].kind == "sigmoid":
            raise ConfigError("critic output must be an unbounded score, not sigmoid")
    return net
