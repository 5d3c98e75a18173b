"""Checkpoint persistence: JSON manifest line + little-endian float32 blob.

File layout: one UTF-8 JSON line (manifest) terminated by '\\n', followed by
the raw tensor blob. The manifest carries the tensor directory (name, shape,
element offset/size) in blob order plus a sha256 checksum of the blob, so
truncation and corruption are detected on load.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import (
    CheckpointIntegrityError,
    CheckpointKindError,
    CheckpointVersionError,
)
from ..nn import Adam, Network
from .architectures import build_network

FORMAT_VERSION = 1


@dataclass
class Checkpoint:
    """Everything needed to rebuild a model and resume or reuse it."""

    model_kind: str
    vocabulary: tuple[str, ...]
    d: int
    architecture: dict
    tensors: dict[str, np.ndarray]
    dtype: str = "float32"
    optimizer: dict | None = None
    rng_state: dict | None = None
    history: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    def tensors_equal(self, other: "Checkpoint") -> bool:
        if set(self.tensors) != set(other.tensors):
            return False
        return all(
            np.array_equal(self.tensors[k], other.tensors[k]) for k in self.tensors
        )


def save_checkpoint(ckpt: Checkpoint, path) -> None:
    names = sorted(ckpt.tensors)
    directory = []
    pieces = []
    offset = 0
    for name in names:
        arr = np.ascontiguousarray(ckpt.tensors[name], dtype="<f4")
        directory.append(
            {"name": name, "shape": list(arr.shape), "offset": offset, "size": arr.size}
        )
        pieces.append(arr.tobytes())
        offset += arr.size
    blob = b"".join(pieces)
    manifest = {
        "format_version": FORMAT_VERSION,
        "model_kind": ckpt.model_kind,
        "vocabulary": list(ckpt.vocabulary),
        "d": ckpt.d,
        "dtype": ckpt.dtype,
        "architecture": ckpt.architecture,
        "tensors": directory,
        "optimizer": ckpt.optimizer,
        "rng_state": ckpt.rng_state,
        "history": ckpt.history,
        "extra": ckpt.extra,
        "checksum": hashlib.sha256(blob).hexdigest(),
    }
    data = json.dumps(manifest, sort_keys=True).encode("utf-8") + b"\n" + blob
    Path(path).write_bytes(data)


def load_checkpoint(path, expected_kind: str | None = None) -> Checkpoint:
    data = Path(path).read_bytes()
    sep = data.find(b"\n")
    if sep < 0:
        raise CheckpointIntegrityError(f"{path}: no manifest line found")
    try:
        manifest = json.loads(data[:sep].decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise CheckpointIntegrityError(f"{path}: unreadable manifest: {exc}") from None
    version = manifest.get("format_version")
    if version != FORMAT_VERSION:
        raise CheckpointVersionError(
            f"{path}: format version {version!r} not supported (expected {FORMAT_VERSION})"
        )
    blob = data[sep + 1 :]
    checksum = hashlib.sha256(blob).hexdigest()
    if checksum != manifest.get("checksum"):
        raise CheckpointIntegrityError(f"{path}: checksum mismatch (corrupt or truncated)")
    kind = manifest["model_kind"]
    if expected_kind is not None and kind != expected_kind:
        raise CheckpointKindError(f"{path}: holds a {kind!r} model, expected {expected_kind!r}")
    tensors = {}
    for entry in manifest["tensors"]:
        arr = np.frombuffer(
            blob, dtype="<f4", count=entry["size"], offset=entry["offset"] * 4
        )
        tensors[entry["name"]] = arr.reshape(entry["shape"]).copy()
    return Checkpoint(
        model_kind=kind,
        vocabulary=tuple(manifest["vocabulary"]),
        d=manifest["d"],
        architecture=manifest["architecture"],
        tensors=tensors,
        dtype=manifest.get("dtype", "float32"),
        optimizer=manifest.get("optimizer"),
        rng_state=manifest.get("rng_state"),
        history=manifest.get("history", []),
        extra=manifest.get("extra", {}),
    )


def checkpoint_from_network(
    model_kind: str,
    vocabulary,
    d: int,
    architecture: dict,
    net: Network,
    optimizer: Adam | None = None,
    rng_state: dict | None = None,
    history=None,
    extra=None,
) -> Checkpoint:
    tensors = dict(net.state())
    opt_meta = None
    if optimizer is not None:
        state = optimizer.state()
        opt_meta = {k: state[k] for k in ("t", "lr", "beta1", "beta2", "eps")}
        tensors.update({f"adam.m.{k}": v for k, v in state["m"].items()})
        tensors.update({f"adam.v.{k}": v for k, v in state["v"].items()})
    return Checkpoint(
        model_kind=model_kind,
        vocabulary=tuple(vocabulary),
        d=d,
        architecture=architecture,
        tensors=tensors,
        optimizer=opt_meta,
        rng_state=rng_state,
        history=list(history or []),
        extra=dict(extra or {}),
    )


def network_from_checkpoint(ckpt: Checkpoint, dtype=np.float32) -> Network:
    """Rebuild the network and load its parameters and buffers."""
    latent = ckpt.extra.get("latent_dim")
    net = build_network(
        ckpt.architecture, d=ckpt.d, s=len(ckpt.vocabulary),
        latent_dim=latent, seed=0, dtype=dtype,
    )
    state = {
        k: v for k, v in ckpt.tensors.items()
        if k.startswith("param.") or k.startswith("buffer.")
    }
    net.load_state(state)
    return net


def optimizer_from_checkpoint(ckpt: Checkpoint, net: Network) -> Adam | None:
    if ckpt.optimizer is None:
        return None
    meta = ckpt.optimizer
    adam = Adam(
        net.parameters(), lr=meta["lr"], beta1=meta["beta1"],
        beta2=meta["beta2"], eps=meta["eps"],
    )
    adam.load_state(
        {
            "t": meta["t"],
            "m": {
                k[len("adam.m.") :]: v
                for k, v in ckpt.tensors.items()
                if k.startswith("adam.m.")
            },
            "v": {
                k[len("adam.v.") :]: v
                for k, v in ckpt.tensors.items()
                if k.startswith("adam.v.")
            },
        }
    )
    return adam
