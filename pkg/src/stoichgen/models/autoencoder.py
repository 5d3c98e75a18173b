"""Autoencoder trained with negative-dice reconstruction loss, plus the
decodability screen: a composition is decodable when encode -> reconstruct
-> discretize returns it exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..composition import (
    MAX_ATOMS,
    Composition,
    decode_activation,
    encode_batch,
    format_formula,
)
from ..elements import ElementTable, ElementVocabulary
from ..errors import ConfigError, TrainingDivergedError
from ..nn import Adam, Network
from .architectures import build_network, resolve_architecture
from .checkpoint import Checkpoint, checkpoint_from_network, network_from_checkpoint
from .losses import batched_dice_grad


@dataclass
class AutoencoderConfig:
    arch: str = "small"
    latent_dim: int = 32

    def __post_init__(self):
        if self.latent_dim < 1:
            raise ConfigError("latent_dim must be >= 1")


@dataclass
class AeTrainConfig:
    epochs: int = 1000
    lr: float = 1e-3
    batch_size: int = 1024
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.lr <= 0:
            raise ConfigError("lr must be positive")
        if self.batch_size < 2:
            raise ConfigError("batch_size must be >= 2")


@dataclass
class AeResult:
    autoencoder: Checkpoint
    history: list[dict]


def train_autoencoder(
    dataset,
    table: ElementTable,
    model_cfg: AutoencoderConfig,
    train_cfg: AeTrainConfig,
    vocabulary: ElementVocabulary | None = None,
) -> AeResult:
    """Minimize the mean per-sample dice loss between inputs and reconstructions."""
    comps = sorted(dataset, key=format_formula)
    if not comps:
        raise ConfigError("training dataset is empty")
    vocab = vocabulary or ElementVocabulary.from_dataset(comps, table)
    d = MAX_ATOMS
    x_all = encode_batch(comps, vocab).reshape(len(comps), 1, d, vocab.size)
    arch = resolve_architecture("autoencoder", model_cfg.arch)
    seed_net, seed_loop = np.random.SeedSequence(train_cfg.seed).spawn(2)
    net = build_network(arch, d, vocab.size, latent_dim=model_cfg.latent_dim, seed=seed_net)
    rng = np.random.default_rng(seed_loop)
    adam = Adam(net.parameters(), lr=train_cfg.lr)

    n = len(comps)
    bsz = min(train_cfg.batch_size, n)
    history: list[dict] = []
    snapshot = None

    def make_checkpoint(state) -> Checkpoint:
        net_state, adam_state, rng_state, hist = state
        net.load_state(net_state)
        adam.load_state(adam_state)
        return checkpoint_from_network(
            "autoencoder", vocab.symbols, d, arch, net, adam,
            rng_state=rng_state, history=hist,
            extra={
                "latent_dim": model_cfg.latent_dim,
                "batch_size": train_cfg.batch_size,
                "seed": train_cfg.seed,
            },
        )

    for epoch in range(1, train_cfg.epochs + 1):
        perm = rng.permutation(n)
        losses = []
        for start in range(0, n, bsz):
            idx = perm[start : start + bsz]
            if len(idx) < 2:
                continue  # batch_norm needs at least two samples
            xb = x_all[idx]
            out, cache = net.forward(xb, training=True)
            out = out.reshape(xb.shape)
            sample_losses, grad = batched_dice_grad(xb, out)
            losses.append(float(sample_losses.mean()))
            grads, _ = net.backward(cache, (grad / len(idx)).astype(np.float32))
            adam.step(grads)
        loss = float(np.mean(losses))
        if not np.isfinite(loss):
            if snapshot is None:
                raise TrainingDivergedError(
                    f"non-finite loss in epoch {epoch} before any stable epoch"
                )
            raise TrainingDivergedError(
                f"non-finite loss in epoch {epoch}; last finite state is epoch {epoch - 1}",
                checkpoints=(make_checkpoint(snapshot),),
                history=history,
            )
        history.append({"epoch": epoch, "loss_ae": loss})
        snapshot = (net.state(), adam.state(), rng.bit_generator.state, list(history))

    return AeResult(autoencoder=make_checkpoint(snapshot), history=history)


def reconstruct_batch(net: Network, matrices: np.ndarray, chunk_size: int = 1024) -> np.ndarray:
    """Inference-mode reconstructions with the same shape as the input batch."""
    out = np.empty_like(matrices, dtype=np.float32)
    for start in range(0, matrices.shape[0], chunk_size):
        stop = min(start + chunk_size, matrices.shape[0])
        y, _ = net.forward(matrices[start:stop], training=False)
        out[start:stop] = y.reshape(out[start:stop].shape)
    return out


@dataclass
class DecodabilityPartition:
    decodable: list[Composition]
    non_decodable: list[Composition]

    @property
    def total(self) -> int:
        return len(self.decodable) + len(self.non_decodable)

    @property
    def decodable_fraction(self) -> float:
        return 0.0 if self.total == 0 else len(self.decodable) / self.total


def screen_decodable(
    autoencoder: Checkpoint,
    dataset,
    threshold: float = 0.5,
) -> DecodabilityPartition:
    """Split a dataset by exact recovery through the autoencoder round trip."""
    if autoencoder.model_kind != "autoencoder":
        raise ConfigError(
            f"expected an autoencoder checkpoint, got {autoencoder.model_kind!r}"
        )
    comps = list(dataset)
    symbols = autoencoder.vocabulary
    d = autoencoder.d
    net = network_from_checkpoint(autoencoder)
    x = encode_batch(comps, symbols, rows=d).reshape(len(comps), 1, d, len(symbols))
    recon = reconstruct_batch(net, x)
    decodable, non_decodable = [], []
    for i, comp in enumerate(comps):
        recovered = decode_activation(recon[i, 0], symbols, threshold)
        (decodable if recovered == comp else non_decodable).append(comp)
    return DecodabilityPartition(decodable, non_decodable)
