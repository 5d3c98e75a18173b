"""Wasserstein GAN with weight clipping over composition matrices.

Critic loss: mean(score(fake)) - mean(score(real)); generator loss:
-mean(score(fake)). Each batch cycle runs n_critic critic updates (clipping
all critic parameters after each) and then one generator update. Everything
is driven by a single seed: weight init, epoch shuffling and latent draws.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional

import numpy as np

from ..composition import MAX_ATOMS, Composition, decode_batch, encode_batch, format_formula
from ..elements import ElementTable, ElementVocabulary
from ..errors import ConfigError, TrainingDivergedError
from ..nn import Adam, Network
from .architectures import build_network, resolve_architecture
from .checkpoint import Checkpoint, checkpoint_from_network, network_from_checkpoint


@dataclass
class GeneratorConfig:
    latent_dim: int = 128
    arch: str = "small"

    def __post_init__(self):
        if self.latent_dim < 1:
            raise ConfigError("latent_dim must be >= 1")


@dataclass
class CriticConfig:
    arch: str = "small"
    clip: float = 0.01
    n_critic: int = 5

    def __post_init__(self):
        if self.clip <= 0:
            raise ConfigError("clip must be positive")
        if self.n_critic < 1:
            raise ConfigError("n_critic must be >= 1")


@dataclass
class WganTrainConfig:
    epochs: int = 1000
    generator_lr: float = 1e-3
    critic_lr: float = 1e-2
    batch_size: int = 32
    seed: int = 0

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if self.generator_lr <= 0 or self.critic_lr <= 0:
            raise ConfigError("learning rates must be positive")
        if self.batch_size < 2:
            raise ConfigError("batch_size must be >= 2")


@dataclass
class WganResult:
    generator: Checkpoint
    critic: Checkpoint
    history: list[dict]


def critic_loss(real_scores: np.ndarray, fake_scores: np.ndarray) -> float:
    return float(np.mean(fake_scores) - np.mean(real_scores))


def generator_loss(fake_scores: np.ndarray) -> float:
    return float(-np.mean(fake_scores))


def _ordered(dataset: Iterable[Composition]) -> list[Composition]:
    return sorted(dataset, key=format_formula)


def train_wgan(
    dataset: Iterable[Composition],
    table: ElementTable,
    generator_cfg: GeneratorConfig,
    critic_cfg: CriticConfig,
    train_cfg: WganTrainConfig,
    vocabulary: ElementVocabulary | None = None,
    on_epoch: Optional[Callable[[int, float, float], None]] = None,
    on_critic_step: Optional[Callable[[Network], None]] = None,
) -> WganResult:
    """Train generator and critic; fully deterministic for a fixed seed."""
    comps = _ordered(dataset)
    if not comps:
        raise ConfigError("training dataset is empty")
    vocab = vocabulary or ElementVocabulary.from_dataset(comps, table)
    d = MAX_ATOMS
    x_all = encode_batch(comps, vocab).reshape(len(comps), 1, d, vocab.size)

    gen_arch = resolve_architecture("generator", generator_cfg.arch)
    critic_arch = resolve_architecture("critic", critic_cfg.arch)
    seed_gen, seed_critic, seed_loop = np.random.SeedSequence(train_cfg.seed).spawn(3)
    gen = build_network(
        gen_arch, d, vocab.size, latent_dim=generator_cfg.latent_dim, seed=seed_gen
    )
    critic = build_network(critic_arch, d, vocab.size, seed=seed_critic)
    rng = np.random.default_rng(seed_loop)
    adam_gen = Adam(gen.parameters(), lr=train_cfg.generator_lr)
    adam_critic = Adam(critic.parameters(), lr=train_cfg.critic_lr)

    n = len(comps)
    bsz = min(train_cfg.batch_size, n)
    latent = generator_cfg.latent_dim
    history: list[dict] = []
    snapshot = None

    def sample_fake(m: int, want_cache: bool):
        z = rng.standard_normal((m, latent)).astype(np.float32)
        fake, cache = gen.forward(z, training=True, update_stats=want_cache)
        return fake, (cache if want_cache else None)

    def make_checkpoints(state) -> tuple[Checkpoint, Checkpoint]:
        gen_state, critic_state, adam_g_state, adam_c_state, rng_state, hist = state
        gen.load_state(gen_state)
        critic.load_state(critic_state)
        adam_gen.load_state(adam_g_state)
        adam_critic.load_state(adam_c_state)
        extra_common = {
            "latent_dim": latent,
            "clip": critic_cfg.clip,
            "n_critic": critic_cfg.n_critic,
            "batch_size": train_cfg.batch_size,
            "seed": train_cfg.seed,
        }
        g_ckpt = checkpoint_from_network(
            "generator", vocab.symbols, d, gen_arch, gen, adam_gen,
            rng_state=rng_state, history=hist, extra=extra_common,
        )
        c_ckpt = checkpoint_from_network(
            "critic", vocab.symbols, d, critic_arch, critic, adam_critic,
            rng_state=rng_state, history=hist, extra=extra_common,
        )
        return g_ckpt, c_ckpt

    for epoch in range(1, train_cfg.epochs + 1):
        perm = rng.permutation(n)
        if n >= bsz:
            batches = [perm[i : i + bsz] for i in range(0, n - bsz + 1, bsz)]
        else:
            batches = [perm]
        cursor = 0
        gen_losses = []
        critic_losses = []
        for _ in range(max(1, len(batches) // critic_cfg.n_critic)):
            for _ in range(critic_cfg.n_critic):
                idx = batches[cursor % len(batches)]
                cursor += 1
                xr = x_all[idx]
                fake, _ = sample_fake(len(idx), want_cache=False)
                s_real, cache_real = critic.forward(xr, training=True)
                s_fake, cache_fake = critic.forward(fake, training=True)
                critic_losses.append(critic_loss(s_real, s_fake))
                up_fake = np.full_like(s_fake, 1.0 / len(idx))
                g_fake, _ = critic.backward(cache_fake, up_fake)
                g_real, _ = critic.backward(cache_real, -up_fake)
                adam_critic.step({k: g_fake[k] + g_real[k] for k in g_fake})
                critic.clip_parameters(critic_cfg.clip)
                if on_critic_step is not None:
                    on_critic_step(critic)
            fake, cache_gen = sample_fake(bsz, want_cache=True)
            s_fake, cache_critic = critic.forward(
                fake, training=True, update_stats=False
            )
            gen_losses.append(generator_loss(s_fake))
            _, d_fake = critic.backward(
                cache_critic, np.full_like(s_fake, -1.0 / bsz)
            )
            g_grads, _ = gen.backward(cache_gen, d_fake)
            adam_gen.step(g_grads)

        loss_g = float(np.mean(gen_losses))
        loss_d = float(np.mean(critic_losses))
        if not (np.isfinite(loss_g) and np.isfinite(loss_d)):
            if snapshot is None:
                raise TrainingDivergedError(
                    f"non-finite loss in epoch {epoch} before any stable epoch"
                )
            g_ckpt, c_ckpt = make_checkpoints(snapshot)
            raise TrainingDivergedError(
                f"non-finite loss in epoch {epoch}; last finite state is epoch {epoch - 1}",
                checkpoints=(g_ckpt, c_ckpt),
                history=history,
            )
        history.append({"epoch": epoch, "loss_g": loss_g, "loss_d": loss_d})
        if on_epoch is not None:
            on_epoch(epoch, loss_g, loss_d)
        snapshot = (
            gen.state(), critic.state(), adam_gen.state(), adam_critic.state(),
            rng.bit_generator.state, list(history),
        )

    g_ckpt, c_ckpt = make_checkpoints(snapshot)
    return WganResult(generator=g_ckpt, critic=c_ckpt, history=history)


@dataclass
class GenerationResult:
    compositions: list[Composition]
    activations: np.ndarray  # (n, d, s) raw sigmoid outputs
    requested: int
    empty_count: int

    @property
    def nonempty_fraction(self) -> float:
        return 0.0 if self.requested == 0 else 1.0 - self.empty_count / self.requested


def generate_batch(
    generator: Checkpoint,
    n: int,
    seed: int,
    threshold: float = 0.5,
    chunk_size: int = 512,
) -> GenerationResult:
    """Draw n latent vectors and decode the generator's outputs.

    Empty decodes are kept in the raw activation batch but excluded from the
    composition list (tallied in empty_count). Same seed, same output.
    """
    if generator.model_kind != "generator":
        raise ConfigError(f"expected a generator checkpoint, got {generator.model_kind!r}")
    if n < 0:
        raise ConfigError("n must be >= 0")
    net = network_from_checkpoint(generator)
    latent = generator.extra["latent_dim"]
    d = generator.d
    s = len(generator.vocabulary)
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((n, latent)).astype(np.float32)
    outputs = np.empty((n, d, s), dtype=np.float32)
    for start in range(0, n, chunk_size):
        stop = min(start + chunk_size, n)
        if stop == start:
            break
        y, _ = net.forward(z[start:stop], training=False)
        outputs[start:stop] = y.reshape(stop - start, d, s)
    decoded = decode_batch(outputs, generator.vocabulary, threshold)
    comps = [c for c in decoded if c.arity > 0]
    return GenerationResult(
        compositions=comps,
        activations=outputs,
        requested=n,
        empty_count=len(decoded) - len(comps),
    )
