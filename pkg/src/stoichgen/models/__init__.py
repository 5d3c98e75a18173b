"""Trainable models: WGAN generator/critic and the dice-loss autoencoder."""

from .architectures import build_network, resolve_architecture
from .autoencoder import (
    AeResult,
    AeTrainConfig,
    AutoencoderConfig,
    DecodabilityPartition,
    screen_decodable,
    train_autoencoder,
)
from .checkpoint import (
    Checkpoint,
    checkpoint_from_network,
    load_checkpoint,
    network_from_checkpoint,
    optimizer_from_checkpoint,
    save_checkpoint,
)
from .losses import batched_dice_grad, dice_loss
from .wgan import (
    CriticConfig,
    GenerationResult,
    GeneratorConfig,
    WganResult,
    WganTrainConfig,
    critic_loss,
    generate_batch,
    generator_loss,
    train_wgan,
)

__all__ = [
    "AeResult",
    "AeTrainConfig",
    "AutoencoderConfig",
    "Checkpoint",
    "CriticConfig",
    "DecodabilityPartition",
    "GenerationResult",
    "GeneratorConfig",
    "WganResult",
    "WganTrainConfig",
    "batched_dice_grad",
    "build_network",
    "checkpoint_from_network",
    "critic_loss",
    "dice_loss",
    "generate_batch",
    "generator_loss",
    "load_checkpoint",
    "network_from_checkpoint",
    "optimizer_from_checkpoint",
    "resolve_architecture",
    "save_checkpoint",
    "screen_decodable",
    "train_autoencoder",
    "train_wgan",
]
