"""Minimal differentiable network engine (numpy-backed)."""

from .gradcheck import GradCheckReport, gradient_check
from .network import LAYER_KINDS, LayerSpec, Network
from .optim import Adam

__all__ = [
    "Adam",
    "GradCheckReport",
    "LAYER_KINDS",
    "LayerSpec",
    "Network",
    "gradient_check",
]
