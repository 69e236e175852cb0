"""Elastic-interaction boundary loss for binary segmentation."""

from ._core import (
    ToyNet,
    apply_halfnorm,
    bce,
    dice,
    disc_mask,
    distance_transform,
    energy_direct,
    energy_padded,
    energy_spectral,
    evaluate,
    evolve,
    kernel_table,
    loss_and_grad,
    phantom,
    roc_auc,
    surface,
)

__all__ = [
    "ToyNet",
    "apply_halfnorm",
    "bce",
    "dice",
    "disc_mask",
    "distance_transform",
    "energy_direct",
    "energy_padded",
    "energy_spectral",
    "evaluate",
    "evolve",
    "kernel_table",
    "loss_and_grad",
    "phantom",
    "roc_auc",
    "surface",
]
