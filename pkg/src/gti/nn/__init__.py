"""Minimal tensor library with reverse-mode autodiff and the layers used here."""

from gti.nn.backends import BACKEND
from gti.nn.layers import BatchNorm, Conv2d, ConvTranspose2d, Linear
from gti.nn.ops import (batch_norm, bce_loss, bce_with_logits_loss, conv2d,
                        deconv2d, fully_connected, leaky_relu, sigmoid)
from gti.nn.optim import Adam, AdamState, adam_step, sgd_step
from gti.nn.serialize import load_arrays, save_arrays
from gti.nn.tensor import Tensor, parameter

__all__ = [
    "BACKEND", "Tensor", "parameter",
    "fully_connected", "conv2d", "deconv2d", "batch_norm",
    "leaky_relu", "sigmoid", "bce_loss", "bce_with_logits_loss",
    "Adam", "AdamState", "adam_step", "sgd_step",
    "Linear", "Conv2d", "ConvTranspose2d", "BatchNorm",
    "save_arrays", "load_arrays",
]
