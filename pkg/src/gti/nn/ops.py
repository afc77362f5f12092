"""Differentiable layer operations over :class:`gti.nn.tensor.Tensor`."""

from __future__ import annotations

import numpy as np

from gti.nn import backends
from gti.nn.tensor import Tensor, _accumulate, _from_op


def fully_connected(x: Tensor, weights: Tensor, bias: Tensor) -> Tensor:
    """y = x @ W + b with exact gradients for x, W and b."""
    if x.data.ndim != 2 or weights.data.ndim != 2:
        raise ValueError("fully_connected expects 2-d input and weights")
    if x.data.shape[1] != weights.data.shape[0]:
        raise ValueError(f"shape mismatch: x {x.data.shape} vs W {weights.data.shape}")
    if bias.data.shape != (weights.data.shape[1],):
        raise ValueError("bias shape must be (out_features,)")
    return x.matmul(weights) + bias


def leaky_relu(x: Tensor, negative_slope: float = 0.2) -> Tensor:
    """Elementwise max(x, negative_slope * x); slope taken at exactly 0."""
    out = _from_op(np.maximum(x.data, negative_slope * x.data), (x,))

    def backprop():
        factor = np.where(x.data > 0, 1.0, negative_slope)
        _accumulate(x, out.grad * factor)
    out._backprop = backprop
    return out


def _sigmoid_values(z: np.ndarray) -> np.ndarray:
    # split by sign so exp never overflows
    y = np.empty_like(z)
    pos = z >= 0
    y[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    y[~pos] = ez / (1.0 + ez)
    return y


def sigmoid(x: Tensor) -> Tensor:
    y = _sigmoid_values(x.data)
    out = _from_op(y, (x,))

    def backprop():
        _accumulate(x, out.grad * y * (1.0 - y))
    out._backprop = backprop
    return out


def bce_loss(pred: Tensor, target: np.ndarray, eps: float = 1e-12) -> Tensor:
    """Mean binary cross-entropy on probabilities in (0, 1)."""
    t = np.asarray(target, dtype=np.float64)
    if t.shape != pred.data.shape:
        raise ValueError("prediction/target shape mismatch")
    p = np.clip(pred.data, eps, 1.0 - eps)
    val = -(t * np.log(p) + (1.0 - t) * np.log(1.0 - p)).mean()
    out = _from_op(np.asarray(val), (pred,))

    def backprop():
        g = (p - t) / (p * (1.0 - p)) / p.size
        _accumulate(pred, out.grad * g)
    out._backprop = backprop
    return out


def bce_with_logits_loss(logits: Tensor, target: np.ndarray) -> Tensor:
    """Mean binary cross-entropy computed from logits (stable formulation)."""
    t = np.asarray(target, dtype=np.float64)
    if t.shape != logits.data.shape:
        raise ValueError("logits/target shape mismatch")
    z = logits.data
    val = (np.maximum(z, 0.0) - z * t + np.log1p(np.exp(-np.abs(z)))).mean()
    out = _from_op(np.asarray(val), (logits,))

    def backprop():
        _accumulate(logits, out.grad * (_sigmoid_values(z) - t) / t.size)
    out._backprop = backprop
    return out


def conv2d(x: Tensor, kernel: Tensor, stride: int = 1, padding: int = 0) -> Tensor:
    """Cross-correlation of x[B,Cin,H,W] with kernel[Cout,Cin,KH,KW]."""
    if x.data.ndim != 4 or kernel.data.ndim != 4:
        raise ValueError("conv2d expects 4-d input and kernel")
    if x.data.shape[1] != kernel.data.shape[1]:
        raise ValueError(f"channel mismatch: x {x.data.shape} vs kernel {kernel.data.shape}")
    kh, kw = kernel.data.shape[2], kernel.data.shape[3]
    oh, ow = backends.conv_out_hw(x.data.shape[2], x.data.shape[3], kh, kw, stride, padding)
    if oh <= 0 or ow <= 0:
        raise ValueError("conv2d output extents must be positive")
    y = backends.conv_fwd(x.data, kernel.data, stride, padding)
    out = _from_op(y, (x, kernel))

    def backprop():
        if x.requires_grad:
            _accumulate(x, backends.conv_bwd_data(
                out.grad, kernel.data, stride, padding, x.data.shape[2:]))
        if kernel.requires_grad:
            _accumulate(kernel, backends.conv_bwd_kernel(
                x.data, out.grad, stride, padding, (kh, kw)))
    out._backprop = backprop
    return out


def deconv2d(x: Tensor, kernel: Tensor, stride: int = 1, padding: int = 0) -> Tensor:
    """Transposed convolution; kernel layout is [Cin, Cout, KH, KW].

    The forward pass is exactly the input-gradient pass of conv2d with the
    same kernel, stride and padding (the two ops are linear adjoints).
    """
    if x.data.ndim != 4 or kernel.data.ndim != 4:
        raise ValueError("deconv2d expects 4-d input and kernel")
    if x.data.shape[1] != kernel.data.shape[0]:
        raise ValueError(f"channel mismatch: x {x.data.shape} vs kernel {kernel.data.shape}")
    kh, kw = kernel.data.shape[2], kernel.data.shape[3]
    h, w = x.data.shape[2], x.data.shape[3]
    out_hw = ((h - 1) * stride - 2 * padding + kh, (w - 1) * stride - 2 * padding + kw)
    if out_hw[0] <= 0 or out_hw[1] <= 0:
        raise ValueError("deconv2d output extents must be positive")
    y = backends.conv_bwd_data(x.data, kernel.data, stride, padding, out_hw)
    out = _from_op(y, (x, kernel))

    def backprop():
        if x.requires_grad:
            _accumulate(x, backends.conv_fwd(out.grad, kernel.data, stride, padding))
        if kernel.requires_grad:
            _accumulate(kernel, backends.conv_bwd_kernel(
                out.grad, x.data, stride, padding, (kh, kw)))
    out._backprop = backprop
    return out


def batch_norm(x: Tensor, gamma: Tensor, beta: Tensor,
               running_mean: np.ndarray, running_var: np.ndarray,
               eps: float = 1e-5, momentum: float = 0.1,
               training: bool = True) -> Tensor:
    """Per-channel standardization with a learned affine transform.

    x is [B, C] or [B, C, H, W]. In training mode the (biased) batch
    statistics are used and the running statistics are updated in place;
    eval mode standardizes with the running statistics.
    """
    if x.data.ndim not in (2, 4):
        raise ValueError("batch_norm expects [B, C] or [B, C, H, W]")
    c = x.data.shape[1]
    if gamma.data.shape != (c,) or beta.data.shape != (c,):
        raise ValueError("gamma/beta must have shape (channels,)")
    axes = (0,) if x.data.ndim == 2 else (0, 2, 3)
    rs = (1, c) if x.data.ndim == 2 else (1, c, 1, 1)

    if training:
        if x.data.shape[0] < 2:
            raise ValueError("batch_norm in training mode needs batch >= 2")
        mu = x.data.mean(axis=axes)
        var = x.data.var(axis=axes)
        running_mean *= (1.0 - momentum)
        running_mean += momentum * mu
        running_var *= (1.0 - momentum)
        running_var += momentum * var
    else:
        mu, var = running_mean, running_var

    std = np.sqrt(var + eps)
    xhat = (x.data - mu.reshape(rs)) / std.reshape(rs)
    y = gamma.data.reshape(rs) * xhat + beta.data.reshape(rs)
    out = _from_op(y, (x, gamma, beta))

    def backprop():
        dy = out.grad
        _accumulate(gamma, (dy * xhat).sum(axis=axes))
        _accumulate(beta, dy.sum(axis=axes))
        if not x.requires_grad:
            return
        scale = (gamma.data / std).reshape(rs)
        if training:
            m_dy = dy.mean(axis=axes).reshape(rs)
            m_dyx = (dy * xhat).mean(axis=axes).reshape(rs)
            _accumulate(x, scale * (dy - m_dy - xhat * m_dyx))
        else:
            _accumulate(x, scale * dy)
    out._backprop = backprop
    return out
