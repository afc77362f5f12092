"""SGD and Adam parameter updates."""

from __future__ import annotations

import numpy as np

from gti.nn.tensor import Tensor


def _check_grad(p: Tensor) -> np.ndarray:
    g = p.grad
    if g is None:
        return np.zeros_like(p.data)
    if not np.isfinite(g).all():
        raise FloatingPointError(f"non-finite gradient for parameter {p.name!r}")
    return g


def sgd_step(params: list[Tensor], lr: float) -> None:
    """p <- p - lr * grad for every parameter."""
    for p in params:
        p.data -= lr * _check_grad(p)


class AdamState:
    """Per-parameter first/second moments plus the shared step counter."""

    def __init__(self, params: list[Tensor],
                 beta1: float = 0.5, beta2: float = 0.999, eps: float = 1e-8):
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.first_moment = [np.zeros_like(p.data) for p in params]
        self.second_moment = [np.zeros_like(p.data) for p in params]


def adam_step(params: list[Tensor], state: AdamState, lr: float) -> None:
    """Bias-corrected Adam update reading gradients from the parameters."""
    state.step_count += 1
    t = state.step_count
    b1, b2 = state.beta1, state.beta2
    for i, p in enumerate(params):
        g = _check_grad(p)
        m = state.first_moment[i]
        v = state.second_moment[i]
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        m_hat = m / (1.0 - b1 ** t)
        v_hat = v / (1.0 - b2 ** t)
        p.data -= lr * m_hat / (np.sqrt(v_hat) + state.eps)


class Adam:
    """Convenience wrapper binding parameters to an AdamState."""

    def __init__(self, params: list[Tensor], lr: float,
                 beta1: float = 0.5, beta2: float = 0.999, eps: float = 1e-8):
        self.params = list(params)
        self.lr = lr
        self.state = AdamState(self.params, beta1, beta2, eps)

    def step(self) -> None:
        adam_step(self.params, self.state, self.lr)

    def zero_grad(self) -> None:
        for p in self.params:
            p.zero_grad()
