"""Fuse layer reconstructions and inter-block edges into one weighted matrix.

The fused matrix is a linear mix: sum_i w_i * L_i + w * E + b applied to
every off-diagonal entry, clamped at zero. The mix parameters are fitted
with full-batch gradient descent on a generalized KL divergence between
the fused matrix and the binary adjacency (mean over all N^2 entries,
with the +q-p terms that make the divergence bounded and minimized exactly
at equality). The plain log-ratio sum is kept as `kl_like_loss` and is
reported as a metric alongside the objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from gti.gan import LayerReconstruction
from gti.graph import Graph

EPSILON = 1e-6


@dataclass
class SumUpParams:
    layer_weights: np.ndarray   # w_i >= 0
    inter_weight: float         # w >= 0
    bias: float                 # scalar, applied off-diagonal


@dataclass
class Reconstruction:
    weights: np.ndarray         # fused N x N matrix, clamped at >= 0
    final_loss: float
    loss_history: list[float]


def inter_edges(g: Graph, partitions) -> np.ndarray:
    """Binary matrix of the original edges that cross part boundaries in
    EVERY layer (the edges no layer block can restore)."""
    e = np.zeros((g.node_count, g.node_count))
    id_arrays = []
    for p in partitions:
        if p.part_ids.shape != (g.node_count,):
            raise ValueError("partition does not cover this graph's nodes")
        id_arrays.append(p.part_ids)
    for u, v in g.edge_array:
        if all(ids[u] != ids[v] for ids in id_arrays):
            e[u, v] = 1.0
            e[v, u] = 1.0
    return e


def kl_like_loss(re_weights: np.ndarray, g: Graph, epsilon: float = EPSILON) -> float:
    """sum over all N^2 entries of (A+eps) * log((A+eps) / (re+eps)),
    A being the binary adjacency. Monotone decreasing in every re entry."""
    a = g.adjacency_matrix()
    if re_weights.shape != a.shape:
        raise ValueError("matrix size mismatch")
    num = a + epsilon
    return float((num * np.log(num / (re_weights + epsilon))).sum())


def _off_diagonal_ones(n: int) -> np.ndarray:
    m = np.ones((n, n))
    np.fill_diagonal(m, 0.0)
    return m


def fuse(layers: list[LayerReconstruction], e: np.ndarray,
         layer_weights: np.ndarray, inter_weight: float, bias: float) -> np.ndarray:
    """Raw linear mix before clamping; bias excluded from the diagonal."""
    n = e.shape[0]
    re = np.zeros((n, n))
    for w_i, layer in zip(layer_weights, layers):
        re += w_i * layer.weights
    re += inter_weight * e
    re += bias * _off_diagonal_ones(n)
    return re


def sumup_objective_and_grads(layers, e, g, layer_weights, inter_weight, bias,
                              epsilon: float = EPSILON):
    """Objective value and its analytic gradient w.r.t. every mix parameter.

    Gradient is zero through clamped (negative) entries and through the
    constant diagonal.
    """
    a = g.adjacency_matrix()
    n = a.shape[0]
    re = fuse(layers, e, layer_weights, inter_weight, bias)
    clamped = np.maximum(re, 0.0)
    num = a + epsilon
    den = clamped + epsilon
    loss = float((num * np.log(num / den) - num + den).mean())

    d_entry = (1.0 - num / den) / (n * n)
    d_entry *= re >= 0.0          # no gradient where the clamp is active
    np.fill_diagonal(d_entry, 0.0)
    d_layer = np.array([float((d_entry * layer.weights).sum()) for layer in layers])
    d_inter = float((d_entry * e).sum())
    d_bias = float(d_entry.sum())
    return loss, d_layer, d_inter, d_bias


def sum_up(layers: list[LayerReconstruction], e: np.ndarray, g: Graph,
           iterations: int = 500, learning_rate: float = 0.1,
           epsilon: float = EPSILON) -> tuple[SumUpParams, Reconstruction]:
    """Fit the mix parameters with full-batch gradient descent.

    Starts at w_i = 1/L, w = 1, b = 0; negative layer/inter weights are
    projected back to zero after each step; the best-loss iterate is
    returned.
    """
    if not layers:
        raise ValueError("need at least one layer reconstruction")
    n = g.node_count
    for layer in layers:
        if layer.weights.shape != (n, n):
            raise ValueError("layer matrix size mismatch")
    if e.shape != (n, n):
        raise ValueError("inter-edge matrix size mismatch")

    l_count = len(layers)
    w_layers = np.full(l_count, 1.0 / l_count)
    w_inter = 1.0
    bias = 0.0

    history: list[float] = []
    best = None  # (loss, w_layers, w_inter, bias)
    for _ in range(iterations):
        loss, d_layer, d_inter, d_bias = sumup_objective_and_grads(
            layers, e, g, w_layers, w_inter, bias, epsilon)
        if not np.isfinite(loss):
            raise FloatingPointError("non-finite fusion loss")
        history.append(loss)
        if best is None or loss < best[0]:
            best = (loss, w_layers.copy(), w_inter, bias)
        w_layers = np.maximum(w_layers - learning_rate * d_layer, 0.0)
        w_inter = max(w_inter - learning_rate * d_inter, 0.0)
        bias = bias - learning_rate * d_bias

    final_loss, _, _, _ = sumup_objective_and_grads(
        layers, e, g, w_layers, w_inter, bias, epsilon)
    if not np.isfinite(final_loss):
        raise FloatingPointError("non-finite fusion loss")
    history.append(final_loss)
    if final_loss < best[0]:
        best = (final_loss, w_layers.copy(), w_inter, bias)

    loss_b, wl_b, wi_b, b_b = best
    params = SumUpParams(layer_weights=wl_b, inter_weight=wi_b, bias=b_b)
    fused = np.maximum(fuse(layers, e, wl_b, wi_b, b_b), 0.0)
    np.fill_diagonal(fused, 0.0)
    recon = Reconstruction(weights=fused, final_loss=loss_b, loss_history=history)
    return params, recon
