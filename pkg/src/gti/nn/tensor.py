"""Minimal dense float64 tensor with reverse-mode autodiff."""

from __future__ import annotations

import numpy as np


class Tensor:
    __slots__ = ("data", "grad", "requires_grad", "name", "_parents", "_backprop")

    def __init__(self, data, requires_grad: bool = False, name: str | None = None):
        self.data = np.asarray(data, dtype=np.float64)
        self.grad: np.ndarray | None = None
        self.requires_grad = requires_grad
        self.name = name
        self._parents: tuple[Tensor, ...] = ()
        self._backprop = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    def detach(self) -> "Tensor":
        return Tensor(self.data)

    def zero_grad(self) -> None:
        self.grad = None

    def backward(self, grad=None) -> None:
        if grad is None:
            if self.data.size != 1:
                raise ValueError("backward() without a gradient needs a scalar output")
            grad = np.ones_like(self.data)
        self.grad = np.asarray(grad, dtype=np.float64)

        # iterative topological order over the op graph
        topo: list[Tensor] = []
        seen: set[int] = set()
        stack: list[tuple[Tensor, bool]] = [(self, False)]
        while stack:
            node, expanded = stack.pop()
            if expanded:
                topo.append(node)
                continue
            if id(node) in seen:
                continue
            seen.add(id(node))
            stack.append((node, True))
            for parent in node._parents:
                if id(parent) not in seen:
                    stack.append((parent, False))
        for node in reversed(topo):
            if node._backprop is not None and node.grad is not None:
                node._backprop()

    def __repr__(self) -> str:
        tag = f" name={self.name}" if self.name else ""
        return f"Tensor(shape={self.data.shape}{tag})"

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        other = _wrap(other)
        out = _from_op(self.data + other.data, (self, other))

        def backprop():
            _accumulate(self, _unbroadcast(out.grad, self.data.shape))
            _accumulate(other, _unbroadcast(out.grad, other.data.shape))
        out._backprop = backprop
        return out

    def __mul__(self, other):
        other = _wrap(other)
        out = _from_op(self.data * other.data, (self, other))

        def backprop():
            _accumulate(self, _unbroadcast(out.grad * other.data, self.data.shape))
            _accumulate(other, _unbroadcast(out.grad * self.data, other.data.shape))
        out._backprop = backprop
        return out

    def __neg__(self):
        out = _from_op(-self.data, (self,))

        def backprop():
            _accumulate(self, -out.grad)
        out._backprop = backprop
        return out

    def __sub__(self, other):
        return self + (-_wrap(other))

    __radd__ = __add__
    __rmul__ = __mul__

    def matmul(self, other: "Tensor") -> "Tensor":
        other = _wrap(other)
        out = _from_op(self.data @ other.data, (self, other))

        def backprop():
            _accumulate(self, out.grad @ other.data.T)
            _accumulate(other, self.data.T @ out.grad)
        out._backprop = backprop
        return out

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        out = _from_op(self.data.reshape(shape), (self,))

        def backprop():
            _accumulate(self, out.grad.reshape(self.data.shape))
        out._backprop = backprop
        return out

    def sum(self) -> "Tensor":
        out = _from_op(np.asarray(self.data.sum()), (self,))

        def backprop():
            _accumulate(self, np.broadcast_to(out.grad, self.data.shape))
        out._backprop = backprop
        return out

    def mean(self) -> "Tensor":
        n = self.data.size
        out = _from_op(np.asarray(self.data.mean()), (self,))

        def backprop():
            _accumulate(self, np.broadcast_to(out.grad / n, self.data.shape))
        out._backprop = backprop
        return out


def parameter(data, name: str) -> Tensor:
    """Trainable tensor (tracked by optimizers)."""
    return Tensor(np.array(data, dtype=np.float64, copy=True), requires_grad=True, name=name)


# -- graph construction helpers ---------------------------------------------

def _wrap(x) -> Tensor:
    return x if isinstance(x, Tensor) else Tensor(x)


def _from_op(data: np.ndarray, parents: tuple[Tensor, ...]) -> Tensor:
    out = Tensor(data)
    if any(p.requires_grad for p in parents):
        out.requires_grad = True
        out._parents = parents
    return out


def _accumulate(t: Tensor, g: np.ndarray) -> None:
    if not t.requires_grad:
        return
    t.grad = g if t.grad is None else t.grad + g


def _unbroadcast(g: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Reduce a broadcast gradient back to the operand's shape."""
    while g.ndim > len(shape):
        g = g.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and g.shape[axis] != 1:
            g = g.sum(axis=axis, keepdims=True)
    return g
