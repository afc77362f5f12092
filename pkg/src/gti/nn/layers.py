"""Layer modules: parameter containers around the functional ops."""

from __future__ import annotations

import numpy as np

from gti.nn import ops
from gti.nn.tensor import Tensor, parameter


def _uniform_init(rng: np.random.Generator, shape, fan_in: int) -> np.ndarray:
    bound = np.sqrt(1.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape)


class Linear:
    def __init__(self, in_features: int, out_features: int,
                 rng: np.random.Generator, name: str = "linear"):
        self.weight = parameter(_uniform_init(rng, (in_features, out_features), in_features),
                                f"{name}.weight")
        self.bias = parameter(np.zeros(out_features), f"{name}.bias")

    def __call__(self, x: Tensor) -> Tensor:
        return ops.fully_connected(x, self.weight, self.bias)

    def parameters(self) -> list[Tensor]:
        return [self.weight, self.bias]


class Conv2d:
    def __init__(self, in_channels: int, out_channels: int, kernel_size: int,
                 stride: int, padding: int, rng: np.random.Generator,
                 name: str = "conv"):
        fan_in = in_channels * kernel_size * kernel_size
        shape = (out_channels, in_channels, kernel_size, kernel_size)
        self.kernel = parameter(_uniform_init(rng, shape, fan_in), f"{name}.kernel")
        self.stride = stride
        self.padding = padding

    def __call__(self, x: Tensor) -> Tensor:
        return ops.conv2d(x, self.kernel, self.stride, self.padding)

    def parameters(self) -> list[Tensor]:
        return [self.kernel]


class ConvTranspose2d:
    def __init__(self, in_channels: int, out_channels: int, kernel_size: int,
                 stride: int, padding: int, rng: np.random.Generator,
                 name: str = "deconv"):
        fan_in = in_channels * kernel_size * kernel_size
        shape = (in_channels, out_channels, kernel_size, kernel_size)
        self.kernel = parameter(_uniform_init(rng, shape, fan_in), f"{name}.kernel")
        self.stride = stride
        self.padding = padding

    def __call__(self, x: Tensor) -> Tensor:
        return ops.deconv2d(x, self.kernel, self.stride, self.padding)

    def parameters(self) -> list[Tensor]:
        return [self.kernel]


class BatchNorm:
    """Batch normalization with running statistics for eval mode."""

    def __init__(self, channels: int, name: str = "bn",
                 eps: float = 1e-5, momentum: float = 0.1):
        self.gamma = parameter(np.ones(channels), f"{name}.gamma")
        self.beta = parameter(np.zeros(channels), f"{name}.beta")
        self.running_mean = np.zeros(channels)
        self.running_var = np.ones(channels)
        self.eps = eps
        self.momentum = momentum

    def __call__(self, x: Tensor, training: bool = True) -> Tensor:
        return ops.batch_norm(x, self.gamma, self.beta,
                              self.running_mean, self.running_var,
                              eps=self.eps, momentum=self.momentum,
                              training=training)

    def parameters(self) -> list[Tensor]:
        return [self.gamma, self.beta]

    def buffers(self) -> dict[str, np.ndarray]:
        return {f"{self.gamma.name}.running_mean": self.running_mean,
                f"{self.gamma.name}.running_var": self.running_var}
