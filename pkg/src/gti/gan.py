"""Per-layer adversarial training on subgraph adjacency blocks.

Every layer contributes M binary k x k block matrices (one per partition
part, padded to a common side). A small generator/discriminator pair is
trained on them; sampling the trained generator once per part yields the
layer's weighted block-diagonal reconstruction.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from gti._util import rng_from
from gti.graph import Graph
from gti.nn import (Adam, BatchNorm, Conv2d, ConvTranspose2d, Linear, Tensor,
                    bce_with_logits_loss, leaky_relu, serialize, sigmoid)
from gti.partition import PartitionResult

log = logging.getLogger(__name__)

MIN_BATCH = 4  # batch-norm needs a few samples; tiny layers are replicated


class TrainingDivergence(RuntimeError):
    def __init__(self, iteration: int, message: str):
        super().__init__(f"iteration {iteration}: {message}")
        self.iteration = iteration


@dataclass
class GanConfig:
    latent_dim: int = 100
    iterations: int = 1000
    learning_rate: float = 2e-4
    batch_size: int | None = None   # defaults to min(M, 64)
    seed: int = 0

    def __post_init__(self):
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")


@dataclass
class SubgraphBatch:
    layer_id: int
    k: int
    matrices: np.ndarray            # [M, k, k], entries in {0, 1}
    part_nodes: list[np.ndarray]    # per-matrix original node ids, ascending

    @property
    def part_count(self) -> int:
        return self.matrices.shape[0]


@dataclass
class LayerReconstruction:
    layer_id: int
    weights: np.ndarray             # N x N, nonzero only inside part blocks


def pad_side(max_part_size: int) -> int:
    """Common block side: max part size rounded up to a multiple of 4."""
    return max(4, -4 * (-max_part_size // 4))


def make_subgraph_batch(g: Graph, p: PartitionResult, layer_id: int) -> SubgraphBatch:
    if p.part_ids.shape != (g.node_count,):
        raise ValueError("partition does not cover this graph's nodes")
    k = pad_side(int(p.part_sizes.max()))
    mats = np.zeros((len(p.parts), k, k))
    adj = g.adjacency_matrix()
    for idx, nodes in enumerate(p.parts):
        s = len(nodes)
        mats[idx, :s, :s] = adj[np.ix_(nodes, nodes)]
    return SubgraphBatch(layer_id=layer_id, k=k, matrices=mats,
                         part_nodes=[np.asarray(n, dtype=np.int64) for n in p.parts])


class Generator:
    """latent -> FC -> FC -> deconv -> deconv -> sigmoid, output k x k."""

    def __init__(self, k: int, latent_dim: int, rng: np.random.Generator):
        if k % 4:
            raise ValueError("side length must be a multiple of 4")
        self.k = k
        self.base = k // 4
        self.fc1 = Linear(latent_dim, 256, rng, "gen.fc1")
        self.fc2 = Linear(256, 32 * self.base * self.base, rng, "gen.fc2")
        self.bn0 = BatchNorm(32, "gen.bn0")
        self.deconv1 = ConvTranspose2d(32, 64, 4, 2, 1, rng, "gen.deconv1")
        self.bn1 = BatchNorm(64, "gen.bn1")
        self.deconv2 = ConvTranspose2d(64, 1, 4, 2, 1, rng, "gen.deconv2")

    def __call__(self, z: Tensor, training: bool) -> Tensor:
        h = leaky_relu(self.fc1(z))
        h = leaky_relu(self.fc2(h))
        h = h.reshape(z.shape[0], 32, self.base, self.base)
        h = leaky_relu(self.bn0(h, training))
        h = leaky_relu(self.bn1(self.deconv1(h), training))
        return sigmoid(self.deconv2(h))

    def parameters(self):
        return (self.fc1.parameters() + self.fc2.parameters()
                + self.bn0.parameters() + self.deconv1.parameters()
                + self.bn1.parameters() + self.deconv2.parameters())

    def buffers(self):
        return {**self.bn0.buffers(), **self.bn1.buffers()}


class Discriminator:
    """k x k -> conv -> conv -> FC -> FC, output one logit."""

    def __init__(self, k: int, rng: np.random.Generator):
        self.k = k
        self.base = k // 4
        self.conv1 = Conv2d(1, 32, 4, 2, 1, rng, "disc.conv1")
        self.conv2 = Conv2d(32, 64, 4, 2, 1, rng, "disc.conv2")
        self.bn1 = BatchNorm(64, "disc.bn1")
        self.fc1 = Linear(64 * self.base * self.base, 256, rng, "disc.fc1")
        self.fc2 = Linear(256, 1, rng, "disc.fc2")

    def __call__(self, x: Tensor, training: bool) -> Tensor:
        h = leaky_relu(self.conv1(x))
        h = leaky_relu(self.bn1(self.conv2(h), training))
        h = h.reshape(x.shape[0], 64 * self.base * self.base)
        h = leaky_relu(self.fc1(h))
        return self.fc2(h)

    def parameters(self):
        return (self.conv1.parameters() + self.conv2.parameters()
                + self.bn1.parameters() + self.fc1.parameters()
                + self.fc2.parameters())

    def buffers(self):
        return self.bn1.buffers()


@dataclass
class GanModel:
    generator: Generator
    discriminator: Discriminator
    k: int
    latent_dim: int
    loss_history: list[tuple[float, float]] = field(default_factory=list)

    def generate(self, z: np.ndarray, training: bool = False) -> np.ndarray:
        return self.generator(Tensor(z), training).data[:, 0]

    def named_arrays(self) -> dict[str, np.ndarray]:
        out = {}
        for p in self.generator.parameters() + self.discriminator.parameters():
            out[p.name] = p.data
        out.update(self.generator.buffers())
        out.update(self.discriminator.buffers())
        return out

    def save(self, path) -> None:
        serialize.save_arrays(path, self.named_arrays())

    def load(self, path) -> None:
        arrays = serialize.load_arrays(path)
        own = self.named_arrays()
        if set(arrays) != set(own):
            raise ValueError("checkpoint does not match this model's parameters")
        for name, arr in arrays.items():
            if own[name].shape != arr.shape:
                raise ValueError(f"checkpoint shape mismatch for {name}")
            own[name][...] = arr


def train_layer_gan(batch: SubgraphBatch, cfg: GanConfig) -> GanModel:
    """Adversarial loop: one discriminator step on real + generated blocks,
    one generator step on fresh noise, per iteration."""
    m = batch.part_count
    if m < 1:
        raise ValueError("need at least one subgraph matrix")
    rng = rng_from(cfg.seed, 0x6a11)
    gen = Generator(batch.k, cfg.latent_dim, rng)
    disc = Discriminator(batch.k, rng)
    model = GanModel(gen, disc, batch.k, cfg.latent_dim)
    opt_g = Adam(gen.parameters(), cfg.learning_rate)
    opt_d = Adam(disc.parameters(), cfg.learning_rate)

    pool = batch.matrices[:, None, :, :]  # [M, 1, k, k]
    bs = cfg.batch_size or min(m, 64)
    bs = max(1, min(bs, m))

    def sample_real() -> np.ndarray:
        if m > bs:
            idx = rng.choice(m, size=bs, replace=False)
            real = pool[idx]
        else:
            real = pool
        if real.shape[0] < MIN_BATCH:
            reps = -(-MIN_BATCH // real.shape[0])
            real = np.tile(real, (reps, 1, 1, 1))[:MIN_BATCH]
        return real

    def zero_all():
        for p in gen.parameters() + disc.parameters():
            p.zero_grad()

    for it in range(cfg.iterations):
        real = sample_real()
        b = real.shape[0]

        # discriminator step (generated blocks are detached)
        z = rng.standard_normal((b, cfg.latent_dim))
        fake = gen(Tensor(z), training=True).data
        zero_all()
        d_real = disc(Tensor(real), training=True)
        d_fake = disc(Tensor(fake), training=True)
        d_loss = (bce_with_logits_loss(d_real, np.ones((b, 1)))
                  + bce_with_logits_loss(d_fake, np.zeros((b, 1))))
        d_loss.backward()
        opt_d.step()

        # generator step, non-saturating loss on fresh noise
        z2 = rng.standard_normal((b, cfg.latent_dim))
        zero_all()
        fake2 = gen(Tensor(z2), training=True)
        g_loss = bce_with_logits_loss(disc(fake2, training=True), np.ones((b, 1)))
        g_loss.backward()
        opt_g.step()

        d_val, g_val = float(d_loss.data), float(g_loss.data)
        if not (np.isfinite(d_val) and np.isfinite(g_val)):
            raise TrainingDivergence(it, f"non-finite loss (d={d_val}, g={g_val})")
        model.loss_history.append((d_val, g_val))
    return model


def regenerate_layer(model: GanModel, batch: SubgraphBatch, seed: int) -> LayerReconstruction:
    """Sample the generator once per part and write each block back into an
    N x N matrix at the part's node positions."""
    if model.k != batch.k:
        raise ValueError(f"model side {model.k} != batch side {batch.k}")
    n = int(sum(len(nodes) for nodes in batch.part_nodes))
    weights = np.zeros((n, n))
    for j, nodes in enumerate(batch.part_nodes):
        rng = rng_from(seed, batch.layer_id, j)
        z = rng.standard_normal((1, model.latent_dim))
        block = model.generate(z, training=False)[0]
        s = len(nodes)
        block = block[:s, :s]
        block = 0.5 * (block + block.T)
        np.fill_diagonal(block, 0.0)
        weights[np.ix_(nodes, nodes)] = block
    return LayerReconstruction(layer_id=batch.layer_id, weights=weights)
