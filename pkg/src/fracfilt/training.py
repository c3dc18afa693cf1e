"""SAD + Adam training of one model per (fractional position, QP).

Gradients are exact subgradients of the summed absolute error, with
sign(0) = 0 at the kinks. Integer (codec-path) records are normalized to
[0, 1] before entering the network; float records are used as-is. Batches
accumulate per-record gradients in record order, which keeps runs bitwise
reproducible for a fixed seed.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from . import kernels as K
from .model import MARGIN, ModelBank, ScratchModel, forward_full, init_model

log = logging.getLogger(__name__)


class TrainingDiverged(RuntimeError):
    pass


@dataclass
class TrainingRecord:
    frac: tuple[int, int]
    qp: int
    input: np.ndarray  # (H+12) x (W+12) reference samples
    target: np.ndarray  # H x W original samples
    bitdepth: int = 8

    def __post_init__(self):
        ih, iw = self.input.shape
        th, tw = self.target.shape
        if (ih, iw) != (th + 2 * MARGIN, tw + 2 * MARGIN):
            raise ValueError(
                f"input {self.input.shape} must be target {self.target.shape} + (12, 12)"
            )
        if th > 32 or tw > 32:
            raise ValueError(f"block {th}x{tw} exceeds the 32x32 maximum")


@dataclass
class TrainConfig:
    epochs: int = 40
    batch_size: int = 32
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    lr_decay: float = 1.0  # multiplicative per-epoch decay, 1.0 = constant


@dataclass
class AdamState:
    lr: float
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: list[np.ndarray] = field(default_factory=list)
    v: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def for_weights(cls, weights, cfg: TrainConfig) -> "AdamState":
        return cls(
            lr=cfg.lr,
            beta1=cfg.beta1,
            beta2=cfg.beta2,
            eps=cfg.eps,
            m=[np.zeros_like(w) for w in weights],
            v=[np.zeros_like(w) for w in weights],
        )


def sad_loss(pred: np.ndarray, target: np.ndarray) -> float:
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {target.shape}")
    return float(np.abs(pred - target).sum())


def _training_planes(rec: TrainingRecord):
    if np.issubdtype(rec.input.dtype, np.integer):
        scale = (1 << rec.bitdepth) - 1
        return rec.input / scale, rec.target / scale
    return np.asarray(rec.input, float), np.asarray(rec.target, float)


def backprop(model: ScratchModel, rec: TrainingRecord):
    """Gradients of the per-record SAD loss; returns ([g1, g2, g3], loss)."""
    x, target = _training_planes(rec)
    f1, f2, _, y = forward_full(model, x)
    diff = y - target
    s = np.ascontiguousarray(np.sign(diff))
    g3 = K.xcorr2_with_shared(np.ascontiguousarray(f2), s)
    gf2 = K.conv2_full_stack(s, model.k3)
    g2 = gf2.reshape(gf2.shape[0], -1) @ f1.reshape(f1.shape[0], -1).T
    gf1 = np.tensordot(model.k2.T, gf2, axes=(1, 0))
    g1 = K.xcorr2_bank(np.ascontiguousarray(x, dtype=np.float64), np.ascontiguousarray(gf1))
    return [g1, g2, g3], float(np.abs(diff).sum())


def adam_step(state: AdamState, grads, weights) -> None:
    """One Adam update with bias correction; mutates weights in place."""
    state.step += 1
    b1, b2 = state.beta1, state.beta2
    c1 = 1.0 - b1**state.step
    c2 = 1.0 - b2**state.step
    for m, v, g, w in zip(state.m, state.v, grads, weights):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * g * g
        w -= state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)


def partition(dataset) -> dict[tuple[tuple[int, int], int], list[TrainingRecord]]:
    parts: dict[tuple[tuple[int, int], int], list[TrainingRecord]] = {}
    for rec in dataset:
        parts.setdefault((tuple(rec.frac), rec.qp), []).append(rec)
    return parts


def train_one(
    cfg: TrainConfig, records, frac, qp: int, seed_seq: np.random.SeedSequence
) -> ScratchModel:
    """Train a single model on one (frac, qp) partition.

    BLAS pools are pinned to one thread for the duration: the per-record
    matrices are tiny and multithreaded GEMM is pure overhead there (measured
    up to two orders of magnitude slower under contention).
    """
    if not records:
        raise ValueError(f"empty partition for frac {frac} qp {qp}")
    with threadpool_limits(limits=1):
        return _train_one(cfg, records, frac, qp, seed_seq)


def _train_one(cfg, records, frac, qp, seed_seq):
    rng = np.random.default_rng(seed_seq)
    model = init_model(frac, qp, rng)
    weights = model.weights()
    state = AdamState.for_weights(weights, cfg)
    n_samples = sum(r.target.size for r in records)

    for epoch in range(cfg.epochs):
        order = rng.permutation(len(records))
        epoch_sad = 0.0
        for start in range(0, len(order), cfg.batch_size):
            batch = order[start : start + cfg.batch_size]
            acc = [np.zeros_like(w) for w in weights]
            for idx in batch:
                grads, loss = backprop(model, records[idx])
                epoch_sad += loss
                for a, g in zip(acc, grads):
                    a += g
            for a in acc:
                a /= len(batch)
            adam_step(state, acc, weights)
        if not np.isfinite(epoch_sad):
            raise TrainingDiverged(
                f"non-finite loss for frac {frac} qp {qp} at step {state.step}"
            )
        log.info(
            "frac=%s qp=%d epoch %d/%d mean SAD per sample %.6g",
            frac, qp, epoch + 1, cfg.epochs, epoch_sad / n_samples,
        )
        state.lr *= cfg.lr_decay
    return model


def train(cfg: TrainConfig, dataset, seed: int, entries=None) -> ModelBank:
    """Train one model per (frac, qp) partition of the dataset.

    entries limits training to the given (frac, qp) pairs and errors when one
    has no records; by default every partition present is trained. Child RNG
    seeds derive from (seed, dx, dy, qp) so per-model results do not depend
    on which other entries are trained.
    """
    parts = partition(dataset)
    if entries is None:
        entries = sorted(parts.keys(), key=lambda e: (e[1], e[0][1], e[0][0]))
    bank = ModelBank()
    for frac, qp in entries:
        recs = parts.get((tuple(frac), qp))
        if not recs:
            raise ValueError(f"no training records for frac {tuple(frac)} qp {qp}")
        seq = np.random.SeedSequence((seed, frac[0], frac[1], qp))
        bank.add(train_one(cfg, recs, tuple(frac), qp, seq))
    return bank
