"""The bias-free, activation-free 3-layer linear CNN and its model bank.

Layer 1: 64 kernels of 9x9 on the single input channel.
Layer 2: 1x1 mixing of the 64 channels into 32 (a full 32x64 matrix).
Layer 3: one 5x5 kernel per channel, outputs summed into the residual.
The network output adds the residual to the co-located input samples, so a
block of H x W predictions needs (H+12) x (W+12) reference samples.
"""

from dataclasses import dataclass, field

import numpy as np

from . import kernels as K

K1_COUNT = 64
K1_SIZE = 9
K2_ROWS = 32
K3_SIZE = 5
SUPPORT = 13  # K1_SIZE + K3_SIZE - 1
MARGIN = 6  # (SUPPORT - 1) // 2

#: the 15 non-integer quarter-pel positions, (dx, dy) with dx horizontal
FRAC_POSITIONS = tuple(
    (dx, dy) for dy in range(4) for dx in range(4) if (dx, dy) != (0, 0)
)

DEFAULT_QPS = (22, 27, 32, 37)


@dataclass
class ScratchModel:
    """Weights of one trained network: k1 (64,9,9), k2 (32,64), k3 (32,5,5)."""

    k1: np.ndarray
    k2: np.ndarray
    k3: np.ndarray
    frac: tuple[int, int]
    qp: int

    def __post_init__(self):
        if self.k1.shape != (K1_COUNT, K1_SIZE, K1_SIZE):
            raise ValueError(f"k1 shape {self.k1.shape}, expected (64, 9, 9)")
        if self.k2.shape != (K2_ROWS, K1_COUNT):
            raise ValueError(f"k2 shape {self.k2.shape}, expected (32, 64)")
        if self.k3.shape != (K2_ROWS, K3_SIZE, K3_SIZE):
            raise ValueError(f"k3 shape {self.k3.shape}, expected (32, 5, 5)")
        if self.frac not in FRAC_POSITIONS:
            raise ValueError(f"invalid fractional position {self.frac}")

    def weights(self) -> list[np.ndarray]:
        return [self.k1, self.k2, self.k3]


@dataclass
class ModelBank:
    """Trained models keyed by (dx, dy, qp)."""

    models: dict[tuple[int, int, int], ScratchModel] = field(default_factory=dict)

    def add(self, m: ScratchModel) -> None:
        self.models[(m.frac[0], m.frac[1], m.qp)] = m

    def qps_for(self, frac: tuple[int, int]) -> list[int]:
        return sorted(q for (dx, dy, q) in self.models if (dx, dy) == frac)

    def missing_entries(self, qps=DEFAULT_QPS) -> list[tuple[tuple[int, int], int]]:
        """(frac, qp) pairs a complete bank (15 positions x |qps|) still lacks."""
        return sorted(
            (frac, qp)
            for qp in qps
            for frac in FRAC_POSITIONS
            if (frac[0], frac[1], qp) not in self.models
        )


def init_model(frac, qp, rng: np.random.Generator) -> ScratchModel:
    """Uniform [-s, s] init with s = 1/sqrt(fan_in) per layer."""
    s1 = 1.0 / np.sqrt(K1_SIZE * K1_SIZE)
    s2 = 1.0 / np.sqrt(K1_COUNT)
    s3 = 1.0 / np.sqrt(K3_SIZE * K3_SIZE)
    return ScratchModel(
        k1=rng.uniform(-s1, s1, (K1_COUNT, K1_SIZE, K1_SIZE)),
        k2=rng.uniform(-s2, s2, (K2_ROWS, K1_COUNT)),
        k3=rng.uniform(-s3, s3, (K2_ROWS, K3_SIZE, K3_SIZE)),
        frac=tuple(frac),
        qp=int(qp),
    )


def _check_input(x: np.ndarray) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.shape[0] < SUPPORT or x.shape[1] < SUPPORT:
        raise ValueError(f"input {x.shape} smaller than {SUPPORT}x{SUPPORT}")
    return x


def forward_full(model: ScratchModel, x: np.ndarray):
    """Forward pass keeping intermediates; returns (f1, f2, residual, y)."""
    x = _check_input(x)
    f1 = K.xcorr2_bank(x, model.k1)  # (64, H+4, W+4)
    f2 = np.tensordot(model.k2, f1, axes=(1, 0))  # (32, H+4, W+4)
    res = K.xcorr2_stack_sum(np.ascontiguousarray(f2), model.k3)  # (H, W)
    y = res + x[MARGIN : MARGIN + res.shape[0], MARGIN : MARGIN + res.shape[1]]
    return f1, f2, res, y


def forward(model: ScratchModel, x: np.ndarray) -> np.ndarray:
    """Predicted block for reference patch x: dims shrink by (12, 12)."""
    return forward_full(model, x)[3]


def residual(model: ScratchModel, x: np.ndarray) -> np.ndarray:
    """The residual branch only (network output before adding the input back)."""
    return forward_full(model, x)[2]


def param_count(arch: str) -> int:
    """Trainable parameter count for a named architecture."""
    if arch == "srcnn_with_bias":
        return (64 * 81 + 64) + (32 * 64 + 32) + (32 * 25 + 1)
    if arch == "scratchcnn":
        return 64 * 81 + 32 * 64 + 32 * 25
    if arch == "collapsed":
        return SUPPORT * SUPPORT
    raise ValueError(f"unknown architecture {arch!r}")


def nearest_qp(qps, qp: int) -> int:
    """The trained QP closest to qp; ties broken toward the lower QP."""
    qps = sorted(qps)
    if not qps:
        raise ValueError("no trained QPs available")
    return min(qps, key=lambda t: (abs(t - qp), t))


def select_model(bank: ModelBank, qp: int, frac) -> ScratchModel:
    """The bank entry for frac whose trained QP is nearest to qp."""
    frac = tuple(frac)
    qps = bank.qps_for(frac)
    if not qps:
        raise KeyError(f"bank holds no models for fractional position {frac}")
    return bank.models[(frac[0], frac[1], nearest_qp(qps, qp))]
