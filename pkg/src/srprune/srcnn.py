"""From-scratch 3-layer SRCNN: inference, analytic backprop, SGD, serialization.

The network is the classic 9-5-5 design operating on a single luminance
channel that has been bicubically pre-upscaled to target size:

    conv 9x9 (1 -> n1) -> ReLU -> conv 5x5 (n1 -> n2) -> ReLU -> conv 5x5 (n2 -> 1)

All convolutions use same-size replicate padding so the output aligns
pixelwise with the target.  Default widths are n1=64, n2=32; reduced widths
are supported (used for finite-difference gradient checks and desk-scale
training) and round-trip through the same file format.
"""

from __future__ import annotations

import hashlib
import struct
import zlib
from dataclasses import dataclass, field

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ContractError, TrainingDivergedError, WeightsFormatError

__all__ = [
    "SrcnnWeights",
    "TrainConfig",
    "init_weights",
    "srcnn_forward",
    "loss_and_gradients",
    "train",
    "save_weights",
    "load_weights",
    "weights_bytes",
    "weights_hash",
]

KERNEL_SIZES = ((9, 9), (5, 5), (5, 5))

_MAGIC = b"SRCW"
_VERSION = 1


@dataclass
class SrcnnWeights:
    """Parameters of the 3-layer network.

    Kernels are (out_ch, in_ch, kh, kw) float64 arrays, biases (out_ch,).
    """

    k1: np.ndarray
    b1: np.ndarray
    k2: np.ndarray
    b2: np.ndarray
    k3: np.ndarray
    b3: np.ndarray

    def __post_init__(self):
        self.k1 = np.asarray(self.k1, dtype=np.float64)
        self.b1 = np.asarray(self.b1, dtype=np.float64)
        self.k2 = np.asarray(self.k2, dtype=np.float64)
        self.b2 = np.asarray(self.b2, dtype=np.float64)
        self.k3 = np.asarray(self.k3, dtype=np.float64)
        self.b3 = np.asarray(self.b3, dtype=np.float64)
        self._validate()

    def _validate(self):
        for i, (k, b) in enumerate(self.layers, start=1):
            if k.ndim != 4:
                raise ContractError(f"layer{i} kernel must be 4-D, got {k.shape}")
            if k.shape[2:] != KERNEL_SIZES[i - 1]:
                raise ContractError(
                    f"layer{i} kernel must be {KERNEL_SIZES[i - 1]}, got {k.shape[2:]}"
                )
            if b.shape != (k.shape[0],):
                raise ContractError(f"layer{i} bias shape {b.shape} != ({k.shape[0]},)")
            if not (np.all(np.isfinite(k)) and np.all(np.isfinite(b))):
                raise ContractError(f"layer{i} has non-finite parameters")
        if self.k1.shape[1] != 1:
            raise ContractError(f"layer1 must take 1 input channel, got {self.k1.shape[1]}")
        if self.k2.shape[1] != self.k1.shape[0]:
            raise ContractError("layer2 input channels do not match layer1 output channels")
        if self.k3.shape[1] != self.k2.shape[0]:
            raise ContractError("layer3 input channels do not match layer2 output channels")
        if self.k3.shape[0] != 1:
            raise ContractError(f"layer3 must emit 1 channel, got {self.k3.shape[0]}")

    @property
    def layers(self):
        return ((self.k1, self.b1), (self.k2, self.b2), (self.k3, self.b3))

    @property
    def widths(self) -> tuple[int, int]:
        return self.k1.shape[0], self.k2.shape[0]

    def copy(self) -> "SrcnnWeights":
        return SrcnnWeights(
            self.k1.copy(), self.b1.copy(),
            self.k2.copy(), self.b2.copy(),
            self.k3.copy(), self.b3.copy(),
        )

    def zeros_like(self) -> "SrcnnWeights":
        return SrcnnWeights(
            np.zeros_like(self.k1), np.zeros_like(self.b1),
            np.zeros_like(self.k2), np.zeros_like(self.b2),
            np.zeros_like(self.k3), np.zeros_like(self.b3),
        )

    def arrays(self):
        return [self.k1, self.b1, self.k2, self.b2, self.k3, self.b3]


@dataclass(frozen=True)
class TrainConfig:
    """Plain-SGD training parameters; everything is deterministic from seed."""

    learning_rate: float
    batch_size: int
    steps: int
    seed: int
    init_std: float = 0.001  # Gaussian kernel init; biases start at zero

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ContractError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.batch_size < 1:
            raise ContractError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.steps < 0:
            raise ContractError(f"steps must be >= 0, got {self.steps}")


def init_weights(seed: int, n1: int = 64, n2: int = 32, std: float = 0.001) -> SrcnnWeights:
    """Gaussian kernel init with zero biases, deterministic from seed."""
    rng = np.random.default_rng(seed)
    return SrcnnWeights(
        rng.normal(0.0, std, (n1, 1, 9, 9)), np.zeros(n1),
        rng.normal(0.0, std, (n2, n1, 5, 5)), np.zeros(n2),
        rng.normal(0.0, std, (1, n2, 5, 5)), np.zeros(1),
    )


def _conv_same_fwd(x3: np.ndarray, k: np.ndarray, b: np.ndarray):
    """Replicate-padded cross-correlation; returns output and cached windows."""
    kh, kw = k.shape[2:]
    ph, pw = kh // 2, kw // 2
    xp = np.pad(x3, ((ph, ph), (pw, pw), (0, 0)), mode="edge")
    win = sliding_window_view(xp, (kh, kw), axis=(0, 1))  # (h, w, cin, kh, kw)
    y = np.tensordot(win, k, axes=([2, 3, 4], [1, 2, 3])) + b
    return y, win


def _fold_replicate(dp: np.ndarray, pad: int, axis: int) -> np.ndarray:
    """Collapse a padded-gradient axis back, accumulating replicated rows
    into the border pixels they were copied from."""
    if pad == 0:
        return dp
    n = dp.shape[axis] - 2 * pad
    idx = np.clip(np.arange(-pad, n + pad), 0, n - 1)
    moved = np.moveaxis(dp, axis, 0)
    out = np.zeros((n,) + moved.shape[1:], dtype=dp.dtype)
    np.add.at(out, idx, moved)
    return np.moveaxis(out, 0, axis)


def _conv_same_bwd(dy: np.ndarray, win: np.ndarray, k: np.ndarray, in_shape):
    """Gradients of _conv_same_fwd w.r.t. kernel, bias and input."""
    kh, kw = k.shape[2:]
    ph, pw = kh // 2, kw // 2
    dk = np.tensordot(dy, win, axes=([0, 1], [0, 1]))  # (out, cin, kh, kw)
    db = dy.sum(axis=(0, 1))
    # Full correlation of dy with the flipped kernel gives the gradient on
    # the padded input; fold the pad back through the replication.
    dyp = np.pad(dy, ((kh - 1, kh - 1), (kw - 1, kw - 1), (0, 0)))
    wing = sliding_window_view(dyp, (kh, kw), axis=(0, 1))  # (h+2ph, w+2pw, out, kh, kw)
    kf = k[:, :, ::-1, ::-1]
    dxp = np.tensordot(wing, kf, axes=([2, 3, 4], [0, 2, 3]))  # (h+2ph, w+2pw, cin)
    dx = _fold_replicate(dxp, ph, 0)
    dx = _fold_replicate(dx, pw, 1)
    assert dx.shape == in_shape
    return dk, db, dx


def srcnn_forward(w: SrcnnWeights, img: np.ndarray, clamp: bool = True) -> np.ndarray:
    """Run the network on a pre-upscaled single-channel patch.

    ``clamp`` bounds the output to [0, 1]; it is applied at inference only,
    never inside loss/gradient computation.
    """
    x = np.asarray(img, dtype=np.float64)
    if x.ndim != 2:
        raise ContractError(f"srcnn_forward expects a single channel, got shape {x.shape}")
    a = x[:, :, None]
    a, _ = _conv_same_fwd(a, w.k1, w.b1)
    np.maximum(a, 0.0, out=a)
    a, _ = _conv_same_fwd(a, w.k2, w.b2)
    np.maximum(a, 0.0, out=a)
    a, _ = _conv_same_fwd(a, w.k3, w.b3)
    out = a[:, :, 0]
    if clamp:
        out = np.clip(out, 0.0, 1.0)
    return out


def loss_and_gradients(w: SrcnnWeights, batch) -> tuple[float, SrcnnWeights]:
    """Mean-over-batch MSE loss and exact analytic gradients (no clamp)."""
    batch = list(batch)
    if not batch:
        raise ContractError("batch must be non-empty")
    grads = w.zeros_like()
    total = 0.0
    inv_b = 1.0 / len(batch)
    for x, t in batch:
        x = np.asarray(x, dtype=np.float64)
        t = np.asarray(t, dtype=np.float64)
        if x.ndim != 2 or x.shape != t.shape:
            raise ContractError(f"bad pair shapes {x.shape} vs {t.shape}")
        a0 = x[:, :, None]
        z1, win1 = _conv_same_fwd(a0, w.k1, w.b1)
        a1 = np.maximum(z1, 0.0)
        z2, win2 = _conv_same_fwd(a1, w.k2, w.b2)
        a2 = np.maximum(z2, 0.0)
        z3, win3 = _conv_same_fwd(a2, w.k3, w.b3)
        pred = z3[:, :, 0]
        resid = pred - t
        total += float(np.mean(resid * resid)) * inv_b
        dz3 = (2.0 * inv_b / resid.size) * resid[:, :, None]
        dk3, db3, da2 = _conv_same_bwd(dz3, win3, w.k3, a2.shape)
        dz2 = da2 * (z2 > 0.0)
        dk2, db2, da1 = _conv_same_bwd(dz2, win2, w.k2, a1.shape)
        dz1 = da1 * (z1 > 0.0)
        dk1, db1, _ = _conv_same_bwd(dz1, win1, w.k1, a0.shape)
        grads.k1 += dk1; grads.b1 += db1
        grads.k2 += dk2; grads.b2 += db2
        grads.k3 += dk3; grads.b3 += db3
    return total, grads


def train(w0: SrcnnWeights, data, cfg: TrainConfig):
    """Plain SGD over (input, target) pairs; returns (weights, loss_trace).

    Deterministic given (w0, data order, cfg.seed).  Epochs cycle with a
    fresh seeded shuffle each pass; the last batch of an epoch may be short.
    """
    pairs = list(data)
    if not pairs:
        raise ContractError("training data must be non-empty")
    w = w0.copy()
    trace: list[float] = []
    if cfg.steps == 0:
        return w, trace
    rng = np.random.default_rng(cfg.seed)
    order: list[int] = []
    step = 0
    while step < cfg.steps:
        if not order:
            order = list(rng.permutation(len(pairs)))
        take, order = order[: cfg.batch_size], order[cfg.batch_size:]
        batch = [pairs[i] for i in take]
        loss, grads = loss_and_gradients(w, batch)
        if not np.isfinite(loss):
            raise TrainingDivergedError(step)
        for p, g in zip(w.arrays(), grads.arrays()):
            p -= cfg.learning_rate * g
        if not all(np.all(np.isfinite(p)) for p in w.arrays()):
            raise TrainingDivergedError(step)
        trace.append(loss)
        step += 1
    return w, trace


def weights_bytes(w: SrcnnWeights) -> bytes:
    """Serialize to the SRCW binary format (CRC-terminated, bit-exact)."""
    parts = [_MAGIC, struct.pack("<B", _VERSION)]
    for k, b in w.layers:
        out_ch, in_ch, kh, kw = k.shape
        parts.append(struct.pack("<4I", kh, kw, in_ch, out_ch))
        parts.append(np.ascontiguousarray(k, dtype="<f8").tobytes())
        parts.append(np.ascontiguousarray(b, dtype="<f8").tobytes())
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)


def save_weights(w: SrcnnWeights, path) -> None:
    import os

    blob = weights_bytes(w)
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "wb") as f:
        f.write(blob)
    os.replace(tmp, path)


class _Reader:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.blob):
            raise WeightsFormatError("weights file truncated")
        chunk = self.blob[self.pos : self.pos + n]
        self.pos += n
        return chunk


def load_weights(path) -> SrcnnWeights:
    """Load and validate a SRCW weights file (bit-exact round trip)."""
    with open(path, "rb") as f:
        blob = f.read()
    if len(blob) < len(_MAGIC) + 1 + 4:
        raise WeightsFormatError("weights file truncated")
    body, (crc,) = blob[:-4], struct.unpack("<I", blob[-4:])
    if zlib.crc32(body) & 0xFFFFFFFF != crc:
        raise WeightsFormatError("weights file CRC mismatch")
    r = _Reader(body)
    if r.take(4) != _MAGIC:
        raise WeightsFormatError("bad magic bytes, not a SRCW weights file")
    (version,) = struct.unpack("<B", r.take(1))
    if version != _VERSION:
        raise WeightsFormatError(f"unsupported weights version {version}")
    layers = []
    for i in range(3):
        kh, kw, in_ch, out_ch = struct.unpack("<4I", r.take(16))
        if (kh, kw) != KERNEL_SIZES[i]:
            raise WeightsFormatError(
                f"layer{i + 1}: kernel dims {kh}x{kw} do not match required "
                f"{KERNEL_SIZES[i][0]}x{KERNEL_SIZES[i][1]}"
            )
        k = np.frombuffer(r.take(8 * out_ch * in_ch * kh * kw), dtype="<f8")
        k = k.reshape(out_ch, in_ch, kh, kw).astype(np.float64)
        b = np.frombuffer(r.take(8 * out_ch), dtype="<f8").astype(np.float64)
        layers.append((k, b))
    if r.pos != len(body):
        raise WeightsFormatError("trailing bytes in weights file")
    try:
        return SrcnnWeights(
            layers[0][0], layers[0][1],
            layers[1][0], layers[1][1],
            layers[2][0], layers[2][1],
        )
    except ContractError as exc:
        raise WeightsFormatError(str(exc)) from exc


def weights_hash(w: SrcnnWeights) -> str:
    """SHA-256 of the serialized parameters, for provenance fields."""
    return hashlib.sha256(weights_bytes(w)).hexdigest()
