"""Per-sample difficulty scores: SRCNN reconstruction loss and Sobel texture.

Both scorers emit the same ScoreTable shape, so the selection strategies run
unmodified on either.  Scoring is an ordered map over the dataset: results
are aggregated by dataset index, so worker count never changes the output.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import imgcore
from .errors import ContractError
from .srcnn import SrcnnWeights, srcnn_forward, weights_hash

__all__ = [
    "SamplePair",
    "ScoreTable",
    "score_sample_loss",
    "score_dataset",
    "score_dataset_sobel",
    "pairs_fingerprint",
]

TABLE_VERSION = 1


@dataclass
class SamplePair:
    """One HR patch with its synthesized LR counterpart."""

    id: str
    hr: np.ndarray
    lr: np.ndarray
    scale: int

    def __post_init__(self):
        if self.scale < 1:
            raise ContractError(f"{self.id}: scale must be >= 1, got {self.scale}")
        hh, hw = self.hr.shape[:2]
        lh, lw = self.lr.shape[:2]
        if (hh, hw) != (lh * self.scale, lw * self.scale):
            raise ContractError(
                f"{self.id}: hr dims {(hh, hw)} != lr dims {(lh, lw)} x scale {self.scale}"
            )


@dataclass
class ScoreTable:
    """Per-sample scores bound to a dataset fingerprint and scorer identity."""

    fingerprint: str
    scorer: str  # "srcnn-mse" | "sobel"
    scorer_hash: str  # weights hash, or "-" for sobel
    scale: int
    entries: list[tuple[str, float]]

    def __post_init__(self):
        ids = [i for i, _ in self.entries]
        if len(set(ids)) != len(ids):
            raise ContractError("score table has duplicate ids")
        for i, s in self.entries:
            if not np.isfinite(s) or s < 0:
                raise ContractError(f"score for {i} must be finite and >= 0, got {s}")

    def scores(self) -> dict[str, float]:
        return dict(self.entries)

    def to_json_bytes(self) -> bytes:
        doc = {
            "version": TABLE_VERSION,
            "fingerprint": self.fingerprint,
            "scorer": self.scorer,
            "scorer_hash": self.scorer_hash,
            "scale": self.scale,
            "entries": [
                {"id": i, "score": float(f"{s:.17g}")} for i, s in self.entries
            ],
        }
        return (json.dumps(doc, indent=2) + "\n").encode()

    def save(self, path) -> None:
        import os

        tmp = f"{path}.tmp-{os.getpid()}"
        with open(tmp, "wb") as f:
            f.write(self.to_json_bytes())
        os.replace(tmp, path)

    @classmethod
    def load(cls, path) -> "ScoreTable":
        with open(path) as f:
            doc = json.load(f)
        if doc.get("version") != TABLE_VERSION:
            raise ContractError(f"unsupported score table version {doc.get('version')}")
        return cls(
            fingerprint=doc["fingerprint"],
            scorer=doc["scorer"],
            scorer_hash=doc["scorer_hash"],
            scale=doc["scale"],
            entries=[(e["id"], float(e["score"])) for e in doc["entries"]],
        )


def _to_y(img: np.ndarray) -> np.ndarray:
    if img.ndim == 3 and img.shape[2] == 3:
        return imgcore.rgb_to_y(img)
    return np.asarray(img, dtype=np.float64).reshape(img.shape[:2])


def score_sample_loss(w: SrcnnWeights, s: SamplePair) -> float:
    """SRCNN reconstruction MSE of one sample on the Y channel.

    The LR patch is bicubically pre-upscaled to HR size (no antialias on
    upscale) before the forward pass; no inference clamp is applied.
    """
    hr_y = _to_y(s.hr)
    lr_y = _to_y(s.lr)
    if s.scale > 1:
        up = imgcore.bicubic_resize(
            lr_y, imgcore.ResampleSpec(Fraction(s.scale), antialias=False)
        )
    else:
        up = lr_y
    if up.shape != hr_y.shape:
        raise ContractError(f"{s.id}: upscaled lr {up.shape} != hr {hr_y.shape}")
    pred = srcnn_forward(w, up, clamp=False)
    return imgcore.mse(pred, hr_y)


def pairs_fingerprint(data: list[SamplePair]) -> str:
    """Content hash over ids, pixels, and scales of an in-memory dataset."""
    h = hashlib.sha256()
    for s in data:
        h.update(s.id.encode())
        h.update(str(s.scale).encode())
        h.update(np.ascontiguousarray(s.hr, dtype="<f8").tobytes())
        h.update(np.ascontiguousarray(s.lr, dtype="<f8").tobytes())
    return h.hexdigest()


def _score_map(data, fn, workers):
    if workers <= 1:
        return [fn(s) for s in data]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, data))


def score_dataset(
    w: SrcnnWeights,
    data,
    workers: int = 1,
    fingerprint: str | None = None,
) -> ScoreTable:
    """Score every sample with the SRCNN-MSE scorer, in dataset order."""
    data = list(data)
    if not data:
        raise ContractError("cannot score an empty dataset")
    scales = {s.scale for s in data}
    if len(scales) != 1:
        raise ContractError(f"mixed scales in dataset: {sorted(scales)}")

    def one(s: SamplePair) -> float:
        try:
            return score_sample_loss(w, s)
        except Exception as exc:
            raise ContractError(f"scoring failed for sample {s.id}: {exc}") from exc

    scores = _score_map(data, one, workers)
    return ScoreTable(
        fingerprint=fingerprint or pairs_fingerprint(data),
        scorer="srcnn-mse",
        scorer_hash=weights_hash(w),
        scale=data[0].scale,
        entries=[(s.id, v) for s, v in zip(data, scores)],
    )


def score_dataset_sobel(
    data, workers: int = 1, fingerprint: str | None = None
) -> ScoreTable:
    """Score every sample by mean Sobel gradient magnitude of the HR patch."""
    data = list(data)
    if not data:
        raise ContractError("cannot score an empty dataset")
    scales = {s.scale for s in data}
    if len(scales) != 1:
        raise ContractError(f"mixed scales in dataset: {sorted(scales)}")

    def one(s: SamplePair) -> float:
        try:
            return imgcore.sobel_magnitude(_to_y(s.hr))
        except Exception as exc:
            raise ContractError(f"scoring failed for sample {s.id}: {exc}") from exc

    scores = _score_map(data, one, workers)
    return ScoreTable(
        fingerprint=fingerprint or pairs_fingerprint(data),
        scorer="sobel",
        scorer_hash="-",
        scale=data[0].scale,
        entries=[(s.id, v) for s, v in zip(data, scores)],
    )
