"""Corpus ingestion: sub-image extraction, LR synthesis, dataset manifests.

A prepared dataset is a directory of 8-bit PNG patch pairs plus a JSON index:

    out/HR/<id>.png
    out/LRx<scale>/<id>.png
    out/index.json   {version, spec, samples:[{id, hr_path, lr_path,
                      content_hash}], fingerprint}

Patches are re-quantized to 8 bits exactly once, at preparation time; LR
patches are synthesized from the quantized HR content so everything is
reproducible from the artifacts alone.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import imgcore
from .errors import ContractError, EmptyCorpusError, FingerprintMismatchError
from .scoring import SamplePair
from .selection import CoreSetManifest

__all__ = [
    "DatasetSpec",
    "PreparedDataset",
    "SampleRecord",
    "extract_subimages",
    "synthesize_lr",
    "prepare",
    "load_dataset",
    "load_pairs",
    "materialize_coreset",
]

log = logging.getLogger(__name__)

INDEX_VERSION = 1
SUPPORTED_SCALES = (2, 3, 4)


@dataclass(frozen=True)
class DatasetSpec:
    hr_dir: str
    patch_size: int = 480
    stride: int = 240
    scale: int = 2
    antialias: bool = True

    def __post_init__(self):
        if self.scale not in SUPPORTED_SCALES:
            raise ContractError(f"scale must be one of {SUPPORTED_SCALES}, got {self.scale}")
        if self.patch_size % self.scale != 0:
            raise ContractError(
                f"patch_size {self.patch_size} not divisible by scale {self.scale}"
            )
        if self.stride < 1:
            raise ContractError(f"stride must be >= 1, got {self.stride}")


@dataclass(frozen=True)
class SampleRecord:
    id: str
    hr_path: str  # relative to the dataset root
    lr_path: str
    content_hash: str


@dataclass
class PreparedDataset:
    spec: DatasetSpec
    root: Path
    records: list[SampleRecord]
    fingerprint: str

    def __len__(self) -> int:
        return len(self.records)


def extract_subimages(img: np.ndarray, patch: int, stride: int):
    """Grid crops anchored at multiples of stride, row-major.

    The rightmost/bottom positions are not re-anchored; images smaller than
    the patch yield an empty list.
    """
    if patch < 1 or stride < 1:
        raise ContractError(f"patch and stride must be >= 1, got {patch}, {stride}")
    h, w = img.shape[:2]
    out = []
    if h < patch or w < patch:
        return out
    for row in range(0, h - patch + 1, stride):
        for col in range(0, w - patch + 1, stride):
            out.append((row, col, img[row : row + patch, col : col + patch]))
    return out


def synthesize_lr(hr: np.ndarray, scale: int, antialias: bool = True) -> np.ndarray:
    """The degradation: bicubic downscale by an integer factor."""
    h, w = hr.shape[:2]
    if h % scale or w % scale:
        raise ContractError(f"hr dims {(h, w)} not divisible by scale {scale}")
    return imgcore.bicubic_resize(
        hr, imgcore.ResampleSpec(Fraction(1, scale), antialias=antialias)
    )


def _content_hash(hr: np.ndarray, lr: np.ndarray) -> str:
    h = hashlib.sha256()
    for a in (hr, lr):
        u8 = np.round(np.clip(a, 0.0, 1.0) * 255.0).astype(np.uint8)
        h.update(str(u8.shape).encode())
        h.update(u8.tobytes())
    return h.hexdigest()


def _fingerprint(spec: DatasetSpec, records: list[SampleRecord]) -> str:
    h = hashlib.sha256()
    h.update(
        json.dumps(
            {
                "patch_size": spec.patch_size,
                "stride": spec.stride,
                "scale": spec.scale,
                "antialias": spec.antialias,
            },
            sort_keys=True,
        ).encode()
    )
    for rec in records:
        h.update(rec.id.encode())
        h.update(rec.content_hash.encode())
    return h.hexdigest()


def _index_doc(ds: PreparedDataset) -> dict:
    return {
        "version": INDEX_VERSION,
        "spec": {
            "hr_dir": str(ds.spec.hr_dir),
            "patch_size": ds.spec.patch_size,
            "stride": ds.spec.stride,
            "scale": ds.spec.scale,
            "antialias": ds.spec.antialias,
        },
        "samples": [
            {
                "id": r.id,
                "hr_path": r.hr_path,
                "lr_path": r.lr_path,
                "content_hash": r.content_hash,
            }
            for r in ds.records
        ],
        "fingerprint": ds.fingerprint,
    }


def prepare(spec: DatasetSpec, out_dir) -> PreparedDataset:
    """Extract patches, synthesize LR pairs, write PNGs and the index."""
    hr_dir = Path(spec.hr_dir)
    if not hr_dir.is_dir():
        raise EmptyCorpusError(f"source directory does not exist: {hr_dir}")
    files = sorted(p for p in hr_dir.iterdir() if p.suffix.lower() == ".png")
    if not files:
        raise EmptyCorpusError(f"no PNG files in {hr_dir}")

    root = Path(out_dir)
    hr_out = root / "HR"
    lr_out = root / f"LRx{spec.scale}"
    hr_out.mkdir(parents=True, exist_ok=True)
    lr_out.mkdir(parents=True, exist_ok=True)

    records: list[SampleRecord] = []
    usable = 0
    for path in files:
        img = imgcore.load_png(path)
        patches = extract_subimages(img, spec.patch_size, spec.stride)
        if not patches:
            log.warning("skipping %s: smaller than patch size %d", path.name, spec.patch_size)
            continue
        usable += 1
        for row, col, patch in patches:
            pid = f"{path.stem}_r{row:05d}_c{col:05d}_x{spec.scale}"
            hr_q = imgcore.quantize(patch)
            lr_q = imgcore.quantize(synthesize_lr(hr_q, spec.scale, spec.antialias))
            hr_rel = f"HR/{pid}.png"
            lr_rel = f"LRx{spec.scale}/{pid}.png"
            imgcore.save_png(root / hr_rel, hr_q)
            imgcore.save_png(root / lr_rel, lr_q)
            records.append(SampleRecord(pid, hr_rel, lr_rel, _content_hash(hr_q, lr_q)))
    if usable == 0:
        raise EmptyCorpusError(f"no image in {hr_dir} is at least {spec.patch_size} px")

    ds = PreparedDataset(spec=spec, root=root, records=records,
                         fingerprint=_fingerprint(spec, records))
    tmp = root / f"index.json.tmp-{os.getpid()}"
    with open(tmp, "w") as f:
        json.dump(_index_doc(ds), f, indent=2)
        f.write("\n")
    os.replace(tmp, root / "index.json")
    return ds


def load_dataset(root) -> PreparedDataset:
    """Reload a prepared dataset from its index file."""
    root = Path(root)
    index = root / "index.json" if root.is_dir() else root
    root = index.parent
    with open(index) as f:
        doc = json.load(f)
    if doc.get("version") != INDEX_VERSION:
        raise ContractError(f"unsupported dataset index version {doc.get('version')}")
    sp = doc["spec"]
    spec = DatasetSpec(
        hr_dir=sp["hr_dir"],
        patch_size=sp["patch_size"],
        stride=sp["stride"],
        scale=sp["scale"],
        antialias=sp["antialias"],
    )
    records = [
        SampleRecord(s["id"], s["hr_path"], s["lr_path"], s["content_hash"])
        for s in doc["samples"]
    ]
    return PreparedDataset(spec=spec, root=root, records=records,
                           fingerprint=doc["fingerprint"])


def load_pairs(ds: PreparedDataset) -> list[SamplePair]:
    """Load every patch pair of a prepared dataset into memory."""
    return [
        SamplePair(
            id=r.id,
            hr=imgcore.load_png(ds.root / r.hr_path),
            lr=imgcore.load_png(ds.root / r.lr_path),
            scale=ds.spec.scale,
        )
        for r in ds.records
    ]


def materialize_coreset(ds: PreparedDataset, m: CoreSetManifest, out_dir) -> int:
    """Copy the selected pairs into ``out_dir``; refuses stale manifests."""
    import shutil

    if m.source_fingerprint != ds.fingerprint:
        raise FingerprintMismatchError(
            f"manifest fingerprint {m.source_fingerprint[:12]}... does not match "
            f"dataset {ds.fingerprint[:12]}..."
        )
    by_id = {r.id: r for r in ds.records}
    missing = [i for i in m.selected if i not in by_id]
    if missing:
        raise ContractError(f"manifest ids not in dataset: {missing[:3]}...")
    out = Path(out_dir)
    (out / "HR").mkdir(parents=True, exist_ok=True)
    (out / f"LRx{ds.spec.scale}").mkdir(parents=True, exist_ok=True)
    written = 0
    for sid in m.selected:
        rec = by_id[sid]
        shutil.copyfile(ds.root / rec.hr_path, out / rec.hr_path)
        shutil.copyfile(ds.root / rec.lr_path, out / rec.lr_path)
        written += 1
    m.save(out / "manifest.json")
    return written
