"""Desk-scale verification harness.

Trains the same small network on the full dataset and on pruned subsets at
matched optimizer step counts, then reports PSNR/SSIM on a held-out set.
Every arm starts from an identical init and uses the same seed, so the only
varying factor is which samples the arm may draw from.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import imgcore
from .errors import ContractError, FingerprintMismatchError
from .pipeline import PreparedDataset, load_pairs, synthesize_lr
from .selection import CoreSetManifest
from .srcnn import TrainConfig, init_weights, srcnn_forward, train

__all__ = [
    "Arm",
    "ExperimentPlan",
    "ArmResult",
    "ExperimentReport",
    "run_experiment",
    "compare_report",
]


@dataclass(frozen=True)
class Arm:
    """One training condition: a manifest (or None for the full set) and an
    optional step-count override for step-budget ablations."""

    label: str
    manifest: CoreSetManifest | None = None
    steps: int | None = None


@dataclass
class ExperimentPlan:
    dataset: PreparedDataset
    arms: list[Arm]
    eval_dir: str
    steps: int = 2000
    batch_size: int = 8
    learning_rate: float = 0.1
    seed: int = 0
    n1: int = 8
    n2: int = 4
    init_std: float = 0.1

    def __post_init__(self):
        labels = [a.label for a in self.arms]
        if len(set(labels)) != len(labels):
            raise ContractError("arm labels must be unique")
        if not self.arms:
            raise ContractError("plan needs at least one arm")


@dataclass
class ArmResult:
    label: str
    steps: int
    train_size: int
    psnr: float
    ssim: float
    initial_loss: float
    final_loss: float
    manifest_hash: str


@dataclass
class ExperimentReport:
    dataset_fingerprint: str
    seed: int
    model: dict
    arms: list[ArmResult]

    def arm(self, label: str) -> ArmResult:
        for a in self.arms:
            if a.label == label:
                return a
        raise ContractError(f"unknown arm label {label!r}")

    def to_json_bytes(self) -> bytes:
        doc = {
            "dataset_fingerprint": self.dataset_fingerprint,
            "seed": self.seed,
            "model": self.model,
            "arms": [
                {
                    "label": a.label,
                    "steps": a.steps,
                    "train_size": a.train_size,
                    "psnr": a.psnr,
                    "ssim": a.ssim,
                    "initial_loss": a.initial_loss,
                    "final_loss": a.final_loss,
                    "manifest_hash": a.manifest_hash,
                }
                for a in self.arms
            ],
        }
        return (json.dumps(doc, indent=2) + "\n").encode()

    def save_json(self, path) -> None:
        tmp = f"{path}.tmp-{os.getpid()}"
        with open(tmp, "wb") as f:
            f.write(self.to_json_bytes())
        os.replace(tmp, path)

    def save_csv(self, path) -> None:
        tmp = f"{path}.tmp-{os.getpid()}"
        with open(tmp, "w") as f:
            f.write("arm,psnr,ssim,steps,manifest_hash\n")
            for a in self.arms:
                f.write(f"{a.label},{a.psnr:.17g},{a.ssim:.17g},{a.steps},{a.manifest_hash}\n")
        os.replace(tmp, path)


def _training_pairs(ds: PreparedDataset):
    """(pre-upscaled LR luminance, HR luminance) pairs in dataset order."""
    up_spec = imgcore.ResampleSpec(Fraction(ds.spec.scale), antialias=False)
    pairs = []
    for s in load_pairs(ds):
        hr_y = imgcore.rgb_to_y(s.hr) if s.hr.ndim == 3 else s.hr
        lr_y = imgcore.rgb_to_y(s.lr) if s.lr.ndim == 3 else s.lr
        pairs.append((imgcore.bicubic_resize(lr_y, up_spec), hr_y))
    return pairs


def _eval_set(eval_dir, scale: int, antialias: bool):
    files = sorted(p for p in Path(eval_dir).iterdir() if p.suffix.lower() == ".png")
    if not files:
        raise ContractError(f"no PNG images in eval dir {eval_dir}")
    up_spec = imgcore.ResampleSpec(Fraction(scale), antialias=False)
    items = []
    for path in files:
        img = imgcore.load_png(path)
        h, w = img.shape[:2]
        img = img[: h - h % scale, : w - w % scale]
        y = imgcore.rgb_to_y(img) if img.ndim == 3 else img
        lr = synthesize_lr(y, scale, antialias)
        items.append((y, imgcore.bicubic_resize(lr, up_spec)))
    return items


def _evaluate(w, eval_items, scale: int):
    psnrs, ssims = [], []
    for hr_y, up in eval_items:
        pred = srcnn_forward(w, up, clamp=True)
        psnrs.append(imgcore.psnr(hr_y, pred, border_crop=scale))
        ssims.append(imgcore.ssim(hr_y, pred, border_crop=scale))
    return float(np.mean(psnrs)), float(np.mean(ssims))


def run_experiment(plan: ExperimentPlan) -> ExperimentReport:
    """Train every arm from the same init and evaluate on the held-out set."""
    ds = plan.dataset
    all_pairs = _training_pairs(ds)
    ids = [r.id for r in ds.records]
    eval_items = _eval_set(plan.eval_dir, ds.spec.scale, ds.spec.antialias)
    w0 = init_weights(plan.seed, n1=plan.n1, n2=plan.n2, std=plan.init_std)

    results = []
    for arm in plan.arms:
        if arm.manifest is None:
            pairs = all_pairs
            manifest_hash = "-"
        else:
            if arm.manifest.source_fingerprint != ds.fingerprint:
                raise FingerprintMismatchError(
                    f"arm {arm.label!r}: manifest does not match the plan's dataset"
                )
            keep = set(arm.manifest.selected)
            pairs = [p for i, p in zip(ids, all_pairs) if i in keep]
            manifest_hash = hashlib.sha256(arm.manifest.to_json_bytes()).hexdigest()
        if not pairs:
            raise ContractError(f"arm {arm.label!r} has no training samples")
        steps = plan.steps if arm.steps is None else arm.steps
        cfg = TrainConfig(
            learning_rate=plan.learning_rate,
            batch_size=plan.batch_size,
            steps=steps,
            seed=plan.seed,
            init_std=plan.init_std,
        )
        w, trace = train(w0, pairs, cfg)
        p, s = _evaluate(w, eval_items, ds.spec.scale)
        results.append(
            ArmResult(
                label=arm.label,
                steps=steps,
                train_size=len(pairs),
                psnr=p,
                ssim=s,
                initial_loss=trace[0] if trace else float("nan"),
                final_loss=trace[-1] if trace else float("nan"),
                manifest_hash=manifest_hash,
            )
        )
    return ExperimentReport(
        dataset_fingerprint=ds.fingerprint,
        seed=plan.seed,
        model={"n1": plan.n1, "n2": plan.n2, "init_std": plan.init_std,
               "learning_rate": plan.learning_rate, "batch_size": plan.batch_size},
        arms=results,
    )


def compare_report(report: ExperimentReport, hypotheses):
    """Check ordering constraints PSNR(a) >= PSNR(b) - delta.

    ``hypotheses`` is a sequence of (label_a, label_b, delta) triples;
    returns a list of (description, passed) pairs.
    """
    out = []
    for label_a, label_b, delta in hypotheses:
        pa = report.arm(label_a).psnr
        pb = report.arm(label_b).psnr
        passed = pa >= pb - delta
        out.append((f"PSNR({label_a}) >= PSNR({label_b}) - {delta}", passed))
    return out
