"""Command-line entry point wiring the stages end to end.

Exit codes: 0 success, 1 typed error (message on stderr), 2 usage error.
Every stage handoff is fingerprint-checked so tables and manifests can
never be applied to a corpus they were not computed on.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from pathlib import Path

from . import imgcore, pipeline, scoring, selection, srcnn, toytrain
from .errors import (
    ContractError,
    DegenerateSelectionError,
    EmptyCorpusError,
    FingerprintMismatchError,
    ImageIOError,
    TrainingDivergedError,
    WeightsFormatError,
)

log = logging.getLogger("srprune")

_TYPED_ERRORS = (
    ContractError,
    DegenerateSelectionError,
    EmptyCorpusError,
    FingerprintMismatchError,
    ImageIOError,
    TrainingDivergedError,
    WeightsFormatError,
    FileNotFoundError,
    NotADirectoryError,
)


def _dataset_pairs(index_path):
    ds = pipeline.load_dataset(index_path)
    return ds, pipeline.load_pairs(ds)


def cmd_prepare(args) -> int:
    spec = pipeline.DatasetSpec(
        hr_dir=args.hr_dir,
        patch_size=args.patch,
        stride=args.stride,
        scale=args.scale,
        antialias=not args.no_antialias,
    )
    ds = pipeline.prepare(spec, args.out)
    print(f"fingerprint {ds.fingerprint}")
    print(f"samples {len(ds)}")
    return 0


def cmd_train_scorer(args) -> int:
    ds, _ = _dataset_pairs(args.dataset)
    pairs = toytrain._training_pairs(ds)
    w0 = srcnn.init_weights(args.seed, n1=args.n1, n2=args.n2, std=args.init_std)
    cfg = srcnn.TrainConfig(
        learning_rate=args.lr,
        batch_size=args.batch,
        steps=args.steps,
        seed=args.seed,
        init_std=args.init_std,
    )
    w, trace = srcnn.train(w0, pairs, cfg)
    srcnn.save_weights(w, args.out_weights)
    first = trace[0] if trace else float("nan")
    last = trace[-1] if trace else float("nan")
    print(f"trained {args.steps} steps, loss {first:.6g} -> {last:.6g}")
    print(f"weights_hash {srcnn.weights_hash(w)}")
    return 0


def cmd_score(args) -> int:
    ds, pairs = _dataset_pairs(args.dataset)
    if args.sobel:
        table = scoring.score_dataset_sobel(
            pairs, workers=args.workers, fingerprint=ds.fingerprint
        )
    else:
        if not args.weights:
            raise ContractError("either --weights or --sobel is required")
        w = srcnn.load_weights(args.weights)
        table = scoring.score_dataset(
            w, pairs, workers=args.workers, fingerprint=ds.fingerprint
        )
    table.save(args.out_table)
    print(f"scored {len(table.entries)} samples with {table.scorer}")
    return 0


def cmd_select(args) -> int:
    table = scoring.ScoreTable.load(args.table)
    strategy = args.strategy.upper()
    if strategy == "ASC":
        manifest = selection.select_ascending(table, args.r)
    elif strategy == "DES":
        manifest = selection.select_descending(table, args.r)
    elif strategy == "REFINED":
        manifest = selection.select_refined(table, args.r, args.k)
    elif strategy == "RANDOM":
        manifest = selection.select_random(table, args.r, args.seed)
    else:
        raise ContractError(f"unknown strategy {args.strategy!r}")
    manifest.save(args.out_manifest)
    print(f"selected {manifest.size} of {len(table.entries)} samples ({strategy})")
    return 0


def cmd_stats(args) -> int:
    table = scoring.ScoreTable.load(args.table)
    selection.write_cdf_csv(table, args.out_csv)
    print(f"wrote CDF for {len(table.entries)} samples to {args.out_csv}")
    return 0


def cmd_eval(args) -> int:
    ref_dir, test_dir = Path(args.ref_dir), Path(args.test_dir)
    names = sorted(p.name for p in ref_dir.iterdir() if p.suffix.lower() == ".png")
    if not names:
        raise EmptyCorpusError(f"no PNG files in {ref_dir}")
    psnrs, ssims = [], []
    for name in names:
        ref = imgcore.load_png(ref_dir / name)
        test = imgcore.load_png(test_dir / name)
        ref_y = imgcore.rgb_to_y(ref) if ref.ndim == 3 else ref
        test_y = imgcore.rgb_to_y(test) if test.ndim == 3 else test
        p = imgcore.psnr(ref_y, test_y, border_crop=args.scale)
        s = imgcore.ssim(ref_y, test_y, border_crop=args.scale)
        psnrs.append(p)
        ssims.append(s)
        print(f"{name}  PSNR {'inf' if math.isinf(p) else f'{p:.4f}'}  SSIM {s:.4f}")
    mean_p = sum(psnrs) / len(psnrs)
    mean_s = sum(ssims) / len(ssims)
    print(f"mean  PSNR {'inf' if math.isinf(mean_p) else f'{mean_p:.4f}'}  SSIM {mean_s:.4f}")
    return 0


def cmd_toy(args) -> int:
    with open(args.plan_file) as f:
        doc = json.load(f)
    ds = pipeline.load_dataset(doc["dataset"])
    arms = []
    for a in doc["arms"]:
        manifest = None
        if a.get("manifest"):
            manifest = selection.CoreSetManifest.load(a["manifest"])
        arms.append(toytrain.Arm(label=a["label"], manifest=manifest, steps=a.get("steps")))
    plan = toytrain.ExperimentPlan(
        dataset=ds,
        arms=arms,
        eval_dir=doc["eval_dir"],
        steps=doc.get("steps", 2000),
        batch_size=doc.get("batch_size", 8),
        learning_rate=doc.get("learning_rate", 0.1),
        seed=doc.get("seed", 0),
        n1=doc.get("n1", 8),
        n2=doc.get("n2", 4),
        init_std=doc.get("init_std", 0.1),
    )
    report = toytrain.run_experiment(plan)
    report.save_json(args.out_report)
    report.save_csv(str(args.out_report) + ".csv")
    for a in report.arms:
        print(f"{a.label}: PSNR {a.psnr:.4f}  SSIM {a.ssim:.4f}  steps {a.steps}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="srprune",
        description="Loss-value-based dataset pruning for image super-resolution",
    )
    parser.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--log-level", default="INFO")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="extract patch pairs from an HR image directory")
    p.add_argument("--hr-dir", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--patch", type=int, default=480)
    p.add_argument("--stride", type=int, default=240)
    p.add_argument("--scale", type=int, default=2)
    p.add_argument("--no-antialias", action="store_true")
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("train-scorer", help="train the scoring network on a prepared dataset")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out-weights", required=True)
    p.add_argument("--steps", type=int, default=500)
    p.add_argument("--lr", type=float, default=0.1)
    p.add_argument("--batch", type=int, default=8)
    p.add_argument("--n1", type=int, default=64)
    p.add_argument("--n2", type=int, default=32)
    p.add_argument("--init-std", type=float, default=0.001)
    p.set_defaults(func=cmd_train_scorer)

    p = sub.add_parser("score", help="compute per-sample scores")
    p.add_argument("--dataset", required=True)
    p.add_argument("--weights")
    p.add_argument("--sobel", action="store_true")
    p.add_argument("--out-table", required=True)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("select", help="build a core-set manifest from a score table")
    p.add_argument("--table", required=True)
    p.add_argument("--strategy", required=True, choices=["asc", "des", "refined", "random"])
    p.add_argument("--r", type=float, required=True)
    p.add_argument("--k", type=float, default=0.05)
    p.add_argument("--out-manifest", required=True)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("stats", help="export the sorted cumulative score distribution")
    p.add_argument("--table", required=True)
    p.add_argument("--out-csv", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("eval", help="PSNR/SSIM between two directories of images")
    p.add_argument("--ref-dir", required=True)
    p.add_argument("--test-dir", required=True)
    p.add_argument("--scale", type=int, default=2)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("toy", help="run a matched-steps pruning experiment from a plan file")
    p.add_argument("--plan-file", required=True)
    p.add_argument("--out-report", required=True)
    p.set_defaults(func=cmd_toy)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level.upper(), logging.INFO))
    log.info("resolved args: %s", {k: v for k, v in vars(args).items() if k != "func"})
    try:
        return args.func(args)
    except _TYPED_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
