"""Walkthrough: does training on half the data hurt?

Runs the desk-scale experiment end to end: score a corpus, build 50%
core-sets with each strategy, train the same small network on each subset
for the same number of optimizer steps, and compare held-out PSNR.

With matched steps, keeping the hardest half (DES) tracks full-data
training closely, keeping the easiest half (ASC) falls far behind, and the
refined set (which drops the most extreme 5% first) is competitive with or
better than DES.  This takes a few minutes.

Run from the repository root:  python3 demos/03_pruning_experiment.py
"""

import tempfile
import time
from pathlib import Path

from srprune import deskdata, pipeline, scoring, selection, srcnn, toytrain

work = Path(tempfile.mkdtemp(prefix="srprune-demo3-"))
t0 = time.monotonic()

# Training corpus with a 4.5% admixture of binary-noise tiles (corrupted
# captures); clean held-out images for evaluation.
deskdata.generate_corpus(work / "hr", n_images=20, size=144, tile=24, seed=0,
                         noise_frac=0.045)
deskdata.generate_corpus(work / "eval", n_images=4, size=96, tile=24, seed=999)

spec = pipeline.DatasetSpec(hr_dir=str(work / "hr"), patch_size=24, stride=24, scale=2)
ds = pipeline.prepare(spec, work / "dataset")
print(f"prepared {len(ds)} patch pairs")

w0 = srcnn.init_weights(seed=7, n1=8, n2=4, std=0.1)
cfg = srcnn.TrainConfig(learning_rate=0.1, batch_size=8, steps=600, seed=7, init_std=0.1)
scorer, _ = srcnn.train(w0, toytrain._training_pairs(ds), cfg)
table = scoring.score_dataset(scorer, pipeline.load_pairs(ds), workers=4,
                              fingerprint=ds.fingerprint)
print("scorer trained and dataset scored")

des = selection.select_descending(table, 0.5)
plan = toytrain.ExperimentPlan(
    dataset=ds,
    arms=[
        toytrain.Arm("full"),
        toytrain.Arm("des50", des),
        toytrain.Arm("asc50", selection.select_ascending(table, 0.5)),
        toytrain.Arm("ref50", selection.select_refined(table, 0.5, k=0.05)),
        toytrain.Arm("rand50", selection.select_random(table, 0.5, seed=11)),
        toytrain.Arm("des50-halfsteps", des, steps=1000),
    ],
    eval_dir=str(work / "eval"),
    steps=2000,
    seed=7,
)
report = toytrain.run_experiment(plan)

print(f"\n{'arm':<18}{'train size':>11}{'steps':>7}{'PSNR (dB)':>11}{'SSIM':>8}")
for a in report.arms:
    print(f"{a.label:<18}{a.train_size:>11}{a.steps:>7}{a.psnr:>11.3f}{a.ssim:>8.4f}")

checks = toytrain.compare_report(report, [
    ("des50", "asc50", 0.0),
    ("des50", "rand50", 0.05),
    ("des50", "des50-halfsteps", 0.05),
    ("ref50", "des50", 0.1),
])
print()
for desc, passed in checks:
    print(f"{'ok ' if passed else 'NOT'} {desc}")

report.save_json(work / "report.json")
print(f"\nreport written to {work / 'report.json'}  "
      f"({time.monotonic() - t0:.0f}s total)")
