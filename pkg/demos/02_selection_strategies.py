"""Walkthrough: the four selection strategies and the score distribution.

Builds a score table with a deliberately long-tailed difficulty spread,
selects 50% core-sets with each strategy, and exports the sorted cumulative
score curve — the shape that motivates pruning in the first place: a small
fraction of the samples carries most of the total loss.

Run from the repository root:  python3 demos/02_selection_strategies.py
"""

import tempfile
from pathlib import Path

import numpy as np

from srprune import selection
from srprune.scoring import ScoreTable

rng = np.random.default_rng(0)

# A lognormal score spread: many easy samples, a heavy hard tail.
n = 40
scores = np.sort(rng.lognormal(mean=-3.0, sigma=1.2, size=n))
table = ScoreTable(
    fingerprint="demo",
    scorer="srcnn-mse",
    scorer_hash="-",
    scale=2,
    entries=[(f"patch_{i:03d}", float(s)) for i, s in enumerate(scores)],
)

strategies = {
    "DES (keep hardest)": selection.select_descending(table, 0.5),
    "ASC (keep easiest)": selection.select_ascending(table, 0.5),
    "REFINED (skip top 5%)": selection.select_refined(table, 0.5, k=0.05),
    "RANDOM (seed 0)": selection.select_random(table, 0.5, seed=0),
}

lookup = table.scores()
print(f"{'strategy':<24}{'size':>5}{'mean score':>12}  first ids")
for name, manifest in strategies.items():
    mean = np.mean([lookup[i] for i in manifest.selected])
    head = ", ".join(manifest.selected[:3])
    print(f"{name:<24}{manifest.size:>5}{mean:>12.5f}  {head}, ...")

# The refined set drops the very hardest samples before keeping the rest.
des = strategies["DES (keep hardest)"].selected
ref = strategies["REFINED (skip top 5%)"].selected
print(f"\nexcluded by REFINED but kept by DES: {sorted(set(des) - set(ref))}")

# Cumulative curve: what fraction of total loss the top-x% of samples holds.
rows = selection.cdf_export(table)
for frac in (0.1, 0.25, 0.5):
    idx = int(frac * n) - 1
    print(f"top {frac:>4.0%} of samples carry {rows[idx][1]:.1%} of total loss")

out = Path(tempfile.mkdtemp(prefix="srprune-demo2-")) / "cdf.csv"
selection.write_cdf_csv(table, out)
print(f"\nfull curve written to {out}")
