"""Core-set construction from a score table.

Strategies: keep the lowest scores (ascending), the highest (descending),
the highest after skipping a top fraction (refined), or a uniform random
subset.  The summed-score objective is separable, so sorting is optimal;
ties break by ascending id so every strategy is a pure function of its
inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DegenerateSelectionError
from .scoring import ScoreTable

__all__ = [
    "SelectionSpec",
    "CoreSetManifest",
    "coreset_size",
    "select_ascending",
    "select_descending",
    "select_refined",
    "select_random",
    "cdf_export",
    "write_cdf_csv",
]

MANIFEST_VERSION = 1

STRATEGIES = ("ASC", "DES", "REFINED", "RANDOM")


@dataclass(frozen=True)
class SelectionSpec:
    strategy: str
    r: float
    k: float = 0.0  # REFINED only: top fraction to exclude
    seed: int | None = None  # RANDOM only

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ContractError(f"unknown strategy {self.strategy!r}")
        if not 0.0 < self.r < 1.0:
            raise ContractError(f"r must be in (0, 1), got {self.r}")
        if not 0.0 <= self.k < 1.0:
            raise ContractError(f"k must be in [0, 1), got {self.k}")
        if self.strategy == "REFINED" and self.k + self.r > 1.0:
            raise ContractError(f"k + r must be <= 1, got {self.k} + {self.r}")


@dataclass
class CoreSetManifest:
    """The selected subset: ordered ids plus full provenance."""

    spec: SelectionSpec
    source_fingerprint: str
    scorer: str
    scorer_hash: str
    selected: list[str]

    @property
    def size(self) -> int:
        return len(self.selected)

    def to_json_bytes(self) -> bytes:
        doc = {
            "version": MANIFEST_VERSION,
            "spec": {
                "strategy": self.spec.strategy,
                "r": self.spec.r,
                "k": self.spec.k,
                "seed": self.spec.seed,
            },
            "source_fingerprint": self.source_fingerprint,
            "scorer": self.scorer,
            "scorer_hash": self.scorer_hash,
            "size": self.size,
            "selected": list(self.selected),
        }
        return (json.dumps(doc, indent=2) + "\n").encode()

    def save(self, path) -> None:
        import os

        tmp = f"{path}.tmp-{os.getpid()}"
        with open(tmp, "wb") as f:
            f.write(self.to_json_bytes())
        os.replace(tmp, path)

    @classmethod
    def load(cls, path) -> "CoreSetManifest":
        with open(path) as f:
            doc = json.load(f)
        if doc.get("version") != MANIFEST_VERSION:
            raise ContractError(f"unsupported manifest version {doc.get('version')}")
        sp = doc["spec"]
        return cls(
            spec=SelectionSpec(
                strategy=sp["strategy"], r=sp["r"], k=sp.get("k", 0.0), seed=sp.get("seed")
            ),
            source_fingerprint=doc["source_fingerprint"],
            scorer=doc["scorer"],
            scorer_hash=doc["scorer_hash"],
            selected=list(doc["selected"]),
        )


def coreset_size(n: int, r: float) -> int:
    """floor(r * n), rejecting empty selections."""
    if n < 1:
        raise ContractError(f"n must be >= 1, got {n}")
    if not 0.0 < r < 1.0:
        raise ContractError(f"r must be in (0, 1), got {r}")
    size = math.floor(r * n)
    if size == 0:
        raise DegenerateSelectionError(f"floor({r} * {n}) = 0 samples")
    return size


def exclusion_count(n: int, k: float) -> int:
    """ceil(k * n): how many top-ranked samples a refined selection skips."""
    return math.ceil(k * n)


def _sorted_ids(t: ScoreTable, descending: bool) -> list[str]:
    key = (lambda e: (-e[1], e[0])) if descending else (lambda e: (e[1], e[0]))
    return [i for i, _ in sorted(t.entries, key=key)]


def _manifest(t: ScoreTable, spec: SelectionSpec, ids: list[str]) -> CoreSetManifest:
    return CoreSetManifest(
        spec=spec,
        source_fingerprint=t.fingerprint,
        scorer=t.scorer,
        scorer_hash=t.scorer_hash,
        selected=ids,
    )


def select_descending(t: ScoreTable, r: float) -> CoreSetManifest:
    """Keep the floor(r*N) highest-scoring samples (hard samples)."""
    size = coreset_size(len(t.entries), r)
    return _manifest(t, SelectionSpec("DES", r), _sorted_ids(t, True)[:size])


def select_ascending(t: ScoreTable, r: float) -> CoreSetManifest:
    """Keep the floor(r*N) lowest-scoring samples (easy samples)."""
    size = coreset_size(len(t.entries), r)
    return _manifest(t, SelectionSpec("ASC", r), _sorted_ids(t, False)[:size])


def select_refined(t: ScoreTable, r: float, k: float = 0.05) -> CoreSetManifest:
    """Descending selection that first skips the top ceil(k*N) samples."""
    spec = SelectionSpec("REFINED", r, k=k)
    n = len(t.entries)
    size = coreset_size(n, r)
    skip = exclusion_count(n, k)
    return _manifest(t, spec, _sorted_ids(t, True)[skip : skip + size])


def select_random(t: ScoreTable, r: float, seed: int) -> CoreSetManifest:
    """Uniform sample without replacement, deterministic from seed."""
    spec = SelectionSpec("RANDOM", r, seed=seed)
    size = coreset_size(len(t.entries), r)
    ids = [i for i, _ in t.entries]
    rng = np.random.default_rng(seed)
    picked = [ids[j] for j in rng.permutation(len(ids))[:size]]
    return _manifest(t, spec, picked)


def cdf_export(t: ScoreTable) -> list[tuple[float, float]]:
    """Sorted cumulative score distribution.

    Scores are sorted descending; each point is (rank/N, running sum / total).
    The final point is exactly (1.0, 1.0).
    """
    if not t.entries:
        raise ContractError("empty score table")
    scores = np.sort(np.array([s for _, s in t.entries]))[::-1]
    total = float(scores.sum())
    if total <= 0.0:
        raise DegenerateSelectionError("all scores are zero; distribution is degenerate")
    n = len(scores)
    cum = np.cumsum(scores) / total
    cum[-1] = 1.0  # pin against rounding drift
    return [((i + 1) / n, float(c)) for i, c in enumerate(cum)]


def write_cdf_csv(t: ScoreTable, path) -> None:
    import os

    rows = cdf_export(t)
    tmp = f"{path}.tmp-{os.getpid()}"
    with open(tmp, "w") as f:
        f.write("rank_fraction,cumulative_loss_fraction\n")
        for x, y in rows:
            f.write(f"{x:.17g},{y:.17g}\n")
    os.replace(tmp, path)
