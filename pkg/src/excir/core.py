"""Correlation Impact Ratio scores for features, feature sets and classes.

After centering, every sample contributes a signed co-movement term
``p = x_tilde * y_tilde`` and its magnitude ``|p|``. Per feature (or per
feature set, summing member terms per sample first) the signed sum ``N`` and
the mass ``D`` give ``CIR = (1 + N / D) / 2``, or exactly 0.5 when ``D == 0``.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ._backend import accumulate as _accumulate_kernel
from ._pykernels import BLOCK
from .centering import DEFAULT_SPEC, CenteredData, center_table, column_centers, robust_center
from .data import CenteringSpec, DataTable, GroupFamily, check_weights
from .errors import InvalidGroup, InvalidInput

_NO_GROUPS = (np.zeros(1, dtype=np.intp), np.zeros(0, dtype=np.intp))


@dataclass(frozen=True)
class Accumulator:
    """Additive (N, D) sums, one slot per feature and/or group."""

    N: np.ndarray
    D: np.ndarray
    rows: int = 0

    @classmethod
    def zeros(cls, size: int) -> "Accumulator":
        return cls(np.zeros(size), np.zeros(size), 0)

    @classmethod
    def from_terms(cls, p, u, weights=None) -> "Accumulator":
        """Build from explicit per-sample terms, shape (n,) or (n, slots)."""
        p = np.asarray(p, dtype=np.float64)
        u = np.asarray(u, dtype=np.float64)
        if p.ndim == 1:
            p, u = p[:, None], u[:, None]
        if weights is not None:
            w = np.asarray(weights, dtype=np.float64)[:, None]
            p, u = w * p, w * u
        return cls(p.sum(axis=0), u.sum(axis=0), p.shape[0])

    def __add__(self, other: "Accumulator") -> "Accumulator":
        return merge_accumulators(self, other)

    def __len__(self) -> int:
        return self.N.shape[0]

    def ratio(self) -> np.ndarray:
        """N / D clipped to [-1, 1]; 0 where D == 0."""
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(self.D > 0, self.N / self.D, 0.0)
        return np.clip(r, -1.0, 1.0)

    def neutral(self) -> np.ndarray:
        return ~(self.D > 0)

    def scores(self) -> np.ndarray:
        return np.where(self.neutral(), 0.5, 0.5 * (1.0 + self.ratio()))


def merge_accumulators(a: Accumulator, b: Accumulator) -> Accumulator:
    """Componentwise sum of two accumulators built against the same centers."""
    if a.N.shape != b.N.shape:
        raise InvalidInput(f"cannot merge accumulators of sizes {len(a)} and {len(b)}")
    return Accumulator(a.N + b.N, a.D + b.D, a.rows + b.rows)


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else ``EXCIR_THREADS``; 0 means all cores."""
    if threads is None:
        raw = os.environ.get("EXCIR_THREADS", "").strip()
        threads = int(raw) if raw else 1
    if threads < 0:
        raise InvalidInput("thread count must be >= 0")
    if threads == 0:
        threads = os.cpu_count() or 1
    return threads


def shard_bounds(n: int, shards: int) -> list[tuple[int, int]]:
    """Split ``[0, n)`` into up to ``shards`` contiguous, block-aligned ranges."""
    nblocks = -(-n // BLOCK)
    shards = max(1, min(shards, nblocks))
    per = -(-nblocks // shards)
    bounds = []
    for s in range(shards):
        lo, hi = s * per * BLOCK, min((s + 1) * per * BLOCK, n)
        if lo < hi:
            bounds.append((lo, hi))
    return bounds or [(0, n)]


def accumulate(X, y, centers_x, center_y: float, groups: GroupFamily | None = None,
               weights=None, *, with_features: bool = True, shards: int = 1,
               threads: int | None = 1) -> Accumulator:
    """One scan over the rows of ``X`` producing per-feature then per-group sums.

    Rows are split into ``shards`` contiguous ranges whose accumulators are
    merged in order, so a given shard count is deterministic. ``threads``
    bounds how many shards run concurrently.
    """
    X = np.ascontiguousarray(X, dtype=np.float64)
    y = np.ascontiguousarray(y, dtype=np.float64)
    cx = np.ascontiguousarray(centers_x, dtype=np.float64)
    n, d = X.shape
    if y.shape != (n,) or cx.shape != (d,):
        raise InvalidInput("shape mismatch between features, output and centers")
    w = check_weights(weights, n)
    if groups is not None and len(groups):
        groups.validate(d)
        gptr, gidx = groups.csr()
    else:
        gptr, gidx = _NO_GROUPS
    cy = float(center_y)

    def run(bounds):
        lo, hi = bounds
        N, D = _accumulate_kernel(X, cx, y, cy, w, gptr, gidx, with_features, lo, hi)
        return Accumulator(N, D, hi - lo)

    parts = shard_bounds(n, shards)
    workers = min(resolve_threads(threads), len(parts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            accs = list(pool.map(run, parts))
    else:
        accs = [run(b) for b in parts]
    total = accs[0]
    for acc in accs[1:]:
        total = merge_accumulators(total, acc)
    return total


@dataclass(frozen=True)
class Score:
    name: str
    cir: float
    ratio_nd: float
    neutral: bool
    N: float = 0.0
    D: float = 0.0


@dataclass(frozen=True)
class ScoreReport:
    features: tuple[Score, ...]
    groups: tuple[Score, ...] = ()
    centering: CenteringSpec = field(default_factory=CenteringSpec)
    rows_used: int = 0
    class_label: str | None = None
    weighted: bool = False

    @property
    def per_feature(self) -> dict[str, float]:
        return {s.name: s.cir for s in self.features}

    @property
    def per_group(self) -> dict[str, float]:
        return {s.name: s.cir for s in self.groups}

    @property
    def feature_scores(self) -> np.ndarray:
        """Scores in column order."""
        return np.array([s.cir for s in self.features])

    @property
    def group_scores(self) -> np.ndarray:
        return np.array([s.cir for s in self.groups])

    @property
    def ranks(self) -> list[str]:
        """Feature names by descending score, ties broken by ascending name."""
        return [s.name for s in sorted(self.features, key=lambda s: (-s.cir, s.name))]

    def ranked_groups(self) -> list[str]:
        return [s.name for s in sorted(self.groups, key=lambda s: (-s.cir, s.name))]


def _scores(names: Sequence[str], acc: Accumulator, lo: int, hi: int) -> tuple[Score, ...]:
    cir = acc.scores()
    ratio = acc.ratio()
    neutral = acc.neutral()
    return tuple(
        Score(names[k - lo], float(cir[k]), float(ratio[k]), bool(neutral[k]),
              float(acc.N[k]), float(acc.D[k]))
        for k in range(lo, hi)
    )


def scores_from_centered(centered: CenteredData, groups: GroupFamily | None = None,
                         weights=None, *, with_features: bool = True,
                         threads: int | None = None, class_label: str | None = None
                         ) -> ScoreReport:
    table = centered.table
    y = table.output(centered.output_name)
    nthreads = resolve_threads(threads)
    acc = accumulate(table.X, y, centered.centers_x, centered.center_y, groups, weights,
                     with_features=with_features, shards=nthreads, threads=nthreads)
    off = table.d if with_features else 0
    feats = _scores(table.feature_names, acc, 0, off) if with_features else ()
    grps = _scores(groups.names, acc, off, len(acc)) if groups is not None and len(groups) else ()
    return ScoreReport(feats, grps, centered.spec, table.n, class_label, weights is not None)


def _check_groups(table: DataTable, groups: GroupFamily | None) -> None:
    if groups is not None:
        groups.validate(table.d)


def cir_scores(table: DataTable, output_name: str, groups: GroupFamily | None = None,
               spec: CenteringSpec = DEFAULT_SPEC, weights=None, *,
               threads: int | None = None) -> ScoreReport:
    """Per-feature scores, plus per-group scores when ``groups`` is given."""
    _check_groups(table, groups)
    w = check_weights(weights, table.n)
    centered = center_table(table, output_name, spec)
    return scores_from_centered(centered, groups, w, threads=threads)


def block_cir(table: DataTable, output_name: str, groups: GroupFamily,
              spec: CenteringSpec = DEFAULT_SPEC, weights=None, *,
              threads: int | None = None) -> ScoreReport:
    """Scores for feature sets only."""
    if groups is None or not len(groups):
        raise InvalidGroup("block scores need at least one group")
    _check_groups(table, groups)
    w = check_weights(weights, table.n)
    centered = center_table(table, output_name, spec)
    return scores_from_centered(centered, groups, w, with_features=False, threads=threads)


def class_conditioned_cir(table: DataTable, class_columns: Sequence[str],
                          groups: GroupFamily | None = None,
                          spec: CenteringSpec = DEFAULT_SPEC, weights=None, *,
                          threads: int | None = None) -> list[ScoreReport]:
    """One report per class score column (logits or margins)."""
    if not class_columns:
        raise InvalidInput("at least one class column is required")
    _check_groups(table, groups)
    w = check_weights(weights, table.n)
    for c in class_columns:
        table.output(c)
    feature_centers = column_centers(table.X, spec)
    reports = []
    for c in class_columns:
        centered = CenteredData(table, c, feature_centers,
                                robust_center(table.output(c), spec), spec)
        reports.append(scores_from_centered(centered, groups, w, threads=threads,
                                            class_label=c))
    return reports
