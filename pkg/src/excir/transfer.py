"""Lightweight transfer: rescore seeded row subsamples and compare to the full run."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from .agreement import AgreementReport, agreement
from .centering import DEFAULT_SPEC
from .core import ScoreReport, cir_scores
from .data import CenteringSpec, DataTable, GroupFamily
from .errors import InvalidFraction, InvalidInput

DEFAULT_FRACTIONS = (0.2, 0.3, 0.4, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class TransferConfig:
    fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    seed: int = 0
    k: int = 8
    repeats: int = 1

    def __post_init__(self):
        fr = sorted({float(f) for f in self.fractions} | {1.0})
        for f in fr:
            if not 0.0 < f <= 1.0:
                raise InvalidFraction(f"fraction {f} outside (0, 1]")
        if self.repeats < 1:
            raise InvalidInput("repeats must be >= 1")
        if self.k < 1:
            raise InvalidInput("k must be >= 1")
        if self.seed < 0:
            raise InvalidInput("seed must be a nonnegative integer")
        object.__setattr__(self, "fractions", tuple(fr))


def subsample_rows(n: int, f: float, seed) -> np.ndarray:
    """``max(1, round(f * n))`` distinct row indices, sorted, drawn without replacement."""
    if not 0.0 < f <= 1.0:
        raise InvalidFraction(f"fraction {f} outside (0, 1]")
    if n < 1:
        raise InvalidInput("cannot subsample an empty table")
    size = max(1, int(round(f * n)))
    if size >= n:
        return np.arange(n)
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=size, replace=False))


def _draw_seed(seed: int, fraction: float, repeat: int) -> np.random.SeedSequence:
    # independent stream per (fraction, repeat); subsets are not nested across fractions
    return np.random.SeedSequence([seed, repeat, int(round(fraction * 1_000_000))])


@dataclass(frozen=True)
class TransferRecord:
    fraction: float
    repeat: int
    rows: int
    seconds: float
    agreement: AgreementReport
    report: ScoreReport


@dataclass(frozen=True)
class TransferCurve:
    records: tuple[TransferRecord, ...]
    reference: ScoreReport | None = None
    config: TransferConfig = field(default_factory=TransferConfig)

    @property
    def fractions(self) -> list[float]:
        return sorted({r.fraction for r in self.records})

    def median_jaccard(self) -> dict[float, float]:
        out = {}
        for f in self.fractions:
            out[f] = float(np.median([r.agreement.jaccard_at_k for r in self.records
                                      if r.fraction == f]))
        return out

    def median_seconds(self) -> dict[float, float]:
        return {f: float(np.median([r.seconds for r in self.records if r.fraction == f]))
                for f in self.fractions}


class Knee(NamedTuple):
    fraction: float
    no_knee: bool


def pareto_knee(curve: TransferCurve, target_jaccard: float) -> Knee:
    """Smallest fraction whose median Jaccard@k reaches the target."""
    if not curve.records:
        raise InvalidInput("empty transfer curve")
    for f, jac in curve.median_jaccard().items():
        if jac >= target_jaccard:
            return Knee(f, False)
    return Knee(1.0, True)


def _timed_scores(table, output_name, groups, spec):
    t0 = time.perf_counter()
    report = cir_scores(table, output_name, groups, spec, threads=1)
    return report, time.perf_counter() - t0


def run_transfer(table: DataTable, output_name: str, groups: GroupFamily | None = None,
                 spec: CenteringSpec = DEFAULT_SPEC,
                 config: TransferConfig = TransferConfig()) -> TransferCurve:
    """Score every (fraction, repeat) subsample and compare with the full-data run.

    Centers are recomputed on each subsample. Runs execute one at a time so
    the recorded times are not perturbed by each other.
    """
    table.output(output_name)
    k = min(config.k, table.d)
    reference, ref_seconds = _timed_scores(table, output_name, groups, spec)
    ref_scores = reference.feature_scores
    records = []
    for f in config.fractions:
        for rep in range(config.repeats):
            rows = subsample_rows(table.n, f, _draw_seed(config.seed, f, rep))
            if rows.size == table.n:
                report, secs = (reference, ref_seconds) if rep == 0 else \
                    _timed_scores(table, output_name, groups, spec)
            else:
                sub = table.take(rows)
                report, secs = _timed_scores(sub, output_name, groups, spec)
            agree = agreement(report.feature_scores, ref_scores, k)
            records.append(TransferRecord(f, rep, int(rows.size), secs, agree, report))
    return TransferCurve(tuple(records), reference, config)


def fraction_list(text: str | Sequence[float]) -> tuple[float, ...]:
    if isinstance(text, str):
        try:
            return tuple(float(t) for t in text.split(",") if t.strip())
        except ValueError:
            raise InvalidFraction(f"cannot parse fractions {text!r}") from None
    return tuple(float(t) for t in text)
