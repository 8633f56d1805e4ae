"""Streaming quantile estimation with a Greenwald-Khanna summary.

A sketch of accuracy ``epsilon`` answers ``query(alpha)`` with a stored value
whose rank is within ``epsilon * count`` of ``alpha * count``. Tuples are
compressed every ``ceil(1 / (2 * epsilon))`` insertions.
"""

from __future__ import annotations

from ._backend import GKSketch
from ._pykernels import GKSketch as PyGKSketch
from .errors import EmptySketch

__all__ = ["GKSketch", "PyGKSketch", "sketch_insert", "sketch_midmean"]


def sketch_insert(sketch, value):
    sketch.insert(value)
    return sketch


def sketch_midmean(sketch) -> float:
    """Average of the sketched first and third quartiles."""
    if sketch.count == 0:
        raise EmptySketch("mid-mean of an empty sketch")
    return 0.5 * (sketch.query(0.25) + sketch.query(0.75))
