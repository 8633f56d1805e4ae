"""Robust location estimates used to center features and outputs.

Exact quartiles use linear interpolation between order statistics at
position ``(n - 1) * alpha`` (numpy's default ``"linear"`` method).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ._backend import GKSketch
from .data import CenteringSpec, DataTable
from .errors import InvalidInput

DEFAULT_SPEC = CenteringSpec()


def _checked(col) -> np.ndarray:
    a = np.asarray(col, dtype=np.float64).ravel()
    if a.size == 0:
        raise InvalidInput("cannot center an empty vector")
    if not np.all(np.isfinite(a)):
        raise InvalidInput("cannot center a vector with non-finite values")
    return a


def _sketch_center(a: np.ndarray, spec: CenteringSpec) -> float:
    if spec.method == "mean":
        return float(np.mean(a))
    sk = GKSketch(spec.epsilon)
    sk.insert_many(a)
    if spec.method == "median":
        return float(sk.query(0.5))
    return 0.5 * (sk.query(0.25) + sk.query(0.75))


def robust_center(col, spec: CenteringSpec = DEFAULT_SPEC) -> float:
    """Location estimate of a single vector under ``spec``."""
    a = _checked(col)
    if spec.source == "sketch":
        return _sketch_center(a, spec)
    if spec.method == "midmean":
        q1, q3 = np.quantile(a, [0.25, 0.75])
        return float(0.5 * (q1 + q3))
    if spec.method == "median":
        return float(np.median(a))
    return float(np.mean(a))


def column_centers(X: np.ndarray, spec: CenteringSpec = DEFAULT_SPEC) -> np.ndarray:
    """Per-column centers of an (n, d) matrix."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[0] == 0:
        raise InvalidInput("cannot center an empty matrix")
    if spec.source == "sketch":
        return np.array([_sketch_center(X[:, j], spec) for j in range(X.shape[1])])
    # quantiles along contiguous rows are much faster than along strided columns
    XT = np.ascontiguousarray(X.T)
    if spec.method == "midmean":
        q = np.quantile(XT, [0.25, 0.75], axis=1)
        return 0.5 * (q[0] + q[1])
    if spec.method == "median":
        return np.median(XT, axis=1)
    return np.mean(XT, axis=1)


@dataclass(frozen=True)
class CenteredData:
    """Centers for every feature and one output column.

    Centered values are not materialized; ``x_tilde`` and ``y_tilde`` compute
    them on demand. The accumulation kernels subtract the centers on the fly.
    """

    table: DataTable
    output_name: str
    centers_x: np.ndarray
    center_y: float
    spec: CenteringSpec

    @property
    def x_tilde(self) -> np.ndarray:
        return self.table.X - self.centers_x

    @property
    def y_tilde(self) -> np.ndarray:
        return self.table.output(self.output_name) - self.center_y


def center_table(table: DataTable, output_name: str,
                 spec: CenteringSpec = DEFAULT_SPEC) -> CenteredData:
    y = table.output(output_name)
    cx = column_centers(table.X, spec)
    cy = robust_center(y, spec)
    return CenteredData(table, output_name, cx, cy, spec)
