"""Input containers: feature table, feature groups, centering options."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import InvalidGroup, InvalidInput, InvalidWeight, UnknownColumn

CENTER_METHODS = ("midmean", "median", "mean")
CENTER_SOURCES = ("exact", "sketch")


def _as_finite_vector(values, what: str) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise InvalidInput(f"{what} must be one-dimensional")
    if arr.size == 0:
        raise InvalidInput(f"{what} is empty")
    if not np.all(np.isfinite(arr)):
        bad = int(np.flatnonzero(~np.isfinite(arr))[0])
        raise InvalidInput(f"{what} has a non-finite value at row {bad}")
    return arr


@dataclass(frozen=True)
class DataTable:
    """Row-major feature matrix with named columns plus named output vectors.

    ``X`` is stored C-contiguous (n, d) so the accumulation kernels can scan
    it row by row.
    """

    X: np.ndarray
    feature_names: tuple[str, ...]
    outputs: Mapping[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.ndim != 2:
            raise InvalidInput("feature matrix must be two-dimensional")
        n, d = X.shape
        if n < 1:
            raise InvalidInput("table has no rows")
        if not np.all(np.isfinite(X)):
            i, j = np.argwhere(~np.isfinite(X))[0]
            raise InvalidInput(f"non-finite value at row {i}, feature {j}")
        names = tuple(str(s) for s in self.feature_names)
        if len(names) != d:
            raise InvalidInput(f"{len(names)} feature names for {d} columns")
        if any(not s for s in names):
            raise InvalidInput("feature names must be nonempty")
        if len(set(names)) != d:
            raise InvalidInput("feature names must be unique")
        outputs = {}
        for key, vec in self.outputs.items():
            arr = _as_finite_vector(vec, f"output {key!r}")
            if arr.size != n:
                raise InvalidInput(f"output {key!r} has {arr.size} rows, expected {n}")
            outputs[str(key)] = arr
        clash = set(outputs) & set(names)
        if clash:
            raise InvalidInput(f"names used both as feature and output: {sorted(clash)}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "outputs", outputs)

    @classmethod
    def from_columns(cls, columns: Mapping[str, Sequence[float]],
                     outputs: Mapping[str, Sequence[float]]) -> "DataTable":
        names = list(columns)
        X = np.column_stack([np.asarray(columns[k], dtype=np.float64) for k in names]) if names \
            else np.empty((0, 0))
        return cls(X, tuple(names), dict(outputs))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def d(self) -> int:
        return self.X.shape[1]

    def output(self, name: str) -> np.ndarray:
        try:
            return self.outputs[name]
        except KeyError:
            raise UnknownColumn(name) from None

    def column(self, name: str) -> np.ndarray:
        try:
            return self.X[:, self.feature_names.index(name)]
        except ValueError:
            raise UnknownColumn(name) from None

    def take(self, rows) -> "DataTable":
        """Row subset (copy) in the given order."""
        rows = np.asarray(rows, dtype=np.intp)
        return DataTable(self.X[rows], self.feature_names,
                         {k: v[rows] for k, v in self.outputs.items()})

    def with_output(self, name: str, values) -> "DataTable":
        outputs = dict(self.outputs)
        outputs[name] = values
        return DataTable(self.X, self.feature_names, outputs)


@dataclass(frozen=True)
class GroupFamily:
    """Named, possibly overlapping, nonempty feature-index sets."""

    groups: Mapping[str, tuple[int, ...]]

    def __post_init__(self):
        clean = {}
        for name, members in self.groups.items():
            name = str(name)
            if not name:
                raise InvalidGroup("group names must be nonempty")
            if name in clean:
                raise InvalidGroup(f"duplicate group name {name!r}")
            idx = sorted({int(j) for j in members})
            if not idx:
                raise InvalidGroup(f"group {name!r} is empty")
            clean[name] = tuple(idx)
        object.__setattr__(self, "groups", clean)

    @classmethod
    def from_names(cls, spec: Mapping[str, Iterable[str]],
                   feature_names: Sequence[str]) -> "GroupFamily":
        from .errors import UnknownFeature

        lookup = {s: i for i, s in enumerate(feature_names)}
        resolved = {}
        for gname, members in spec.items():
            idx = []
            for m in members:
                if m not in lookup:
                    raise UnknownFeature(m)
                idx.append(lookup[m])
            resolved[gname] = idx
        return cls(resolved)

    def __len__(self) -> int:
        return len(self.groups)

    @property
    def names(self) -> list[str]:
        return list(self.groups)

    def validate(self, d: int) -> None:
        for name, idx in self.groups.items():
            if idx[0] < 0 or idx[-1] >= d:
                raise InvalidGroup(f"group {name!r} has an index outside [0, {d})")

    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        """Compressed (pointer, index) arrays for the kernels."""
        ptr = np.zeros(len(self.groups) + 1, dtype=np.intp)
        ptr[1:] = np.cumsum([len(v) for v in self.groups.values()])
        idx = np.fromiter((j for v in self.groups.values() for j in v), dtype=np.intp,
                          count=int(ptr[-1]))
        return ptr, idx


@dataclass(frozen=True)
class CenteringSpec:
    """How robust centers are computed.

    ``source="sketch"`` estimates quantiles with a Greenwald-Khanna sketch of
    rank accuracy ``epsilon``.
    """

    method: str = "midmean"
    source: str = "exact"
    epsilon: float | None = None

    def __post_init__(self):
        if self.method not in CENTER_METHODS:
            raise InvalidInput(f"unknown centering method {self.method!r}")
        if self.source not in CENTER_SOURCES:
            raise InvalidInput(f"unknown centering source {self.source!r}")
        if self.source == "sketch":
            eps = 0.01 if self.epsilon is None else float(self.epsilon)
            if not 0.0 < eps < 0.5:
                raise InvalidInput("sketch epsilon must lie in (0, 0.5)")
            object.__setattr__(self, "epsilon", eps)
        else:
            object.__setattr__(self, "epsilon", None)

    def to_dict(self) -> dict:
        out = {"method": self.method, "source": self.source}
        if self.epsilon is not None:
            out["epsilon"] = self.epsilon
        return out


def check_weights(weights, n: int) -> np.ndarray | None:
    if weights is None:
        return None
    w = np.ascontiguousarray(weights, dtype=np.float64)
    if w.ndim != 1 or w.size != n:
        raise InvalidWeight(f"expected {n} weights, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise InvalidWeight("weights must be finite")
    if np.any(w < 0):
        raise InvalidWeight(f"negative weight at row {int(np.flatnonzero(w < 0)[0])}")
    return w
