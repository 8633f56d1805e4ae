"""Pure Python/numpy implementations of the hot kernels.

Used when the compiled ``_kernels`` extension is unavailable. Both backends
follow the same summation schedule (sequential within fixed-size row blocks,
binary-counter cascade across blocks), so they agree bit for bit on the
same machine.
"""

from __future__ import annotations

import bisect
import math

import numpy as np

from .errors import EmptySketch, InvalidInput

BLOCK = 128
_CHUNK_BLOCKS = 64


class _Cascade:
    """Pairwise combination of block partial sums in O(log n) memory."""

    def __init__(self):
        self.stack: list[np.ndarray] = []
        self.pushed = 0

    def push(self, part: np.ndarray) -> None:
        self.stack.append(part)
        self.pushed += 1
        t = self.pushed
        while t % 2 == 0:
            top = self.stack.pop()
            self.stack[-1] = self.stack[-1] + top
            t //= 2

    def total(self, m: int) -> np.ndarray:
        if not self.stack:
            return np.zeros(m)
        out = self.stack[0].copy()
        for part in self.stack[1:]:
            out = out + part
        return out


def _row_terms(X, cx, y, cy, w, gptr, gidx, with_features):
    P = (X - cx) * (y - cy)[:, None]
    A = np.abs(P)
    cols_p = []
    cols_a = []
    if with_features:
        if w is None:
            cols_p.append(P)
            cols_a.append(A)
        else:
            cols_p.append(w[:, None] * P)
            cols_a.append(w[:, None] * A)
    ng = len(gptr) - 1
    if ng:
        GP = np.empty((P.shape[0], ng))
        GA = np.empty((P.shape[0], ng))
        for g in range(ng):
            members = gidx[gptr[g]:gptr[g + 1]]
            pg = P[:, members[0]].copy()
            ug = A[:, members[0]].copy()
            for j in members[1:]:
                pg += P[:, j]
                ug += A[:, j]
            GP[:, g] = pg
            GA[:, g] = ug
        if w is not None:
            GP *= w[:, None]
            GA *= w[:, None]
        cols_p.append(GP)
        cols_a.append(GA)
    return np.hstack(cols_p), np.hstack(cols_a)


def accumulate(X, cx, y, cy, w, gptr, gidx, with_features, start, stop, block=BLOCK):
    """Signed and absolute co-movement sums over rows ``[start, stop)``.

    Returns ``(N, D)``, each of length ``d * with_features + n_groups``.
    """
    ng = len(gptr) - 1
    m = (X.shape[1] if with_features else 0) + ng
    if m == 0:
        return np.zeros(0), np.zeros(0)
    casc_n, casc_d = _Cascade(), _Cascade()
    step = block * _CHUNK_BLOCKS
    for lo in range(start, stop, step):
        hi = min(lo + step, stop)
        wc = None if w is None else w[lo:hi]
        TP, TA = _row_terms(X[lo:hi], cx, y[lo:hi], cy, wc, gptr, gidx, with_features)
        full = (hi - lo) // block
        if full:
            bn = _sequential_block_sums(TP[:full * block].reshape(full, block, m))
            bd = _sequential_block_sums(TA[:full * block].reshape(full, block, m))
            for b in range(full):
                casc_n.push(bn[b])
                casc_d.push(bd[b])
        if full * block < hi - lo:
            casc_n.push(_sequential_block_sums(TP[None, full * block:])[0])
            casc_d.push(_sequential_block_sums(TA[None, full * block:])[0])
    return casc_n.total(m), casc_d.total(m)


def _sequential_block_sums(T):
    # left-to-right within each block; ndarray.sum may switch to pairwise order
    acc = np.zeros((T.shape[0], T.shape[2]))
    for r in range(T.shape[1]):
        acc += T[:, r, :]
    return acc


class GKSketch:
    """Greenwald-Khanna quantile summary (pure Python)."""

    def __init__(self, epsilon: float = 0.01):
        epsilon = float(epsilon)
        if not 0.0 < epsilon < 0.5:
            raise InvalidInput("epsilon must lie in (0, 0.5)")
        self.epsilon = epsilon
        self.count = 0
        self._period = math.ceil(1.0 / (2.0 * epsilon))
        self._v: list[float] = []
        self._g: list[int] = []
        self._delta: list[int] = []

    def __len__(self) -> int:
        return len(self._v)

    def insert(self, value: float) -> None:
        value = float(value)
        if not math.isfinite(value):
            raise InvalidInput(f"non-finite value {value!r}")
        vs = self._v
        i = bisect.bisect_right(vs, value)
        if i == 0 or i == len(vs):
            delta = 0
        else:
            delta = self._g[i] + self._delta[i] - 1
        vs.insert(i, value)
        self._g.insert(i, 1)
        self._delta.insert(i, delta)
        self.count += 1
        if self.count % self._period == 0:
            self._compress()

    def insert_many(self, values) -> None:
        for v in np.asarray(values, dtype=np.float64).ravel():
            self.insert(v)

    def _compress(self) -> None:
        size = len(self._v)
        if size < 3:
            return
        threshold = math.floor(2.0 * self.epsilon * self.count)
        vs, gs, ds = self._v, self._g, self._delta
        out_v, out_g, out_d = [vs[-1]], [gs[-1]], [ds[-1]]
        # right to left; the minimum (index 0) is never merged away
        for i in range(size - 2, 0, -1):
            if gs[i] + out_g[-1] + out_d[-1] <= threshold:
                out_g[-1] += gs[i]
            else:
                out_v.append(vs[i])
                out_g.append(gs[i])
                out_d.append(ds[i])
        out_v.append(vs[0])
        out_g.append(gs[0])
        out_d.append(ds[0])
        self._v, self._g, self._delta = out_v[::-1], out_g[::-1], out_d[::-1]

    def query(self, alpha: float) -> float:
        if self.count == 0:
            raise EmptySketch("query on an empty sketch")
        if not 0.0 <= alpha <= 1.0:
            raise InvalidInput("quantile level must lie in [0, 1]")
        r = min(max(alpha * self.count, 1.0), float(self.count))
        best, best_err = 0, math.inf
        rmin = 0
        for i, (g, delta) in enumerate(zip(self._g, self._delta)):
            rmin += g
            err = max(r - rmin, rmin + delta - r)
            if err < best_err:
                best, best_err = i, err
        return self._v[best]

    def tuples(self) -> list[tuple[float, int, int]]:
        return list(zip(self._v, self._g, self._delta))
