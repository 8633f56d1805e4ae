# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels: co-movement accumulation and the GK sketch.

Semantics mirror ``_pykernels`` exactly, including summation order.
"""

import math

import numpy as np

from libc.math cimport fabs, floor, isfinite
from libc.stdlib cimport malloc, realloc, free
from libc.string cimport memmove, memset, memcpy

from .errors import EmptySketch, InvalidInput

BLOCK = 128

cdef enum:
    MAX_LEVELS = 64


def accumulate(const double[:, ::1] X, const double[::1] cx, const double[::1] y, double cy,
               w, const Py_ssize_t[::1] gptr, const Py_ssize_t[::1] gidx,
               bint with_features, Py_ssize_t start, Py_ssize_t stop,
               Py_ssize_t block=BLOCK):
    cdef Py_ssize_t d = X.shape[1]
    cdef Py_ssize_t ng = gptr.shape[0] - 1
    cdef Py_ssize_t off = d if with_features else 0
    cdef Py_ssize_t m = off + ng
    if m == 0:
        return np.zeros(0), np.zeros(0)

    cdef bint weighted = w is not None
    cdef const double[::1] wv
    if weighted:
        wv = w
    else:
        wv = np.empty(0)

    stack_n_arr = np.zeros((MAX_LEVELS, m))
    stack_d_arr = np.zeros((MAX_LEVELS, m))
    rowp_arr = np.empty(d)
    rowa_arr = np.empty(d)
    cdef double[:, ::1] stack_n = stack_n_arr
    cdef double[:, ::1] stack_d = stack_d_arr
    cdef double[::1] rowp = rowp_arr
    cdef double[::1] rowa = rowa_arr

    cdef Py_ssize_t i, r, j, g, k, bend, top = 0, lvl
    cdef long long pushed = 0, t
    cdef double yt, p, wr, pg, ug

    with nogil:
        i = start
        while i < stop:
            bend = i + block
            if bend > stop:
                bend = stop
            for k in range(m):
                stack_n[top, k] = 0.0
                stack_d[top, k] = 0.0
            for r in range(i, bend):
                yt = y[r] - cy
                wr = wv[r] if weighted else 1.0
                for j in range(d):
                    p = (X[r, j] - cx[j]) * yt
                    rowp[j] = p
                    rowa[j] = fabs(p)
                if with_features:
                    if weighted:
                        for j in range(d):
                            stack_n[top, j] += wr * rowp[j]
                            stack_d[top, j] += wr * rowa[j]
                    else:
                        for j in range(d):
                            stack_n[top, j] += rowp[j]
                            stack_d[top, j] += rowa[j]
                for g in range(ng):
                    k = gptr[g]
                    pg = rowp[gidx[k]]
                    ug = rowa[gidx[k]]
                    for k in range(gptr[g] + 1, gptr[g + 1]):
                        pg = pg + rowp[gidx[k]]
                        ug = ug + rowa[gidx[k]]
                    if weighted:
                        pg = wr * pg
                        ug = wr * ug
                    stack_n[top, off + g] += pg
                    stack_d[top, off + g] += ug
            top += 1
            pushed += 1
            t = pushed
            while t % 2 == 0:
                for k in range(m):
                    stack_n[top - 2, k] = stack_n[top - 2, k] + stack_n[top - 1, k]
                    stack_d[top - 2, k] = stack_d[top - 2, k] + stack_d[top - 1, k]
                top -= 1
                t = t // 2
            i = bend
        for lvl in range(1, top):
            for k in range(m):
                stack_n[0, k] = stack_n[0, k] + stack_n[lvl, k]
                stack_d[0, k] = stack_d[0, k] + stack_d[lvl, k]

    if top == 0:
        return np.zeros(m), np.zeros(m)
    return stack_n_arr[0].copy(), stack_d_arr[0].copy()


cdef class GKSketch:
    """Greenwald-Khanna quantile summary (compiled)."""

    cdef double* _v
    cdef long long* _g
    cdef long long* _delta
    cdef Py_ssize_t _size
    cdef Py_ssize_t _cap
    cdef readonly double epsilon
    cdef readonly long long count
    cdef long long _period

    def __cinit__(self, double epsilon=0.01):
        self._cap = 64
        self._size = 0
        self._v = <double*> malloc(self._cap * sizeof(double))
        self._g = <long long*> malloc(self._cap * sizeof(long long))
        self._delta = <long long*> malloc(self._cap * sizeof(long long))
        if self._v == NULL or self._g == NULL or self._delta == NULL:
            raise MemoryError()

    def __init__(self, double epsilon=0.01):
        if not (0.0 < epsilon < 0.5):
            raise InvalidInput("epsilon must lie in (0, 0.5)")
        self.epsilon = epsilon
        self.count = 0
        self._period = <long long> math.ceil(1.0 / (2.0 * epsilon))

    def __dealloc__(self):
        free(self._v)
        free(self._g)
        free(self._delta)

    def __len__(self):
        return self._size

    cdef int _grow(self) except -1:
        cdef Py_ssize_t cap = self._cap * 2
        cdef double* v = <double*> realloc(self._v, cap * sizeof(double))
        if v == NULL:
            raise MemoryError()
        self._v = v
        cdef long long* g = <long long*> realloc(self._g, cap * sizeof(long long))
        if g == NULL:
            raise MemoryError()
        self._g = g
        cdef long long* dl = <long long*> realloc(self._delta, cap * sizeof(long long))
        if dl == NULL:
            raise MemoryError()
        self._delta = dl
        self._cap = cap
        return 0

    cdef int _insert(self, double value) except -1:
        cdef Py_ssize_t lo = 0, hi = self._size, mid, i
        cdef long long delta
        if not isfinite(value):
            raise InvalidInput(f"non-finite value {value!r}")
        while lo < hi:
            mid = (lo + hi) // 2
            if value < self._v[mid]:
                hi = mid
            else:
                lo = mid + 1
        i = lo
        if i == 0 or i == self._size:
            delta = 0
        else:
            delta = self._g[i] + self._delta[i] - 1
        if self._size == self._cap:
            self._grow()
        memmove(&self._v[i + 1], &self._v[i], (self._size - i) * sizeof(double))
        memmove(&self._g[i + 1], &self._g[i], (self._size - i) * sizeof(long long))
        memmove(&self._delta[i + 1], &self._delta[i], (self._size - i) * sizeof(long long))
        self._v[i] = value
        self._g[i] = 1
        self._delta[i] = delta
        self._size += 1
        self.count += 1
        if self.count % self._period == 0:
            self._compress()
        return 0

    cdef void _compress(self) noexcept:
        cdef Py_ssize_t size = self._size, i, w
        cdef long long threshold
        if size < 3:
            return
        threshold = <long long> floor(2.0 * self.epsilon * self.count)
        # right to left, writing survivors from the top end downward; index 0 is kept
        w = size - 1
        for i in range(size - 2, 0, -1):
            if self._g[i] + self._g[w] + self._delta[w] <= threshold:
                self._g[w] += self._g[i]
            else:
                w -= 1
                self._v[w] = self._v[i]
                self._g[w] = self._g[i]
                self._delta[w] = self._delta[i]
        w -= 1
        self._v[w] = self._v[0]
        self._g[w] = self._g[0]
        self._delta[w] = self._delta[0]
        if w > 0:
            memmove(&self._v[0], &self._v[w], (size - w) * sizeof(double))
            memmove(&self._g[0], &self._g[w], (size - w) * sizeof(long long))
            memmove(&self._delta[0], &self._delta[w], (size - w) * sizeof(long long))
        self._size = size - w

    def insert(self, value):
        self._insert(float(value))

    def insert_many(self, values):
        cdef const double[::1] vals = np.ascontiguousarray(values, dtype=np.float64).ravel()
        cdef Py_ssize_t k
        for k in range(vals.shape[0]):
            self._insert(vals[k])

    def query(self, double alpha):
        if self.count == 0:
            raise EmptySketch("query on an empty sketch")
        if not (0.0 <= alpha <= 1.0):
            raise InvalidInput("quantile level must lie in [0, 1]")
        cdef double r = alpha * self.count
        if r < 1.0:
            r = 1.0
        if r > self.count:
            r = <double> self.count
        cdef Py_ssize_t i, best = 0
        cdef double err, best_err = math.inf
        cdef long long rmin = 0
        for i in range(self._size):
            rmin += self._g[i]
            err = max(r - rmin, rmin + self._delta[i] - r)
            if err < best_err:
                best = i
                best_err = err
        return self._v[best]

    def tuples(self):
        return [(self._v[i], int(self._g[i]), int(self._delta[i])) for i in range(self._size)]
