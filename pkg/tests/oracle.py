"""Independent slow reference: sorted-list quantiles and explicit loops."""

import math


def quantile_type7(values, alpha):
    xs = sorted(float(v) for v in values)
    h = (len(xs) - 1) * alpha
    lo = math.floor(h)
    hi = min(lo + 1, len(xs) - 1)
    return xs[lo] + (h - lo) * (xs[hi] - xs[lo])


def center(values, method="midmean"):
    values = [float(v) for v in values]
    if method == "midmean":
        return 0.5 * (quantile_type7(values, 0.25) + quantile_type7(values, 0.75))
    if method == "median":
        return quantile_type7(values, 0.5)
    return math.fsum(values) / len(values)


def cir_reference(X, y, groups=None, weights=None, method="midmean"):
    """Per-feature and per-group (N, D, CIR) triples by direct double loops.

    ``X`` is a list of rows; ``groups`` a list of index lists.
    """
    n = len(X)
    d = len(X[0])
    cols = [[X[i][j] for i in range(n)] for j in range(d)]
    mx = [center(c, method) for c in cols]
    my = center(y, method)
    w = weights if weights is not None else [1.0] * n
    sets = [[j] for j in range(d)] + [list(g) for g in (groups or [])]
    out = []
    for members in sets:
        N = 0.0
        D = 0.0
        for i in range(n):
            yt = y[i] - my
            p = 0.0
            u = 0.0
            for j in members:
                prod = (X[i][j] - mx[j]) * yt
                p += prod
                u += abs(prod)
            N += w[i] * p
            D += w[i] * u
        cir = 0.5 if D == 0 else 0.5 * (1.0 + N / D)
        out.append((N, D, cir))
    return out
