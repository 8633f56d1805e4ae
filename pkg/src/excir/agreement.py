"""Agreement between two score vectors over the same features.

Five complementary views: top-k set overlap, two rank correlations, a
sign-and-scale alignment residual, and a symmetric KL divergence between
kernel density estimates of the two score distributions.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy.stats import rankdata

from .errors import DegenerateInput, InvalidInput, InvalidK

KDE_GRID = 512
KDE_PAD_BANDWIDTHS = 3.0
DENSITY_FLOOR = 1e-12


def _pair(a, b, min_len: int = 1) -> tuple[np.ndarray, np.ndarray]:
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise InvalidInput(f"length mismatch: {a.size} vs {b.size}")
    if a.size < min_len:
        raise DegenerateInput(f"need at least {min_len} values, got {a.size}")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise InvalidInput("scores must be finite")
    return a, b


def top_k(scores, k: int) -> np.ndarray:
    """Indices of the k largest scores; ties go to the lower index."""
    s = np.asarray(scores, dtype=np.float64)
    order = np.lexsort((np.arange(s.size), -s))
    return order[:k]


def jaccard_at_k(a, b, k: int = 8) -> float:
    a, b = _pair(a, b)
    if k < 1 or k > a.size:
        raise InvalidK(f"k={k} outside [1, {a.size}]")
    sa, sb = set(top_k(a, k).tolist()), set(top_k(b, k).tolist())
    return len(sa & sb) / len(sa | sb)


def spearman_rho(a, b) -> float:
    """Pearson correlation of average ranks."""
    a, b = _pair(a, b, 2)
    ra = rankdata(a) - (a.size + 1) / 2.0
    rb = rankdata(b) - (b.size + 1) / 2.0
    va, vb = float(np.dot(ra, ra)), float(np.dot(rb, rb))
    if va == 0.0 or vb == 0.0:
        raise DegenerateInput("Spearman rho undefined for constant input")
    # sqrt of the product keeps exact (anti)identity at exactly +-1
    return float(np.clip(np.dot(ra, rb) / math.sqrt(va * vb), -1.0, 1.0))


def kendall_tau(a, b) -> float:
    """Tie-corrected Kendall tau-b, by direct pair enumeration."""
    a, b = _pair(a, b, 2)
    s = n_a = n_b = 0
    for i in range(a.size - 1):
        da = np.sign(a[i + 1:] - a[i])
        db = np.sign(b[i + 1:] - b[i])
        s += int(np.dot(da, db))
        n_a += int(np.count_nonzero(da))
        n_b += int(np.count_nonzero(db))
    if n_a == 0 or n_b == 0:
        raise DegenerateInput("Kendall tau undefined for constant input")
    if n_a == n_b:
        return s / n_a
    return float(np.clip(s / math.sqrt(n_a * n_b), -1.0, 1.0))


def procrustes_residual(a, b) -> float:
    """Normalized misfit of centered ``a`` against the best signed rescaling of ``b``.

    For n x 1 columns the orthogonal factor is a sign; together with a
    nonnegative scale this is a least-squares fit of ``b_hat`` to ``a_hat``.
    The result lies in [0, 1].
    """
    a, b = _pair(a, b, 2)
    ah = a - a.mean()
    bh = b - b.mean()
    na, nb = np.linalg.norm(ah), np.linalg.norm(bh)
    if na == 0.0 or nb == 0.0:
        raise DegenerateInput("Procrustes residual undefined for constant input")
    coef = float(np.dot(ah, bh)) / (nb * nb)
    resid = ah - coef * bh
    return float(min(np.linalg.norm(resid) / na, 1.0))


def silverman_bandwidth(x) -> float:
    x = np.asarray(x, dtype=np.float64)
    sd = float(np.std(x, ddof=1))
    q1, q3 = np.quantile(x, [0.25, 0.75])
    iqr = float(q3 - q1) / 1.34
    spread = min(sd, iqr) if iqr > 0 else sd
    if spread <= 0:
        raise DegenerateInput("bandwidth undefined for a constant sample")
    return 0.9 * spread * x.size ** (-0.2)


def _kde_on_grid(x: np.ndarray, h: float, grid: np.ndarray) -> np.ndarray:
    dens = np.zeros_like(grid)
    # chunk over samples to bound the (chunk, grid) temporary
    for lo in range(0, x.size, 2048):
        z = (grid[None, :] - x[lo:lo + 2048, None]) / h
        dens += np.exp(-0.5 * z * z).sum(axis=0)
    return dens / (x.size * h * math.sqrt(2.0 * math.pi))


def symmetric_kl(a, b) -> float:
    """Jeffreys divergence between Gaussian KDEs of two samples (grid quadrature)."""
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.size < 2 or b.size < 2:
        raise DegenerateInput("need at least two values per sample")
    ha, hb = silverman_bandwidth(a), silverman_bandwidth(b)
    pad = KDE_PAD_BANDWIDTHS * max(ha, hb)
    grid = np.linspace(min(a.min(), b.min()) - pad, max(a.max(), b.max()) + pad, KDE_GRID)
    dx = grid[1] - grid[0]
    p = _kde_on_grid(a, ha, grid)
    q = _kde_on_grid(b, hb, grid)
    p = np.maximum(p / (p.sum() * dx), DENSITY_FLOOR)
    q = np.maximum(q / (q.sum() * dx), DENSITY_FLOOR)
    # (p - q)(log p - log q) is exactly antisymmetric under swapping p and q
    return float(np.sum((p - q) * (np.log(p) - np.log(q))) * dx)


@dataclass(frozen=True)
class AgreementReport:
    k: int
    jaccard_at_k: float
    spearman: float | None
    kendall: float | None
    procrustes_residual: float | None
    sym_kl: float | None

    def to_dict(self) -> dict:
        return asdict(self)


def _or_none(fn, a, b):
    try:
        return fn(a, b)
    except DegenerateInput:
        return None


def agreement(a, b, k: int = 8) -> AgreementReport:
    """All five metrics; undefined ones (constant input) are ``None``."""
    return AgreementReport(
        k=k,
        jaccard_at_k=jaccard_at_k(a, b, k),
        spearman=_or_none(spearman_rho, a, b),
        kendall=_or_none(kendall_tau, a, b),
        procrustes_residual=_or_none(procrustes_residual, a, b),
        sym_kl=_or_none(symmetric_kl, a, b),
    )
