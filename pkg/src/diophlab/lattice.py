"""Lattice-point counting, exponential sums and Erdos-Turan discrepancy.

The central count is the number of integer pairs (p, q) in the standard
window whose fractions (p-c)/a and (q-d)/b lie within eta/a + xi/b of each
other.  The fast path enumerates q once and tests a handful of candidate
p per q with exactly the same float predicate as the naive double loop,
so the two agree bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .approx_sets import FracParams


def _ranges(p: FracParams) -> tuple[int, int, int, int]:
    return (math.floor(p.c), math.ceil(p.a + p.c),
            math.floor(p.d), math.ceil(p.b + p.d))


def count_near_pairs(p: FracParams, eta: float, xi: float) -> int:
    """Exact count of nearly coincident fraction pairs, O(b) time.

    For each admissible q the admissible p lie in an open window of length
    below 4 around c + a*(q-d)/b, so at most six candidates are tested, each
    with the strict inequality |(p-c)/a - (q-d)/b| < eta/a + xi/b.
    """
    plo, phi, qlo, qhi = _ranges(p)
    theta = eta / p.a + xi / p.b
    q = np.arange(qlo, qhi + 1, dtype=float)
    center = p.c + p.a * (q - p.d) / p.b
    base = np.floor(center - p.a * theta)
    total = 0
    for off in range(6):
        cand = base + off
        ok = (cand >= plo) & (cand <= phi)
        ok &= np.abs((cand - p.c) / p.a - (q - p.d) / p.b) < theta
        total += int(np.count_nonzero(ok))
    return total


def count_near_pairs_naive(p: FracParams, eta: float, xi: float) -> int:
    """Oracle: full (p, q) double loop over the window.  O(a*b)."""
    plo, phi, qlo, qhi = _ranges(p)
    theta = eta / p.a + xi / p.b
    pv = np.arange(plo, phi + 1, dtype=float)[:, None]
    qv = np.arange(qlo, qhi + 1, dtype=float)[None, :]
    hit = np.abs((pv - p.c) / p.a - (qv - p.d) / p.b) < theta
    return int(np.count_nonzero(hit))


def count_bound_ratio(p: FracParams, eta: float, xi: float) -> float:
    """count / ((b*eta + a) * L), the quotient against the real-case bound."""
    return count_near_pairs(p, eta, xi) / ((p.b * eta + p.a) * p.weight())


def count_integer_bound(p: FracParams, eta: float, xi: float) -> tuple[int, float]:
    """Exact count and its quotient against the integer-case bound b*eta + gcd(a,b)."""
    if p.a != int(p.a) or p.b != int(p.b):
        raise ValueError("integer bound needs integer a, b")
    g = math.gcd(int(p.a), int(p.b))
    n = count_near_pairs(p, eta, xi)
    return n, n / (p.b * eta + g)


def large_regime(p: FracParams, eta: float, xi: float) -> bool:
    """Whether eta + (a/b)*xi exceeds 1/2 (the crude-count regime)."""
    return eta + (p.a / p.b) * xi > 0.5


# -- sample points on the torus ----------------------------------------------


@dataclass
class SamplePoints:
    """Q points on the torus, stored reduced mod 1."""

    points: np.ndarray
    Q: int

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=float)
        if self.Q != len(self.points) or self.Q < 1:
            raise ValueError("Q must equal the number of points and be >= 1")


def lattice_fraction_points(p: FracParams) -> SamplePoints:
    """The Q = ceil(b+d) - floor(d) + 1 points (a/b)(q + floor(d) - 1) - ad/b + c mod 1."""
    Q = math.ceil(p.b + p.d) - math.floor(p.d) + 1
    q = np.arange(1, Q + 1, dtype=float)
    u = (p.a / p.b) * (q + math.floor(p.d) - 1.0) - p.a * p.d / p.b + p.c
    return SamplePoints(points=np.mod(u, 1.0), Q=Q)


def exp_sum(points: SamplePoints, k: int) -> float:
    """|sum over the points of e(k u)| with e(x) = exp(2 pi i x)."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    # numpy reduces contiguous float arrays pairwise, which keeps the error
    # near 1e-9 even at Q ~ 1e6
    return float(np.abs(np.sum(np.exp((2j * np.pi * k) * points.points))))


def exp_sums(points: SamplePoints, kmax: int) -> np.ndarray:
    """|sum e(k u)| for k = 1..kmax, via iterated phase multiplication."""
    z = np.exp(2j * np.pi * points.points)
    acc = np.ones_like(z)
    out = np.empty(kmax)
    for k in range(kmax):
        acc = acc * z
        out[k] = np.abs(np.sum(acc))
    return out


def _interval_length(interval: tuple[float, float]) -> float:
    lo, hi = interval
    length = hi - lo
    if not 0.0 < length <= 1.0:
        raise ValueError(f"interval length must be in (0, 1], got {length}")
    return length


def discrepancy(points: SamplePoints, interval: tuple[float, float]) -> float:
    """Signed discrepancy #(points in I) - |I| * Q on the torus.

    The interval is closed and may wrap around; membership reduces both
    the points and the interval mod 1.
    """
    lo, _ = interval
    length = _interval_length(interval)
    t = np.mod(points.points - lo, 1.0)
    hits = int(np.count_nonzero(t <= length))
    return hits - length * points.Q


def erdos_turan_rhs(points: SamplePoints, interval: tuple[float, float],
                    K: int, sums: np.ndarray | None = None) -> float:
    """Right-hand side of the Erdos-Turan inequality for the given I and K.

    Q/(K+1) + 2 * sum_{k<=K} (1/K + min(|I|, 1/(pi k))) * |sum e(k u)|.
    Precomputed |sums| (from exp_sums) may be passed in when sweeping K.
    """
    if K < 1:
        raise ValueError(f"K must be >= 1, got {K}")
    length = _interval_length(interval)
    s = exp_sums(points, K) if sums is None else sums[:K]
    k = np.arange(1, K + 1, dtype=float)
    weights = 1.0 / K + np.minimum(length, 1.0 / (np.pi * k))
    return points.Q / (K + 1.0) + 2.0 * float(np.sum(weights * s))


def default_K(p: FracParams) -> int:
    """The proof-matching truncation floor(b/a)."""
    return max(1, math.floor(p.b / p.a))
