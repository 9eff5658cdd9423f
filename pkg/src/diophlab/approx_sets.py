"""Exact solution sets of the simultaneous and product closeness conditions.

For parameters (a, b, c, d) with 1 <= a <= b this module constructs, as
interval sets over [0,1]:

  simultaneous_set(eta, xi)   {x : ||a x + c|| < eta and ||b x + d|| < xi}
  product_set(delta)          {x : ||a x + c|| * ||b x + d|| < delta**2}

together with the split of the product set into a simultaneous core and
two one-sided remainders, equal-mesh covers with counting diagnostics, and
a multi-scale dyadic cover whose s-cost realizes the product-set
premeasure bound.

The product set is solved cell by cell: [0,1] is cut at every half-integer
crossing of both linear forms, on each cell both nearest integers are
constant and the condition is a pair of quadratic inequalities solved in
closed form with the cancellation-safe root formula.  Cells are processed
in chunks so b up to the cell cap stays memory-light.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .intervals import (Cover, IntervalSet, intersect, lebesgue, mesh_cover,
                        normalize, union_many)
from .sequences import log_weight

DEFAULT_CELL_CAP = 10 ** 8
_CHUNK = 1 << 19


class CellCapExceeded(RuntimeError):
    """Raised when a construction would enumerate too many cells."""


def cell_cap() -> int:
    """Active cell cap; DIOPHLAB_CELL_CAP overrides the default."""
    raw = os.environ.get("DIOPHLAB_CELL_CAP")
    return int(float(raw)) if raw else DEFAULT_CELL_CAP


@dataclass(frozen=True)
class FracParams:
    """Coefficients (a, b, c, d) of the two linear forms, with 1 <= a <= b."""

    a: float
    b: float
    c: float = 0.0
    d: float = 0.0

    def __post_init__(self):
        if not (1.0 <= self.a <= self.b):
            raise ValueError(f"need 1 <= a <= b, got a={self.a}, b={self.b}")

    def weight(self) -> float:
        return log_weight(self.a, self.b)


def dist_nearest_int(x):
    """Distance to the nearest integer, in [0, 1/2].  Vectorized."""
    x = np.asarray(x, dtype=float)
    out = np.abs(x - np.round(x))
    return float(out) if out.ndim == 0 else out


# -- simultaneous condition ---------------------------------------------------


def _linear_solution(coef: float, shift: float, eps: float) -> IntervalSet:
    """{x in [0,1] : ||coef*x + shift|| < eps} for eps < 1/2."""
    k = np.arange(math.floor(shift), math.ceil(coef + shift) + 1, dtype=float)
    centers = k - shift
    return normalize(((centers - eps) / coef, (centers + eps) / coef))


def simultaneous_set(p: FracParams, eta: float, xi: float) -> IntervalSet:
    """Exact set where both forms are within (eta, xi) of integers.

    A threshold at or above 1/2 makes its condition vacuous (the distance
    never exceeds 1/2) and that factor degenerates to [0,1].
    """
    if eta <= 0.0 or xi <= 0.0:
        return IntervalSet.empty()
    x_part = IntervalSet.full() if eta >= 0.5 else _linear_solution(p.a, p.c, eta)
    y_part = IntervalSet.full() if xi >= 0.5 else _linear_solution(p.b, p.d, xi)
    if eta >= 0.5:
        return y_part
    if xi >= 0.5:
        return x_part
    return intersect(x_part, y_part)


# -- product condition: cell decomposition ------------------------------------


def _cell_bounds(p: FracParams) -> np.ndarray:
    """Sorted cut points of [0,1] where either nearest integer switches."""
    cuts = [np.array([0.0, 1.0])]
    for coef, shift in ((p.a, p.c), (p.b, p.d)):
        k = np.arange(math.floor(shift - 0.5), math.ceil(coef + shift + 0.5) + 1,
                      dtype=float)
        x = (k + 0.5 - shift) / coef
        cuts.append(x[(x > 0.0) & (x < 1.0)])
    return np.unique(np.concatenate(cuts))


def _solve_chunk(p: FracParams, d2: float, lo: np.ndarray, hi: np.ndarray,
                 constraint: str | None, delta: float):
    """Solve |u v| < d2 on cells [lo, hi], u = a x + c - p0, v = b x + d - q0.

    Returns candidate piece arrays (plo, phi); entries with phi <= plo are
    to be discarded by the caller.  `constraint` adds |u| >= delta
    ("first") or |v| >= delta ("second") for the one-sided remainders.
    """
    a, b, c, d = p.a, p.b, p.c, p.d
    mid = 0.5 * (lo + hi)
    p0 = np.round(a * mid + c)
    q0 = np.round(b * mid + d)
    em = c - p0          # u(x) = a x + em
    en = d - q0          # v(x) = b x + en
    A = a * b
    B = a * en + b * em
    C0 = em * en

    def roots(const: np.ndarray):
        disc = B * B - 4.0 * A * const
        ok = disc > 0.0
        sq = np.sqrt(np.where(ok, disc, 0.0))
        qf = -0.5 * (B + np.copysign(sq, B))
        with np.errstate(divide="ignore", invalid="ignore"):
            r1 = np.where(ok, qf / A, np.nan)
            r2 = np.where(ok, const / qf, np.nan)
        return ok, np.minimum(r1, r2), np.maximum(r1, r2)

    ok1, r1, r2 = roots(C0 - d2)          # u*v < d2 holds between r1, r2
    ok2, s1, s2 = roots(C0 + d2)          # u*v <= -d2 holds between s1, s2
    lo1 = np.where(ok1, np.maximum(lo, r1), 1.0)
    hi1 = np.where(ok1, np.minimum(hi, r2), 0.0)
    excl_lo = np.where(ok2, s1, np.inf)
    excl_hi = np.where(ok2, s2, np.inf)

    pieces = [(lo1, np.minimum(hi1, excl_lo)),
              (np.maximum(lo1, excl_hi), hi1)]

    if constraint is not None:
        # one-sided distance floor: keep x with the chosen form at least
        # delta from its nearest integer
        if constraint == "first":
            left = ((p0 - c) - delta) / a
            right = ((p0 - c) + delta) / a
        else:
            left = ((q0 - d) - delta) / b
            right = ((q0 - d) + delta) / b
        split = []
        for plo, phi in pieces:
            split.append((plo, np.minimum(phi, left)))
            split.append((np.maximum(plo, right), phi))
        pieces = split

    plo = np.concatenate([pl for pl, _ in pieces])
    phi = np.concatenate([ph for _, ph in pieces])
    return plo, phi


def _product_pieces(p: FracParams, delta: float,
                    constraint: str | None = None,
                    cap: int | None = None) -> Iterator[tuple[np.ndarray, np.ndarray]]:
    """Stream solution pieces of the product condition, in x order per chunk."""
    bounds = _cell_bounds(p)
    ncells = len(bounds) - 1
    limit = cap if cap is not None else cell_cap()
    if ncells > limit:
        raise CellCapExceeded(
            f"{ncells} cells exceed the cap {limit} (set DIOPHLAB_CELL_CAP to raise)")
    d2 = delta * delta
    for i0 in range(0, ncells, _CHUNK):
        i1 = min(i0 + _CHUNK, ncells)
        plo, phi = _solve_chunk(p, d2, bounds[i0:i1], bounds[i0 + 1:i1 + 1],
                                constraint, delta)
        keep = phi > plo
        yield plo[keep], phi[keep]


def product_set(p: FracParams, delta: float,
                cap: int | None = None) -> IntervalSet:
    """Exact set where the product of the two distances is below delta**2.

    For delta > 1/2 the product never reaches delta**2 apart from a finite
    set of points, so the result is all of [0,1].
    """
    if delta < 0.0:
        raise ValueError(f"delta must be nonnegative, got {delta}")
    if delta == 0.0:
        return IntervalSet.empty()
    if delta > 0.5:
        return IntervalSet.full()
    chunks = list(_product_pieces(p, delta, cap=cap))
    if not chunks:
        return IntervalSet.empty()
    los = np.concatenate([c[0] for c in chunks])
    his = np.concatenate([c[1] for c in chunks])
    return normalize((los, his))


@dataclass
class ProductDecomposition:
    """Split of the product set into a core and two one-sided remainders.

    simultaneous : both distances below delta (equals simultaneous_set(delta, delta))
    first_far    : first distance >= delta, product below delta**2
    second_far   : second distance >= delta, product below delta**2
    """

    simultaneous: IntervalSet
    first_far: IntervalSet
    second_far: IntervalSet

    def parts(self) -> tuple[IntervalSet, IntervalSet, IntervalSet]:
        return self.simultaneous, self.first_far, self.second_far

    def reunion(self) -> IntervalSet:
        return union_many([self.simultaneous, self.first_far, self.second_far])


def decompose_product_set(p: FracParams, delta: float,
                          cap: int | None = None) -> ProductDecomposition:
    """Exact core/remainder split of product_set(delta) for delta in (0, 1/2]."""
    if not 0.0 < delta <= 0.5:
        raise ValueError(f"delta must be in (0, 1/2], got {delta}")

    def solve(constraint):
        chunks = list(_product_pieces(p, delta, constraint=constraint, cap=cap))
        if not chunks:
            return IntervalSet.empty()
        return normalize((np.concatenate([c[0] for c in chunks]),
                          np.concatenate([c[1] for c in chunks])))

    return ProductDecomposition(
        simultaneous=simultaneous_set(p, delta, delta),
        first_far=solve("first"),
        second_far=solve("second"),
    )


def product_membership(p: FracParams, delta: float, x):
    """Direct pointwise test of the product condition.  Vectorized."""
    u = dist_nearest_int(p.a * np.asarray(x, dtype=float) + p.c)
    v = dist_nearest_int(p.b * np.asarray(x, dtype=float) + p.d)
    out = u * v < delta * delta
    return bool(out) if np.ndim(out) == 0 else out


# -- covers -------------------------------------------------------------------


def cover_simultaneous(p: FracParams, eta: float, xi: float) -> Cover:
    """Equal-mesh cover of the simultaneous set, with counting diagnostics.

    Mesh is min(eta/a, xi/b); the piece count is compared against the
    counting bound (b*eta + a) * L.
    """
    if not (0.0 < eta < 1.0 and 0.0 < xi < 1.0):
        raise ValueError("cover needs 0 < eta, xi < 1")
    f = simultaneous_set(p, eta, xi)
    mesh = min(eta / p.a, xi / p.b)
    cov = mesh_cover(f, mesh)
    cov.bound = (p.b * eta + p.a) * p.weight()
    cov.ratio = cov.count / cov.bound
    return cov


def dyadic_annuli(delta: float) -> list[int]:
    """Indices j >= 0 with 2**(j+1) * delta < 1."""
    out = []
    j = 0
    while 2.0 ** (j + 1) * delta < 1.0:
        out.append(j)
        j += 1
    return out


@dataclass
class AnnulusCoverCost:
    """Per-scale piece counts of the multi-scale cover of the product set."""

    core: tuple[int, float]                 # (pieces, mesh) covering the core
    first_far: list[tuple[int, float]]      # per dyadic annulus
    second_far: list[tuple[int, float]]

    def premeasure(self, s: float) -> float:
        """Total s-cost sum(count * (mesh/2)**s) of all pieces."""
        total = self.core[0] * (self.core[1] / 2.0) ** s
        for count, mesh in self.first_far + self.second_far:
            total += count * (mesh / 2.0) ** s
        return float(total)


def product_set_cover_cost(p: FracParams, delta: float) -> AnnulusCoverCost:
    """Multi-scale cover of the product set via dyadic annuli.

    The core is covered at mesh delta/b.  Points with the first distance in
    [2**j delta, 2**(j+1) delta) have the second below 2**-j delta, so each
    remainder is covered through the simultaneous sets of the annulus pair
    (2**(j+1) delta, 2**-j delta), each at its own mesh.  A single global
    mesh cannot reproduce the two-term premeasure bound; the per-annulus
    meshes are what make the bound hold with an absolute constant.
    """
    if not 0.0 < delta <= 0.5:
        raise ValueError(f"delta must be in (0, 1/2], got {delta}")
    core = cover_simultaneous(p, delta, delta)
    first, second = [], []
    for j in dyadic_annuli(delta):
        big = 2.0 ** (j + 1) * delta
        small = 2.0 ** (-j) * delta
        cb = cover_simultaneous(p, big, small)
        cc = cover_simultaneous(p, small, big)
        first.append((cb.count, cb.mesh))
        second.append((cc.count, cc.mesh))
    return AnnulusCoverCost(core=(core.count, core.mesh),
                            first_far=first, second_far=second)


# -- displayed bound values ---------------------------------------------------


def premeasure_bound(p: FracParams, delta: float, s: float) -> float:
    """b*(delta^2/b)^s * L + a*(delta^2/(a b))^(s/2) * L."""
    L = p.weight()
    d2 = delta * delta
    return p.b * (d2 / p.b) ** s * L + p.a * (d2 / (p.a * p.b)) ** (s / 2.0) * L


def measure_bound(p: FracParams, delta: float) -> float:
    """delta^2 * L * log(1/delta) + sqrt(a/b) * delta * L (refined log)."""
    from .sequences import refined_log
    L = p.weight()
    return (delta * delta * L * refined_log(1.0 / delta)
            + math.sqrt(p.a / p.b) * delta * L)


def product_set_measure(p: FracParams, delta: float, cap: int | None = None) -> float:
    return lebesgue(product_set(p, delta, cap=cap))
