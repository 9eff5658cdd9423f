"""Exact algebra on finite unions of subintervals of [0,1].

Sets are kept as sorted, pairwise-disjoint (lo, hi) pairs in two float64
arrays.  Endpoints are never re-derived by arithmetic inside the set
operations, so boolean combinations propagate the original endpoint values
bit for bit.  Open/closed endpoints are not tracked: every set handled here
differs from its closure by finitely many points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Gaps at or below this are fused during normalization.  All endpoint
# computations upstream are closed-form over doubles, so adjacency noise
# is a few ulp (~1e-15 on [0,1]).
MERGE_EPS = 1e-12


class IntervalSet:
    """Normalized finite union of subintervals of [0,1]."""

    __slots__ = ("los", "his")

    def __init__(self, los: np.ndarray, his: np.ndarray):
        # Trusted constructor: arrays must already be normalized.
        self.los = los
        self.his = his

    # -- construction -----------------------------------------------------

    @staticmethod
    def empty() -> "IntervalSet":
        return IntervalSet(np.empty(0), np.empty(0))

    @staticmethod
    def full() -> "IntervalSet":
        return IntervalSet(np.array([0.0]), np.array([1.0]))

    # -- basic introspection ----------------------------------------------

    def __len__(self) -> int:
        return len(self.los)

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntervalSet):
            return NotImplemented
        return (len(self) == len(other)
                and bool(np.array_equal(self.los, other.los))
                and bool(np.array_equal(self.his, other.his)))

    def __repr__(self) -> str:
        if len(self) <= 4:
            body = ", ".join(f"({lo:.6g}, {hi:.6g})" for lo, hi in self.pairs())
        else:
            body = f"{len(self)} components, measure {lebesgue(self):.6g}"
        return f"IntervalSet[{body}]"

    def pairs(self) -> list[tuple[float, float]]:
        """Components as a list of (lo, hi) tuples."""
        return [(float(lo), float(hi)) for lo, hi in zip(self.los, self.his)]

    def is_empty(self) -> bool:
        return len(self.los) == 0

    def contains(self, x) -> np.ndarray:
        """Vectorized membership test (closed-interval convention)."""
        x = np.asarray(x, dtype=float)
        if self.is_empty():
            return np.zeros(x.shape, dtype=bool)
        idx = np.searchsorted(self.los, x, side="right") - 1
        ok = idx >= 0
        safe = np.where(ok, idx, 0)
        return ok & (x <= self.his[safe])

    def endpoint_distance(self, x) -> np.ndarray:
        """Distance from each x to the nearest component endpoint."""
        x = np.asarray(x, dtype=float)
        if self.is_empty():
            return np.full(x.shape, np.inf)
        pts = np.sort(np.concatenate([self.los, self.his]))
        idx = np.clip(np.searchsorted(pts, x), 1, len(pts) - 1)
        return np.minimum(np.abs(x - pts[idx - 1]), np.abs(x - pts[idx]))


def normalize(raw, eps: float = MERGE_EPS) -> IntervalSet:
    """Sort, clip to [0,1], drop empty pieces and fuse near-adjacent ones.

    Accepts a list of (lo, hi) pairs or a pair of arrays.  Reversed pairs
    (lo >= hi) are dropped rather than rejected, so degenerate input yields
    the empty set.
    """
    if isinstance(raw, tuple) and len(raw) == 2 and isinstance(raw[0], np.ndarray):
        los, his = raw
        los = np.asarray(los, dtype=float)
        his = np.asarray(his, dtype=float)
    else:
        arr = np.asarray(list(raw), dtype=float)
        if arr.size == 0:
            return IntervalSet.empty()
        los, his = arr[:, 0], arr[:, 1]
    los = np.clip(los, 0.0, 1.0)
    his = np.clip(his, 0.0, 1.0)
    keep = his > los
    los, his = los[keep], his[keep]
    if los.size == 0:
        return IntervalSet.empty()
    if np.any(los[1:] < los[:-1]):  # construction paths mostly emit sorted
        order = np.argsort(los, kind="stable")
        los, his = los[order], his[order]
    reach = np.maximum.accumulate(his)
    starts = np.empty(los.size, dtype=bool)
    starts[0] = True
    starts[1:] = los[1:] > reach[:-1] + eps
    first = np.flatnonzero(starts)
    out_lo = los[first]
    out_hi = np.maximum.reduceat(his, first)
    return IntervalSet(out_lo, out_hi)


# -- boolean combinations ---------------------------------------------------


def _combine(x: IntervalSet, y: IntervalSet, keep) -> IntervalSet:
    """Boolean combination via a sweep over all original endpoints.

    `keep(in_x, in_y)` receives membership masks for the midpoints of the
    elementary segments and selects which segments survive.  Endpoints of
    the result are always endpoints of the inputs, never new arithmetic.
    """
    pts = np.unique(np.concatenate([x.los, x.his, y.los, y.his]))
    if pts.size < 2:
        return IntervalSet.empty()
    mids = 0.5 * (pts[:-1] + pts[1:])
    sel = keep(x.contains(mids), y.contains(mids))
    if not sel.any():
        return IntervalSet.empty()
    # run-length merge of consecutive selected segments
    starts = np.flatnonzero(sel & ~np.concatenate([[False], sel[:-1]]))
    ends = np.flatnonzero(sel & ~np.concatenate([sel[1:], [False]]))
    return normalize((pts[starts], pts[ends + 1]))


def intersect(x: IntervalSet, y: IntervalSet) -> IntervalSet:
    """Set intersection by a sorted sweep, O(m + n + output).

    Both inputs are sorted and disjoint, so each component of x overlaps a
    contiguous run of components of y; output endpoints are max/min picks
    of the original endpoint values, never new arithmetic.
    """
    if x.is_empty() or y.is_empty():
        return IntervalSet.empty()
    start = np.searchsorted(y.his, x.los, side="left")
    stop = np.searchsorted(y.los, x.his, side="right")
    counts = np.maximum(stop - start, 0)
    total = int(counts.sum())
    if total == 0:
        return IntervalSet.empty()
    offsets = np.concatenate([[0], np.cumsum(counts)])
    pos = np.arange(total)
    which_x = np.repeat(np.arange(len(x)), counts)
    which_y = pos - np.repeat(offsets[:-1], counts) + np.repeat(start, counts)
    lo = np.maximum(x.los[which_x], y.los[which_y])
    hi = np.minimum(x.his[which_x], y.his[which_y])
    return normalize((lo, hi))


def union(x: IntervalSet, y: IntervalSet) -> IntervalSet:
    return _combine(x, y, lambda a, b: a | b)


def difference(x: IntervalSet, y: IntervalSet) -> IntervalSet:
    return _combine(x, y, lambda a, b: a & ~b)


def symmetric_difference(x: IntervalSet, y: IntervalSet) -> IntervalSet:
    return _combine(x, y, lambda a, b: a ^ b)


def union_many(sets: list[IntervalSet]) -> IntervalSet:
    """Union of many sets in one normalization pass."""
    if not sets:
        return IntervalSet.empty()
    los = np.concatenate([s.los for s in sets])
    his = np.concatenate([s.his for s in sets])
    return normalize((los, his))


# -- measures and covers ----------------------------------------------------


def lebesgue(x: IntervalSet) -> float:
    """Total length of the set."""
    return float(np.sum(x.his - x.los))


def premeasure_upper(x: IntervalSet, s: float, mesh: float) -> float:
    """Upper bound on the Hausdorff s-premeasure from the equal-mesh cover.

    Each component of length len is covered by ceil(len/mesh) pieces of
    length mesh; the returned value is sum(count) * (mesh/2)**s, using the
    radius = length/2 convention.  Valid as an upper bound for any cover
    radius above mesh/2.
    """
    if s <= 0.0 or s > 1.0:
        raise ValueError(f"s must be in (0, 1], got {s}")
    if mesh <= 0.0:
        raise ValueError(f"mesh must be positive, got {mesh}")
    if x.is_empty():
        return 0.0
    counts = np.ceil((x.his - x.los) / mesh)
    return float(np.sum(counts) * (mesh / 2.0) ** s)


def _check_dyadic(scale: float) -> None:
    mant, _ = math.frexp(scale)
    if not (0.0 < scale <= 1.0 and mant == 0.5):
        raise ValueError(f"scale must be 2**-k for integer k >= 0, got {scale}")


def box_count(x: IntervalSet, scale: float) -> int:
    """Number of dyadic boxes [j*scale, (j+1)*scale] meeting the set.

    A box counts when its open interior overlaps a component, which keeps
    box_count(x, scale) * scale >= lebesgue(x) without inflating counts at
    touching endpoints.
    """
    _check_dyadic(scale)
    if x.is_empty():
        return 0
    jlo = np.floor(x.los / scale)
    jhi = np.ceil(x.his / scale) - 1.0
    # components are sorted but distinct components can land in one box
    reach = np.maximum.accumulate(jhi)
    starts = np.empty(jlo.size, dtype=bool)
    starts[0] = True
    starts[1:] = jlo[1:] > reach[:-1]
    first = np.flatnonzero(starts)
    group_hi = np.maximum.reduceat(jhi, first)
    return int(np.sum(group_hi - jlo[first] + 1.0))


@dataclass
class Cover:
    """Equal-length cover of an interval set.

    Pieces have common nominal length `mesh` (radius mesh/2); `count` is the
    number of pieces, `bound` the counting-bound value the piece count is
    compared against, and `ratio` their quotient.
    """

    mesh: float
    s_value: float
    piece_los: np.ndarray = field(repr=False)
    piece_his: np.ndarray = field(repr=False)
    count: int = 0
    bound: float = 0.0
    ratio: float = 0.0

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.piece_los + self.piece_his)

    def piece_set(self) -> IntervalSet:
        """The covered region as an interval set, clipped to [0,1]."""
        return normalize((self.piece_los, self.piece_his))

    def covers(self, x: IntervalSet) -> bool:
        """Exact containment check of x in the union of the pieces."""
        return difference(x, self.piece_set()).is_empty()


def mesh_cover(x: IntervalSet, mesh: float, s: float = 1.0) -> Cover:
    """Cover each component by ceil(len/mesh) pieces of length mesh.

    Piece endpoints are laid out from each component's own lo, and the last
    piece is stretched to the component's hi when rounding left it a few
    ulp short, so the union provably contains the component.
    """
    if mesh <= 0.0:
        raise ValueError("mesh must be positive")
    if x.is_empty():
        return Cover(mesh=mesh, s_value=s, piece_los=np.empty(0),
                     piece_his=np.empty(0), count=0)
    counts = np.ceil((x.his - x.los) / mesh).astype(np.int64)
    counts = np.maximum(counts, 1)
    offsets = np.concatenate([[0], np.cumsum(counts)])
    total = int(offsets[-1])
    idx = np.arange(total) - np.repeat(offsets[:-1], counts)
    base = np.repeat(x.los, counts)
    los = base + idx * mesh
    his = base + (idx + 1) * mesh
    last = offsets[1:] - 1
    his[last] = np.maximum(his[last], x.his)
    return Cover(mesh=mesh, s_value=s, piece_los=los, piece_his=his, count=total)


def to_json_pairs(x: IntervalSet) -> list[list[float]]:
    """JSON form: [[lo, hi], ...]."""
    return [[float(lo), float(hi)] for lo, hi in zip(x.los, x.his)]
