"""Randomized verification campaigns over the toolkit's properties.

Each check draws instances from a seeded distribution and either asserts
an exact property (zero violations allowed) or records bound ratios whose
statistics are reported without a pass/fail threshold.  Reports are fully
determined by (seed, config, code version); runtimes are printed, never
written into the report, so repeated runs are byte-identical.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .approx_sets import (FracParams, decompose_product_set, dyadic_annuli,
                          measure_bound, premeasure_bound, product_membership,
                          product_set, product_set_cover_cost,
                          cover_simultaneous, simultaneous_set)
from .dimension import SeriesSpec, compute_tau, single_series_threshold
from .intervals import difference, lebesgue, symmetric_difference
from .lattice import (SamplePoints, count_integer_bound, count_near_pairs,
                      count_near_pairs_naive, default_K, discrepancy,
                      erdos_turan_rhs, exp_sums, large_regime,
                      lattice_fraction_points)
from .planar import (cover_rectangles, decompose_planar_product_set,
                     mc_planar_product_area, planar_premeasure_bound,
                     product_rectangle_set)
from .sequences import PsiSpec, SequenceSpec

SCHEMA_VERSION = 1


class CheckFailure(RuntimeError):
    """An exact check found a violating instance."""

    def __init__(self, check_id: str, instance: dict, detail: dict):
        super().__init__(f"check {check_id!r} failed on {instance}")
        self.check_id = check_id
        self.instance = instance
        self.detail = detail


@dataclass
class InstanceDistribution:
    """Sampling ranges for randomized instances.

    b is log-uniform over [a, b_max] so both the unit-weight and the
    log-heavy regimes are exercised; delta is log-uniform over its range.
    """

    count: int = 100
    seed: int = 0
    a_max: float = 100.0
    b_max: float = 1e6
    shift_lo: float = -2.0
    shift_hi: float = 2.0
    delta_lo: float = 1e-4
    delta_hi: float = 0.5
    s_values: tuple = (0.3, 0.5, 0.7, 0.9)

    def __post_init__(self):
        if self.count < 1 or self.a_max < 1.0 or self.b_max < self.a_max:
            raise ValueError("invalid distribution ranges")
        if not 0.0 < self.delta_lo <= self.delta_hi <= 0.5:
            raise ValueError("delta range must sit inside (0, 1/2]")
        if any(not 0.0 < s < 1.0 for s in self.s_values):
            raise ValueError("s values must be in (0, 1)")


def _rng_for(dist: InstanceDistribution, check_id: str) -> np.random.Generator:
    idx = sorted(CHECKS).index(check_id)
    return np.random.default_rng([dist.seed, idx])


def _sample_params(rng, dist: InstanceDistribution,
                   a_max: float | None = None,
                   b_max: float | None = None) -> dict:
    a = float(rng.uniform(1.0, a_max or dist.a_max))
    bm = b_max or dist.b_max
    b = float(np.exp(rng.uniform(np.log(a), np.log(bm)))) if bm > a else a
    return {
        "a": a, "b": max(b, a),
        "c": float(rng.uniform(dist.shift_lo, dist.shift_hi)),
        "d": float(rng.uniform(dist.shift_lo, dist.shift_hi)),
    }


def _sample_delta(rng, dist: InstanceDistribution) -> float:
    return float(np.exp(rng.uniform(np.log(dist.delta_lo), np.log(dist.delta_hi))))


def _params(inst: dict) -> FracParams:
    return FracParams(inst["a"], inst["b"], inst["c"], inst["d"])


# -- individual checks --------------------------------------------------------
# Each check is (generate, evaluate).  evaluate returns a dict with at least
# "ok" (exact checks) or "ratio"/"ratios" (ratio checks).


def _gen_count_oracle(dist, rng):
    out = []
    for _ in range(dist.count):
        inst = _sample_params(rng, dist, a_max=min(dist.a_max, 200.0), b_max=200.0)
        inst["eta"] = float(rng.uniform(0.01, 0.99))
        inst["xi"] = float(rng.uniform(0.01, 0.99))
        out.append(inst)
    return out


def _eval_count_oracle(inst, verbose=False):
    p = _params(inst)
    fast = count_near_pairs(p, inst["eta"], inst["xi"])
    slow = count_near_pairs_naive(p, inst["eta"], inst["xi"])
    if verbose:
        print(f"  fast={fast} naive={slow}")
    return {"ok": fast == slow, "fast": fast, "naive": slow}


def _gen_count_regime(dist, rng):
    out = []
    for _ in range(dist.count):
        # keep b moderate: the regime check is exact and O(b) per instance
        inst = _sample_params(rng, dist, b_max=min(dist.b_max, 3e4))
        for _ in range(200):
            eta = float(rng.uniform(0.0, 1.0))
            xi = float(rng.uniform(0.0, 1.0))
            if eta + (inst["a"] / inst["b"]) * xi > 0.5:
                break
        inst["eta"], inst["xi"] = eta, xi
        out.append(inst)
    return out


def _eval_count_regime(inst, verbose=False):
    p = _params(inst)
    if not large_regime(p, inst["eta"], inst["xi"]):
        return {"ok": True, "skipped": True}
    n = count_near_pairs(p, inst["eta"], inst["xi"])
    cap = 4.0 * (p.b + 2.0)
    if verbose:
        print(f"  count={n} cap={cap}")
    return {"ok": n <= cap, "count": n, "cap": cap}


_ET_INTERVALS = 100
_ET_KMAX = 50


def _gen_erdos_turan(dist, rng):
    out = []
    for _ in range(dist.count):
        q = int(np.exp(rng.uniform(np.log(8), np.log(4096))))
        out.append({"seed": int(rng.integers(2 ** 31)), "Q": q})
    return out


def _eval_erdos_turan(inst, verbose=False):
    sub = np.random.default_rng(inst["seed"])
    pts = SamplePoints(points=sub.random(inst["Q"]), Q=inst["Q"])
    sums = exp_sums(pts, _ET_KMAX)
    worst = -math.inf
    for _ in range(_ET_INTERVALS):
        lo = float(sub.uniform(0.0, 1.0))
        length = float(sub.uniform(1e-6, 1.0))
        d = abs(discrepancy(pts, (lo, lo + length)))
        for K in range(1, _ET_KMAX + 1):
            rhs = erdos_turan_rhs(pts, (lo, lo + length), K, sums=sums)
            worst = max(worst, d - rhs)
            if d > rhs + 1e-9:
                if verbose:
                    print(f"  violation: |D|={d} rhs={rhs} K={K} I=({lo},{lo+length})")
                return {"ok": False, "excess": d - rhs, "K": K}
    return {"ok": True, "worst_excess": worst}


def _gen_exp_sum_integer(dist, rng):
    out = []
    for _ in range(dist.count):
        a = int(rng.integers(1, 501))
        b = int(rng.integers(a, 501))
        out.append({"a": a, "b": b})
    return out


def _eval_exp_sum_integer(inst, verbose=False):
    a, b = inst["a"], inst["b"]
    g = math.gcd(a, b)
    period = b // g
    q = np.arange(1, b + 1, dtype=np.int64)
    worst = 0.0
    for k in range(1, 3 * period + 1):
        # integer reduction keeps every phase exact before the exponential
        phases = (k * a * q) % b
        total = np.sum(np.exp((2j * np.pi / b) * phases))
        expect = float(b) if k % period == 0 else 0.0
        err = abs(abs(total) - expect)
        worst = max(worst, err)
        if err > 1e-9:
            if verbose:
                print(f"  k={k} |sum|={abs(total)} expected={expect}")
            return {"ok": False, "k": k, "error": err}
    return {"ok": True, "worst_error": worst}


_MEMBERSHIP_SAMPLES = 100_000


def _gen_membership(dist, rng):
    out = []
    for _ in range(dist.count):
        inst = _sample_params(rng, dist, b_max=min(dist.b_max, 1e4))
        inst["delta"] = _sample_delta(rng, dist)
        inst["seed"] = int(rng.integers(2 ** 31))
        out.append(inst)
    return out


def _eval_membership(inst, verbose=False):
    p = _params(inst)
    e = product_set(p, inst["delta"])
    x = np.random.default_rng(inst["seed"]).random(_MEMBERSHIP_SAMPLES)
    direct = product_membership(p, inst["delta"], x)
    inside = e.contains(x)
    disagree = direct != inside
    if not disagree.any():
        return {"ok": True, "disagreements": 0}
    near = e.endpoint_distance(x[disagree]) < 1e-9
    bad = int(np.count_nonzero(~near))
    if verbose:
        print(f"  {int(disagree.sum())} disagreements, {bad} beyond 1e-9 of endpoints")
    return {"ok": bad == 0, "disagreements": int(disagree.sum()), "far": bad}


def _gen_decompose(dist, rng):
    out = []
    for _ in range(dist.count):
        inst = _sample_params(rng, dist)
        inst["delta"] = float(np.exp(rng.uniform(np.log(max(dist.delta_lo, 1e-3)),
                                                 np.log(dist.delta_hi))))
        out.append(inst)
    return out


def _eval_decompose(inst, verbose=False):
    p = _params(inst)
    dec = decompose_product_set(p, inst["delta"])
    e = product_set(p, inst["delta"])
    gap = lebesgue(symmetric_difference(dec.reunion(), e))
    if verbose:
        print(f"  symdiff measure = {gap:.3e}")
    return {"ok": gap < 1e-10, "gap": gap}


def _gen_measure_ratio(dist, rng):
    return _gen_decompose(dist, rng)


def _eval_measure_ratio(inst, verbose=False):
    p = _params(inst)
    ratio = lebesgue(product_set(p, inst["delta"])) / measure_bound(p, inst["delta"])
    if verbose:
        print(f"  measure ratio = {ratio:.4f}")
    return {"ratio": ratio}


def _gen_premeasure_ratio(dist, rng):
    return _gen_decompose(dist, rng)


def _eval_premeasure_ratio(inst, verbose=False, s_values=(0.3, 0.5, 0.7, 0.9)):
    p = _params(inst)
    cost = product_set_cover_cost(p, inst["delta"])
    ratios = [cost.premeasure(s) / premeasure_bound(p, inst["delta"], s)
              for s in s_values]
    if verbose:
        print(f"  premeasure ratios = {ratios}")
    return {"ratios": ratios}


def _gen_cover_ratio(dist, rng):
    out = []
    for _ in range(dist.count):
        inst = _sample_params(rng, dist, a_max=50.0, b_max=min(dist.b_max, 5000.0))
        inst["eta"] = float(rng.uniform(1e-4, 0.5))
        inst["xi"] = float(rng.uniform(1e-4, 0.5))
        out.append(inst)
    return out


def _eval_cover_ratio(inst, verbose=False):
    cov = cover_simultaneous(_params(inst), inst["eta"], inst["xi"])
    if verbose:
        print(f"  pieces={cov.count} bound={cov.bound:.2f} ratio={cov.ratio:.4f}")
    return {"ratio": cov.ratio}


def _gen_cover_containment(dist, rng):
    return _gen_cover_ratio(dist, rng)


def _eval_cover_containment(inst, verbose=False):
    p = _params(inst)
    cov = cover_simultaneous(p, inst["eta"], inst["xi"])
    ok = cov.covers(simultaneous_set(p, inst["eta"], inst["xi"]))
    if verbose:
        print(f"  contained = {ok}")
    return {"ok": ok}


def _gen_monotonicity(dist, rng):
    out = []
    for _ in range(dist.count):
        inst = _sample_params(rng, dist, b_max=min(dist.b_max, 1e4))
        d1 = _sample_delta(rng, dist)
        d2 = _sample_delta(rng, dist)
        inst["delta1"], inst["delta2"] = min(d1, d2), max(d1, d2)
        out.append(inst)
    return out


def _eval_monotonicity(inst, verbose=False):
    p = _params(inst)
    small = product_set(p, inst["delta1"])
    big = product_set(p, inst["delta2"])
    leftover = difference(small, big)
    ok = leftover.is_empty()
    if verbose:
        print(f"  difference components = {len(leftover)}")
    return {"ok": ok}


def _gen_simultaneous_in_product(dist, rng):
    out = []
    for _ in range(dist.count):
        inst = _sample_params(rng, dist, b_max=min(dist.b_max, 1e4))
        inst["eta"] = float(rng.uniform(1e-4, 0.5))
        inst["xi"] = float(rng.uniform(1e-4, 0.5))
        out.append(inst)
    return out


def _eval_simultaneous_in_product(inst, verbose=False):
    p = _params(inst)
    f = simultaneous_set(p, inst["eta"], inst["xi"])
    e = product_set(p, math.sqrt(inst["eta"] * inst["xi"]))
    ok = difference(f, e).is_empty()
    if verbose:
        print(f"  contained = {ok}")
    return {"ok": ok}


def _gen_shift_invariance(dist, rng):
    return _gen_count_oracle(dist, rng)


def _eval_shift_invariance(inst, verbose=False):
    p = _params(inst)
    shifted = FracParams(p.a, p.b, p.c + 1.0, p.d)
    n0 = count_near_pairs(p, inst["eta"], inst["xi"])
    n1 = count_near_pairs(shifted, inst["eta"], inst["xi"])
    if verbose:
        print(f"  count={n0} shifted={n1}")
    return {"ok": n0 == n1, "count": n0, "shifted": n1}


def _gen_count_ratio(dist, rng):
    out = []
    for _ in range(dist.count):
        inst = _sample_params(rng, dist)
        inst["eta"] = float(rng.uniform(1e-4, 1.0))
        inst["xi"] = float(rng.uniform(1e-4, 1.0))
        out.append(inst)
    return out


def _eval_count_ratio(inst, verbose=False):
    p = _params(inst)
    n = count_near_pairs(p, inst["eta"], inst["xi"])
    ratio = n / ((p.b * inst["eta"] + p.a) * p.weight())
    if verbose:
        print(f"  count={n} ratio={ratio:.4f}")
    return {"ratio": ratio}


def _gen_integer_count_ratio(dist, rng):
    out = []
    for _ in range(dist.count):
        a = int(rng.integers(1, 101))
        b = int(rng.integers(a, int(min(dist.b_max, 1e4)) + 1))
        out.append({"a": float(a), "b": float(b),
                    "c": float(rng.uniform(dist.shift_lo, dist.shift_hi)),
                    "d": float(rng.uniform(dist.shift_lo, dist.shift_hi)),
                    "eta": float(rng.uniform(1e-4, 0.5)),
                    "xi": float(rng.uniform(1e-4, 0.5))})
    return out


def _eval_integer_count_ratio(inst, verbose=False):
    n, ratio = count_integer_bound(_params(inst), inst["eta"], inst["xi"])
    if verbose:
        print(f"  count={n} ratio={ratio:.4f}")
    return {"ratio": ratio}


def _gen_uq_rhs(dist, rng):
    out = []
    for _ in range(dist.count):
        inst = _sample_params(rng, dist, b_max=min(dist.b_max, 500.0))
        inst["delta"] = _sample_delta(rng, dist)
        out.append(inst)
    return out


def _eval_uq_rhs(inst, verbose=False):
    p = _params(inst)
    pts = lattice_fraction_points(p)
    K = default_K(p)
    rhs = erdos_turan_rhs(pts, (-inst["delta"], inst["delta"]), K)
    ratio = rhs / ((p.a + inst["delta"] * p.b) * p.weight())
    if verbose:
        print(f"  Q={pts.Q} K={K} rhs={rhs:.2f} ratio={ratio:.4f}")
    return {"ratio": ratio}


def _gen_tau_agreement(dist, rng):
    out = []
    for _ in range(dist.count):
        a = float(rng.uniform(1.2, 10.0))
        b = float(rng.uniform(a * 1.01, 100.0))
        if rng.random() < 0.5:
            psi_kind, param = "scaled-base", float(rng.uniform(0.2, 3.0))
        else:
            psi_kind, param = "exponential", float(rng.uniform(0.5, 3.0) * np.log(b))
        out.append({"a": a, "b": b, "psi_kind": psi_kind, "param": param})
    return out


def _series_from(inst) -> SeriesSpec:
    seq = SequenceSpec(kind="exponential", a=inst["a"], b=inst["b"])
    if inst["psi_kind"] == "scaled-base":
        psi = PsiSpec(kind="scaled-base", t=inst["param"], seq=seq)
    else:
        psi = PsiSpec(kind="exponential", lam=inst["param"])
    return SeriesSpec(seq=seq, psi=psi, family="two-term")


def _eval_tau_agreement(inst, verbose=False):
    spec = _series_from(inst)
    closed = compute_tau(spec)
    numeric = compute_tau(spec, numeric=True)
    gap = abs(closed.tau - numeric.tau)
    if verbose:
        print(f"  closed={closed.tau:.6f} numeric={numeric.tau:.6f}")
    return {"ok": gap <= 1e-3, "closed": closed.tau, "numeric": numeric.tau,
            "gap": gap}


def _gen_single_series_zero(dist, rng):
    out = []
    for _ in range(dist.count):
        a = float(rng.uniform(1.01, 10.0))
        b = float(rng.uniform(a * a, max(a * a * 10.0, a * a + 1.0)))
        out.append({"a": a, "b": b})
    return out


def _eval_single_series_zero(inst, verbose=False):
    thr = single_series_threshold(inst["a"], inst["b"])
    if verbose:
        print(f"  threshold = {thr}")
    return {"ok": thr == 0.0, "threshold": thr}


def _gen_planar_product(dist, rng):
    out = []
    for _ in range(dist.count):
        inst = _sample_params(rng, dist, a_max=50.0, b_max=min(dist.b_max, 5000.0))
        inst["eta"] = float(rng.uniform(1e-3, 0.6))
        inst["xi"] = float(rng.uniform(1e-3, 0.6))
        out.append(inst)
    return out


def _eval_planar_product(inst, verbose=False):
    box = product_rectangle_set(_params(inst), inst["eta"], inst["xi"])
    gap = abs(box.area() - box.area_by_boxes())
    if verbose:
        print(f"  product={box.area():.12f} boxes={box.area_by_boxes():.12f}")
    return {"ok": gap < 1e-12, "gap": gap}


_PLANAR_MC_SAMPLES = 100_000


def _gen_planar_mc(dist, rng):
    out = []
    for _ in range(dist.count):
        out.append({"delta": float(rng.uniform(0.05, 0.45)),
                    "seed": int(rng.integers(2 ** 31))})
    return out


def planar_unit_area(delta: float) -> float:
    """Closed-form area of the unit-coefficient planar product set.

    With u = ||x||, v = ||y|| uniform as 2*Uniform(0,1/2), the area is
    P(UV < w) = w (1 + log(1/w)) at w = 4 delta^2, capped at 1.
    """
    w = 4.0 * delta * delta
    if w >= 1.0:
        return 1.0
    return w * (1.0 + math.log(1.0 / w))


def _eval_planar_mc(inst, verbose=False, samples=_PLANAR_MC_SAMPLES):
    p = FracParams(1.0, 1.0)
    est, se = mc_planar_product_area(p, inst["delta"], samples, seed=inst["seed"])
    exact = planar_unit_area(inst["delta"])
    gap = abs(est - exact)
    if verbose:
        print(f"  mc={est:.6f} exact={exact:.6f} se={se:.6f}")
    return {"ok": gap <= 4.0 * max(se, 1e-12), "mc": est, "exact": exact, "se": se}


def _gen_planar_premeasure(dist, rng):
    out = []
    for _ in range(dist.count):
        inst = _sample_params(rng, dist, a_max=50.0, b_max=min(dist.b_max, 5000.0))
        inst["delta"] = _sample_delta(rng, dist)
        out.append(inst)
    return out


def _eval_planar_premeasure(inst, verbose=False, s_values=(0.3, 0.5, 0.7, 0.9)):
    p = _params(inst)
    dec = decompose_planar_product_set(p, inst["delta"])
    ratios = []
    for s in s_values:
        total = dec.premeasure(s)["total"]
        ratios.append(total / planar_premeasure_bound(p, inst["delta"], s))
    if verbose:
        print(f"  ratios = {ratios}")
    return {"ratios": ratios}


def _gen_planar_cover_ratio(dist, rng):
    return _gen_planar_product(dist, rng)


def _eval_planar_cover_ratio(inst, verbose=False):
    eta = min(inst["eta"], 0.499)
    xi = min(inst["xi"], 0.499)
    cov = cover_rectangles(_params(inst), eta, xi, 0.5)
    if verbose:
        print(f"  squares={cov.squares} bound={cov.bound:.1f} ratio={cov.ratio:.4f}")
    return {"ratio": cov.ratio}


def _gen_annulus_indices(dist, rng):
    return [{"delta": _sample_delta(rng, dist),
             "a": float(rng.uniform(1.0, dist.a_max)),
             "b_over_a": float(np.exp(rng.uniform(0.0, np.log(dist.b_max))))}
            for _ in range(dist.count)]


def _eval_annulus_indices(inst, verbose=False):
    delta = inst["delta"]
    J = dyadic_annuli(delta)
    ok = all(2.0 ** (j + 1) * delta < 1.0 for j in J)
    if J:
        ok &= 2.0 ** (max(J) + 2) * delta >= 1.0
    ratio = inst["b_over_a"]
    j1 = [j for j in J if 4.0 ** j <= ratio]
    j2 = [j for j in J if 4.0 ** j >= ratio]
    ok &= sorted(set(j1) | set(j2)) == J and len(set(j1) & set(j2)) <= 1
    if verbose:
        print(f"  J={J} J1={j1} J2={j2}")
    return {"ok": ok, "J_size": len(J)}


# -- registry ------------------------------------------------------------------


@dataclass(frozen=True)
class CheckDef:
    check_id: str
    kind: str                  # "exact" | "ratio"
    property_id: str
    generate: callable = field(compare=False)
    evaluate: callable = field(compare=False)


# property ids name the module invariants the checks are wired to
PROPERTIES = {
    "lattice.count-oracle-equivalence": "fast count equals the naive double loop",
    "lattice.large-regime-cap": "count <= 4(b+2) when eta + (a/b) xi > 1/2",
    "lattice.erdos-turan": "discrepancy never exceeds the exponential-sum bound",
    "lattice.integer-orthogonality": "full-period sums are 0 or b by gcd divisibility",
    "lattice.count-bound-ratio": "count / ((b eta + a) L) stays bounded",
    "lattice.integer-count-ratio": "count / (b eta + gcd) stays bounded",
    "lattice.shift-invariance": "integer shifts of c leave the count unchanged",
    "lattice.uq-rhs-bound": "discrepancy bound at K = floor(b/a) tracks (a + delta b) L",
    "approx.membership-agreement": "pointwise test matches interval containment",
    "approx.decompose-reconstruction": "core and remainders reassemble the product set",
    "approx.measure-bound-ratio": "product-set measure tracks its bound",
    "approx.premeasure-bound-ratio": "multi-scale cover cost tracks the premeasure bound",
    "approx.cover-count-ratio": "cover piece count tracks (b eta + a) L",
    "approx.cover-containment": "covers contain the sets they are built from",
    "approx.monotonicity": "product sets grow with delta",
    "approx.simultaneous-in-product": "simultaneous set sits inside the product set",
    "dimension.tau-agreement": "bisection tau matches closed form within 1e-3",
    "dimension.single-series-zero": "threshold is exactly 0 when a^2 <= b",
    "planar.product-area": "box-sum area equals the product of 1-D measures",
    "planar.mc-oracle": "Monte Carlo area matches the closed-form oracle",
    "planar.premeasure-ratio": "annulus premeasure tracks b^(1-s) delta^(2s)",
    "planar.cover-count-ratio": "square count tracks a b max/min",
    "planar.annulus-indices": "dyadic index sets are computed by direct inequality",
}

CHECKS: dict[str, CheckDef] = {}


def _register(check_id, kind, property_id, generate, evaluate):
    CHECKS[check_id] = CheckDef(check_id, kind, property_id, generate, evaluate)


_register("count-oracle", "exact", "lattice.count-oracle-equivalence",
          _gen_count_oracle, _eval_count_oracle)
_register("count-regime", "exact", "lattice.large-regime-cap",
          _gen_count_regime, _eval_count_regime)
_register("erdos-turan", "exact", "lattice.erdos-turan",
          _gen_erdos_turan, _eval_erdos_turan)
_register("exp-sum-orthogonality", "exact", "lattice.integer-orthogonality",
          _gen_exp_sum_integer, _eval_exp_sum_integer)
_register("count-bound-ratio", "ratio", "lattice.count-bound-ratio",
          _gen_count_ratio, _eval_count_ratio)
_register("integer-count-ratio", "ratio", "lattice.integer-count-ratio",
          _gen_integer_count_ratio, _eval_integer_count_ratio)
_register("count-shift-invariance", "exact", "lattice.shift-invariance",
          _gen_shift_invariance, _eval_shift_invariance)
_register("uq-rhs-bound", "ratio", "lattice.uq-rhs-bound",
          _gen_uq_rhs, _eval_uq_rhs)
_register("membership-agreement", "exact", "approx.membership-agreement",
          _gen_membership, _eval_membership)
_register("decompose-exact", "exact", "approx.decompose-reconstruction",
          _gen_decompose, _eval_decompose)
_register("measure-bound-ratio", "ratio", "approx.measure-bound-ratio",
          _gen_measure_ratio, _eval_measure_ratio)
_register("premeasure-bound-ratio", "ratio", "approx.premeasure-bound-ratio",
          _gen_premeasure_ratio, _eval_premeasure_ratio)
_register("cover-count-ratio", "ratio", "approx.cover-count-ratio",
          _gen_cover_ratio, _eval_cover_ratio)
_register("cover-containment", "exact", "approx.cover-containment",
          _gen_cover_containment, _eval_cover_containment)
_register("set-monotonicity", "exact", "approx.monotonicity",
          _gen_monotonicity, _eval_monotonicity)
_register("simultaneous-in-product", "exact", "approx.simultaneous-in-product",
          _gen_simultaneous_in_product, _eval_simultaneous_in_product)
_register("tau-bisection-agreement", "exact", "dimension.tau-agreement",
          _gen_tau_agreement, _eval_tau_agreement)
_register("single-series-threshold-zero", "exact", "dimension.single-series-zero",
          _gen_single_series_zero, _eval_single_series_zero)
_register("planar-product-area", "exact", "planar.product-area",
          _gen_planar_product, _eval_planar_product)
_register("planar-mc-oracle", "exact", "planar.mc-oracle",
          _gen_planar_mc, _eval_planar_mc)
_register("planar-premeasure-ratio", "ratio", "planar.premeasure-ratio",
          _gen_planar_premeasure, _eval_planar_premeasure)
_register("planar-cover-ratio", "ratio", "planar.cover-count-ratio",
          _gen_planar_cover_ratio, _eval_planar_cover_ratio)
_register("annulus-indices", "exact", "planar.annulus-indices",
          _gen_annulus_indices, _eval_annulus_indices)


def verify_coverage() -> None:
    """Refuse to run when a property lacks a check or a check is unwired."""
    wired = {c.property_id for c in CHECKS.values()}
    missing = sorted(set(PROPERTIES) - wired)
    unknown = sorted(wired - set(PROPERTIES))
    if missing or unknown:
        raise RuntimeError(
            f"coverage guard: properties without checks {missing}, "
            f"checks wired to unknown properties {unknown}")


# -- campaign ------------------------------------------------------------------


def _collect_ratios(results: list[dict]) -> list[float]:
    out: list[float] = []
    for r in results:
        if "ratio" in r:
            out.append(float(r["ratio"]))
        if "ratios" in r:
            out.extend(float(x) for x in r["ratios"])
    return out


def run_campaign(dist: InstanceDistribution, checks: list[str] | None = None,
                 threads: int = 1, report_path: str | None = None,
                 echo=print) -> dict:
    """Run the selected checks; abort on the first exact violation.

    The returned/persisted report is a pure function of (seed, config):
    wall-clock timings go to `echo` only.
    """
    verify_coverage()
    selected = sorted(CHECKS) if not checks or checks == ["all"] else list(checks)
    for cid in selected:
        if cid not in CHECKS:
            raise ValueError(f"unknown check {cid!r}; known: {sorted(CHECKS)}")
    report = {"schema_version": SCHEMA_VERSION, "seed": dist.seed,
              "count": dist.count, "checks": {}}
    for cid in selected:
        cdef = CHECKS[cid]
        rng = _rng_for(dist, cid)
        insts = cdef.generate(dist, rng)
        t0 = time.time()
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(cdef.evaluate, insts))
        else:
            results = [cdef.evaluate(inst) for inst in insts]
        elapsed = time.time() - t0
        entry: dict = {"kind": cdef.kind, "property": cdef.property_id,
                       "instances": len(insts)}
        if cdef.kind == "exact":
            bad = [(inst, r) for inst, r in zip(insts, results) if not r["ok"]]
            entry["violations"] = len(bad)
            if bad:
                inst, detail = bad[0]
                if report_path:
                    fail_path = Path(report_path).with_suffix(".failing.json")
                    fail_path.write_text(json.dumps(
                        {"check": cid, "instance": inst}, indent=2, sort_keys=True))
                    echo(f"[{cid}] FAILED, instance written to {fail_path}")
                raise CheckFailure(cid, inst, detail)
        else:
            ratios = _collect_ratios(results)
            entry["ratio_count"] = len(ratios)
            entry["max_ratio"] = float(np.max(ratios))
            entry["p99_ratio"] = float(np.percentile(ratios, 99))
            entry["median_ratio"] = float(np.median(ratios))
        report["checks"][cid] = entry
        echo(f"[{cid}] {cdef.kind}: {len(insts)} instances ok "
             f"({elapsed:.2f}s, not recorded in report)")
    if report_path:
        Path(report_path).write_text(serialize_report(report))
    return report


def serialize_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"


def replay(instance_path: str, verbose: bool = True) -> dict:
    """Re-run a single serialized instance with intermediate output."""
    doc = json.loads(Path(instance_path).read_text())
    cid = doc["check"]
    if cid not in CHECKS:
        raise ValueError(f"unknown check {cid!r} in {instance_path}")
    if verbose:
        print(f"replaying {cid} on {doc['instance']}")
    result = CHECKS[cid].evaluate(doc["instance"], verbose=verbose)
    if verbose:
        print(f"result: {result}")
    return result
