import math

import numpy as np
import pytest

from diophlab.approx_sets import (CellCapExceeded, FracParams,
                                  decompose_product_set, dist_nearest_int,
                                  dyadic_annuli, measure_bound,
                                  premeasure_bound, product_membership,
                                  product_set, product_set_cover_cost,
                                  cover_simultaneous, simultaneous_set)
from diophlab.intervals import difference, lebesgue, symmetric_difference


def test_dist_nearest_int_examples():
    assert dist_nearest_int(0.3) == pytest.approx(0.3)
    assert dist_nearest_int(-2.7) == pytest.approx(0.3)
    assert dist_nearest_int(3.5) == 0.5


def test_frac_params_validation():
    with pytest.raises(ValueError):
        FracParams(0.5, 2.0)
    with pytest.raises(ValueError):
        FracParams(3.0, 2.0)


def test_simultaneous_set_intersection_example():
    got = simultaneous_set(FracParams(1, 2), 0.1, 0.1)
    assert got.pairs() == [(0.0, 0.05), (0.95, 1.0)]


def test_simultaneous_set_vacuous_thresholds():
    assert simultaneous_set(FracParams(3, 11, 0.2, 0.9), 0.6, 0.7).pairs() == \
        [(0.0, 1.0)]


def test_simultaneous_set_identical_constraints():
    d = 0.15
    got = simultaneous_set(FracParams(1, 1), d, d)
    assert got.pairs() == [(0.0, d), (1.0 - d, 1.0)]


def test_product_set_unit_coefficients():
    got = product_set(FracParams(1, 1), 0.2)
    assert len(got) == 2
    np.testing.assert_allclose(got.los, [0.0, 0.8], atol=1e-15)
    np.testing.assert_allclose(got.his, [0.2, 1.0], atol=1e-15)


def test_product_set_large_delta_is_everything():
    assert product_set(FracParams(5, 9, 1.3, -0.4), 0.8).pairs() == [(0.0, 1.0)]


def test_product_set_zero_delta_is_empty():
    assert product_set(FracParams(2, 3), 0.0).is_empty()


def test_product_set_measure_matches_monte_carlo():
    # Monte Carlo membership frequency is an independent oracle for the
    # constructed measure
    p = FracParams(3, 7, 0.3, 0.6)
    delta = 0.1
    e = product_set(p, delta)
    rng = np.random.default_rng(123)
    x = rng.random(1_000_000)
    freq = float(np.mean(product_membership(p, delta, x)))
    leb = lebesgue(e)
    se = math.sqrt(leb * (1 - leb) / x.size)
    assert abs(freq - leb) < 4 * se


def test_product_set_monotone_in_delta():
    rng = np.random.default_rng(5)
    for _ in range(25):
        a = float(rng.uniform(1, 10))
        p = FracParams(a, float(rng.uniform(a, 200)),
                       float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
        d1, d2 = sorted(rng.uniform(1e-3, 0.5, size=2))
        assert difference(product_set(p, float(d1)), product_set(p, float(d2))).is_empty()


def test_membership_examples():
    p = FracParams(1, 1)
    assert product_membership(p, 0.2, 0.1) is True
    assert product_membership(p, 0.2, 0.5) is False


def test_membership_agrees_with_containment():
    rng = np.random.default_rng(17)
    for _ in range(10):
        a = float(rng.uniform(1, 20))
        p = FracParams(a, float(rng.uniform(a, 500)),
                       float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
        delta = float(rng.uniform(0.01, 0.5))
        e = product_set(p, delta)
        x = rng.random(20_000)
        direct = product_membership(p, delta, x)
        inside = e.contains(x)
        disagree = direct != inside
        if disagree.any():
            assert np.all(e.endpoint_distance(x[disagree]) < 1e-9)


def test_decompose_reconstructs_product_set():
    p = FracParams(2.5, 9.1, 0.2, 0.7)
    dec = decompose_product_set(p, 0.1)
    gap = lebesgue(symmetric_difference(dec.reunion(), product_set(p, 0.1)))
    assert gap < 1e-10


def test_decompose_remainders_vanish_for_equal_forms():
    # with both forms equal, distance >= delta and squared distance < delta^2
    # cannot hold together; the roots leave a few ulp of sliver at the
    # tangent boundary
    dec = decompose_product_set(FracParams(1, 1), 0.2)
    assert lebesgue(difference(dec.first_far, dec.simultaneous)) < 1e-14
    assert lebesgue(difference(dec.second_far, dec.simultaneous)) < 1e-14


def test_decompose_core_inside_product_set():
    rng = np.random.default_rng(31)
    for _ in range(10):
        a = float(rng.uniform(1, 15))
        p = FracParams(a, float(rng.uniform(a, 300)),
                       float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
        delta = float(rng.uniform(0.01, 0.5))
        dec = decompose_product_set(p, delta)
        e = product_set(p, delta)
        assert lebesgue(dec.simultaneous) <= lebesgue(e) + 1e-15
        assert difference(dec.simultaneous, e).is_empty()


def test_decompose_rejects_bad_delta():
    with pytest.raises(ValueError):
        decompose_product_set(FracParams(1, 2), 0.7)


def test_simultaneous_inside_product_set():
    rng = np.random.default_rng(9)
    for _ in range(20):
        a = float(rng.uniform(1, 10))
        p = FracParams(a, float(rng.uniform(a, 100)),
                       float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
        eta = float(rng.uniform(0.01, 0.49))
        xi = float(rng.uniform(0.01, 0.49))
        f = simultaneous_set(p, eta, xi)
        e = product_set(p, math.sqrt(eta * xi))
        assert difference(f, e).is_empty()


def test_cover_simultaneous_small_case():
    p = FracParams(1, 1)
    cov = cover_simultaneous(p, 0.1, 0.1)
    assert cov.mesh == pytest.approx(0.1)
    assert cov.count == 2
    assert cov.covers(simultaneous_set(p, 0.1, 0.1))


def test_cover_simultaneous_containment_randomized():
    rng = np.random.default_rng(77)
    for _ in range(50):
        a = float(rng.uniform(1, 50))
        p = FracParams(a, float(rng.uniform(a, 5000)),
                       float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
        eta = float(rng.uniform(1e-3, 0.5))
        xi = float(rng.uniform(1e-3, 0.5))
        cov = cover_simultaneous(p, eta, xi)
        assert cov.covers(simultaneous_set(p, eta, xi))
        assert math.isfinite(cov.ratio)


def test_dyadic_annuli():
    assert dyadic_annuli(0.1) == [0, 1, 2]
    assert dyadic_annuli(0.5) == []
    assert dyadic_annuli(0.25) == [0]


def test_cover_cost_bounded_by_premeasure_bound():
    rng = np.random.default_rng(13)
    worst = 0.0
    for _ in range(30):
        a = float(rng.uniform(1, 40))
        p = FracParams(a, float(rng.uniform(a, 2000)),
                       float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
        delta = float(np.exp(rng.uniform(np.log(1e-3), np.log(0.5))))
        cost = product_set_cover_cost(p, delta)
        for s in (0.3, 0.5, 0.7, 0.9):
            worst = max(worst, cost.premeasure(s) / premeasure_bound(p, delta, s))
    assert math.isfinite(worst)
    assert worst < 1e3


def test_measure_bound_tracks_lebesgue():
    rng = np.random.default_rng(14)
    ratios = []
    for _ in range(30):
        a = float(rng.uniform(1, 40))
        p = FracParams(a, float(rng.uniform(a, 2000)),
                       float(rng.uniform(-2, 2)), float(rng.uniform(-2, 2)))
        delta = float(np.exp(rng.uniform(np.log(1e-3), np.log(0.5))))
        ratios.append(lebesgue(product_set(p, delta)) / measure_bound(p, delta))
    assert max(ratios) < 100.0


def test_cell_cap_guard(monkeypatch):
    monkeypatch.setenv("DIOPHLAB_CELL_CAP", "100")
    with pytest.raises(CellCapExceeded):
        product_set(FracParams(2, 5000), 0.01)
    monkeypatch.delenv("DIOPHLAB_CELL_CAP")
    assert len(product_set(FracParams(2, 5000), 0.01)) > 0
