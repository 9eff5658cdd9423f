import math

import numpy as np
import pytest

from diophlab.approx_sets import FracParams, product_set
from diophlab.dimension import (SeriesSpec, check_convergence_conditions,
                                compute_tau, converges, single_series_threshold,
                                estimate_box_dimension, term_value,
                                truncated_limsup)
from diophlab.intervals import difference, lebesgue, symmetric_difference
from diophlab.sequences import PsiSpec, SequenceSpec

EXP23 = SequenceSpec(kind="exponential", a=2, b=3)
PSI_THIRD = PsiSpec(kind="exponential", lam=math.log(3))


def spec(family, seq=EXP23, psi=PSI_THIRD):
    return SeriesSpec(seq=seq, psi=psi, family=family)


def test_term_zero_psi_gives_zero():
    psi0 = PsiSpec(kind="explicit-table", values=(0.0,) * 5)
    for family in ("plain", "two-term", "four-term"):
        assert term_value(spec(family, psi=psi0), 0.5, 3) == 0.0
    assert term_value(spec("lebesgue", psi=psi0), 1.0, 3) == 0.0


def test_term_two_term_worked_value():
    got = term_value(spec("two-term"), 0.5, 1)
    assert got == pytest.approx(1.0 + 2.0 * 18 ** -0.25, abs=1e-12)
    assert got == pytest.approx(1.9710, abs=1e-4)


def test_term_plain_linear_algebra():
    seq = SequenceSpec(kind="linear", a=1, b=1)
    psi = PsiSpec(kind="power", t=2)
    for n in (1, 4, 9):
        assert term_value(SeriesSpec(seq=seq, psi=psi, family="plain"), 0.5, n) == \
            pytest.approx(n ** -0.5)


def test_term_rejects_bad_s():
    with pytest.raises(ValueError):
        term_value(spec("two-term"), 1.0, 1)
    with pytest.raises(ValueError):
        term_value(spec("lebesgue"), 0.5, 1)


def test_converges_threshold_split():
    # plain family at t = 1 flips at s = 1/(1+t) = 1/2
    assert converges(spec("plain"), 0.6).verdict is True
    assert converges(spec("plain"), 0.4).verdict is False


def test_converges_zero_psi_everywhere():
    psi0 = PsiSpec(kind="explicit-table", values=(0.0,) * 12)
    for s in (0.1, 0.5, 0.9):
        assert converges(spec("plain", psi=psi0), s).verdict is True


def test_converges_constant_psi_diverges():
    flat = PsiSpec(kind="exponential", lam=0.0)  # psi = 1 for every n
    v = converges(spec("lebesgue", psi=flat), 1.0)
    assert v.verdict is False
    report = check_convergence_conditions(EXP23, flat, 0.5)
    assert report["conclusions"] == ["hypothesis not satisfied at this s"]


def test_converges_table_heuristics():
    geo = PsiSpec(kind="explicit-table", values=tuple(0.5 ** n for n in range(1, 31)))
    seq = SequenceSpec(kind="explicit-table",
                       a_table=(1.0,) * 30, b_table=(2.0,) * 30)
    assert converges(SeriesSpec(seq=seq, psi=geo, family="plain"), 0.9).verdict is True
    flat = PsiSpec(kind="explicit-table", values=(0.8,) * 30)
    assert converges(SeriesSpec(seq=seq, psi=flat, family="plain"), 0.5).verdict is False


def test_second_term_threshold_value():
    # the ratio-power term flips at 2 log 2 / log 18; the family as a whole
    # flips at the larger first-term threshold 1/2
    thr = 2 * math.log(2) / (math.log(3) + math.log(6))
    res = compute_tau(spec("two-term"))
    assert res.thresholds[1] == pytest.approx(thr, abs=1e-12)
    assert thr == pytest.approx(0.4796, abs=1e-4)
    assert converges(spec("two-term"), 0.51).verdict is True
    assert converges(spec("two-term"), 0.49).verdict is False
    rates = converges(spec("two-term"), thr + 0.01).certificate["rates"]
    assert rates[1] < 0.0 < rates[0]


def test_tau_worked_example():
    res = compute_tau(spec("two-term"))
    assert res.method == "closed-form"
    assert res.tau == pytest.approx(0.5, abs=1e-9)


def test_tau_plain_power_law():
    for t in (0.5, 1.0, 2.0, 4.0):
        psi = PsiSpec(kind="scaled-base", t=t, seq=EXP23)
        res = compute_tau(spec("plain", psi=psi))
        assert res.tau == pytest.approx(1.0 / (1.0 + t), abs=1e-12)


def test_tau_two_term_dominates_plain():
    rng = np.random.default_rng(6)
    for _ in range(30):
        a = float(rng.uniform(1.1, 9))
        b = float(rng.uniform(a + 0.1, 80))
        seq = SequenceSpec(kind="exponential", a=a, b=b)
        psi = PsiSpec(kind="scaled-base", t=float(rng.uniform(0.2, 4)), seq=seq)
        plain = compute_tau(SeriesSpec(seq=seq, psi=psi, family="plain"))
        two = compute_tau(SeriesSpec(seq=seq, psi=psi, family="two-term"))
        assert two.tau >= plain.tau - 1e-12
        assert max(two.thresholds) >= two.thresholds[0]


def test_two_term_collapses_when_a_squared_below_b():
    # grid over a in (1, sqrt(b)], t in [0.1, 5]
    for b in (4.0, 10.0, 50.0):
        for a in np.linspace(1.05, math.sqrt(b), 6):
            seq = SequenceSpec(kind="exponential", a=float(a), b=b)
            for t in np.linspace(0.1, 5.0, 8):
                psi = PsiSpec(kind="scaled-base", t=float(t), seq=seq)
                plain = compute_tau(SeriesSpec(seq=seq, psi=psi, family="plain"))
                two = compute_tau(SeriesSpec(seq=seq, psi=psi, family="two-term"))
                assert two.tau == pytest.approx(plain.tau, abs=1e-12)


def test_bisection_matches_closed_form():
    rng = np.random.default_rng(42)
    for _ in range(15):
        a = float(rng.uniform(1.2, 10))
        b = float(rng.uniform(a * 1.01, 100))
        seq = SequenceSpec(kind="exponential", a=a, b=b)
        psi = PsiSpec(kind="scaled-base", t=float(rng.uniform(0.2, 3)), seq=seq)
        s = SeriesSpec(seq=seq, psi=psi, family="two-term")
        closed = compute_tau(s)
        numeric = compute_tau(s, numeric=True)
        assert numeric.method == "numeric-bisection"
        assert abs(closed.tau - numeric.tau) <= 1e-3


def test_four_term_matches_two_term_for_exponential():
    # the log-weighted extras have dominated thresholds when a_n grows
    res2 = compute_tau(spec("two-term"))
    res4 = compute_tau(spec("four-term"))
    assert res4.tau == pytest.approx(res2.tau, abs=1e-12)


def test_gcd_family_term():
    seq = SequenceSpec(kind="exponential", a=2, b=6)
    psi = PsiSpec(kind="exponential", lam=1.0)
    got = term_value(SeriesSpec(seq=seq, psi=psi, family="gcd"), 0.5, 3)
    expect = 6 ** 3 * (math.exp(-3) / 6 ** 3) ** 0.5 \
        + 8 * (math.exp(-3) / (8 * 6 ** 3)) ** 0.25
    assert got == pytest.approx(expect, rel=1e-12)


def test_gcd_family_requires_integers():
    with pytest.raises(ValueError):
        SeriesSpec(seq=SequenceSpec(kind="exponential", a=2.5, b=6), psi=PSI_THIRD,
                   family="gcd")


def test_convergence_report_exponential():
    report = check_convergence_conditions(EXP23, PSI_THIRD, 0.7)
    assert any(c.startswith("H^0.7") for c in report["conclusions"])
    assert "lambda(M(psi)) = 0" in report["conclusions"]
    assert report["series"]["gcd"]["converges"] is True


def test_single_series_threshold_examples():
    assert single_series_threshold(2, 5) == 0.0
    assert single_series_threshold(2, 3) == pytest.approx(2 - math.log(3) / math.log(2))
    assert single_series_threshold(2, 3) == pytest.approx(0.41504, abs=1e-5)
    with pytest.raises(ValueError):
        single_series_threshold(1.0, 2.0)
    with pytest.raises(ValueError):
        single_series_threshold(3.0, 2.0)


def test_single_series_threshold_boundary():
    b = 7.3
    for eps in (1e-3, 1e-6, 1e-9):
        a = math.sqrt(b) * (1 + eps)
        thr = single_series_threshold(a, b)
        assert 0.0 <= thr < 1e-2


def test_single_series_threshold_zero_iff_square_below():
    rng = np.random.default_rng(2)
    for _ in range(100):
        a = float(rng.uniform(1.01, 10))
        b = float(rng.uniform(a * a, a * a * 10))
        assert single_series_threshold(a, b) == 0.0


def test_truncated_limsup_zero_psi():
    psi0 = PsiSpec(kind="explicit-table", values=(0.0,) * 8)
    assert truncated_limsup(EXP23, psi0, 1, 8).is_empty()


def test_truncated_limsup_single_index():
    psi = PsiSpec(kind="scaled-base", t=1.0, seq=EXP23)
    single = truncated_limsup(EXP23, psi, 4, 4)
    an, bn = 2.0 ** 4, 3.0 ** 4
    direct = product_set(FracParams(an, bn), 3.0 ** -2)
    assert lebesgue(symmetric_difference(single, direct)) == 0.0


def test_truncated_limsup_monotone_in_range():
    psi = PsiSpec(kind="scaled-base", t=1.0, seq=EXP23)
    wide = truncated_limsup(EXP23, psi, 2, 6)
    narrow = truncated_limsup(EXP23, psi, 4, 6)
    assert difference(narrow, wide).is_empty()
    assert lebesgue(narrow) <= lebesgue(wide) + 1e-15


def test_box_dimension_full_interval():
    seq = SequenceSpec(kind="explicit-table", a_table=(1,), b_table=(1,))
    psi = PsiSpec(kind="explicit-table", values=(1.0,))
    est = estimate_box_dimension(seq, psi, 1, 1, [2.0 ** -k for k in range(2, 9)])
    assert est.slope == pytest.approx(1.0, abs=0.01)


def test_box_dimension_tiny_interval():
    # single solution interval of length 2**-10 centered at 1/2
    seq = SequenceSpec(kind="explicit-table", a_table=(1,), b_table=(1,),
                       c=0.5, d=0.5)
    psi = PsiSpec(kind="explicit-table", values=(2.0 ** -22,))
    est = estimate_box_dimension(seq, psi, 1, 1, [2.0 ** -k for k in range(1, 9)])
    assert abs(est.slope) <= 0.05


def test_box_dimension_never_exceeds_line():
    psi = PsiSpec(kind="scaled-base", t=1.0, seq=EXP23)
    est = estimate_box_dimension(EXP23, psi, 2, 6, [2.0 ** -k for k in range(2, 9)])
    assert est.slope <= 1.02


def test_box_dimension_empty_set_raises():
    psi0 = PsiSpec(kind="explicit-table", values=(0.0,) * 4)
    with pytest.raises(ValueError):
        estimate_box_dimension(EXP23, psi0, 1, 4, [0.5, 0.25, 0.125, 0.0625])


def test_box_dimension_validates_scales():
    psi = PsiSpec(kind="scaled-base", t=1.0, seq=EXP23)
    with pytest.raises(ValueError):
        estimate_box_dimension(EXP23, psi, 2, 4, [0.5, 0.25])
    with pytest.raises(ValueError):
        estimate_box_dimension(EXP23, psi, 2, 4, [0.5, 0.3, 0.25, 0.125])
