import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gamedyn.rng import uniforms_block
from gamedyn.stats import (clopper_pearson, mean_and_se, reg_inc_beta)


def test_reg_inc_beta_endpoints_and_symmetry():
    assert reg_inc_beta(0.0, 2.0, 3.0) == 0.0
    assert reg_inc_beta(1.0, 2.0, 3.0) == 1.0
    # I_x(a,b) = 1 - I_{1-x}(b,a) across a 100-point grid
    for i in range(1, 101):
        x = i / 101.0
        for a, b in ((2.0, 5.0), (0.5, 0.5), (10.0, 1.5)):
            assert reg_inc_beta(x, a, b) == pytest.approx(
                1.0 - reg_inc_beta(1.0 - x, b, a), abs=1e-10)


def test_reg_inc_beta_uniform_case():
    # I_x(1,1) is the identity
    for x in (0.0, 0.2, 0.5, 0.99, 1.0):
        assert reg_inc_beta(x, 1.0, 1.0) == pytest.approx(x, abs=1e-14)


def test_reg_inc_beta_closed_form_powers():
    # I_x(a,1) = x^a and I_x(1,b) = 1-(1-x)^b
    for x in (0.1, 0.5, 0.9):
        for a in (0.5, 1.0, 3.0, 10.0):
            assert reg_inc_beta(x, a, 1.0) == pytest.approx(x ** a,
                                                            rel=1e-13)
            assert reg_inc_beta(x, 1.0, a) == pytest.approx(
                1.0 - (1.0 - x) ** a, rel=1e-12)


def test_reg_inc_beta_against_scipy():
    betainc = pytest.importorskip("scipy.special").betainc
    pts = [(x / 20, a, b)
           for x in range(1, 20)
           for a, b in ((0.5, 0.5), (1.0, 7.0), (3.5, 2.0), (40.0, 60.0))]
    worst = max(abs(reg_inc_beta(x, a, b) - betainc(a, b, x))
                for x, a, b in pts)
    assert worst < 1e-12


def test_reg_inc_beta_domain():
    with pytest.raises(ValueError):
        reg_inc_beta(-0.1, 1.0, 1.0)
    with pytest.raises(ValueError):
        reg_inc_beta(1.1, 1.0, 1.0)
    with pytest.raises(ValueError):
        reg_inc_beta(0.5, 0.0, 1.0)


def test_clopper_pearson_zero_successes_closed_form():
    # k=0: lo = 0 and hi solves (1-hi)^s = alpha/2
    iv = clopper_pearson(0, 10, confidence=0.995)
    assert iv.lo == 0.0
    assert iv.hi == pytest.approx(1.0 - 0.0025 ** 0.1, abs=1e-9)
    assert iv.point == 0.0
    assert iv.confidence == 0.995


def test_clopper_pearson_all_successes_closed_form():
    # k=s mirrors k=0: hi = 1 and lo = (alpha/2)^(1/s)
    iv = clopper_pearson(10, 10, confidence=0.995)
    assert iv.hi == 1.0
    assert iv.lo == pytest.approx(0.0025 ** 0.1, abs=1e-9)
    assert iv.point == 1.0


def test_clopper_pearson_symmetry():
    for k, s in ((3, 17), (0, 9), (5, 10), (12, 40)):
        a = clopper_pearson(k, s, confidence=0.995)
        b = clopper_pearson(s - k, s, confidence=0.995)
        assert a.lo == pytest.approx(1.0 - b.hi, abs=1e-9)
        assert a.hi == pytest.approx(1.0 - b.lo, abs=1e-9)


def test_clopper_pearson_against_scipy_beta_ppf():
    beta = pytest.importorskip("scipy.stats").beta
    for k, s in ((1, 30), (7, 30), (15, 30), (29, 30), (250, 1000)):
        iv = clopper_pearson(k, s, confidence=0.995)
        lo = beta.ppf(0.0025, k, s - k + 1)
        hi = beta.ppf(0.9975, k + 1, s - k)
        assert iv.lo == pytest.approx(lo, abs=1e-8)
        assert iv.hi == pytest.approx(hi, abs=1e-8)


@given(st.integers(0, 60), st.integers(1, 60))
@settings(max_examples=80, deadline=None)
def test_clopper_pearson_interval_sane(k, s):
    if k > s:
        k, s = s, k
        if s == 0:
            return
    iv = clopper_pearson(k, s, confidence=0.995)
    assert 0.0 <= iv.lo <= iv.point <= iv.hi <= 1.0
    assert iv.point == pytest.approx(k / s)


def test_clopper_pearson_narrows_with_samples():
    w100 = clopper_pearson(50, 100, 0.995)
    w1000 = clopper_pearson(500, 1000, 0.995)
    assert (w1000.hi - w1000.lo) < (w100.hi - w100.lo)


def test_clopper_pearson_coverage():
    # exactness means conservative coverage at every p; simulate binomial
    # draws with the package stream and count interval hits
    total = 0
    covered = 0
    s = 200
    for pi, p in enumerate((0.1, 0.5, 0.9)):
        datasets = 667 if pi < 2 else 666
        u = uniforms_block(1000 + pi, 0, datasets * s)
        for d in range(datasets):
            k = int((u[d * s:(d + 1) * s] < p).sum())
            iv = clopper_pearson(k, s, confidence=0.995)
            covered += iv.lo <= p <= iv.hi
            total += 1
    assert total == 2000
    assert covered / total >= 0.99


def test_clopper_pearson_monotone_in_successes():
    s = 40
    prev = clopper_pearson(0, s, 0.995)
    for k in range(1, s + 1):
        cur = clopper_pearson(k, s, 0.995)
        assert cur.lo >= prev.lo - 1e-12
        assert cur.hi >= prev.hi - 1e-12
        prev = cur


def test_clopper_pearson_rejects_bad_counts():
    with pytest.raises(ValueError):
        clopper_pearson(5, 4)
    with pytest.raises(ValueError):
        clopper_pearson(-1, 4)
    with pytest.raises(ValueError):
        clopper_pearson(0, 0)
    with pytest.raises(ValueError):
        clopper_pearson(1, 10, confidence=1.0)


def test_mean_and_se_known_values():
    st_ = mean_and_se([1.0, 2.0, 3.0, 4.0])
    assert st_.mean == pytest.approx(2.5)
    # sample sd = sqrt(5/3), se = sd/2
    assert st_.se == pytest.approx(math.sqrt(5.0 / 3.0) / 2.0)
    assert st_.count == 4
    assert not st_.single_sample


def test_mean_and_se_single_sample_flagged():
    st_ = mean_and_se([7.25])
    assert st_.mean == 7.25
    assert st_.se == 0.0
    assert st_.single_sample


def test_mean_and_se_constant_data():
    st_ = mean_and_se([3.0] * 50)
    assert st_.mean == 3.0
    assert st_.se == 0.0


def test_mean_and_se_empty_rejected():
    with pytest.raises(ValueError):
        mean_and_se([])


@given(st.lists(st.floats(-1e6, 1e6), min_size=2, max_size=40))
@settings(max_examples=60, deadline=None)
def test_mean_and_se_matches_direct_formula(xs):
    st_ = mean_and_se(xs)
    n = len(xs)
    mean = sum(xs) / n
    var = sum((v - mean) ** 2 for v in xs) / (n - 1)
    assert st_.mean == pytest.approx(mean, rel=1e-9, abs=1e-9)
    assert st_.se == pytest.approx(math.sqrt(var / n), rel=1e-6, abs=1e-9)
