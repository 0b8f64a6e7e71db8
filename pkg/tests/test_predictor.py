import math

import pytest

from qf3delta import forms, predictor
from qf3delta.deltaosc import REFERENCE_WEIGHT, BumpWeight

REF = forms.new_form((1, 1, -1, 0, 0, 0))


def ref_problem(m=1):
    return forms.new_problem(REF, m, 1, (0, 0, 0))


def test_main_term_basics():
    p = ref_problem()
    assert predictor.main_term(p, REFERENCE_WEIGHT, 1) == 0.0
    v2 = predictor.main_term(p, REFERENCE_WEIGHT, 200)
    v1 = predictor.main_term(p, REFERENCE_WEIGHT, 100)
    assert v2 / v1 == pytest.approx(2 * (1 + math.log(2) / math.log(100)))


def test_main_term_requires_square_case():
    p = ref_problem(m=2)
    with pytest.raises(ValueError, match="square"):
        predictor.main_term(p, REFERENCE_WEIGHT, 100)


def test_synthetic_fit_recovery():
    p = ref_problem()
    alpha, beta = 0.37, -1.2
    grid = [100, 200, 400, 800, 1600, 3200]

    class _FakeRes:
        def __init__(self, b):
            self.weighted_count = alpha * b * math.log(b) + beta * b

    import qf3delta.predictor as pr

    orig = pr.counter.count
    pr.counter.count = lambda problem, b, **kw: _FakeRes(b)
    try:
        rep = predictor.fit_and_compare(p, REFERENCE_WEIGHT, grid)
    finally:
        pr.counter.count = orig
    assert rep.alpha_fit == pytest.approx(alpha, abs=1e-10)
    assert rep.beta_fit == pytest.approx(beta, abs=1e-10)


def test_fit_rejects_bad_grids():
    p = ref_problem()
    with pytest.raises(ValueError):
        predictor.fit_and_compare(p, REFERENCE_WEIGHT, [10, 20, 30])
    with pytest.raises(ValueError):
        predictor.fit_and_compare(p, REFERENCE_WEIGHT, [10] * 7)


def test_weight_scaling_linearity():
    p = ref_problem()
    w2 = BumpWeight(center=REFERENCE_WEIGHT.center, radius=REFERENCE_WEIGHT.radius,
                    amplitude=2.0)
    c1 = predictor.leading_coefficient(p, REFERENCE_WEIGHT)
    c2 = predictor.leading_coefficient(p, w2)
    assert c2 == pytest.approx(2 * c1, rel=1e-7)
    grid = [50, 100, 150, 200, 300, 400]
    r1 = predictor.fit_and_compare(p, REFERENCE_WEIGHT, grid)
    r2 = predictor.fit_and_compare(p, w2, grid)
    assert r2.alpha_fit == pytest.approx(2 * r1.alpha_fit, rel=1e-12)
    assert r2.alpha_relative_error == pytest.approx(r1.alpha_relative_error, abs=1e-7)


def test_fit_deterministic():
    p = ref_problem()
    grid = [50, 100, 150, 200, 300, 400]
    r1 = predictor.fit_and_compare(p, REFERENCE_WEIGHT, grid)
    r2 = predictor.fit_and_compare(p, REFERENCE_WEIGHT, grid)
    assert r1.alpha_fit == r2.alpha_fit
    assert repr(r1.rows) == repr(r2.rows)  # NaN-tolerant bitwise comparison


def test_zero_weight_secondary():
    p = ref_problem()
    w0 = BumpWeight(center=(0.6, 0.8, 1.0), radius=0.25, amplitude=0.0)
    sc = predictor.secondary_constants(p, w0)
    assert sc.k_part == 0 and sc.b_part == 0 and sc.a_value == 0


def test_shell_directions_pairing():
    shell1 = predictor._shell_directions(1)
    assert len(shell1) == 13
    assert all(max(map(abs, c)) == 1 for c in shell1)
    # pairing keeps exactly one of each +-c
    for c in shell1:
        neg = tuple(-x for x in c)
        assert neg not in shell1 or neg == c
