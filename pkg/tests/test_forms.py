import random

import pytest

from qf3delta import arith, forms

REFERENCE = (1, 1, -1, 0, 0, 0)  # x^2 + y^2 - z^2
HISTORIC = (0, 1, 0, 0, -4, 0)  # x2^2 - 4 x1 x3


def test_new_form_reference():
    f = forms.new_form(REFERENCE)
    assert f.discriminant == -1
    assert f.adjoint_value((1, 0, 0)) == -1
    assert f.adjoint_value((0, 0, 1)) == 1
    assert f((3, 4, 5)) == 0
    assert f.gradient((1, 1, 1)) == (2, 2, -2)


def test_new_form_historic():
    f = forms.new_form(HISTORIC)
    assert f.discriminant == -4


def test_new_form_rejections():
    with pytest.raises(ValueError, match="not indefinite"):
        forms.new_form((1, 1, 1, 0, 0, 0))
    with pytest.raises(ValueError, match="degenerate"):
        forms.new_form((1, 1, 0, 0, 0, 0))
    with pytest.raises(ValueError, match="convention"):
        forms.new_form((1, 1, -1, 1, 0, 0))


def test_adjugate_identity_random_forms():
    rng = random.Random(11)
    built = 0
    while built < 1000:
        coeffs = (
            rng.randint(-6, 6),
            rng.randint(-6, 6),
            rng.randint(-6, 6),
            2 * rng.randint(-3, 3),
            2 * rng.randint(-3, 3),
            2 * rng.randint(-3, 3),
        )
        try:
            f = forms.new_form(coeffs)
        except ValueError:
            continue
        built += 1
        a, adj, det = f.half_hessian, f.adjoint, f.discriminant
        for i in range(3):
            for j in range(3):
                s = sum(a[i][k] * adj[k][j] for k in range(3))
                assert s == (det if i == j else 0)


def test_new_problem_reference_cases():
    f = forms.new_form(REFERENCE)
    p = forms.new_problem(f, 1, 1, (0, 0, 0))
    assert p.lam == (0, 0, 0)
    assert p.k_hat == -1
    assert p.omega == 2
    assert p.square_case and p.d0 == 1

    p2 = forms.new_problem(f, 1, 2, (1, 1, 1))
    assert p2.k_hat == 0
    assert p2.h_hat((1, 0, 0)) == 2
    assert p2.h_hat((0, 0, 0)) == 0

    p3 = forms.new_problem(f, 2, 1, (0, 0, 0))
    assert not p3.square_case

    with pytest.raises(ValueError, match="W_m"):
        forms.new_problem(f, 1, 2, (0, 0, 0))


def test_h_hat_l1_problem():
    f = forms.new_form(REFERENCE)
    p = forms.new_problem(f, 5, 1, (0, 0, 0))
    for y in [(0, 0, 0), (3, -2, 1)]:
        assert p.h_hat(y) == -5


def test_square_case_flag_exhaustive():
    for coeffs in (REFERENCE, HISTORIC):
        f = forms.new_form(coeffs)
        for m in range(1, 10**4 + 1):
            for sign in (1, -1):
                val = -sign * m * f.discriminant
                expected = arith.is_perfect_square(val)
                p = forms.new_problem(f, sign * m, 1, (0, 0, 0))
                assert p.square_case == expected


def test_h_hat_divisibility_equivalence():
    rng = random.Random(3)
    f = forms.new_form(REFERENCE)
    for L in (1, 2, 3, 4, 6):
        # find a Gamma on W_m mod L
        m = 1
        gammas = [
            (a, b, c)
            for a in range(L)
            for b in range(L)
            for c in range(L)
            if (f((a, b, c)) - m) % L == 0
        ]
        prob = forms.new_problem(f, m, L, gammas[0])
        for _ in range(200):
            y = tuple(rng.randint(-50, 50) for _ in range(3))
            x = tuple(L * yi + li for yi, li in zip(y, prob.lam))
            lhs = (f(x) - m) % (L * L) == 0
            rhs = prob.h_hat(y) % L == 0
            assert lhs == rhs
