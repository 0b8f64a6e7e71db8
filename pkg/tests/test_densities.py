import math
from fractions import Fraction

import pytest

from qf3delta import arith, densities, forms

REF = forms.new_form((1, 1, -1, 0, 0, 0))


def ref_problem(m=1, L=1, gamma=(0, 0, 0)):
    return forms.new_problem(REF, m, L, gamma)


def test_sigma3_reference():
    p = ref_problem()
    d = densities.sigma_p(p, 3)
    assert d.value == Fraction(4, 3)
    assert d.stabilization_level == 1
    assert d.smooth_certified


def test_sigma_p_generic_value():
    p = ref_problem()
    for prime in (5, 7, 11, 13):
        d = densities.sigma_p(p, prime)
        assert d.value == 1 + Fraction(1, prime)


def test_sigma2_stabilizes():
    p = ref_problem()
    d = densities.sigma_p(p, 2)
    assert d.value == 2  # counted: 4/4, 24/16, 128/64, 512/256 -> 2
    assert d.smooth_certified


def test_modp_count_is_p2_plus_p():
    prob = ref_problem()
    for p in arith.primes_up_to(50):
        if (2 * prob.m * REF.discriminant * prob.L) % p == 0:
            continue
        count, _ = densities._count_level(prob, p, 1, check_gradient=False)
        assert count == p * p + p


def test_singular_series_reference():
    prob = ref_problem()
    rational, dens = densities.singular_series_parts(prob)
    # only p = 2 is wild: (1 - 1/2) * 2 / (1 - 1/4) = 4/3
    assert rational == Fraction(4, 3)
    assert densities.singular_series(prob) == pytest.approx(8 / math.pi**2)


def test_empty_local_condition():
    # F = m has no 2-adic solutions for m = 7 with x = 0 mod 2:
    # F(2y) = 4 F(y) = 7 mod 2^k impossible
    prob = forms.new_problem(REF, 4, 2, (0, 0, 2))
    # (0,0,2): F = -4 = 4 mod 2? F(0,0,2) = -4; m=4: -4-4=-8 ≡ 0 mod 2 ok
    with pytest.raises(ValueError, match="empty local condition"):
        # actually verify: solutions x ≡ (0,0,0)-ish mod 2 with F=4:
        # all-even x gives F ≡ 0 or 4 mod 16...; pick a genuinely empty case
        densities.singular_series_parts(forms.new_problem(REF, 3, 2, (0, 1, 0)))


def test_refinement_mass_conservation():
    base = ref_problem()
    base_rational, _ = densities.singular_series_parts(base)
    for p0 in (7, 11):
        total = Fraction(0)
        lifts = 0
        for a in range(p0):
            for b in range(p0):
                for c in range(p0):
                    if (REF((a, b, c)) - base.m) % p0 == 0:
                        lifts += 1
                        refined = forms.new_problem(REF, base.m, p0, (a, b, c))
                        r, _ = densities.singular_series_parts(refined)
                        total += r
        assert lifts == p0 * p0 + p0
        assert total == base_rational


def test_nu_factor_generic_prime():
    prob = ref_problem()
    for p in (5, 7):
        val = densities.nu_factor(prob, p, 3)
        assert val == pytest.approx(1 + 1 / p, abs=1e-9)


def test_nu_factor_anchor_p_dividing_m_once():
    # p || m with p coprime to Omega: the t=2 term is -p^4/p^6
    prob = forms.new_problem(REF, 5, 1, (0, 0, 0))
    t0 = densities.nu_factor(prob, 5, 0)
    t1 = densities.nu_factor(prob, 5, 1)
    t2 = densities.nu_factor(prob, 5, 2)
    assert t0 == pytest.approx(1.0)
    assert t1 == pytest.approx(1.0)  # S-hat at p vanishes
    assert t2 - t1 == pytest.approx(-(5**4) / 5**6, abs=1e-9)


def test_nu_factor_consistency_with_sigma():
    prob = ref_problem()
    for p, t_max in ((2, 6), (3, 4), (5, 4)):
        partial = densities.nu_factor(prob, p, t_max)
        target = p ** (4 * densities._ord(prob.L, p)) * float(densities.sigma_p(prob, p).value)
        assert abs(partial - target) < 10 * p ** (-t_max / 2)
