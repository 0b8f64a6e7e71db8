import cmath
import math
import random

import numpy as np
import pytest

from qf3delta import arith, characters, expsums, forms, quadroots

REF = forms.new_form((1, 1, -1, 0, 0, 0))


def ref_problem(m=1, L=1, gamma=(0, 0, 0)):
    return forms.new_problem(REF, m, L, gamma)


@pytest.fixture(scope="module")
def prob():
    return ref_problem()


class TestSHat:
    def test_anchor_q3_c0(self, prob):
        assert expsums.s_hat(prob, 3, (0, 0, 0)).value == pytest.approx(9, abs=1e-9)

    def test_q1(self, prob):
        assert expsums.s_hat(prob, 1, (0, 0, 0)).value == pytest.approx(1)

    def test_q9_vanishes(self, prob):
        assert abs(expsums.s_hat(prob, 9, (0, 0, 0)).value) < 1e-8

    def test_zero_values_match_mu_squared(self, prob):
        for q in range(1, 40):
            if math.gcd(q, prob.m_omega) != 1:
                continue
            expected = q * q * arith.mobius(q) ** 2
            assert expsums.s_hat(prob, q, (0, 0, 0)).value == pytest.approx(
                expected, abs=1e-7 * max(1, expected)
            )

    def test_budget(self, prob):
        with pytest.raises(expsums.BudgetError):
            expsums.s_hat(prob, 5000, (0, 0, 0))


class TestTSum:
    def test_anchor(self):
        assert expsums.t_sum(REF, 1, (0, 0, 0), 3).value == pytest.approx(9, abs=1e-9)
        assert expsums.t_explicit(REF, 1, (0, 0, 0), 3).value == pytest.approx(9, abs=1e-9)

    def test_q1(self):
        assert expsums.t_sum(REF, 1, (0, 0, 0), 1).value == pytest.approx(1)

    def test_explicit_matches_brute(self):
        rng = random.Random(1)
        for q in list(range(1, 30)) + [35, 45, 49]:
            if math.gcd(q, 2 * REF.discriminant) != 1:
                continue
            for _ in range(3):
                m = rng.choice([1, 2, 5, -3])
                c = tuple(rng.randint(-4, 4) for _ in range(3))
                brute = expsums.t_sum(REF, m, c, q).value
                explicit = expsums.t_explicit(REF, m, c, q).value
                assert brute == pytest.approx(explicit, abs=1e-7 * max(1.0, abs(brute)))

    def test_explicit_rejects_even(self):
        with pytest.raises(ValueError):
            expsums.t_explicit(REF, 1, (0, 0, 0), 6)


class TestCrtSplit:
    def test_product_identity_reference(self, prob):
        for q in range(1, 61):
            q2 = arith.part_toward(q, prob.m_omega)
            q1 = q // q2
            whole = expsums.s_hat(prob, q, (1, 2, 0)).value
            part = (
                expsums.s1_hat(prob, q1, q2, (1, 2, 0)).value
                * expsums.s2_hat(prob, q1, q2, (1, 2, 0)).value
            )
            assert whole == pytest.approx(part, abs=1e-8 * max(1.0, abs(whole)))

    def test_product_identity_random_instances(self):
        rng = random.Random(9)
        for _ in range(8):
            L = rng.choice([1, 2, 3])
            m = rng.choice([1, 4, 9, 5, -7])
            gammas = [
                (a, b, cc)
                for a in range(L)
                for b in range(L)
                for cc in range(L)
                if (REF((a, b, cc)) - m) % L == 0
            ]
            if not gammas:
                continue
            problem = forms.new_problem(REF, m, L, rng.choice(gammas))
            q = rng.randint(2, 60 // L + 2)
            q2 = arith.part_toward(q, problem.m_omega)
            q1 = q // q2
            c = tuple(rng.randint(-3, 3) for _ in range(3))
            whole = expsums.s_hat(problem, q, c).value
            part = (
                expsums.s1_hat(problem, q1, q2, c).value
                * expsums.s2_hat(problem, q1, q2, c).value
            )
            assert whole == pytest.approx(part, abs=1e-8 * max(1.0, abs(whole)))

    def test_invalid_split_rejected(self, prob):
        with pytest.raises(ValueError):
            expsums.s1_hat(prob, 2, 3, (0, 0, 0))


class TestSalie:
    def test_anchor_q7(self, prob):
        val = expsums.s1_salie_form(prob, 7, 1, (1, 0, 0))
        expected = 49 * 2 * math.cos(2 * math.pi / 7)
        assert val == pytest.approx(expected, abs=1e-9)

    def test_anchor_q3(self, prob):
        val = expsums.s1_salie_form(prob, 3, 1, (1, 0, 0))
        assert val == pytest.approx(-9, abs=1e-9)

    def test_salie_matches_direct_character_sum(self, prob):
        for q in [3, 5, 7, 9, 11, 13, 15, 21, 25]:
            for c in [(1, 0, 0), (1, 1, 1), (2, 1, 0)]:
                for l1, l2 in [(1, 1), (1, 2), (2, 1)]:
                    if math.gcd(q, prob.m_omega * l1) != 1:
                        continue
                    direct = expsums.tcal_direct(REF, prob.m, q, l1, l2, c, L=prob.L)
                    closed = expsums.salie_eval(prob, q, l1, l2, c).value
                    assert direct == pytest.approx(closed, abs=1e-8 * max(1.0, abs(direct)))

    def test_salie_form_matches_assembled_s1(self, prob):
        # the squared-modulus root form against the character-sum path
        for q in [3, 5, 7, 11, 15]:
            for l in [1, 2, 4]:
                for c in [(1, 0, 0), (1, 1, 1)]:
                    lhs = expsums.s1_salie_form(prob, q, l, c)
                    rhs = expsums.s1_assembled(prob, q, l, c)
                    assert lhs == pytest.approx(rhs, abs=1e-8 * max(1.0, abs(lhs)))

    def test_salie_form_nontrivial_m_part(self):
        problem = ref_problem(m=9)
        for q1 in (5, 7, 11, 13):
            for l in (1, 2, 4):
                lhs = expsums.s1_salie_form(problem, 3 * q1, l, (1, 0, 0))
                rhs = expsums.s1_assembled(problem, 3 * q1, l, (1, 0, 0))
                assert lhs == pytest.approx(rhs, abs=1e-7 * max(1.0, abs(lhs)))

    def test_rejects_non_square_case(self):
        problem = ref_problem(m=2)
        with pytest.raises(ValueError):
            expsums.salie_eval(problem, 3, 1, 1, (1, 0, 0))


class TestRhoHooley:
    def test_rho_examples(self):
        assert expsums.rho_c(11, 5) == 2
        assert expsums.rho_c(3, 2) == 0
        assert expsums.rho_c(9, 1) == 2

    def test_rho_prime_legendre(self):
        for neg in (1, 5, -7):
            for p in arith.primes_up_to(500):
                if p == 2 or (2 * neg) % p == 0:
                    continue
                assert expsums.rho_c(p, neg) == 1 + arith.jacobi(neg, p)

    def test_rho_multiplicativity(self):
        rng = random.Random(2)
        for _ in range(300):
            n1, n2 = rng.randint(1, 100), rng.randint(1, 100)
            if math.gcd(n1, n2) != 1:
                continue
            a = rng.randint(-50, 50)
            assert expsums.rho_c(n1 * n2, a) == expsums.rho_c(n1, a) * expsums.rho_c(n2, a)

    def test_hooley_examples(self):
        assert expsums.hooley_s(0, 21, 4) == pytest.approx(expsums.rho_c(21, 4))
        assert expsums.hooley_s(1, 5, 1) == pytest.approx(2 * math.cos(2 * math.pi / 5))
        assert expsums.hooley_s(3, 1, 7) == pytest.approx(1.0)

    def test_hooley_twisted_multiplicativity(self):
        rng = random.Random(3)
        for _ in range(100):
            n1, n2 = rng.randint(2, 60), rng.randint(2, 60)
            if math.gcd(n1, n2) != 1:
                continue
            a = rng.randint(-30, 30)
            h = rng.randint(0, n1 * n2 - 1)
            lhs = expsums.hooley_s(h, n1 * n2, a)
            rhs = expsums.hooley_s(
                h * arith.mod_inverse(n2, n1), n1, a
            ) * expsums.hooley_s(h * arith.mod_inverse(n1, n2), n2, a)
            assert lhs == pytest.approx(rhs, abs=1e-9)

    def test_hooley_second_moment(self):
        for neg in (1, 5):
            for n in range(2, 300):
                roots = np.array(quadroots.sqrts_mod(neg, n), dtype=np.int64)
                if roots.size == 0:
                    continue
                h = np.arange(n)
                spectrum = np.exp(2j * np.pi * (h[:, None] * roots[None, :] % n) / n).sum(axis=1)
                assert (np.abs(spectrum) ** 2).sum() <= n * roots.size + 1e-6

    def test_v_sum(self):
        assert expsums.v_sum(4) == pytest.approx(0, abs=1e-12)
        assert expsums.v_sum(6) == pytest.approx(1)
        assert expsums.v_sum(12) == pytest.approx(0, abs=1e-12)
        for q in range(1, 200):
            assert expsums.v_sum(q) == pytest.approx(arith.mobius(q) ** 2, abs=1e-9)


class TestSCal:
    def test_matches_s2_factor(self, prob):
        # the bucketed alpha pass against the direct sigma_2 loop
        for q2 in (1, 2, 4, 8):
            for q1 in (1, 3, 5, 7):
                for c in [(0, 0, 0), (1, 0, 0), (1, -2, 3)]:
                    m2 = q2 * prob.L**2
                    s2 = expsums.s2_hat(prob, q1, q2, c).value
                    cdl = sum(ci * li for ci, li in zip(c, prob.lam))
                    phase = cmath.exp(2j * math.pi * (arith.mod_inverse(q1, m2) * cdl % m2) / m2)
                    scal = expsums.s_cal(prob, q2, q1, c).value
                    assert s2 * phase == pytest.approx(scal, abs=1e-8 * max(1.0, abs(scal)))

    def test_reconstruction_identity(self):
        problem = forms.new_problem(REF, 1, 2, (1, 1, 1))
        rng = random.Random(4)
        for q2 in (1, 3):
            m2 = q2 * 4
            for _ in range(4):
                c = tuple(rng.randint(-5, 5) for _ in range(3))
                x = rng.choice([x for x in range(1, m2 + 1) if math.gcd(x, m2) == 1])
                direct = expsums.s_cal(problem, q2, x, c).value
                rebuilt = expsums.s_cal_from_characters(problem, q2, x, c)
                assert rebuilt == pytest.approx(direct, abs=1e-9 * max(1.0, abs(direct)))

    def test_a_hat_bounded_by_max(self, prob):
        for q2 in (2, 4):
            m2 = q2
            vec = expsums.s_cal_vector(prob, q2, (1, 1, 0))
            cap = np.abs(vec).max()
            for chi in characters.enumerate_characters(m2):
                assert abs(expsums.a_hat(prob, q2, chi, (1, 1, 0)).value) <= cap + 1e-9

    def test_trivial_q2_1(self, prob):
        vec = expsums.s_cal_vector(prob, 1, (2, 0, 0))
        chi = characters.principal_character(1)
        assert expsums.a_hat(prob, 1, chi, (2, 0, 0)).value == pytest.approx(complex(vec[0]))


class TestTheta:
    def test_example_principal(self):
        chi = characters.principal_character(5)
        assert expsums.theta_const(5, 6, 0, chi) == pytest.approx(4 / 15)

    def test_t0_principal_s1(self):
        for q in (2, 3, 8, 12):
            chi = characters.principal_character(q)
            assert expsums.theta_const(q, 1, 0, chi) == pytest.approx(arith.euler_phi(q) / q)

    def test_nonprincipal_gauss_modulus(self):
        for chi in characters.enumerate_characters(5):
            if chi.is_principal:
                continue
            val = expsums.theta_const(5, 1, 1, chi)
            assert abs(val) == pytest.approx(math.sqrt(5) / 5, abs=1e-10)

    def test_closed_form_matches_direct(self):
        rng = random.Random(8)
        for q in (3, 4, 5, 8, 9, 12, 15, 16, 24, 45):
            for chi in characters.enumerate_characters(q):
                for t in (0, 1, 2, rng.randint(0, q)):
                    for s in (1, 7, 77):
                        if math.gcd(s, q) != 1:
                            continue
                        direct = expsums.theta_const_direct(q, s, t, chi)
                        closed = expsums.theta_const(q, s, t, chi)
                        assert closed == pytest.approx(direct, abs=1e-9)


class TestUSum:
    def test_empty(self, prob):
        chi = characters.principal_character(1)
        assert expsums.u_sum(prob, 1, 1, (1, 0, 0), chi, 0) == 0

    def test_square_slope(self, prob):
        chi = characters.principal_character(1)
        x = 30000
        val = expsums.u_sum(prob, 1, 1, (1, 0, 0), chi, x)
        assert abs(val.imag) < 1e-6
        assert val.real / x == pytest.approx(8 / math.pi**2, rel=0.02)

    def test_nonsquare_decay(self, prob):
        chi = characters.principal_character(1)
        # -F*(c) = 2 for c = (1, 1, 0): irreducible congruence, sublinear sum
        vals = [abs(expsums.u_sum(prob, 1, 1, (1, 1, 0), chi, x)) / x for x in (1000, 10000, 50000)]
        assert vals[0] > vals[1] > vals[2]

    def test_matches_pure_backend_small(self, prob):
        from qf3delta import _fallback

        chi = characters.principal_character(2)
        x = 400
        fast = expsums.u_sum(prob, 1, 2, (1, 0, 0), chi, x)
        a0 = prob.m * REF.discriminant * REF.adjoint_value((1, 0, 0))
        slow = _fallback.quad_phase_sum(
            x, prob.m_omega, (2 * 1) ** 2 * a0, REF.discriminant,
            expsums._spf(x), None, None, chi.value_table(), chi.modulus,
        )
        assert fast == pytest.approx(slow, abs=1e-9)


class TestGamma:
    def test_reference_value(self, prob):
        chi = characters.principal_character(1)
        gv = expsums.gamma_const(prob, chi, 1, 1, (1, 0, 0), k_max=20000)
        assert gv.value.real == pytest.approx(8 / math.pi**2, abs=2e-4)
        assert abs(gv.value.imag) < 1e-12

    def test_matches_measured_slope(self, prob):
        chi = characters.principal_character(1)
        x = 50000
        slope = expsums.u_sum(prob, 1, 1, (1, 0, 0), chi, x) / x
        gv = expsums.gamma_const(prob, chi, 1, 1, (1, 0, 0))
        assert slope.real == pytest.approx(gv.value.real, rel=0.02)

    def test_rejects_nonsquare(self, prob):
        chi = characters.principal_character(1)
        with pytest.raises(ValueError):
            expsums.gamma_const(prob, chi, 1, 1, (1, 1, 0))

    def test_conductor_decay(self, prob):
        # larger conductor gives smaller leading density (qualitative)
        vals = []
        for q2 in (2, 4, 8):
            m2 = q2
            chis = [c for c in characters.enumerate_characters(m2) if c.conductor == m2]
            if not chis:
                continue
            gv = expsums.gamma_const(prob, chis[0], 1, q2, (1, 0, 0), k_max=4000)
            vals.append((m2, abs(gv.value)))
        assert vals[-1][1] <= vals[0][1] + 1e-3


def f_c_brute(problem, c, x_max):
    import cmath as _cm

    total = 0j
    for q in range(1, x_max + 1):
        cdl = sum(ci * li for ci, li in zip(c, problem.lam))
        m2 = q * problem.L**2
        phase = _cm.exp(2j * math.pi * (cdl % m2) / m2)
        total += phase * expsums.s_hat(problem, q, c).value / (q * q)
    return total


class TestFcSum:
    def test_direct_matches_roots_reference(self, prob):
        for c in [(1, 0, 0), (1, 1, 1), (2, 1, 2)]:
            for x in (50, 137):
                direct = expsums.f_c_direct(prob, c, x)
                rooted = expsums.f_c_sum(prob, c, x)
                assert rooted == pytest.approx(direct, abs=1e-8 * x)

    def test_assembly_matches_brute_oracle(self):
        # full brute-force master sums vs both assembled paths, including
        # an instance with a nontrivial prime in m coprime to Omega
        for m, L, gamma, c in [
            (1, 1, (0, 0, 0), (1, 0, 0)),
            (9, 1, (0, 0, 0), (1, 0, 0)),
            (9, 1, (0, 0, 0), (2, 1, 1)),
            (1, 2, (1, 1, 1), (1, 2, 0)),
        ]:
            problem = forms.new_problem(REF, m, L, gamma)
            x = 40
            brute = f_c_brute(problem, c, x)
            direct = expsums.f_c_direct(problem, c, x)
            rooted = expsums.f_c_sum(problem, c, x)
            assert direct == pytest.approx(brute, abs=1e-8 * x)
            assert rooted == pytest.approx(brute, abs=1e-8 * x)

    def test_rejects_zero_c(self, prob):
        with pytest.raises(ValueError):
            expsums.f_c_sum(prob, (0, 0, 0), 100)

    def test_empty(self, prob):
        assert expsums.f_c_sum(prob, (1, 0, 0), 0) == 0


class TestDecomp:
    def test_three_way_reference(self, prob):
        report = expsums.decomp_check(prob, (1, 0, 0), 200)
        assert report["max_deviation"] < 1e-8 * 200

    def test_three_way_nontrivial_m(self):
        problem = ref_problem(m=9)
        assert problem.m_omega_radical == 3
        report = expsums.decomp_check(problem, (1, 0, 0), 120)
        assert report["max_deviation"] < 1e-8 * 120

    def test_three_way_character_blocks(self):
        # c = (2,0,0) keeps bad-part vectors alive at moduli with nontrivial
        # character groups, exercising the chi(q2) twist in grouping 2
        problem = ref_problem(m=9)
        report = expsums.decomp_check(problem, (2, 0, 0), 96)
        assert report["max_deviation"] < 1e-8 * 96

    def test_x1_trivial(self, prob):
        report = expsums.decomp_check(prob, (2, 1, 1), 1)
        assert report["max_deviation"] < 1e-10


class TestEta:
    def test_square_direction_runs(self, prob):
        ev = expsums.eta(prob, (1, 0, 0), k_max=4000)
        assert np.isfinite(ev.value.real)
        assert abs(ev.value.imag) < 1e-8

    def test_isotropic_direction(self, prob):
        ev = expsums.eta(prob, (3, 4, 5), k_max=2000)
        assert np.isfinite(ev.value.real)

    def test_rejects_nonsquare(self, prob):
        with pytest.raises(ValueError):
            expsums.eta(prob, (1, 1, 0))


class TestWeilBound:
    def test_odd_squarefree_moduli(self, prob):
        c = (1, 2, 0)
        fstar = REF.adjoint_value(c)
        for r in range(3, 200, 2):
            if arith.mobius(r) == 0 or math.gcd(r, 2 * REF.discriminant) != 1:
                continue
            for s, l in ((1, 1), (2, 1), (1, 2)):
                if math.gcd(r, s) != 1:
                    continue
                val = abs(expsums.tcal_direct(REF, prob.m, r, s, l, c))
                bound = arith.tau(r) * math.sqrt(r) * math.sqrt(
                    math.gcd(r, math.gcd(prob.m, fstar) if fstar else prob.m)
                )
                assert val <= bound + 1e-6
