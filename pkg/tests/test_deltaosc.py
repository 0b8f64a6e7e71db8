import numpy as np
import pytest

from qf3delta import deltaosc, forms

REF = forms.new_form((1, 1, -1, 0, 0, 0))
W = deltaosc.REFERENCE_WEIGHT


@pytest.fixture(scope="module")
def kernel():
    return deltaosc.default_kernel()


class TestKernel:
    def test_h_support_examples(self, kernel):
        assert kernel.h(1.5, 0.0) == 0.0
        x = 0.6
        expected = kernel.omega0(np.array([0.6]))[0] / 0.6
        assert kernel.h(x, 0.0) == pytest.approx(expected, rel=1e-12)
        assert kernel.h(3.0, 0.5) == 0.0

    def test_h_rejects_nonpositive_x(self, kernel):
        with pytest.raises(ValueError):
            kernel.h(0.0, 1.0)

    def test_h_vec_matches_scalar(self, kernel):
        rng = np.random.default_rng(3)
        for x in (0.01, 0.13, 0.7, 1.3):
            ys = np.concatenate([rng.uniform(-6, 6, 64), [0.0]])
            vec = kernel.h_vec(x, ys)
            scal = np.array([kernel.h(x, float(y)) for y in ys])
            assert np.abs(vec - scal).max() < 1e-5

    def test_residual_vanishes_off_zero(self, kernel):
        for big_q in (4.0, 6.0, 8.0):
            for n in (1, -1, 7, 20, -13):
                assert abs(deltaosc.delta_residual(kernel, n, big_q)) < 1e-9

    def test_residual_at_zero_calibrates(self, kernel):
        c8 = kernel.c_q(8.0)
        res = deltaosc.delta_residual(kernel, 0, 8.0)
        assert res == pytest.approx(1.0 / c8, rel=1e-12)
        assert abs(kernel.c_q(16.0) - 1.0) < 1e-3

    def test_cq_improves_with_q(self, kernel):
        errs = [abs(kernel.c_q(float(q)) - 1.0) for q in (4, 8, 16, 32)]
        assert errs[0] > errs[1] > errs[2] > errs[3]


class TestOscillatory:
    def test_zero_weight(self, kernel):
        w0 = deltaosc.BumpWeight(center=(0.6, 0.8, 1.0), radius=0.25, amplitude=0.0)
        val, _ = deltaosc.i_r(kernel, w0, REF, (0, 0, 0), 3.5)
        assert abs(val) < 1e-12
        val2, _ = deltaosc.i_r(kernel, w0, REF, (1.0, 0.0, 0.0), 0.5)
        assert abs(val2) < 1e-12

    def test_kernel_support_kills_large_r(self, kernel):
        fmax = deltaosc._form_bound(REF, W)
        r = deltaosc.default_kernel().support_r_max(fmax) + 0.5
        val, _ = deltaosc.i_r(kernel, W, REF, (0, 0, 0), r)
        assert abs(val) < 1e-12

    def test_trivial_bound(self, kernel):
        mass = W.mass()
        rng = np.random.default_rng(1)
        for _ in range(6):
            r = float(rng.uniform(0.05, 1.2))
            b = tuple(rng.uniform(-3, 3, 3))
            val, _ = deltaosc.i_r(kernel, W, REF, b, r, target=1e-7)
            assert abs(val) <= 1.1 * mass
            val2, _ = deltaosc.i_r_star(kernel, W, REF, 1, 100.0, b, r, target=1e-7)
            assert abs(val2) <= 1.1 * mass

    def test_decay_in_b(self, kernel):
        r = 0.5
        vals = [
            abs(deltaosc.i_r(kernel, W, REF, (k, 0.0, 0.0), r, target=1e-9)[0])
            for k in (4, 8, 16)
        ]
        assert vals[0] > vals[1] > vals[2]

    def test_iq_hat_change_of_variables(self, kernel):
        problem = forms.new_problem(REF, 1, 1, (0, 0, 0))
        rng = np.random.default_rng(7)
        for _ in range(4):
            big_b = float(rng.uniform(40, 90))
            q = int(rng.integers(int(big_b / 3), int(big_b)))
            c = tuple(int(x) for x in rng.integers(-2, 3, 3))
            lhs, _ = deltaosc.i_q_hat(kernel, problem, W, q, c, big_b, target=1e-8)
            r = q / big_b
            rhs_core, _ = deltaosc.i_r_star(kernel, W, REF, 1, big_b, c, r, target=1e-10)
            rhs = big_b**3 * rhs_core  # L = 1, lift phase = 1
            assert lhs == pytest.approx(rhs, abs=2e-6 * big_b**3)


class TestSingularIntegral:
    def test_positive_and_consistent(self):
        report = deltaosc.singular_integral(W, REF)
        assert report["surface"] > 0
        assert report["discrepancy"] <= 1e-4 * report["surface"]

    def test_misses_cone(self):
        w_off = deltaosc.BumpWeight(center=(0.1, 0.1, 2.0), radius=0.2)
        with pytest.raises(ValueError):
            deltaosc.singular_integral_surface(w_off, REF)


class TestJandK:
    def test_j_decreasing_along_ray(self, kernel):
        vals = []
        for k in (1, 2, 3, 4, 5):
            rep = deltaosc.j_c(kernel, W, REF, (k, 0, 0), L=1, target=1e-7,
                               points_per_octave=6, point_budget=2 * 10**7)
            vals.append(abs(rep["value"]))
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_k0_stabilizes(self, kernel):
        rep = deltaosc.k0(kernel, W, REF, v_levels=(6, 7, 8, 9))
        diffs = rep["diffs"]
        i_of_w = rep["i_of_w"]
        # successive differences sit far below any linear-in-v trend
        # (true decay is superpolynomial; measured values are noise floor)
        for k, d in zip((6, 7, 8), diffs):
            assert d < 0.05 * i_of_w * 2.0**-k
        assert diffs[-1] < 1e-6


class TestCompareIStar:
    def test_zero_shift(self, kernel):
        big_b = 1e9  # m/B^2 below quadrature noise
        d = deltaosc.compare_i_star(kernel, W, REF, 1, big_b, (0.5, 0, 0), 0.5)
        assert d < 1e-7

    def test_shrinks_with_b(self, kernel):
        ds = [
            deltaosc.compare_i_star(kernel, W, REF, 1, float(b), (0.5, 0, 0), 0.5)
            for b in (1e2, 1e3, 1e4)
        ]
        assert ds[0] > ds[1] > ds[2]

    def test_scaling_diagnostic(self, kernel):
        # difference should scale like |m|/B^2 at fixed r
        d1 = deltaosc.compare_i_star(kernel, W, REF, 1, 100.0, (0, 0, 0), 0.5)
        d2 = deltaosc.compare_i_star(kernel, W, REF, 1, 200.0, (0, 0, 0), 0.5)
        assert d1 / d2 == pytest.approx(4.0, rel=0.2)
