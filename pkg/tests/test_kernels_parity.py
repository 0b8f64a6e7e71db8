"""The compiled extension and the pure backend must agree bit-for-bit on
counts and to float precision on the analytic kernels."""

import numpy as np
import pytest

from qf3delta import _fallback, characters, expsums, forms, kernels

compiled = kernels.compiled_or_none()
needs_compiled = pytest.mark.skipif(compiled is None, reason="extension not built")

REF = forms.new_form((1, 1, -1, 0, 0, 0))


@needs_compiled
def test_count_sharp_parity():
    prob = forms.new_problem(REF, 1, 2, (1, 0, 0))
    args = (REF.coefficients, 1, 2, prob.lam, -40, 40, -40, 40, -40, 40)
    assert compiled.count_sharp_range(*args) == _fallback.count_sharp_range(*args)


@needs_compiled
def test_count_weighted_parity():
    prob = forms.new_problem(REF, 1, 1, (0, 0, 0))
    args = (REF.coefficients, 1, 1, prob.lam, 50.0, 0.6, 0.8, 1.0, 0.25, 1.0,
            -80, 80, -80, 80, -80, 80)
    fast = compiled.count_weighted_range(*args)
    slow = _fallback.count_weighted_range(*args)
    assert fast == pytest.approx(slow, abs=1e-12)


@needs_compiled
def test_generic_brute_parity():
    prob = forms.new_problem(REF, 1, 2, (1, 1, 1))
    M = 14
    unit = expsums._unit_sum_table(7, M)
    phase = expsums._phase_table(M)
    args = (M, 2, 1, REF.coefficients, prob.grad_lambda, prob.k_hat, 2, 1,
            prob.k_hat % M, (1, 2, 3), unit, phase)
    assert complex(compiled.generic_brute(*args)) == pytest.approx(
        complex(_fallback.generic_brute(*args)), abs=1e-10
    )


@needs_compiled
def test_generic_buckets_parity():
    prob = forms.new_problem(REF, 1, 2, (1, 1, 1))
    q2, L = 3, 2
    m2 = q2 * L * L
    unit = expsums._unit_sum_table(q2, m2)
    cdl = sum(ci * li for ci, li in zip((1, 0, 2), prob.lam)) % m2
    args = (q2 * L, m2, L, REF.coefficients, prob.grad_lambda, prob.k_hat,
            (1, 0, 2), cdl, unit)
    fast = np.asarray(compiled.generic_buckets(*args))
    slow = np.asarray(_fallback.generic_buckets(*args))
    assert np.abs(fast - slow).max() < 1e-10


@needs_compiled
def test_quad_phase_sum_parity():
    prob = forms.new_problem(REF, 9, 1, (0, 0, 0))
    chi = characters.enumerate_characters(4)[1]
    x = 600
    a0 = prob.m * REF.discriminant * REF.adjoint_value((1, 0, 0))
    spf = expsums._spf(x)
    sqrt_t, ord_t = expsums._sqrt_tables(a0, x)
    table = chi.value_table()
    fast = compiled.quad_phase_sum(x, prob.m_omega, a0, -3, spf, sqrt_t, ord_t, table, 4)
    slow = _fallback.quad_phase_sum(x, prob.m_omega, a0, -3, spf, sqrt_t, ord_t, table, 4)
    assert complex(fast) == pytest.approx(complex(slow), abs=1e-10)


def test_pure_backend_selectable(monkeypatch):
    import importlib
    import qf3delta.kernels as km

    monkeypatch.setenv("QF3DELTA_PURE", "1")
    importlib.reload(km)
    assert km.BACKEND == "pure"
    monkeypatch.delenv("QF3DELTA_PURE")
    importlib.reload(km)
