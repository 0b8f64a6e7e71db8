#!/usr/bin/env python3
"""Compare the compiled kernels against the pure numpy/Python fallback.

Run:  python benchmarks/bench_kernels.py   (add --quick for smaller sizes)
"""

import argparse
import time

import numpy as np

from qf3delta import _fallback, characters, expsums, forms, kernels


def timed(fn, *args, repeat=1, **kwargs):
    best = float("inf")
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        best = min(best, time.perf_counter() - t0)
    return out, best


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--quick", action="store_true")
    args = parser.parse_args()

    compiled = kernels.compiled_or_none()
    if compiled is None:
        print("extension not built: nothing to compare (pure backend only)")
        return

    REF = forms.new_form((1, 1, -1, 0, 0, 0))
    prob = forms.new_problem(REF, 1, 1, (0, 0, 0))
    rows = []

    b = 800 if args.quick else 3000
    sharp_args = (REF.coefficients, 1, 1, prob.lam, -b, b, -b, b, -b, b)
    v1, t1 = timed(compiled.count_sharp_range, *sharp_args)
    v2, t2 = timed(_fallback.count_sharp_range, *sharp_args)
    assert v1 == v2
    rows.append((f"sharp count, box {2*b}^3", t1, t2))

    wb = 400 if args.quick else 1500
    w_args = (REF.coefficients, 1, 1, prob.lam, float(wb), 0.6, 0.8, 1.0, 0.25, 1.0,
              -2 * wb, 2 * wb, -2 * wb, 2 * wb, -2 * wb, 2 * wb)
    v1, t1 = timed(compiled.count_weighted_range, *w_args)
    v2, t2 = timed(_fallback.count_weighted_range, *w_args)
    assert abs(v1 - v2) < 1e-9
    rows.append((f"weighted count, B = {wb}", t1, t2))

    q = 24 if args.quick else 48
    unit = expsums._unit_sum_table(q, q)
    phase = expsums._phase_table(q)
    brute_args = (q, 0, 1, REF.coefficients, (0, 0, 0), 0, 1, 0, (-1) % q,
                  (1, 2, 3), unit, phase)
    v1, t1 = timed(compiled.generic_brute, *brute_args)
    v2, t2 = timed(_fallback.generic_brute, *brute_args)
    assert abs(v1 - v2) < 1e-8
    rows.append((f"complete exponential sum, q = {q}", t1, t2))

    q2 = 32 if args.quick else 128
    unit2 = expsums._unit_sum_table(q2, q2)
    bucket_args = (q2, q2, 1, REF.coefficients, prob.grad_lambda, prob.k_hat,
                   (1, 0, 0), 0, unit2)
    v1, t1 = timed(compiled.generic_buckets, *bucket_args)
    v2, t2 = timed(_fallback.generic_buckets, *bucket_args)
    assert np.abs(np.asarray(v1) - np.asarray(v2)).max() < 1e-8
    rows.append((f"bucketed alpha pass, q2 = {q2}", t1, t2))

    x = 10**4 if args.quick else 5 * 10**4
    chi = characters.principal_character(2)
    a0 = prob.m * REF.discriminant * REF.adjoint_value((1, 0, 0))
    spf = expsums._spf(x)
    sqrt_t, ord_t = expsums._sqrt_tables(a0, x)
    table = chi.value_table()
    qps_args = (x, prob.m_omega, a0, REF.discriminant, spf, sqrt_t, ord_t, table, 2)
    v1, t1 = timed(compiled.quad_phase_sum, *qps_args)
    v2, t2 = timed(_fallback.quad_phase_sum, *qps_args)
    assert abs(v1 - v2) < 1e-8
    rows.append((f"congruence phase sum, X = {x}", t1, t2))

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  {'compiled':>10}  {'pure':>10}  {'speedup':>8}")
    for name, t_c, t_p in rows:
        print(f"{name:<{width}}  {t_c:>9.4f}s  {t_p:>9.4f}s  {t_p / t_c:>7.1f}x")


if __name__ == "__main__":
    main()
