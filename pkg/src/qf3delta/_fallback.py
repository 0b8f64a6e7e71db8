"""Pure Python/numpy implementations of the hot kernels.

Same call signatures as the compiled ``_speedups`` module; selected by
``qf3delta.kernels`` when the extension is unavailable (or forced via the
``QF3DELTA_PURE`` environment variable).  Correctness first, numpy where it
helps; the compiled module is the performance path.
"""

from __future__ import annotations

import math

import numpy as np


def _first_ge(lo: int, residue: int, L: int) -> int:
    return lo + (residue - lo) % L


def _solve_x3_vec(a33, bq, cq):
    """Vectorized integer roots of a33*t^2 + bq*t + cq = 0 (a33 != 0).

    Returns (mask1, x3_1, mask2, x3_2); the second family is suppressed at
    double roots.
    """
    disc = bq * bq - 4 * a33 * cq
    ok = disc >= 0
    s = np.zeros_like(disc)
    d = disc[ok]
    r = np.sqrt(d.astype(np.float64)).astype(np.int64)
    r = np.where((r + 1) * (r + 1) <= d, r + 1, r)
    r = np.where(r * r > d, r - 1, r)
    s[ok] = r
    square = ok & (s * s == disc)
    num1 = -bq + s
    num2 = -bq - s
    den = 2 * a33
    m1 = square & (num1 % den == 0)
    m2 = square & (s != 0) & (num2 % den == 0)
    return m1, num1 // den, m2, num2 // den


def count_sharp_range(coeffs, m, L, lam, x1_lo, x1_hi, x2_lo, x2_hi, x3_lo, x3_hi):
    a11, a22, a33, a12, a13, a23 = (int(v) for v in coeffs)
    l1, l2, l3 = (int(v) for v in lam)
    total = 0
    x2s = np.arange(_first_ge(x2_lo, l2, L), x2_hi + 1, L, dtype=np.int64)
    if x2s.size == 0:
        return 0
    for x1 in range(_first_ge(x1_lo, l1, L), x1_hi + 1, L):
        bq = a13 * x1 + a23 * x2s
        cq = a11 * x1 * x1 + a22 * x2s * x2s + a12 * x1 * x2s - m
        if a33 != 0:
            m1, r1, m2, r2 = _solve_x3_vec(a33, bq, cq)
            for mask, roots in ((m1, r1), (m2, r2)):
                sel = mask & (roots >= x3_lo) & (roots <= x3_hi) & ((roots - l3) % L == 0)
                total += int(np.count_nonzero(sel))
        else:
            lin = bq != 0
            safe = np.where(lin, bq, 1)
            roots = -cq // safe
            sel = lin & (cq % safe == 0) & (roots >= x3_lo) & (roots <= x3_hi) & ((roots - l3) % L == 0)
            total += int(np.count_nonzero(sel))
            flat = (~lin) & (cq == 0)
            if np.any(flat):
                x3_first = _first_ge(x3_lo, l3, L)
                n3 = 0 if x3_first > x3_hi else (x3_hi - x3_first) // L + 1
                total += n3 * int(np.count_nonzero(flat))
    return total


def _bump_values(x1, x2, x3, b_scale, c1, c2, c3, radius, amplitude):
    u1 = x1 / b_scale - c1
    u2 = x2 / b_scale - c2
    u3 = x3 / b_scale - c3
    usq = (u1 * u1 + u2 * u2 + u3 * u3) / (radius * radius)
    inside = usq < 1.0
    w = np.zeros_like(usq)
    w[inside] = amplitude * np.exp(-1.0 / (1.0 - usq[inside]))
    return w


def count_weighted_range(
    coeffs, m, L, lam, b_scale, c1, c2, c3, radius, amplitude,
    x1_lo, x1_hi, x2_lo, x2_hi, x3_lo, x3_hi,
):
    a11, a22, a33, a12, a13, a23 = (int(v) for v in coeffs)
    l1, l2, l3 = (int(v) for v in lam)
    total = 0.0
    comp = 0.0

    def accumulate(values):
        nonlocal total, comp
        for w in values:
            y = w - comp
            t = total + y
            comp = (t - total) - y
            total = t

    x2s = np.arange(_first_ge(x2_lo, l2, L), x2_hi + 1, L, dtype=np.int64)
    if x2s.size == 0:
        return 0.0
    for x1 in range(_first_ge(x1_lo, l1, L), x1_hi + 1, L):
        bq = a13 * x1 + a23 * x2s
        cq = a11 * x1 * x1 + a22 * x2s * x2s + a12 * x1 * x2s - m
        if a33 != 0:
            m1, r1, m2, r2 = _solve_x3_vec(a33, bq, cq)
            for mask, roots in ((m1, r1), (m2, r2)):
                sel = mask & (roots >= x3_lo) & (roots <= x3_hi) & ((roots - l3) % L == 0)
                if np.any(sel):
                    w = _bump_values(
                        np.full(np.count_nonzero(sel), x1, dtype=np.float64),
                        x2s[sel].astype(np.float64),
                        roots[sel].astype(np.float64),
                        b_scale, c1, c2, c3, radius, amplitude,
                    )
                    accumulate(w)
        else:
            lin = bq != 0
            safe = np.where(lin, bq, 1)
            roots = -cq // safe
            sel = lin & (cq % safe == 0) & (roots >= x3_lo) & (roots <= x3_hi) & ((roots - l3) % L == 0)
            if np.any(sel):
                w = _bump_values(
                    np.full(np.count_nonzero(sel), x1, dtype=np.float64),
                    x2s[sel].astype(np.float64),
                    roots[sel].astype(np.float64),
                    b_scale, c1, c2, c3, radius, amplitude,
                )
                accumulate(w)
            flat = (~lin) & (cq == 0)
            for x2 in x2s[flat]:
                x3s = np.arange(_first_ge(x3_lo, l3, L), x3_hi + 1, L, dtype=np.int64)
                if x3s.size:
                    w = _bump_values(
                        np.full(x3s.size, x1, dtype=np.float64),
                        np.full(x3s.size, float(x2)),
                        x3s.astype(np.float64),
                        b_scale, c1, c2, c3, radius, amplitude,
                    )
                    accumulate(w)
    return total


def generic_brute(M, cond_mod, cond_scale, coeffs, grad, k_cond, wq, wl, kadd, c, unit_table, phase_table):
    a11, a22, a33, a12, a13, a23 = (int(v) for v in coeffs)
    g1, g2, g3 = (int(v) for v in grad)
    c1, c2, c3 = (int(v) for v in c)
    unit_table = np.asarray(unit_table)
    phase_table = np.asarray(phase_table)
    s = np.arange(M, dtype=np.int64)
    s2g, s3g = np.meshgrid(s, s, indexing="ij")
    acc = 0j
    for s1 in range(M):
        gdot = g1 * s1 + g2 * s2g + g3 * s3g
        fval = (
            a11 * s1 * s1 + a22 * s2g * s2g + a33 * s3g * s3g
            + a12 * s1 * s2g + a13 * s1 * s3g + a23 * s2g * s3g
        )
        t = (wq * fval + wl * gdot + kadd) % M
        ph = (c1 * s1 + c2 * s2g + c3 * s3g) % M
        vals = unit_table[t] * phase_table[ph]
        if cond_mod:
            keep = (k_cond + cond_scale * gdot) % cond_mod == 0
            acc += vals[keep].sum()
        else:
            acc += vals.sum()
    return complex(acc)


def generic_buckets(M_beta, M2, L, coeffs, grad, k_hat, c, c_dot_lam, unit_table):
    a11, a22, a33, a12, a13, a23 = (int(v) for v in coeffs)
    g1, g2, g3 = (int(v) for v in grad)
    c1, c2, c3 = (int(v) for v in c)
    unit_table = np.asarray(unit_table)
    out = np.zeros(M2, dtype=np.complex128)
    b = np.arange(M_beta, dtype=np.int64)
    b2g, b3g = np.meshgrid(b, b, indexing="ij")
    for b1 in range(M_beta):
        gdot = g1 * b1 + g2 * b2g + g3 * b3g
        hval = k_hat + gdot
        keep = hval % L == 0
        if not np.any(keep):
            continue
        fval = (
            a11 * b1 * b1 + a22 * b2g * b2g + a33 * b3g * b3g
            + a12 * b1 * b2g + a13 * b1 * b3g + a23 * b2g * b3g
        )
        t = (L * (hval + L * fval)) % M2
        u = (c_dot_lam + L * (c1 * b1 + c2 * b2g + c3 * b3g)) % M2
        np.add.at(out, u[keep], unit_table[t[keep]])
    return out


def quad_phase_sum(
    x_max, coprime_to, A, s0, spf, sqrtA_mod_p, ordA_mod_p, weight_table, weight_mod, n_min=1,
):
    from . import quadroots

    weight_table = np.asarray(weight_table)
    spf = np.asarray(spf)
    root_cache: dict[tuple[int, int], list[int]] = {}
    acc = 0j
    two_pi = 2 * math.pi
    for n in range(n_min, x_max + 1):
        if math.gcd(n, coprime_to) != 1:
            continue
        w = weight_table[n % weight_mod]
        if w == 0:
            continue
        if n == 1:
            acc += w
            continue
        rem = n
        roots = [0]
        m_cur = 1
        dead = False
        while rem > 1:
            p = int(spf[rem])
            pe = 1
            while rem % p == 0:
                rem //= p
                pe *= p
            key = (p, pe)
            local = root_cache.get(key)
            if local is None:
                local = quadroots.sqrts_mod_prime_power(A, p, _exp_of(pe, p))
                root_cache[key] = local
            if not local:
                dead = True
                break
            inv_m = pow(m_cur % pe, -1, pe)
            roots = [r + m_cur * ((l - r) * inv_m % pe) for r in roots for l in local]
            m_cur *= pe
        if dead:
            continue
        inv_s = pow(s0 % n, -1, n)
        for r in roots:
            v = r * inv_s % n
            acc += w * complex(math.cos(two_pi * v / n), math.sin(two_pi * v / n))
    return complex(acc)


def _exp_of(pe: int, p: int) -> int:
    e = 0
    while pe > 1:
        pe //= p
        e += 1
    return e


def hooley_phase_spectrum(n, A, roots):
    roots = np.asarray(roots, dtype=np.int64)
    h = np.arange(n, dtype=np.int64)
    phase = (h[:, None] * roots[None, :]) % n
    return np.exp(2j * np.pi * phase / n).sum(axis=1)
