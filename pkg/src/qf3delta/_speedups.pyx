# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels for the hot loops.

Mirrors the API of ``qf3delta._fallback``; ``qf3delta.kernels`` picks one of
the two at import time.  All kernels are sequential and deterministic; any
parallelism happens one level up via range splitting with ordered reduction.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, exp, sin, sqrt

ctypedef long long i64

cdef double TWO_PI = 6.283185307179586476925286766559


cdef inline i64 c_gcd(i64 a, i64 b) noexcept nogil:
    cdef i64 t
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        t = a % b
        a = b
        b = t
    return a


cdef inline i64 c_mod(i64 a, i64 m) noexcept nogil:
    cdef i64 r = a % m
    if r < 0:
        r += m
    return r


cdef inline i64 c_isqrt(i64 n) noexcept nogil:
    """Exact integer sqrt for 0 <= n < 2^62."""
    if n < 0:
        return -1
    cdef i64 r = <i64> sqrt(<double> n)
    while r > 0 and r * r > n:
        r -= 1
    while (r + 1) * (r + 1) <= n:
        r += 1
    return r


cdef inline i64 c_modinv(i64 a, i64 m) noexcept nogil:
    """Inverse of a mod m (assumes gcd(a, m) = 1, m >= 1)."""
    cdef i64 old_r = c_mod(a, m), r = m
    cdef i64 old_s = 1, s = 0
    cdef i64 q, t
    while r:
        q = old_r / r
        t = old_r - q * r
        old_r = r
        r = t
        t = old_s - q * s
        old_s = s
        s = t
    return c_mod(old_s, m)


# ---------------------------------------------------------------------------
# Lattice point counting
# ---------------------------------------------------------------------------

cdef inline i64 _first_ge(i64 lo, i64 residue, i64 L) noexcept nogil:
    """Smallest x >= lo with x = residue (mod L)."""
    return lo + c_mod(residue - lo, L)


def count_sharp_range(
    coeffs,
    i64 m,
    i64 L,
    lam,
    i64 x1_lo, i64 x1_hi,
    i64 x2_lo, i64 x2_hi,
    i64 x3_lo, i64 x3_hi,
):
    """Count solutions of F(x)=m, x = lam (mod L), in the inclusive box."""
    cdef i64 a11 = coeffs[0], a22 = coeffs[1], a33 = coeffs[2]
    cdef i64 a12 = coeffs[3], a13 = coeffs[4], a23 = coeffs[5]
    cdef i64 l1 = lam[0], l2 = lam[1], l3 = lam[2]
    cdef i64 total = 0
    cdef i64 x1, x2, bq, cq, disc, s, num, x3, n_range
    with nogil:
        x1 = _first_ge(x1_lo, l1, L)
        while x1 <= x1_hi:
            x2 = _first_ge(x2_lo, l2, L)
            while x2 <= x2_hi:
                bq = a13 * x1 + a23 * x2
                cq = a11 * x1 * x1 + a22 * x2 * x2 + a12 * x1 * x2 - m
                if a33 != 0:
                    disc = bq * bq - 4 * a33 * cq
                    if disc >= 0:
                        s = c_isqrt(disc)
                        if s * s == disc:
                            num = -bq + s
                            if num % (2 * a33) == 0:
                                x3 = num / (2 * a33)
                                if x3_lo <= x3 <= x3_hi and c_mod(x3 - l3, L) == 0:
                                    total += 1
                            if s != 0:
                                num = -bq - s
                                if num % (2 * a33) == 0:
                                    x3 = num / (2 * a33)
                                    if x3_lo <= x3 <= x3_hi and c_mod(x3 - l3, L) == 0:
                                        total += 1
                elif bq != 0:
                    if cq % bq == 0:
                        x3 = -cq / bq
                        if x3_lo <= x3 <= x3_hi and c_mod(x3 - l3, L) == 0:
                            total += 1
                else:
                    if cq == 0:
                        x3 = _first_ge(x3_lo, l3, L)
                        if x3 <= x3_hi:
                            total += (x3_hi - x3) / L + 1
                x2 += L
            x1 += L
    return total


def count_weighted_range(
    coeffs,
    i64 m,
    i64 L,
    lam,
    double b_scale,
    double c1, double c2, double c3,
    double radius,
    double amplitude,
    i64 x1_lo, i64 x1_hi,
    i64 x2_lo, i64 x2_hi,
    i64 x3_lo, i64 x3_hi,
):
    """Sum of w(x/B) over solutions in the box; compensated accumulation."""
    cdef i64 a11 = coeffs[0], a22 = coeffs[1], a33 = coeffs[2]
    cdef i64 a12 = coeffs[3], a13 = coeffs[4], a23 = coeffs[5]
    cdef i64 l1 = lam[0], l2 = lam[1], l3 = lam[2]
    cdef double total = 0.0, comp = 0.0, w, yy, t, u1, u2, u3, usq
    cdef i64 x1, x2, bq, cq, disc, s, num, x3, k
    cdef double inv_b = 1.0 / b_scale, inv_r = 1.0 / radius
    with nogil:
        x1 = _first_ge(x1_lo, l1, L)
        while x1 <= x1_hi:
            x2 = _first_ge(x2_lo, l2, L)
            while x2 <= x2_hi:
                bq = a13 * x1 + a23 * x2
                cq = a11 * x1 * x1 + a22 * x2 * x2 + a12 * x1 * x2 - m
                if a33 != 0:
                    disc = bq * bq - 4 * a33 * cq
                    if disc >= 0:
                        s = c_isqrt(disc)
                        if s * s == disc:
                            for k in range(2):
                                if k == 1 and s == 0:
                                    break
                                num = -bq + s if k == 0 else -bq - s
                                if num % (2 * a33) == 0:
                                    x3 = num / (2 * a33)
                                    if x3_lo <= x3 <= x3_hi and c_mod(x3 - l3, L) == 0:
                                        u1 = x1 * inv_b - c1
                                        u2 = x2 * inv_b - c2
                                        u3 = x3 * inv_b - c3
                                        usq = (u1 * u1 + u2 * u2 + u3 * u3) * inv_r * inv_r
                                        if usq < 1.0:
                                            w = amplitude * exp(-1.0 / (1.0 - usq))
                                            yy = w - comp
                                            t = total + yy
                                            comp = (t - total) - yy
                                            total = t
                elif bq != 0:
                    if cq % bq == 0:
                        x3 = -cq / bq
                        if x3_lo <= x3 <= x3_hi and c_mod(x3 - l3, L) == 0:
                            u1 = x1 * inv_b - c1
                            u2 = x2 * inv_b - c2
                            u3 = x3 * inv_b - c3
                            usq = (u1 * u1 + u2 * u2 + u3 * u3) * inv_r * inv_r
                            if usq < 1.0:
                                w = amplitude * exp(-1.0 / (1.0 - usq))
                                yy = w - comp
                                t = total + yy
                                comp = (t - total) - yy
                                total = t
                else:
                    if cq == 0:
                        x3 = _first_ge(x3_lo, l3, L)
                        while x3 <= x3_hi:
                            u1 = x1 * inv_b - c1
                            u2 = x2 * inv_b - c2
                            u3 = x3 * inv_b - c3
                            usq = (u1 * u1 + u2 * u2 + u3 * u3) * inv_r * inv_r
                            if usq < 1.0:
                                w = amplitude * exp(-1.0 / (1.0 - usq))
                                yy = w - comp
                                t = total + yy
                                comp = (t - total) - yy
                                total = t
                            x3 += L
                x2 += L
            x1 += L
    return total


# ---------------------------------------------------------------------------
# Brute-force exponential sums
# ---------------------------------------------------------------------------

def generic_brute(
    i64 M,
    i64 cond_mod,
    i64 cond_scale,
    coeffs,
    grad,
    i64 k_cond,
    i64 wq,
    i64 wl,
    i64 kadd,
    c,
    cnp.complex128_t[::1] unit_table,
    cnp.complex128_t[::1] phase_table,
):
    """sum over sigma mod M^3 [cond] unit_table[(wq*F+wl*(g.sigma)+kadd) % M] * e_M(c.sigma).

    The optional condition is (k_cond + cond_scale*(g.sigma)) % cond_mod == 0
    (skipped when cond_mod == 0).  unit_table holds the precomputed inner sum
    over the unit group, phase_table holds e_M(0..M-1).
    """
    cdef i64 a11 = coeffs[0], a22 = coeffs[1], a33 = coeffs[2]
    cdef i64 a12 = coeffs[3], a13 = coeffs[4], a23 = coeffs[5]
    cdef i64 g1 = grad[0], g2 = grad[1], g3 = grad[2]
    cdef i64 c1 = c[0], c2 = c[1], c3 = c[2]
    cdef double acc_re = 0.0, acc_im = 0.0
    cdef i64 s1, s2, s3, gdot, fval, t, ph, cond
    cdef double ur, ui, pr, pi
    with nogil:
        for s1 in range(M):
            for s2 in range(M):
                for s3 in range(M):
                    gdot = g1 * s1 + g2 * s2 + g3 * s3
                    if cond_mod:
                        cond = c_mod(k_cond + cond_scale * gdot, cond_mod)
                        if cond:
                            continue
                    fval = (
                        a11 * s1 * s1 + a22 * s2 * s2 + a33 * s3 * s3
                        + a12 * s1 * s2 + a13 * s1 * s3 + a23 * s2 * s3
                    )
                    t = c_mod(wq * fval + wl * gdot + kadd, M)
                    ph = c_mod(c1 * s1 + c2 * s2 + c3 * s3, M)
                    ur = unit_table[t].real
                    ui = unit_table[t].imag
                    pr = phase_table[ph].real
                    pi = phase_table[ph].imag
                    acc_re += ur * pr - ui * pi
                    acc_im += ur * pi + ui * pr
    return complex(acc_re, acc_im)


def generic_buckets(
    i64 M_beta,
    i64 M2,
    i64 L,
    coeffs,
    grad,
    i64 k_hat,
    c,
    i64 c_dot_lam,
    cnp.complex128_t[::1] unit_table,
):
    """Bucketed alpha-pass for the unit-twisted sums mod q2*L^2.

    Walks beta mod M_beta = q2*L with the divisibility condition
    L | k_hat + g.beta and accumulates unit_table[(L*(H+L*F(beta))) % M2]
    into bucket (c.lam + L*(c.beta)) % M2.  The caller applies the final
    unit-phase twist per x.
    """
    cdef i64 a11 = coeffs[0], a22 = coeffs[1], a33 = coeffs[2]
    cdef i64 a12 = coeffs[3], a13 = coeffs[4], a23 = coeffs[5]
    cdef i64 g1 = grad[0], g2 = grad[1], g3 = grad[2]
    cdef i64 c1 = c[0], c2 = c[1], c3 = c[2]
    out = np.zeros(M2, dtype=np.complex128)
    cdef cnp.complex128_t[::1] buckets = out
    cdef i64 b1, b2, b3, gdot, hval, fval, t, u
    with nogil:
        for b1 in range(M_beta):
            for b2 in range(M_beta):
                for b3 in range(M_beta):
                    gdot = g1 * b1 + g2 * b2 + g3 * b3
                    hval = k_hat + gdot
                    if c_mod(hval, L):
                        continue
                    fval = (
                        a11 * b1 * b1 + a22 * b2 * b2 + a33 * b3 * b3
                        + a12 * b1 * b2 + a13 * b1 * b3 + a23 * b2 * b3
                    )
                    t = c_mod(L * (hval + L * fval), M2)
                    u = c_mod(c_dot_lam + L * (c1 * b1 + c2 * b2 + c3 * b3), M2)
                    buckets[u].real = buckets[u].real + unit_table[t].real
                    buckets[u].imag = buckets[u].imag + unit_table[t].imag
    return out


# ---------------------------------------------------------------------------
# Quadratic-congruence phase sums (Hooley/U-sum style)
# ---------------------------------------------------------------------------

cdef int _quad_roots_pp(
    i64 A, i64 p, int e, i64 pe, i64 sqrtA_unit, int ordA,
    i64 *roots,
) noexcept nogil:
    """Roots of w^2 = A (mod p^e) for odd p, given sqrt of the unit part mod p.

    sqrtA_unit is a sqrt of A/p^ordA mod p, or -1 if none exists.
    Returns the root count (-1 signals overflow of the 64-root buffer).
    """
    cdef i64 Ape = c_mod(A, pe)
    cdef i64 step, v, u, pk, pk_next, inv, cnt, j, stride, scale, t, base
    cdef int jj, half
    if Ape == 0:
        step = 1
        for jj in range((e + 1) // 2):
            step *= p
        cnt = pe / step
        if cnt > 64:
            return -1
        for j in range(cnt):
            roots[j] = j * step
        return <int> cnt
    jj = 0
    v = Ape
    while v % p == 0:
        v /= p
        jj += 1
    if jj % 2 == 1:
        return 0
    if sqrtA_unit < 0:
        return 0
    # jj here equals min(ordA, e-adjusted); unit part v, sqrt mod p known
    half = jj // 2
    # lift sqrt of v from mod p to mod p^(e-jj)
    u = sqrtA_unit % p
    pk = p
    pk_next = pe
    stride = 1
    for j in range(e - jj):
        stride *= p
    # stride = p^(e-jj)
    while pk < stride:
        pk_next = pk * pk
        if pk_next > stride:
            pk_next = stride
        inv = c_modinv(c_mod(2 * u, pk_next), pk_next)
        u = c_mod(u - ((u * u - v) % pk_next) * inv % pk_next, pk_next)
        pk = pk_next
    scale = 1
    for j in range(half):
        scale *= p
    # roots: scale*(±u + t*stride), t in [0, p^half)
    cnt = 2 * scale
    if cnt > 64:
        return -1
    base = 0
    for t in range(scale):
        roots[base] = c_mod(scale * (u + t * stride), pe)
        roots[base + 1] = c_mod(scale * (stride - u + t * stride), pe)
        base += 2
    return <int> cnt


def quad_phase_sum(
    i64 x_max,
    i64 coprime_to,
    i64 A,
    i64 s0,
    cnp.int64_t[::1] spf,
    cnp.int64_t[::1] sqrtA_mod_p,   # indexed by prime p: sqrt of unit part of A mod p, or -1
    cnp.int8_t[::1] ordA_mod_p,     # ord_p of A (capped), same indexing
    cnp.complex128_t[::1] weight_table,
    i64 weight_mod,
    i64 n_min=1,
):
    """sum_{n_min <= n <= x_max, gcd(n, coprime_to) = 1} weight_table[n % weight_mod]
         * sum_{v : (s0 v)^2 = A (mod n)} e_n(v).

    Root sets are built per prime power from the precomputed per-prime sqrt
    data and combined by CRT.  n must stay coprime to 2*s0*coprime_to-support
    for the fast path; the caller guarantees this via coprime_to.
    """
    cdef double acc_re = 0.0, acc_im = 0.0
    cdef i64 n, rem, p, pe, cnt_total, m_cur, j, t, inv_m, inv_s, wi
    cdef int e, cnt_local, i, k, oa
    cdef i64 roots_local[64]
    cdef i64 roots_cur[4096]
    cdef i64 roots_new[4096]
    cdef double wr, wi_im, ang
    cdef bint overflow = False
    cdef i64 overflow_n = 0
    with nogil:
        for n in range(n_min, x_max + 1):
            if c_gcd(n, coprime_to) != 1:
                continue
            wi = n % weight_mod
            wr = weight_table[wi].real
            wi_im = weight_table[wi].imag
            if wr == 0.0 and wi_im == 0.0:
                continue
            if n == 1:
                acc_re += wr
                acc_im += wi_im
                continue
            # factor n and build root set by CRT
            rem = n
            m_cur = 1
            cnt_total = 1
            roots_cur[0] = 0
            while rem > 1:
                p = spf[rem]
                e = 0
                pe = 1
                while rem % p == 0:
                    rem /= p
                    pe *= p
                    e += 1
                oa = ordA_mod_p[p]
                cnt_local = _quad_roots_pp(A, p, e, pe, sqrtA_mod_p[p], oa, roots_local)
                if cnt_local < 0 or cnt_total * cnt_local > 4096:
                    overflow = True
                    overflow_n = n
                    break
                if cnt_local == 0:
                    cnt_total = 0
                    break
                inv_m = c_modinv(c_mod(m_cur, pe), pe)
                t = 0
                for i in range(cnt_total):
                    for k in range(cnt_local):
                        roots_new[t] = roots_cur[i] + m_cur * c_mod(
                            (roots_local[k] - roots_cur[i]) * inv_m, pe
                        )
                        t += 1
                cnt_total *= cnt_local
                for i in range(cnt_total):
                    roots_cur[i] = roots_new[i]
                m_cur *= pe
            if overflow:
                break
            if cnt_total == 0:
                continue
            inv_s = c_modinv(c_mod(s0, n), n)
            for i in range(cnt_total):
                ang = TWO_PI * <double> c_mod(roots_cur[i] * inv_s, n) / <double> n
                acc_re += wr * cos(ang) - wi_im * sin(ang)
                acc_im += wr * sin(ang) + wi_im * cos(ang)
    if overflow:
        raise OverflowError(f"root buffer exceeded at n={overflow_n}")
    return complex(acc_re, acc_im)


def hooley_phase_spectrum(i64 n, i64 A, cnp.int64_t[::1] roots):
    """sum_v e_n(h v) for all h mod n at once (used by moment checks)."""
    out = np.zeros(n, dtype=np.complex128)
    cdef cnp.complex128_t[::1] spec = out
    cdef i64 h, i, nr = roots.shape[0]
    cdef double ang
    with nogil:
        for h in range(n):
            for i in range(nr):
                ang = TWO_PI * <double> c_mod(h * roots[i], n) / <double> n
                spec[h].real = spec[h].real + cos(ang)
                spec[h].imag = spec[h].imag + sin(ang)
    return out
