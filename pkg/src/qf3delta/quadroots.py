"""Roots of quadratic congruences v^2 = a (mod p^k) and (mod n).

The unit case is Tonelli-Shanks plus Hensel; powers of the prime dividing a
are peeled off explicitly, including the 2-adic branches.  Everything is
exact integer arithmetic, validated elsewhere against exhaustive search.
"""

from __future__ import annotations

from . import arith


def sqrt_mod_prime(a: int, p: int) -> int | None:
    """One square root of a mod p (p prime), or None if a is a non-residue."""
    a %= p
    if p == 2 or a == 0:
        return a
    if arith.jacobi(a, p) != 1:
        return None
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # Tonelli-Shanks
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    z = 2
    while arith.jacobi(z, p) != -1:
        z += 1
    c = pow(z, q, p)
    x = pow(a, (q + 1) // 2, p)
    t = pow(a, q, p)
    m = s
    while t != 1:
        i, tt = 0, t
        while tt != 1:
            tt = tt * tt % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        x = x * b % p
        c = b * b % p
        t = t * c % p
        m = i
    return x


def _unit_sqrts_mod_pk(a: int, p: int, k: int) -> list[int]:
    """All v mod p^k with v^2 = a, for p-unit a and k >= 1."""
    pk = p**k
    a %= pk
    if p == 2:
        if k == 1:
            return [1]
        if k == 2:
            return [1, 3] if a % 4 == 1 else []
        if a % 8 != 1:
            return []
        # lift 1 mod 8 upward; at each level the root is unique up to sign
        # and the top bit, so adjust by 2^(t-1) when the square misses.
        v = 1
        for t in range(3, k):
            if (v * v - a) % (1 << (t + 1)):
                v += 1 << (t - 1)
        half = pk // 2
        return sorted({v % pk, (-v) % pk, (v + half) % pk, (-v + half) % pk})
    v = sqrt_mod_prime(a, p)
    if v is None:
        return []
    pe = p
    while pe < pk:
        pe_next = min(pe * pe, pk)
        v = (v - (v * v - a) * arith.mod_inverse(2 * v, pe_next)) % pe_next
        pe = pe_next
    return sorted({v, pk - v})


def sqrts_mod_prime_power(a: int, p: int, k: int) -> list[int]:
    """All v mod p^k with v^2 = a (mod p^k); sorted, possibly empty."""
    if k == 0:
        return [0]
    pk = p**k
    a %= pk
    if a == 0:
        step = p ** ((k + 1) // 2)
        return list(range(0, pk, step))
    j = 0
    while a % p == 0:
        a //= p
        j += 1
    if j % 2 == 1:
        return []
    half = j // 2
    units = _unit_sqrts_mod_pk(a, p, k - j)
    stride = p ** (k - j)
    pj = p**half
    scale = p**half
    return sorted(
        (scale * (u + t * stride)) % pk for u in units for t in range(pj)
    )


def sqrt_count_mod_prime_power(a: int, p: int, k: int) -> int:
    """#{v mod p^k : v^2 = a}, without enumerating roots."""
    if k == 0:
        return 1
    a %= p**k
    if a == 0:
        return p ** (k // 2)
    j = 0
    while a % p == 0:
        a //= p
        j += 1
    if j % 2 == 1:
        return 0
    kk = k - j
    if p == 2:
        if kk == 1:
            unit = 1
        elif kk == 2:
            unit = 2 if a % 4 == 1 else 0
        else:
            unit = 4 if a % 8 == 1 else 0
    else:
        unit = 1 + arith.jacobi(a, p)
    return unit * p ** (j // 2)


def sqrts_mod(a: int, n: int, factorization: arith.Factorization | None = None) -> list[int]:
    """All v mod n with v^2 = a (mod n), via CRT over the prime powers."""
    if n == 1:
        return [0]
    fac = factorization if factorization is not None else arith.factorize(n)
    roots = [0]
    modulus = 1
    for p, e in fac:
        pe = p**e
        local = sqrts_mod_prime_power(a, p, e)
        if not local:
            return []
        inv_m = arith.mod_inverse(modulus % pe, pe) if modulus % pe else 0
        combined = []
        for r in roots:
            # r + modulus * t = l (mod pe)
            for l in local:
                t = (l - r) * inv_m % pe
                combined.append(r + modulus * t)
        roots = combined
        modulus *= pe
    return sorted(roots)


def sqrt_count_mod(a: int, n: int, factorization: arith.Factorization | None = None) -> int:
    if n == 1:
        return 1
    fac = factorization if factorization is not None else arith.factorize(n)
    count = 1
    for p, e in fac:
        count *= sqrt_count_mod_prime_power(a, p, e)
        if count == 0:
            return 0
    return count
