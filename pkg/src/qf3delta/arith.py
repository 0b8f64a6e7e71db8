"""Exact integer and modular arithmetic used throughout the package.

Everything here is pure: no state, no floats except where a function is
explicitly real-valued (``upsilon``).  Factorizations are lists of
``(prime, exponent)`` pairs sorted by prime.
"""

from __future__ import annotations

import math
from functools import reduce

Factorization = list[tuple[int, int]]

_SMALL_PRIME_LIMIT = 1_000_000

# Witnesses sufficient for a deterministic Miller-Rabin test below 3.3e24,
# far beyond the 2^63 input cap.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def primes_up_to(n: int) -> list[int]:
    """All primes <= n by an Eratosthenes byte sieve."""
    if n < 2:
        return []
    sieve = bytearray(b"\x01") * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            start = p * p
            sieve[start :: p] = b"\x00" * ((n - start) // p + 1)
    return [i for i, v in enumerate(sieve) if v]


def smallest_prime_factor_sieve(n: int) -> "list[int]":
    """spf[k] = smallest prime factor of k, for 0 <= k <= n (spf[0]=spf[1]=0)."""
    spf = list(range(n + 1))
    if n >= 1:
        spf[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if spf[p] == p:
            for k in range(p * p, n + 1, p):
                if spf[k] == k:
                    spf[k] = p
    return spf


def is_probable_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for n < 2^64 (and a fair test above)."""
    if n < 2:
        return False
    for p in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_rho(n: int) -> int:
    """A nontrivial factor of composite odd n (Brent's cycle variant)."""
    if n % 2 == 0:
        return 2
    seed = 1
    while True:
        seed += 1
        y, c, m = seed, seed + 1, 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factorize(n: int) -> Factorization:
    """Prime factorization of n >= 1, sorted by prime.

    Trial division below 1e6, then Miller-Rabin + Pollard rho for the
    (at most two) remaining large prime factors of a 63-bit input.
    """
    if n < 1:
        raise ValueError("factorize requires n >= 1")
    out: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
    # 2/3/5 wheel
    increments = (4, 2, 4, 2, 4, 6, 2, 6)
    p, i = 7, 0
    while p * p <= n and p < _SMALL_PRIME_LIMIT:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += increments[i]
        i = (i + 1) % 8
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_probable_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        d = _pollard_rho(m)
        stack.extend((d, m // d))
    return sorted(out.items())


def factorization_product(fac: Factorization) -> int:
    return reduce(lambda acc, pe: acc * pe[0] ** pe[1], fac, 1)


def divisors(n: int) -> list[int]:
    """All positive divisors of n, sorted."""
    divs = [1]
    for p, e in factorize(n):
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return sorted(divs)


def mobius(n: int) -> int:
    fac = factorize(n)
    if any(e > 1 for _, e in fac):
        return 0
    return -1 if len(fac) % 2 else 1


def euler_phi(n: int) -> int:
    phi = 1
    for p, e in factorize(n):
        phi *= p ** (e - 1) * (p - 1)
    return phi


def tau(n: int) -> int:
    """Number of divisors."""
    t = 1
    for _, e in factorize(n):
        t *= e + 1
    return t


def omega(n: int) -> int:
    """Number of distinct prime divisors."""
    return len(factorize(n))


def mod_pow(base: int, exponent: int, modulus: int) -> int:
    return pow(base, exponent, modulus)


def mod_inverse(a: int, n: int) -> int:
    """Inverse of a modulo n; raises if gcd(a, n) != 1."""
    if n == 1:
        return 0
    g = math.gcd(a, n)
    if g != 1:
        raise ValueError(f"{a} is not invertible mod {n} (gcd={g})")
    return pow(a, -1, n)


def crt_combine(residues: "list[tuple[int, int]]") -> tuple[int, int]:
    """Combine [(r_i, m_i)] with pairwise coprime moduli into (r, prod m_i)."""
    r, m = 0, 1
    for ri, mi in residues:
        g = math.gcd(m, mi)
        if g != 1:
            raise ValueError("crt_combine requires pairwise coprime moduli")
        r = (r * mi * mod_inverse(mi, m) + ri * m * mod_inverse(m, mi)) % (m * mi)
        m *= mi
    return r, m


def integer_sqrt(n: int) -> int:
    if n < 0:
        raise ValueError("integer_sqrt of a negative number")
    return math.isqrt(n)


def is_perfect_square(n: int) -> bool:
    if n < 0:
        return False
    r = math.isqrt(n)
    return r * r == n


def jacobi(a: int, n: int) -> int:
    """Jacobi symbol (a/n) for odd n >= 1; jacobi(a, 1) = 1."""
    if n < 1 or n % 2 == 0:
        raise ValueError("jacobi requires odd n >= 1")
    a %= n
    result = 1
    while a:
        while a % 2 == 0:
            a //= 2
            if n % 8 in (3, 5):
                result = -result
        a, n = n, a
        if a % 4 == 3 and n % 4 == 3:
            result = -result
        a %= n
    return result if n == 1 else 0


def iota(q: int) -> complex:
    """The quartic root of unity attached to an odd modulus: 1 or i."""
    if q < 1 or q % 2 == 0:
        raise ValueError("iota requires odd q >= 1")
    return 1 + 0j if q % 4 == 1 else 1j


def part_toward(q: int, l: int) -> int:
    """q_l: the largest divisor of q supported on primes dividing l."""
    if q < 1 or l < 1:
        raise ValueError("part_toward requires positive arguments")
    part = 1
    g = math.gcd(q, l)
    while g > 1:
        while q % g == 0:
            q //= g
            part *= g
        g = math.gcd(q, g)
    return part


def coprime_part(q: int, l: int) -> int:
    """q / q_l: the largest divisor of q coprime to l."""
    return q // part_toward(q, l)


def squarefull_part(n: int) -> int:
    """Product of p^e over p^e || n with e >= 2."""
    if n < 1:
        raise ValueError("squarefull_part requires n >= 1")
    return math.prod(p**e for p, e in factorize(n) if e >= 2)


def upsilon(n: int, kappa: float) -> float:
    """prod_{p | n} (1 - p^(-kappa))^(-1)."""
    if kappa <= 0:
        raise ValueError("upsilon requires kappa > 0")
    if n < 1:
        raise ValueError("upsilon requires n >= 1")
    value = 1.0
    for p, _ in factorize(n):
        value /= 1.0 - p ** (-kappa)
    return value


def ramanujan_sum(q: int, n: int) -> int:
    """c_q(n) = sum over units a mod q of e_q(a n) = mu(q/g) phi(q)/phi(q/g)."""
    if q < 1:
        raise ValueError("ramanujan_sum requires q >= 1")
    g = math.gcd(q, n)
    qg = q // g
    mu = mobius(qg)
    if mu == 0:
        return 0
    return mu * euler_phi(q) // euler_phi(qg)


def supported_on(n: int, l: int) -> bool:
    """True when every prime divisor of n divides l (i.e. n | l^infinity)."""
    return part_toward(n, l) == n


def divisors_supported_on(l: int, bound: int) -> list[int]:
    """All d <= bound with d | l^infinity, sorted."""
    ps = [p for p, _ in factorize(l)] if l > 1 else []
    out = [1]
    for p in ps:
        extended = []
        for d in out:
            v = d
            while v <= bound:
                extended.append(v)
                v *= p
        out = extended
    return sorted(d for d in out if d <= bound)
