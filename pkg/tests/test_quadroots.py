import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qf3delta import arith, quadroots


def brute_roots(a: int, n: int) -> list[int]:
    return [v for v in range(n) if (v * v - a) % n == 0]


@pytest.mark.parametrize("a", [0, 1, 2, 5, -1, -4, 9, 12, 48, 100])
def test_roots_match_brute_force_small(a):
    for n in range(1, 400):
        assert quadroots.sqrts_mod(a, n) == brute_roots(a, n)
        assert quadroots.sqrt_count_mod(a, n) == len(brute_roots(a, n))


def test_prime_power_edge_cases():
    # a divisible by a high power of p, including a = 0 mod p^k
    for p, k in [(2, 6), (3, 4), (5, 3), (7, 2)]:
        pk = p**k
        for a in [0, p, p * p, p**3, pk, 3 * p * p]:
            assert quadroots.sqrts_mod_prime_power(a, p, k) == brute_roots(a % pk, pk)


@given(st.integers(min_value=-(10**6), max_value=10**6), st.integers(min_value=1, max_value=2000))
@settings(max_examples=300, deadline=None)
def test_roots_random(a, n):
    roots = quadroots.sqrts_mod(a, n)
    assert roots == brute_roots(a, n)


def test_sqrt_mod_prime():
    for p in arith.primes_up_to(200):
        squares = {x * x % p for x in range(p)}
        for a in range(p):
            r = quadroots.sqrt_mod_prime(a, p)
            if a in squares:
                assert r is not None and (r * r - a) % p == 0
            else:
                assert r is None


def brute_count_vectorized(a: int, n: int) -> int:
    v = np.arange(n, dtype=np.int64)
    return int(np.count_nonzero((v * v - a) % n == 0))


def test_count_matches_vectorized_medium():
    rng = np.random.default_rng(5)
    for a in [-7, 1, 5, 2025]:
        for n in rng.integers(2000, 9000, size=8):
            n = int(n)
            assert quadroots.sqrt_count_mod(a, n) == brute_count_vectorized(a, n)
