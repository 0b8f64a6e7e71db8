import math

import pytest

from qf3delta import arith, characters


def test_character_counts():
    assert len(characters.enumerate_characters(12)) == 4
    assert len(characters.enumerate_characters(1)) == 1
    for q in (2, 3, 8, 9, 16, 24, 45, 60):
        assert len(characters.enumerate_characters(q)) == arith.euler_phi(q)


def test_principal_values():
    chi0 = characters.principal_character(6)
    assert chi0(5) == pytest.approx(1)
    assert chi0(4) == 0
    assert chi0.is_principal
    assert chi0.conductor == 1


def test_mod5_legendre_character():
    chars = characters.enumerate_characters(5)
    order2 = [
        chi
        for chi in chars
        if not chi.is_principal and all(abs(chi(n).imag) < 1e-12 for n in range(1, 5))
    ]
    assert len(order2) == 1
    chi = order2[0]
    for n in range(1, 5):
        assert chi(n).real == pytest.approx(arith.jacobi(n, 5))


def test_mod7_legendre_value():
    chars = characters.enumerate_characters(7)
    legendre = [
        chi
        for chi in chars
        if not chi.is_principal and all(abs(chi(n) - arith.jacobi(n, 7)) < 1e-12 for n in range(7))
    ]
    assert len(legendre) == 1
    assert legendre[0](3) == pytest.approx(-1)
    assert legendre[0].conductor == 7


def test_character_at_own_modulus_vanishes():
    for q in (4, 9, 15):
        for chi in characters.enumerate_characters(q):
            assert chi(q) == 0


def test_conductor_principal_mod45():
    assert characters.principal_character(45).conductor == 1


def test_conductor_mod8_sign_character():
    chars = characters.enumerate_characters(8)
    target = [
        chi
        for chi in chars
        if abs(chi(3) + 1) < 1e-12 and abs(chi(7) + 1) < 1e-12 and abs(chi(5) - 1) < 1e-12
    ]
    assert len(target) == 1
    assert target[0].conductor == 4


def test_orthogonality():
    for q in range(1, 61):
        chars = characters.enumerate_characters(q)
        for a in range(q):
            s = sum(chi(a) for chi in chars)
            expected = arith.euler_phi(q) if (a % q) == (1 % q) else 0
            assert abs(s - expected) < 1e-10
        for chi in chars:
            if not chi.is_principal:
                assert abs(sum(chi(a) for a in range(q))) < 1e-10


def test_conductor_divides_and_primitive_round_trip():
    for q in (8, 12, 40, 45, 72):
        for chi in characters.enumerate_characters(q):
            f = chi.conductor
            assert q % f == 0
            for n in range(q):
                if math.gcd(n, q) == 1:
                    assert abs(chi(n) - chi.primitive_value(n)) < 1e-12
                else:
                    assert chi(n) == 0


def test_multiplicativity():
    for q in (9, 16, 21):
        for chi in characters.enumerate_characters(q):
            for a in range(1, q):
                for b in range(1, q):
                    if math.gcd(a * b, q) == 1:
                        assert abs(chi(a * b) - chi(a) * chi(b)) < 1e-10
