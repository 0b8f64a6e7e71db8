"""Dirichlet characters mod q: enumeration, evaluation, conductor.

Characters are exponent vectors against fixed generators of (Z/p^k)* --
the smallest primitive root for odd p, and the <-1, 5> presentation at
p = 2, k >= 3.  Values are exact rational angles (fractions of a full
turn), materialized to complex on demand, so identity tests are exact.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from . import arith

MAX_MODULUS = 10**6


def _primitive_root_mod_pk(p: int, k: int) -> int:
    """Smallest primitive root mod p^k for odd prime p."""
    phi_p = p - 1
    prime_factors = [f for f, _ in arith.factorize(phi_p)]
    g = 2
    while True:
        if all(pow(g, phi_p // f, p) != 1 for f in prime_factors):
            break
        g += 1
    if k == 1:
        return g
    # a primitive root mod p^2 is primitive mod every p^k
    if pow(g, phi_p, p * p) == 1:
        g += p
    return g


@dataclass(frozen=True)
class _Component:
    """Generator data for (Z/p^k)*."""

    p: int
    k: int
    generators: tuple[int, ...]
    orders: tuple[int, ...]
    dlog: dict  # unit -> exponent tuple


@lru_cache(maxsize=None)
def _components(q: int) -> tuple[_Component, ...]:
    comps = []
    for p, k in arith.factorize(q):
        pk = p**k
        if p == 2:
            if k == 1:
                gens, orders = (), ()
            elif k == 2:
                gens, orders = (3,), (2,)
            else:
                gens, orders = (pk - 1, 5), (2, 2 ** (k - 2))
        else:
            gens, orders = (_primitive_root_mod_pk(p, k),), (p ** (k - 1) * (p - 1),)
        dlog: dict = {}
        if not gens:
            dlog[1 % pk] = ()
        elif len(gens) == 1:
            g, d = gens[0], orders[0]
            v = 1
            for t in range(d):
                dlog[v] = (t,)
                v = v * g % pk
        else:
            g0, g1 = gens
            d0, d1 = orders
            v0 = 1
            for e in range(d0):
                v = v0
                for t in range(d1):
                    dlog[v] = (e, t)
                    v = v * g1 % pk
                v0 = v0 * g0 % pk
        comps.append(_Component(p=p, k=k, generators=gens, orders=orders, dlog=dlog))
    return tuple(comps)


@dataclass(frozen=True)
class DirichletCharacter:
    """A character mod q given by generator exponents per prime power."""

    modulus: int
    exponents: tuple[tuple[int, ...], ...]

    def angle(self, n: int) -> Fraction | None:
        """chi(n) as a fraction of a turn, or None when gcd(n, q) > 1."""
        q = self.modulus
        n %= q
        if q == 1:
            return Fraction(0)
        if math.gcd(n, q) != 1:
            return None
        total = Fraction(0)
        for comp, exps in zip(_components(q), self.exponents):
            logs = comp.dlog[n % comp.p**comp.k]
            for a, t, d in zip(exps, logs, comp.orders):
                total += Fraction(a * t, d)
        return total % 1

    def __call__(self, n: int) -> complex:
        ang = self.angle(n)
        if ang is None:
            return 0j
        return cmath.exp(2j * math.pi * float(ang))

    @property
    def is_principal(self) -> bool:
        return all(a % d == 0 for exps, comp in zip(self.exponents, _components(self.modulus)) for a, d in zip(exps, comp.orders))

    @property
    def conductor(self) -> int:
        f = 1
        for comp, exps in zip(_components(self.modulus), self.exponents):
            f *= _component_conductor(comp, exps)
        return f

    def value_table(self):
        """chi(0..q-1) as a complex numpy array (0 on non-units)."""
        import numpy as np

        q = self.modulus
        table = np.zeros(q, dtype=np.complex128)
        if q == 1:
            table[0] = 1.0
            return table
        for n in range(q):
            if math.gcd(n, q) == 1:
                table[n] = self(n)
        return table

    def primitive_value(self, n: int) -> complex:
        """Value of the primitive character inducing this one."""
        f = self.conductor
        if f == 1:
            return 1 + 0j
        if math.gcd(n, f) != 1:
            return 0j
        q = self.modulus
        shifted = n % f
        while math.gcd(shifted, q) != 1:
            shifted += f
        return self(shifted)


def _component_conductor(comp: _Component, exps: tuple[int, ...]) -> int:
    p, k = comp.p, comp.k
    if not comp.generators:
        return 1
    if p != 2:
        a = exps[0] % comp.orders[0]
        if a == 0:
            return 1
        d = comp.orders[0] // math.gcd(a, comp.orders[0])  # order of chi_p
        s = 0
        while d % p == 0:
            d //= p
            s += 1
        return p ** (s + 1)
    if k == 2:
        return 4 if exps[0] % 2 else 1
    eps = exps[0] % 2
    a = exps[1] % comp.orders[1]
    if a == 0:
        return 4 if eps else 1
    d = comp.orders[1] // math.gcd(a, comp.orders[1])  # order of the 5-part
    s = d.bit_length() - 1  # d = 2^s, s >= 1
    return 2 ** (s + 2)


def enumerate_characters(q: int) -> list[DirichletCharacter]:
    """All phi(q) characters mod q, in a fixed deterministic order."""
    if q < 1 or q > MAX_MODULUS:
        raise ValueError(f"modulus must be in [1, {MAX_MODULUS}]")
    comps = _components(q)
    per_component = [list(product(*(range(d) for d in comp.orders))) for comp in comps]
    chars = [
        DirichletCharacter(modulus=q, exponents=tuple(combo))
        for combo in product(*per_component)
    ]
    return chars


def principal_character(q: int) -> DirichletCharacter:
    comps = _components(q)
    return DirichletCharacter(
        modulus=q, exponents=tuple(tuple(0 for _ in comp.orders) for comp in comps)
    )


def evaluate(chi: DirichletCharacter, n: int) -> complex:
    return chi(n)


def conductor(chi: DirichletCharacter) -> int:
    return chi.conductor
