"""p-adic local densities and the modified singular series.

sigma_p is the stabilized normalized count of solutions of F = m (mod p^k)
respecting the congruence class; stabilization is certified either by an
explicit agreement between consecutive levels or by the Hensel criterion
(every counted point nonsingular enough), never assumed silently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import arith, expsums
from .forms import CountingProblem

ENUM_OPS_LIMIT = 2 * 10**8


@dataclass(frozen=True)
class LocalDensity:
    p: int
    value: Fraction
    stabilization_level: int
    smooth_certified: bool


def _count_level(problem: CountingProblem, p: int, k: int, check_gradient: bool):
    """(count, all points Hensel-smooth at this level) for F = m mod p^k,
    x = Gamma mod p^min(e, k)."""
    e = min(_ord(problem.L, p), k)
    pk = p**k
    step = p**e
    n_free = pk // step
    if 3 * math.log(n_free, 10) > math.log(ENUM_OPS_LIMIT, 10):
        raise RuntimeError(f"enumeration budget exceeded at p={p}, k={k}")
    gam = [g % step for g in problem.gamma]
    xs2 = np.arange(gam[1], pk, step, dtype=np.int64)
    xs3 = np.arange(gam[2], pk, step, dtype=np.int64)
    g2, g3 = np.meshgrid(xs2, xs3, indexing="ij")
    a11, a22, a33, a12, a13, a23 = problem.form.coefficients
    count = 0
    smooth = True
    grad_mod = p ** ((k + 1) // 2)
    a = problem.form.half_hessian
    for x1 in range(gam[0], pk, step):
        vals = (
            a11 * x1 * x1 + a22 * g2 * g2 + a33 * g3 * g3
            + a12 * x1 * g2 + a13 * x1 * g3 + a23 * g2 * g3
            - problem.m
        ) % pk
        hit = vals == 0
        n = int(np.count_nonzero(hit))
        count += n
        if n and check_gradient and smooth:
            h2 = g2[hit]
            h3 = g3[hit]
            gcomp = [
                (2 * (a[i][0] * x1 + a[i][1] * h2 + a[i][2] * h3)) % grad_mod
                for i in range(3)
            ]
            nonzero = (gcomp[0] != 0) | (gcomp[1] != 0) | (gcomp[2] != 0)
            if not bool(nonzero.all()):
                smooth = False
    return count, smooth


def _ord(n: int, p: int) -> int:
    e = 0
    while n % p == 0:
        n //= p
        e += 1
    return e


def sigma_p(problem: CountingProblem, p: int) -> LocalDensity:
    """Local density with explicit stabilization certificate.

    Counts mod p^k with k growing until consecutive normalized counts agree
    and every counted point is nonsingular at depth ceil(k/2); the cap is
    ord_p(4 m Delta_F L^2) + 3 and hitting it raises instead of returning a
    possibly-unstabilized value.
    """
    if not arith.is_probable_prime(p):
        raise ValueError("p must be prime")
    cap = _ord(abs(4 * problem.m * problem.form.discriminant * problem.L**2), p) + 3
    e = _ord(problem.L, p)
    k = max(1, e)
    count, smooth = _count_level(problem, p, k, check_gradient=True)
    while True:
        if count == 0:
            return LocalDensity(p=p, value=Fraction(0), stabilization_level=k,
                                smooth_certified=True)
        if smooth:
            # nonsingular points lift with exact multiplicity p^2 per level
            return LocalDensity(p=p, value=Fraction(count, p ** (2 * k)),
                                stabilization_level=k, smooth_certified=True)
        if k + 1 > cap:
            raise RuntimeError(
                f"sigma_{p} failed to stabilize below the cap k = {cap}"
            )
        next_count, next_smooth = _count_level(problem, p, k + 1, check_gradient=True)
        if next_count == count * p * p and next_smooth:
            return LocalDensity(p=p, value=Fraction(next_count, p ** (2 * (k + 1))),
                                stabilization_level=k + 1, smooth_certified=True)
        count, smooth = next_count, next_smooth
        k += 1


def singular_series_parts(problem: CountingProblem):
    """(rational finite part, wild primes) with the series = (6/pi^2) * rational.

    The tail over p coprime to m*Omega is folded in closed form: each such
    factor is (1 - 1/p^2), giving zeta(2)^-1 times per-prime corrections at
    the wild primes.
    """
    wild = sorted({p for p, _ in arith.factorize(problem.m_omega)})
    rational = Fraction(1)
    densities = {}
    for p in wild:
        dens = sigma_p(problem, p)
        densities[p] = dens
        if dens.value == 0:
            raise ValueError(f"empty local condition at p = {p}")
        rational *= (1 - Fraction(1, p)) * dens.value / (1 - Fraction(1, p * p))
    return rational, densities


def singular_series(problem: CountingProblem) -> float:
    """The modified singular series as a float."""
    rational, _ = singular_series_parts(problem)
    return float(rational) * 6.0 / math.pi**2


def nu_factor(problem: CountingProblem, p: int, t_max: int) -> float:
    """Partial local factor sum of the q-average's Dirichlet series at s = 3.

    Approaches p^(4 ord_p L) * sigma_p as t_max grows.
    """
    if t_max < 0 or t_max > 6:
        raise ValueError("t_max must be between 0 and 6")
    total = 0.0
    for t in range(t_max + 1):
        q = p**t
        val = expsums.s_hat(problem, q, (0, 0, 0)).value
        if abs(val.imag) > 1e-6 * max(1.0, abs(val)):
            raise RuntimeError("zero-frequency sum unexpectedly non-real")
        total += val.real / p ** (3 * t)
    return total
