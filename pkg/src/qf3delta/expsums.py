"""Arithmetic exponential sums: brute-force definitions, explicit formulas,
and the decompositions tying them together.

Every closed-form evaluation here has a brute-force twin and the two are
cross-validated in the test suite; the brute-force side is the oracle.
Budgets are enforced loudly (BudgetError) so slow paths never degrade
silently into wrong or truncated answers.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import arith, characters, kernels, quadroots
from .forms import CountingProblem, TernaryForm

BRUTE_QL_LIMIT = 3000       # modulus cap for the (qL)^3 sigma loops
SCAL_M2_LIMIT = 2000        # cap on q2*L^2 for the bucketed alpha pass
SCAL_OPS_LIMIT = 5 * 10**9  # cap on (q2*L)^3 bucket work
X_KERNEL_LIMIT = 10**7


class BudgetError(RuntimeError):
    """A brute-force budget was exceeded; use an explicit path or raise caps."""


@dataclass(frozen=True)
class SumValue:
    value: complex
    method: str  # bruteForce | explicitFormula | multiplicative
    modulus: int


@dataclass(frozen=True)
class GPolynomial:
    """The quadratic congruence polynomial attached to (l1, l2, c)."""

    l1: int
    l2: int
    c: tuple[int, int, int]
    lead: int      # Delta_F * l1 (squared coefficient is lead^2)
    constant: int  # G(T) = (lead*T)^2 + constant
    a0: int | None
    b0: int | None
    disc: int | None  # 2*|a0*b0| in the reduced square case

    def target(self) -> int:
        """A with G(T) = 0 (mod n) iff (lead*T)^2 = A (mod n)."""
        return -self.constant


def g_polynomial(problem: CountingProblem, l1: int, l2: int, c) -> GPolynomial:
    F = problem.form
    L = problem.L
    fstar = F.adjoint_value(c)
    lead = F.discriminant * l1
    A = problem.m * F.discriminant * (l2 * L * L) ** 2 * fstar
    a0 = b0 = disc = None
    if problem.square_case and fstar <= 0 and arith.is_perfect_square(-fstar):
        n_c = arith.integer_sqrt(-fstar)
        g0 = math.gcd(abs(lead), abs(problem.d0 * l2 * L * L * n_c))
        a0 = lead // g0
        b0 = problem.d0 * l2 * L * L * n_c // g0
        if a0 < 0:
            a0, b0 = -a0, -b0
        disc = 2 * abs(a0 * b0)
    return GPolynomial(l1=l1, l2=l2, c=tuple(c), lead=lead, constant=-A, a0=a0, b0=b0, disc=disc)


# ---------------------------------------------------------------------------
# Tables for the brute-force loops
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _phase_table(M: int) -> np.ndarray:
    k = np.arange(M)
    return np.exp(2j * np.pi * k / M)


@lru_cache(maxsize=256)
def _unit_sum_table(q: int, M: int) -> np.ndarray:
    """U[t] = sum over units a mod q of e_M(a*t)."""
    phase = _phase_table(M)
    units = [a for a in range(q) if math.gcd(a, q) == 1] if q > 1 else [0]
    table = np.zeros(M, dtype=np.complex128)
    t = np.arange(M)
    for a in units:
        table += phase[(a * t) % M]
    return table


def _vec3(c) -> tuple[int, int, int]:
    v = tuple(int(x) for x in c)
    if len(v) != 3:
        raise ValueError("expected an integer triple")
    return v


# ---------------------------------------------------------------------------
# The master quadratic exponential sum and its CRT factors (brute force)
# ---------------------------------------------------------------------------

def s_hat(problem: CountingProblem, q: int, c) -> SumValue:
    """Brute-force evaluation of the twisted quadratic sum at modulus q."""
    L = problem.L
    M = q * L
    if M > BRUTE_QL_LIMIT:
        raise BudgetError(
            f"q*L = {M} exceeds the brute-force cap {BRUTE_QL_LIMIT}; "
            "use the explicit CRT/Salie path"
        )
    c = _vec3(c)
    val = kernels.generic_brute(
        M, L, 1,
        problem.form.coefficients, problem.grad_lambda,
        problem.k_hat, L, 1, problem.k_hat % M,
        tuple(ci % M for ci in c),
        _unit_sum_table(q, M), _phase_table(M),
    )
    return SumValue(value=complex(val), method="bruteForce", modulus=q)


def _check_split(problem: CountingProblem, q1: int, q2: int) -> None:
    if q1 < 1 or q2 < 1:
        raise ValueError("invalid split: factors must be positive")
    if math.gcd(q1, q2 * problem.omega) != 1:
        raise ValueError(f"invalid split: gcd(q1, q2*Omega) != 1 for q1={q1}, q2={q2}")


def s1_hat(problem: CountingProblem, q1: int, q2: int, c) -> SumValue:
    """Brute-force good-modulus factor of the CRT split q = q1*q2."""
    _check_split(problem, q1, q2)
    L = problem.L
    M = q1
    if M > BRUTE_QL_LIMIT:
        raise BudgetError(f"q1 = {M} exceeds the brute-force cap")
    c = _vec3(c)
    k1 = problem.k_hat * arith.mod_inverse(q2 * L, q1) % q1 if q1 > 1 else 0
    val = kernels.generic_brute(
        M, 0, 1,
        problem.form.coefficients, problem.grad_lambda,
        0, (q2 * L) ** 2 % M if M > 1 else 0, q2 % M if M > 1 else 0,
        (q2 * k1) % M if M > 1 else 0,
        tuple(ci % M for ci in c),
        _unit_sum_table(q1, M), _phase_table(M),
    )
    return SumValue(value=complex(val), method="bruteForce", modulus=q1)


def s2_hat(problem: CountingProblem, q1: int, q2: int, c) -> SumValue:
    """Brute-force bad-modulus factor of the CRT split q = q1*q2."""
    _check_split(problem, q1, q2)
    L = problem.L
    M = q2 * L
    if M > BRUTE_QL_LIMIT:
        raise BudgetError(f"q2*L = {M} exceeds the brute-force cap")
    c = _vec3(c)
    k2 = problem.k_hat * arith.mod_inverse(q1, q2 * L) % (q2 * L)
    val = kernels.generic_brute(
        M, L, q1 % L if L > 1 else 0,
        problem.form.coefficients, problem.grad_lambda,
        problem.k_hat, (q1 * q1 * L) % M, q1 % M, (q1 * k2) % M,
        tuple(ci % M for ci in c),
        _unit_sum_table(q2, M), _phase_table(M),
    )
    return SumValue(value=complex(val), method="bruteForce", modulus=q2)


# ---------------------------------------------------------------------------
# Complete quadratic sums over all residues: brute force vs explicit formula
# ---------------------------------------------------------------------------

def t_sum(form: TernaryForm, m: int, c, q: int) -> SumValue:
    """Brute-force complete sum over a mod q (units) and b mod q^3."""
    if q > BRUTE_QL_LIMIT:
        raise BudgetError(f"q = {q} exceeds the brute-force cap")
    c = _vec3(c)
    val = kernels.generic_brute(
        q, 0, 1,
        form.coefficients, (0, 0, 0),
        0, 1 % q, 0, (-m) % q,
        tuple(ci % q for ci in c),
        _unit_sum_table(q, q), _phase_table(q),
    )
    return SumValue(value=complex(val), method="bruteForce", modulus=q)


def t_character_sum(form: TernaryForm, m: int, c, q: int, twist_l: int = 1, L: int = 1) -> complex:
    """sum over units a of (a/q) e_q(-a*m - inv(4*Delta*a)*(twist_l*L^2)^2*F*(c))."""
    if math.gcd(q, 2 * form.discriminant) != 1:
        raise ValueError("explicit path requires gcd(q, 2*Delta_F) = 1")
    if q == 1:
        return 1 + 0j
    fstar = form.adjoint_value(c)
    shift = (twist_l * L * L) ** 2 * fstar
    four_delta = 4 * form.discriminant
    acc = 0j
    for a in range(1, q):
        if math.gcd(a, q) != 1:
            continue
        inv = arith.mod_inverse(four_delta * a, q)
        arg = (-a * m - inv * shift) % q
        acc += arith.jacobi(a, q) * cmath.exp(2j * math.pi * arg / q)
    return acc


def t_explicit(form: TernaryForm, m: int, c, q: int, twist_l: int = 1, L: int = 1) -> SumValue:
    """Closed evaluation of the complete sum at good odd moduli.

    Carries the q^(3/2) normalization restored against the brute-force
    oracle; the character sum is computed directly (O(phi(q)) inverses).
    """
    if math.gcd(q, 2 * form.discriminant) != 1:
        raise ValueError("explicit path requires gcd(q, 2*Delta_F) = 1")
    c = _vec3(c)
    char_sum = t_character_sum(form, m, c, q, twist_l=twist_l, L=L)
    iota3 = arith.iota(q) ** 3
    val = q ** 1.5 * iota3 * arith.jacobi(form.discriminant, q) * char_sum
    return SumValue(value=complex(val), method="explicitFormula", modulus=q)


def s1_assembled(problem: CountingProblem, r: int, q2: int, c) -> complex:
    """Good factor at modulus r for bad cofactor q2, with the lift phase folded in.

    This is the character-sum value entering the per-q assembly of the
    q-average: the bad-cofactor twist acts through its modular inverse, so
    the shift sits on the m-slot (inverse squared), not on F*(c).  Forced by
    the brute-force oracle; the naive placement fails at (m=9, q=21).
    """
    F = problem.form
    if math.gcd(r, 2 * F.discriminant) != 1:
        raise ValueError("requires gcd(r, 2*Delta_F) = 1")
    if r == 1:
        return 1 + 0j
    s = q2 * problem.L**2
    m_twisted = arith.mod_inverse(s * s, r) * problem.m % r
    fstar = F.adjoint_value(c)
    four_delta = 4 * F.discriminant
    acc = 0j
    for a in range(1, r):
        if math.gcd(a, r) != 1:
            continue
        inv = arith.mod_inverse(four_delta * a, r)
        arg = (-a * m_twisted - inv * fstar) % r
        acc += arith.jacobi(a, r) * cmath.exp(2j * math.pi * arg / r)
    return r**1.5 * arith.iota(r) ** 3 * arith.jacobi(F.discriminant, r) * acc


def tcal_direct(form: TernaryForm, m: int, r: int, s: int, l: int, c, L: int = 1) -> complex:
    """Direct character sum with the extra unit twist s (oracle for bounds)."""
    if math.gcd(r, 2 * form.discriminant) != 1 or math.gcd(r, s) != 1:
        raise ValueError("requires gcd(r, 2*Delta_F) = gcd(r, s) = 1")
    if r == 1:
        return 1 + 0j
    fstar = form.adjoint_value(c)
    shift = (l * L * L) ** 2 * fstar
    four_delta = 4 * form.discriminant
    sbar = arith.mod_inverse(s, r)
    acc = 0j
    for a in range(1, r):
        if math.gcd(a, r) != 1:
            continue
        inv = arith.mod_inverse(four_delta * a, r)
        arg = sbar * (-a * m - inv * shift) % r
        acc += arith.jacobi(a, r) * cmath.exp(2j * math.pi * arg / r)
    return acc


# ---------------------------------------------------------------------------
# Salie evaluation through quadratic congruence roots
# ---------------------------------------------------------------------------

def salie_eval(problem: CountingProblem, q_flat: int, l1: int, l2: int, c) -> SumValue:
    """Root-based closed form of the twisted character sum at q_flat.

    Equals tcal_direct(form, m, q_flat, l1, l2, c) on its validity domain;
    carries the sqrt(q_flat) normalization restored against that oracle.
    """
    if not problem.square_case:
        raise ValueError("salie_eval requires the square case")
    if math.gcd(q_flat, problem.m_omega) != 1:
        raise ValueError("requires gcd(q_flat, m*Omega) = 1")
    c = _vec3(c)
    if q_flat == 1:
        return SumValue(value=1 + 0j, method="explicitFormula", modulus=1)
    gp = g_polynomial(problem, l1, l2, c)
    roots = _g_roots(gp, q_flat)
    phase = sum(cmath.exp(2j * math.pi * u / q_flat) for u in roots)
    sign = arith.jacobi(-problem.m * l1, q_flat)
    val = sign * arith.iota(q_flat) * math.sqrt(q_flat) * phase
    return SumValue(value=complex(val), method="explicitFormula", modulus=q_flat)


def _g_roots(gp: GPolynomial, n: int) -> list[int]:
    """Roots of G mod n for n coprime to the leading coefficient."""
    if math.gcd(n, gp.lead) != 1:
        raise ValueError("modulus shares a factor with the leading coefficient")
    w_roots = quadroots.sqrts_mod(gp.target(), n)
    inv = arith.mod_inverse(gp.lead, n)
    return sorted(w * inv % n for w in w_roots)


def s1_salie_form(problem: CountingProblem, q: int, l: int, c) -> complex:
    """The squared-modulus root form of the good factor at modulus q, cofactor l.

    q must be coprime to Omega with squarefree part toward m(Omega); returns
    q^2 * (jacobi of -F*(c) at that part) * sum of root phases at q_flat.
    The cofactor twist sits in the leading coefficient of the root
    polynomial (oracle-fixed placement).
    """
    if not problem.square_case:
        raise ValueError("requires the square case")
    if math.gcd(q, problem.omega) != 1:
        raise ValueError("requires gcd(q, Omega) = 1")
    c = _vec3(c)
    q_m = arith.part_toward(q, problem.m_omega_radical) if problem.m_omega_radical > 1 else 1
    if arith.squarefull_part(q_m) != 1:
        raise ValueError("part of q toward m(Omega) must be squarefree")
    q_flat = q // q_m
    phase = _assembled_root_phase_sum(problem, q_m, l, c, q_flat)
    fstar = problem.form.adjoint_value(c)
    return q * q * arith.jacobi(-fstar, q_m) * phase


def _assembled_root_phase_sum(problem: CountingProblem, l1: int, l2: int, c, n: int) -> complex:
    """Root-phase sum of (Delta*l1*l2*L^2 * T)^2 = m*Delta*F*(c) (mod n)."""
    if n == 1:
        return 1 + 0j
    F = problem.form
    lead = F.discriminant * l1 * l2 * problem.L**2
    if math.gcd(n, lead) != 1:
        raise ValueError("modulus shares a factor with the leading coefficient")
    target = problem.m * F.discriminant * F.adjoint_value(c)
    w_roots = quadroots.sqrts_mod(target, n)
    inv = arith.mod_inverse(lead, n)
    return sum(cmath.exp(2j * math.pi * (w * inv % n) / n) for w in w_roots) + 0j


# ---------------------------------------------------------------------------
# Quadratic congruence statistics
# ---------------------------------------------------------------------------

def rho_c(n: int, neg_fstar: int) -> int:
    """#{v mod n : v^2 = neg_fstar (mod n)} via factorization and lifting."""
    if n < 1:
        raise ValueError("n must be positive")
    return quadroots.sqrt_count_mod(neg_fstar, n)


def hooley_s(h: int, n: int, neg_fstar: int) -> complex:
    """sum of e_n(h*v) over roots v of v^2 = neg_fstar (mod n)."""
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return 1 + 0j
    roots = quadroots.sqrts_mod(neg_fstar, n)
    return sum(cmath.exp(2j * math.pi * (h * v % n) / n) for v in roots) + 0j


def v_sum(q: int) -> complex:
    """sum of e_q(u) over u with u^2 = 0 (mod q); equals mu(q)^2."""
    roots = quadroots.sqrts_mod(0, q)
    return sum(cmath.exp(2j * math.pi * u / q) for u in roots) + 0j


# ---------------------------------------------------------------------------
# Unit-twisted sums mod q2*L^2 and their character averages
# ---------------------------------------------------------------------------

def _problem_key(problem: CountingProblem):
    return (problem.form.coefficients, problem.m, problem.L, problem.lam)

_scal_cache: dict = {}


def s_cal_vector(problem: CountingProblem, q2: int, c) -> np.ndarray:
    """Values of the unit-twisted alpha sum for every unit x mod q2*L^2.

    Returned as an array indexed by x (zeros at non-units); cached per
    (problem, q2, c).
    """
    c = _vec3(c)
    key = (_problem_key(problem), q2, c)
    hit = _scal_cache.get(key)
    if hit is not None:
        return hit
    L = problem.L
    m2 = q2 * L * L
    if m2 > SCAL_M2_LIMIT:
        raise BudgetError(f"q2*L^2 = {m2} exceeds the cap {SCAL_M2_LIMIT}")
    if (q2 * L) ** 3 > SCAL_OPS_LIMIT:
        raise BudgetError(f"(q2*L)^3 = {(q2*L)**3} exceeds the op cap")
    unit_table = _unit_sum_table(q2, m2)
    c_dot_lam = sum(ci * li for ci, li in zip(c, problem.lam)) % m2
    buckets = np.asarray(
        kernels.generic_buckets(
            q2 * L, m2, L,
            problem.form.coefficients, problem.grad_lambda, problem.k_hat,
            tuple(ci % m2 for ci in c), c_dot_lam, unit_table,
        )
    )
    phase = _phase_table(m2)
    out = np.zeros(m2, dtype=np.complex128)
    u_idx = np.arange(m2)
    for x in range(m2):
        if math.gcd(x, m2) != 1:
            continue
        xbar = arith.mod_inverse(x, m2)
        out[x] = buckets @ phase[(xbar * u_idx) % m2]
    _scal_cache[key] = out
    return out


def s_cal(problem: CountingProblem, q2: int, x: int, c) -> SumValue:
    L = problem.L
    m2 = q2 * L * L
    if math.gcd(x, q2 * L) != 1:
        raise ValueError("x must be coprime to q2*L")
    vec = s_cal_vector(problem, q2, c)
    return SumValue(value=complex(vec[x % m2]), method="bruteForce", modulus=q2)


def a_hat(problem: CountingProblem, q2: int, chi: characters.DirichletCharacter, c) -> SumValue:
    """Character average of the unit-twisted sums (conjugate convention)."""
    L = problem.L
    m2 = q2 * L * L
    if chi.modulus != m2:
        raise ValueError(f"character modulus must be q2*L^2 = {m2}")
    vec = s_cal_vector(problem, q2, c)
    table = chi.value_table()
    val = np.vdot(table, vec) / arith.euler_phi(m2)  # vdot conjugates chi
    return SumValue(value=complex(val), method="multiplicative", modulus=q2)


def s_cal_from_characters(problem: CountingProblem, q2: int, q1: int, c) -> complex:
    """Reassemble the unit-twisted sum at x = q1 from the character averages."""
    L = problem.L
    m2 = q2 * L * L
    acc = 0j
    for chi in characters.enumerate_characters(m2):
        acc += chi(q1) * a_hat(problem, q2, chi, c).value
    return acc


# ---------------------------------------------------------------------------
# Averages of root phases against quadratic congruences
# ---------------------------------------------------------------------------

_spf_cache: dict[int, np.ndarray] = {}


def _spf(limit: int) -> np.ndarray:
    size = 1 << max(14, (limit + 1).bit_length())
    for cached in _spf_cache:
        if cached >= limit + 1:
            return _spf_cache[cached]
    spf = np.arange(size, dtype=np.int64)
    spf[1] = 0
    for p in range(2, math.isqrt(size - 1) + 1):
        if spf[p] == p:
            sl = spf[p * p :: p]
            sl[sl == np.arange(p * p, size, p)] = p
    _spf_cache.clear()
    _spf_cache[size] = spf
    return spf


_sqrt_table_cache: dict = {}


def _sqrt_tables(a0: int, limit: int):
    """Per-prime data for w^2 = a0: (sqrt of unit part mod p, ord_p(a0))."""
    key = (a0, 1 << max(10, limit.bit_length()))
    hit = _sqrt_table_cache.get(key)
    if hit is not None and hit[2] >= limit:
        return hit[0], hit[1]
    size = key[1]
    sqrt_t = np.full(size + 1, -1, dtype=np.int64)
    ord_t = np.zeros(size + 1, dtype=np.int8)
    for p in arith.primes_up_to(size):
        if p == 2:
            continue
        if a0 == 0:
            ord_t[p] = 127
            sqrt_t[p] = 0
            continue
        v, e = a0, 0
        while v % p == 0:
            v //= p
            e += 1
        ord_t[p] = min(e, 126)
        r = quadroots.sqrt_mod_prime(v, p)
        sqrt_t[p] = -1 if r is None else r
    _sqrt_table_cache.clear()
    _sqrt_table_cache[key] = (sqrt_t, ord_t, size)
    return sqrt_t, ord_t


def _scaled_sqrt_tables(a0: int, scale: int, limit: int):
    """Tables for w^2 = scale^2 * a0 derived from the base tables for a0."""
    base_sqrt, base_ord = _sqrt_tables(a0, limit)
    if scale == 1:
        return base_sqrt, base_ord
    n = base_sqrt.shape[0]
    p = np.arange(n, dtype=np.int64)
    scaled = np.where(base_sqrt >= 0, (abs(scale) % np.maximum(p, 1)) * base_sqrt % np.maximum(p, 1), -1)
    return scaled, base_ord


def quad_root_phase_sum(
    x_max: int,
    coprime_to: int,
    a0: int,
    scale: int,
    s0: int,
    weight_table: np.ndarray,
    weight_mod: int,
) -> complex:
    """sum over n <= x_max coprime to coprime_to of weight[n mod wm] times the
    phase sum over roots of (s0*v)^2 = (scale^2*a0) (mod n)."""
    if x_max < 1:
        return 0j
    if x_max > X_KERNEL_LIMIT:
        raise BudgetError(f"x_max = {x_max} exceeds {X_KERNEL_LIMIT}")
    if coprime_to % 2 != 0:
        raise ValueError("coprime_to must be even (odd moduli only in the kernel)")
    A = scale * scale * a0
    if A == 0:
        return _squarefree_weighted_sum(x_max, coprime_to, weight_table, weight_mod)
    spf = _spf(x_max)
    sqrt_t, ord_t = _scaled_sqrt_tables(a0, scale, x_max)
    return complex(
        kernels.quad_phase_sum(
            x_max, coprime_to, A, s0, spf, sqrt_t, ord_t,
            np.ascontiguousarray(weight_table, dtype=np.complex128), weight_mod,
        )
    )


def _squarefree_weighted_sum(x_max: int, coprime_to: int, weight_table, weight_mod: int) -> complex:
    """Degenerate target A = 0: only squarefree moduli survive, each with
    a single zero root, so the sum collapses to a weighted squarefree count."""
    n = np.arange(x_max + 1, dtype=np.int64)
    squarefree = np.ones(x_max + 1, dtype=bool)
    for p in arith.primes_up_to(math.isqrt(x_max)):
        squarefree[p * p :: p * p] = False
    keep = squarefree.copy()
    keep[0] = False
    for p, _ in arith.factorize(coprime_to):
        keep[p::p] = False
    w = np.asarray(weight_table, dtype=np.complex128)
    return complex(w[n[keep] % weight_mod].sum())


def u_sum(
    problem: CountingProblem,
    l1: int,
    l2: int,
    c,
    chi: characters.DirichletCharacter,
    x_max: int,
) -> complex:
    """Character-weighted average of root phases of the (l1, l2, c) congruence."""
    if x_max < 1:
        return 0j
    if not (arith.supported_on(l1, problem.m_omega) and arith.supported_on(l2, problem.m_omega)):
        raise ValueError("l1, l2 must be supported on m*Omega")
    c = _vec3(c)
    F = problem.form
    a0 = problem.m * F.discriminant * F.adjoint_value(c)
    scale = l2 * problem.L**2
    s0 = F.discriminant * l1
    table = chi.value_table()
    return quad_root_phase_sum(x_max, problem.m_omega, a0, scale, s0, table, chi.modulus)


def u_sum_assembly(
    problem: CountingProblem,
    l1: int,
    l2: int,
    c,
    chi: characters.DirichletCharacter,
    x_max: int,
) -> complex:
    """Variant of u_sum with the cofactor twist in the leading coefficient.

    This is the form that enters the exact decompositions of the q-average
    (the published constant-term placement fails the brute-force oracle as
    soon as the twist is a non-square unit).
    """
    if x_max < 1:
        return 0j
    c = _vec3(c)
    F = problem.form
    a0 = problem.m * F.discriminant * F.adjoint_value(c)
    s0 = F.discriminant * l1 * l2 * problem.L**2
    table = chi.value_table()
    return quad_root_phase_sum(x_max, problem.m_omega, a0, 1, s0, table, chi.modulus)


# ---------------------------------------------------------------------------
# Mixed exponential sums with a multiplicative inverse
# ---------------------------------------------------------------------------

def theta_const_direct(q: int, s: int, t: int, chi: characters.DirichletCharacter) -> complex:
    """Oracle: direct O(q) evaluation of the density constant."""
    if math.gcd(s, q) != 1:
        raise ValueError("requires gcd(s, q) = 1")
    sprod = math.prod(1 - 1 / p for p, _ in arith.factorize(s)) if s > 1 else 1.0
    if q == 1:
        return complex(sprod)
    acc = 0j
    for x in range(1, q):
        if math.gcd(x, q) != 1:
            continue
        xbar = arith.mod_inverse(x, q)
        acc += chi(x) * cmath.exp(2j * math.pi * (t * xbar % q) / q)
    return acc / q * sprod


def theta_const(q: int, s: int, t: int, chi: characters.DirichletCharacter) -> complex:
    """Leading density of sums of chi(n) e_q(t * inverse(n)) over n coprime to s*q.

    Ramanujan closed form for principal chi, Gauss-sum product otherwise.
    """
    if math.gcd(s, q) != 1:
        raise ValueError("requires gcd(s, q) = 1")
    if q % chi.modulus != 0:
        raise ValueError("modulus of chi must divide q")
    sprod = math.prod(1 - 1 / p for p, _ in arith.factorize(s)) if s > 1 else 1.0
    if q == 1:
        return complex(sprod)
    if chi.is_principal:
        return arith.ramanujan_sum(q, t) / q * sprod
    f = chi.conductor
    gauss = sum(
        chi.primitive_value(x).conjugate() * cmath.exp(2j * math.pi * x / f)
        for x in range(f)
    )
    h = q // f
    total = 0j
    for e in arith.divisors(math.gcd(abs(t), h) if t else h):
        md = arith.mobius(h // e)
        if md == 0:
            continue
        cof = chi.primitive_value(h // e).conjugate()
        if cof == 0:
            continue
        total += e * chi.primitive_value(t // e if t else 0) * md * cof
    return gauss * total / q * sprod


@dataclass(frozen=True)
class GammaValue:
    value: complex
    tail_estimate: float
    k_max: int


def gamma_const(
    problem: CountingProblem,
    chi: characters.DirichletCharacter,
    l1: int,
    l2: int,
    c,
    k_max: int = 20000,
) -> GammaValue:
    """Leading linear density of the (l1, l2, c) root-phase average.

    Assembled from the reduced polynomial data and the inverse-sum densities;
    requires -F*(c) to be a positive perfect square.
    """
    if k_max < 1000:
        raise ValueError("k_max must be at least 1000")
    c = _vec3(c)
    fstar = problem.form.adjoint_value(c)
    if fstar >= 0 or not arith.is_perfect_square(-fstar):
        raise ValueError("requires -F*(c) to be a nonzero perfect square")
    if not problem.square_case:
        raise ValueError("requires the square case")
    gp = g_polynomial(problem, l1, l2, c)
    return _gamma_from_pair(problem, chi, gp.a0, gp.b0, k_max)


def gamma_const_assembly(
    problem: CountingProblem,
    chi: characters.DirichletCharacter,
    l1: int,
    l2: int,
    c,
    k_max: int = 20000,
) -> GammaValue:
    """Linear density for the assembly convention (twist in the lead)."""
    c = _vec3(c)
    fstar = problem.form.adjoint_value(c)
    if fstar >= 0 or not arith.is_perfect_square(-fstar):
        raise ValueError("requires -F*(c) to be a nonzero perfect square")
    if not problem.square_case:
        raise ValueError("requires the square case")
    n_c = arith.integer_sqrt(-fstar)
    lead = problem.form.discriminant * l1 * l2 * problem.L**2
    g0 = math.gcd(abs(lead), abs(problem.d0 * n_c))
    a0 = lead // g0
    b0 = problem.d0 * n_c // g0
    if a0 < 0:
        a0, b0 = -a0, -b0
    return _gamma_from_pair(problem, chi, a0, b0, k_max)


_gamma_cache: dict = {}


def _gamma_from_pair(
    problem: CountingProblem,
    chi: characters.DirichletCharacter,
    a0: int,
    b0: int,
    k_max: int,
) -> GammaValue:
    key = (_problem_key(problem), chi.modulus, chi.exponents, a0, b0, k_max)
    hit = _gamma_cache.get(key)
    if hit is not None:
        return hit
    out = _gamma_from_pair_uncached(problem, chi, a0, b0, k_max)
    _gamma_cache[key] = out
    return out


def _gamma_from_pair_uncached(
    problem: CountingProblem,
    chi: characters.DirichletCharacter,
    a0: int,
    b0: int,
    k_max: int,
) -> GammaValue:
    disc = 2 * abs(a0 * b0)
    m_omega = problem.m_omega
    g_sum = sum(
        1.0 / g
        for g in arith.divisors(disc)
        if arith.mobius(g) != 0 and math.gcd(g, a0 * m_omega) == 1
    )
    rad_primes = sorted({p for p, _ in arith.factorize(abs(problem.m) * disc * problem.omega)})
    chi_mod = chi.modulus
    chi_table = chi.value_table()
    k_sum = 0j
    block = 0j
    block_start = max(1, k_max - k_max // 10)
    for k in range(1, k_max + 1):
        if math.gcd(k, disc * m_omega) != 1:
            continue
        chi_k = chi_table[k % chi_mod]
        if chi_k == 0:
            continue
        a0k = a0 * k
        q = chi_mod * a0k // math.gcd(chi_mod, a0k)
        residues = [(-2 * b0 % k, k)]
        if a0 > 1:
            residues.append((-b0 % a0, a0))
        t_hat = arith.crt_combine(residues)[0] if k * a0 > 1 else 0
        t = (q // a0k) * t_hat
        s = math.prod(p for p in rad_primes if q % p != 0)
        term = chi_k * theta_const(q, s, t, chi) / k
        k_sum += term
        if k >= block_start:
            block += term
    tail = 6.0 / k_max + abs(block)
    value = 2 * g_sum * k_sum
    return GammaValue(value=complex(value), tail_estimate=2 * g_sum * tail, k_max=k_max)


# ---------------------------------------------------------------------------
# The q-average of the master sums, its decompositions, and eta
# ---------------------------------------------------------------------------

def f_c_sum(problem: CountingProblem, c, x_max: int, collect_series: bool = False):
    """Normalized q-average of the master sums up to x_max (root path).

    Exact for the bad-part moduli within budget; beyond the budget the
    bad-part contribution must vanish (certified by two consecutive zero
    vectors), otherwise a BudgetError is raised.
    """
    c = _vec3(c)
    if c == (0, 0, 0):
        raise ValueError("c must be nonzero")
    if x_max < 1:
        return (0j, []) if collect_series else 0j
    F = problem.form
    L = problem.L
    a0_base = problem.m * F.discriminant * F.adjoint_value(c)
    total = 0j
    series = []
    zero_streak = 0
    for q2 in arith.divisors_supported_on(problem.m_omega, x_max):
        if zero_streak >= 2:
            break
        try:
            vec = s_cal_vector(problem, q2, c)
        except BudgetError:
            raise BudgetError(
                f"bad-part modulus q2 = {q2} needed up to x_max = {x_max} exceeds the "
                "brute budget and no zero tail was certified"
            )
        if not np.any(np.abs(vec) > 1e-12):
            zero_streak += 1
            continue
        zero_streak = 0
        m2 = q2 * L * L
        partial = quad_root_phase_sum(
            x_max // q2, problem.m_omega, a0_base, 1, F.discriminant * q2 * L * L,
            vec / (q2 * q2), m2,
        )
        total += partial
        series.append((q2, partial))
    return (total, series) if collect_series else total


def f_c_direct(problem: CountingProblem, c, x_max: int) -> complex:
    """Character-sum path: per-q assembly without quadratic root finding."""
    c = _vec3(c)
    if c == (0, 0, 0):
        raise ValueError("c must be nonzero")
    total = 0j
    for q in range(1, x_max + 1):
        q2 = arith.part_toward(q, problem.m_omega)
        q1 = q // q2
        t_val = s1_assembled(problem, q1, q2, c)
        s2_val = s_cal_vector(problem, q2, c)[q1 % (q2 * problem.L**2)]
        total += t_val * s2_val / (q1 * q1 * q2 * q2)
    return total


def decomp_check(problem: CountingProblem, c, x_max: int) -> dict:
    """Three-way evaluation of the q-average; returns values and deviations."""
    if not problem.square_case:
        raise ValueError("decomposition identities require the square case")
    c = _vec3(c)
    L = problem.L
    fstar = problem.form.adjoint_value(c)
    direct = f_c_direct(problem, c, x_max)

    # grouping 1: bad part fully outside, characters over q2*L^2
    d1 = 0j
    for q2 in arith.divisors_supported_on(problem.m_omega, x_max):
        m2 = q2 * L * L
        for chi in characters.enumerate_characters(m2):
            ahat = a_hat(problem, q2, chi, c).value
            if abs(ahat) < 1e-13:
                continue
            d1 += ahat * u_sum_assembly(problem, 1, q2, c, chi, x_max // q2) / (q2 * q2)

    # grouping 2: squarefree part of the m(Omega) support split off with a
    # quadratic-symbol twist
    d2 = 0j
    m_rad = problem.m_omega_radical
    omega_supported = arith.divisors_supported_on(problem.omega, x_max)
    squarefull_m = [
        d for d in arith.divisors_supported_on(m_rad, x_max)
        if d == 1 or arith.squarefull_part(d) == d
    ]
    l_values = sorted(
        l1 * l2 for l1 in omega_supported for l2 in squarefull_m if l1 * l2 <= x_max
    )
    for l in l_values:
        m2 = l * L * L
        chis = characters.enumerate_characters(m2)
        ahats = {chi: a_hat(problem, l, chi, c).value for chi in chis}
        if all(abs(v) < 1e-13 for v in ahats.values()):
            continue
        for q2 in arith.divisors_supported_on(m_rad, x_max // l):
            if q2 > 1 and (math.gcd(q2, l) != 1 or arith.mobius(q2) == 0):
                continue
            sym = arith.jacobi(-fstar, q2)
            if sym == 0:
                continue
            for chi, ahat in ahats.items():
                if abs(ahat) < 1e-13:
                    continue
                d2 += (
                    ahat * chi(q2) * sym
                    * u_sum_assembly(problem, q2, l, c, chi, x_max // (l * q2))
                    / (l * l)
                )

    deviations = {
        "direct_vs_grouping1": abs(direct - d1),
        "direct_vs_grouping2": abs(direct - d2),
        "grouping1_vs_grouping2": abs(d1 - d2),
    }
    return {
        "direct": direct,
        "grouping1": d1,
        "grouping2": d2,
        "max_deviation": max(deviations.values()),
        "deviations": deviations,
    }


@dataclass(frozen=True)
class EtaValue:
    value: complex
    truncated_at: int
    tail_estimate: float


def eta(problem: CountingProblem, c, k_max: int = 20000) -> EtaValue:
    """Linear density of the q-average for square directions c.

    Two regimes: F*(c) = 0 uses the squarefree-density form; -F*(c) a nonzero
    square combines the character averages with their linear densities.
    """
    c = _vec3(c)
    if c == (0, 0, 0):
        raise ValueError("c must be nonzero")
    fstar = problem.form.adjoint_value(c)
    L = problem.L
    m_omega = problem.m_omega
    if fstar == 0:
        dens = sum(
            arith.mobius(d) / d for d in arith.divisors(_radical(m_omega))
        )
        total = 0j
        truncated_at = 1
        zero_streak = 0
        for u in arith.divisors_supported_on(m_omega, 10**6):
            if zero_streak >= 2:
                break
            try:
                vec = s_cal_vector(problem, u, c)
            except BudgetError:
                break
            chi0 = characters.principal_character(u * L * L)
            ahat = a_hat(problem, u, chi0, c).value
            truncated_at = u
            if abs(ahat) < 1e-12 and not np.any(np.abs(vec) > 1e-12):
                zero_streak += 1
                continue
            zero_streak = 0
            total += ahat / u**3
        value = 6 / math.pi**2 * dens * total
        return EtaValue(value=complex(value), truncated_at=truncated_at, tail_estimate=0.0)
    if fstar > 0 or not arith.is_perfect_square(-fstar):
        raise ValueError("eta requires -F*(c) to be a perfect square (or zero)")
    total = 0j
    truncated_at = 1
    zero_streak = 0
    tail = 0.0
    for u in arith.divisors_supported_on(m_omega, 10**6):
        if zero_streak >= 2:
            break
        try:
            vec = s_cal_vector(problem, u, c)
        except BudgetError:
            break
        truncated_at = u
        if not np.any(np.abs(vec) > 1e-12):
            zero_streak += 1
            continue
        zero_streak = 0
        m2 = u * L * L
        for chi in characters.enumerate_characters(m2):
            ahat = a_hat(problem, u, chi, c).value
            if abs(ahat) < 1e-12:
                continue
            gamma = gamma_const_assembly(problem, chi, 1, u, c, k_max=k_max)
            total += ahat * gamma.value / u**3
            tail += abs(ahat) * gamma.tail_estimate / u**3
    return EtaValue(value=complex(total), truncated_at=truncated_at, tail_estimate=tail)


def _radical(n: int) -> int:
    return math.prod(p for p, _ in arith.factorize(n))
