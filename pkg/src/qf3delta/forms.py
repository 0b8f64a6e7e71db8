"""Ternary quadratic forms and congruence-restricted counting problems.

A form is stored through its integer half-Hessian A (so cross coefficients
must be even), with F(x) = x^T A x.  The adjoint form F* comes from the
integer adjugate of A.  A counting problem bundles the form with the target
value m, the congruence data (L, Gamma) and the derived quantities used by
the exponential-sum and density machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import arith

Vec3 = tuple[int, int, int]


def _det3(a) -> int:
    return (
        a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
        - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
    )


def _adjugate3(a) -> list[list[int]]:
    cof = [[0, 0, 0] for _ in range(3)]
    for i in range(3):
        for j in range(3):
            r = [k for k in range(3) if k != i]
            c = [k for k in range(3) if k != j]
            minor = a[r[0]][c[0]] * a[r[1]][c[1]] - a[r[0]][c[1]] * a[r[1]][c[0]]
            cof[j][i] = (-1) ** (i + j) * minor
    return cof


@dataclass(frozen=True)
class TernaryForm:
    """Integral ternary quadratic form with even cross coefficients."""

    coefficients: tuple[int, int, int, int, int, int]  # a11,a22,a33,a12,a13,a23
    half_hessian: tuple[tuple[int, int, int], ...]
    discriminant: int
    adjoint: tuple[tuple[int, int, int], ...]
    signature: tuple[int, int]

    def __call__(self, x) -> int:
        a11, a22, a33, a12, a13, a23 = self.coefficients
        x1, x2, x3 = x
        return (
            a11 * x1 * x1
            + a22 * x2 * x2
            + a33 * x3 * x3
            + a12 * x1 * x2
            + a13 * x1 * x3
            + a23 * x2 * x3
        )

    def gradient(self, x) -> Vec3:
        a = self.half_hessian
        return tuple(2 * sum(a[i][j] * x[j] for j in range(3)) for i in range(3))

    def adjoint_value(self, c) -> int:
        a = self.adjoint
        return sum(c[i] * a[i][j] * c[j] for i in range(3) for j in range(3))


def new_form(coefficients) -> TernaryForm:
    """Build a TernaryForm from (a11, a22, a33, a12, a13, a23).

    Rejects odd cross coefficients, degenerate and definite forms.
    """
    coeffs = tuple(int(c) for c in coefficients)
    if len(coeffs) != 6:
        raise ValueError("expected 6 coefficients (a11,a22,a33,a12,a13,a23)")
    a11, a22, a33, a12, a13, a23 = coeffs
    if a12 % 2 or a13 % 2 or a23 % 2:
        raise ValueError("unsupported form convention: cross coefficients must be even")
    a = [
        [a11, a12 // 2, a13 // 2],
        [a12 // 2, a22, a23 // 2],
        [a13 // 2, a23 // 2, a33],
    ]
    det = _det3(a)
    if det == 0:
        raise ValueError("degenerate form: det of half-Hessian is zero")
    signature = _signature(a)
    if 0 in signature:
        raise ValueError("not indefinite")
    return TernaryForm(
        coefficients=coeffs,
        half_hessian=tuple(tuple(row) for row in a),
        discriminant=det,
        adjoint=tuple(tuple(row) for row in _adjugate3(a)),
        signature=signature,
    )


def _signature(a) -> tuple[int, int]:
    """(n+, n-) by Descartes' rule on the characteristic polynomial of A.

    A is symmetric with nonzero determinant so all eigenvalues are real and
    nonzero; integer arithmetic only.
    """
    tr = a[0][0] + a[1][1] + a[2][2]
    c2 = (
        a[0][0] * a[1][1]
        - a[0][1] * a[1][0]
        + a[0][0] * a[2][2]
        - a[0][2] * a[2][0]
        + a[1][1] * a[2][2]
        - a[1][2] * a[2][1]
    )
    det = _det3(a)
    # char poly: t^3 - tr t^2 + c2 t - det; sign changes of (1,-tr,c2,-det)
    seq = [1, -tr, c2, -det]
    signs = [s for s in seq if s != 0]
    pos = sum(1 for u, v in zip(signs, signs[1:]) if u * v < 0)
    return pos, 3 - pos


@dataclass(frozen=True)
class CountingProblem:
    """(F, m, L, Gamma) plus derived data for the counting machinery."""

    form: TernaryForm
    m: int
    L: int
    gamma: Vec3
    lam: Vec3
    theta: float
    k_hat: int
    omega: int            # |2 L Delta_F|
    m_omega_radical: int  # product of p | m with p not dividing omega
    square_case: bool
    d0: int | None
    grad_lambda: Vec3 = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "grad_lambda", self.form.gradient(self.lam))

    @property
    def m_omega(self) -> int:
        """|m| * omega: the modulus support governing the good/bad split."""
        return abs(self.m) * self.omega

    def h_hat(self, y) -> int:
        g = self.grad_lambda
        return self.k_hat + g[0] * y[0] + g[1] * y[1] + g[2] * y[2]


def new_problem(form: TernaryForm, m: int, L: int, gamma, theta: float = 0.5) -> CountingProblem:
    if m == 0:
        raise ValueError("m must be nonzero")
    if L < 1:
        raise ValueError("L must be positive")
    gam = tuple(int(g) % L for g in gamma)
    if len(gam) != 3:
        raise ValueError("Gamma must be a triple")
    if (form(gam) - m) % L != 0:
        raise ValueError("Gamma not on W_m mod L")
    lam = gam  # canonical lift with coordinates in [0, L)
    k_hat = (form(lam) - m) // L
    omega = abs(2 * L * form.discriminant)
    m_omega_radical = math.prod(
        p for p, _ in arith.factorize(abs(m)) if omega % p != 0
    )
    disc_product = -m * form.discriminant
    square_case = arith.is_perfect_square(disc_product)
    d0 = arith.integer_sqrt(disc_product) if square_case else None
    return CountingProblem(
        form=form,
        m=m,
        L=L,
        gamma=gam,
        lam=lam,
        theta=theta,
        k_hat=k_hat,
        omega=omega,
        m_omega_radical=m_omega_radical,
        square_case=square_case,
        d0=d0,
    )


def h_hat(problem: CountingProblem, y) -> int:
    return problem.h_hat(y)
