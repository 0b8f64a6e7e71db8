"""Assemble the predicted growth terms and confront them with exact counts.

The leading coefficient is the product of the archimedean density and the
modified singular series; the order-B coefficient combines the zero-frequency
calibration constant with the square-direction phase densities.  Validation
is by least-squares coefficient fit against exact counts, which is the honest
desk-scale statistic (the two growth shapes B log B and B separate weakly).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import counter, deltaosc, densities, expsums
from .deltaosc import BumpWeight, DeltaKernel, default_kernel
from .forms import CountingProblem

EULER_GAMMA = 0.5772156649015329


@dataclass(frozen=True)
class SecondaryConstants:
    k_part: complex
    b_part: complex
    a_value: complex
    c_max_used: int
    tail_estimate: float
    shells: dict = field(default_factory=dict)


@dataclass
class PredictionReport:
    rows: list  # (B, exact, main_term, secondary, ratio)
    alpha_fit: float
    beta_fit: float
    alpha_reference: float
    beta_reference: float | None
    alpha_relative_error: float


def leading_coefficient(problem: CountingProblem, weight: BumpWeight) -> float:
    """I(w) times the modified singular series."""
    i_of_w = deltaosc.singular_integral_surface(weight, problem.form)
    return i_of_w * densities.singular_series(problem)


def main_term(problem: CountingProblem, weight: BumpWeight, big_b: float) -> float:
    if not problem.square_case:
        raise ValueError(
            "main term of shape B log B requires -m*Delta_F to be a perfect square"
        )
    coeff = leading_coefficient(problem, weight)
    if coeff <= 0:
        raise ValueError("leading coefficient must be positive")
    return coeff * big_b * math.log(big_b)


def _square_direction(problem: CountingProblem, c) -> bool:
    from . import arith

    fstar = problem.form.adjoint_value(c)
    return fstar <= 0 and arith.is_perfect_square(-fstar)


def _direction_term(args):
    """One direction's eta * J contribution (worker entry point)."""
    problem, weight, c, k_max_gamma, j_ppo, j_target, j_budget = args
    eta_val = expsums.eta(problem, c, k_max=k_max_gamma).value
    if abs(eta_val) < 1e-12:
        return 0j
    jc = deltaosc.j_c(default_kernel(), weight, problem.form, c, L=problem.L,
                      points_per_octave=j_ppo, target=j_target,
                      point_budget=j_budget)["value"]
    return 2 * (eta_val * jc).real + 0j  # c and -c are conjugate


def secondary_constants(
    problem: CountingProblem,
    weight: BumpWeight,
    c_max: int = 10,
    k_max_gamma: int = 4000,
    shell_tol: float = 5e-3,
    kernel: DeltaKernel | None = None,
    j_points_per_octave: int = 5,
    j_target: float = 2e-6,
    j_point_budget: int = 8 * 10**6,
    workers: int = 1,
) -> SecondaryConstants:
    """(K, b, a): the order-B constants.

    The direction sum runs over sup-norm shells of square directions and
    stops once a shell contributes below shell_tol of the accumulated value;
    the reported tail estimate is three times the last shell's magnitude.
    Conjugate directions are paired, so the result is real up to roundoff.
    Directions within a shell may be evaluated in parallel; the reduction
    is ordered, so the result is worker-count independent.
    """
    if problem.m_omega_radical > 1 and len(str(problem.m_omega_radical)) > 6:
        import sys

        print("warning: omega(m) large; the direction series converges slowly", file=sys.stderr)
    kernel = kernel or default_kernel()
    if weight.amplitude == 0:
        return SecondaryConstants(0j, 0j, 0j, 0, 0.0)
    L = problem.L
    k_accum = 0j
    shells = {}
    last_shell = 0.0
    used = 0
    for shell in range(1, c_max + 1):
        dirs = [c for c in _shell_directions(shell) if _square_direction(problem, c)]
        jobs = [
            (problem, weight, c, k_max_gamma, j_points_per_octave, j_target, j_point_budget)
            for c in dirs
        ]
        if workers > 1 and len(jobs) > 1:
            from concurrent.futures import ProcessPoolExecutor

            with ProcessPoolExecutor(max_workers=workers) as pool:
                terms = list(pool.map(_direction_term, jobs))
        else:
            terms = [_direction_term(j) for j in jobs]
        shell_sum = 0j
        for t in terms:  # fixed direction order
            shell_sum += t
        shells[shell] = complex(shell_sum)
        k_accum += shell_sum
        used = shell
        last_shell = abs(shell_sum)
        if shell >= 2 and last_shell < shell_tol * max(abs(k_accum), 1e-9):
            break
    k_part = k_accum / L**4
    tail = 3.0 * last_shell / L**4
    i_of_w = deltaosc.singular_integral_surface(weight, problem.form)
    series = densities.singular_series(problem)
    k0_val = deltaosc.k0(kernel, weight, problem.form, i_of_w=i_of_w)["value"]
    b_part = series * (i_of_w * (EULER_GAMMA / L**4 - math.log(L)) + k0_val)
    return SecondaryConstants(
        k_part=complex(k_part),
        b_part=complex(b_part),
        a_value=complex(k_part + b_part),
        c_max_used=used,
        tail_estimate=tail,
        shells=shells,
    )


def _shell_directions(shell: int):
    """Directions with sup-norm exactly `shell`, one of each conjugate pair."""
    out = []
    rng = range(-shell, shell + 1)
    for c1 in rng:
        for c2 in rng:
            for c3 in rng:
                if max(abs(c1), abs(c2), abs(c3)) != shell:
                    continue
                c = (c1, c2, c3)
                if c < (0, 0, 0):  # keep one representative of {c, -c}
                    continue
                out.append(c)
    return out


def fit_and_compare(
    problem: CountingProblem,
    weight: BumpWeight,
    b_grid,
    workers: int = 1,
    secondary: SecondaryConstants | None = None,
) -> PredictionReport:
    """Least-squares (alpha, beta) in exact ~ alpha B log B + beta B.

    The grid must be geometric-ish with at least 6 points; alpha is compared
    against the independently computed leading coefficient.
    """
    b_grid = sorted(int(b) for b in b_grid)
    if len(b_grid) < 6:
        raise ValueError("need at least 6 grid points")
    if max(b_grid) > 10**5:
        raise ValueError("B capped at 1e5")
    alpha_ref = leading_coefficient(problem, weight)
    exact = []
    for big_b in b_grid:
        res = counter.count(problem, big_b, weight=weight, workers=workers)
        exact.append(res.weighted_count)
    design = np.array([[b * math.log(b), b] for b in b_grid], dtype=np.float64)
    rhs = np.array(exact, dtype=np.float64)
    gram = design.T @ design
    if abs(np.linalg.det(gram)) < 1e-12 * np.prod(np.diag(gram)):
        raise ValueError("degenerate grid: design matrix nearly singular")
    alpha_fit, beta_fit = np.linalg.solve(gram, design.T @ rhs)
    rows = []
    for big_b, cnt in zip(b_grid, exact):
        mt = alpha_ref * big_b * math.log(big_b)
        sec = secondary.a_value.real * big_b if secondary else float("nan")
        ratio = cnt / mt if mt else float("nan")
        rows.append((big_b, cnt, mt, sec, ratio))
    return PredictionReport(
        rows=rows,
        alpha_fit=float(alpha_fit),
        beta_fit=float(beta_fit),
        alpha_reference=alpha_ref,
        beta_reference=secondary.a_value.real if secondary else None,
        alpha_relative_error=abs(alpha_fit - alpha_ref) / alpha_ref,
    )
