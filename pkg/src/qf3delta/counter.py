"""Exact lattice-point counting on F(x) = m with congruence conditions.

Ground-truth oracle for everything else: the fast path iterates (x1, x2)
over the target box and solves the quadratic in x3 exactly (integer
discriminant + perfect-square test); the O(B^3) triple loop is kept as an
independent cross-check.  Work is striped over x1 and reduced in stripe
order, so results are identical for any worker count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

from . import kernels
from .deltaosc import BumpWeight
from .forms import CountingProblem


@dataclass(frozen=True)
class CountResult:
    big_b: float
    weighted_count: float | None
    sharp_count: int | None
    elapsed: float
    points_sample: tuple | None = None


def _axis_order(problem: CountingProblem):
    """Permutation putting a nonzero diagonal coefficient last (solved axis)."""
    a11, a22, a33, *_ = problem.form.coefficients
    diag = (a11, a22, a33)
    for solved in (2, 1, 0):
        if diag[solved] != 0:
            outer = [i for i in range(3) if i != solved]
            return outer[0], outer[1], solved
    return 0, 1, 2  # all-zero diagonal: bilinear branch in the kernel


def _permuted(problem: CountingProblem, order):
    """Form coefficients, lift, and box mapped through the axis permutation."""
    i, j, k = order
    a = problem.form.half_hessian
    coeffs = (
        a[i][i], a[j][j], a[k][k],
        2 * a[i][j], 2 * a[i][k], 2 * a[j][k],
    )
    lam = (problem.lam[i], problem.lam[j], problem.lam[k])
    return coeffs, lam


def _box_from_weight(weight: BumpWeight, big_b: float):
    return [
        (int(math.floor(big_b * (c - weight.radius))) - 1,
         int(math.ceil(big_b * (c + weight.radius))) + 1)
        for c in weight.center
    ]


def _sharp_box(big_b: float):
    b = int(big_b)
    return [(-b, b)] * 3


def _stripes(lo: int, hi: int, n: int):
    """n contiguous stripes covering [lo, hi]."""
    width = hi - lo + 1
    n = max(1, min(n, width))
    step = width // n
    cuts = [lo + i * step for i in range(n)] + [hi + 1]
    return [(cuts[i], cuts[i + 1] - 1) for i in range(n) if cuts[i] <= cuts[i + 1] - 1]


def _sharp_stripe(args):
    coeffs, m, L, lam, box, stripe = args
    return kernels.count_sharp_range(
        coeffs, m, L, lam,
        stripe[0], stripe[1], box[1][0], box[1][1], box[2][0], box[2][1],
    )


def _weighted_stripe(args):
    coeffs, m, L, lam, big_b, center, radius, amplitude, box, stripe = args
    return kernels.count_weighted_range(
        coeffs, m, L, lam, big_b, center[0], center[1], center[2], radius, amplitude,
        stripe[0], stripe[1], box[1][0], box[1][1], box[2][0], box[2][1],
    )


FIXED_STRIPES = 32


def count(
    problem: CountingProblem,
    big_b: float,
    weight: BumpWeight | None = None,
    sharp_box: bool = False,
    workers: int = 1,
    sample_points: int = 0,
) -> CountResult:
    """Count solutions with x = Gamma (mod L), weighted by w(x/B) or sharply.

    Exactly one of weight / sharp_box must be chosen.  m = O(B^(2-theta)) is
    checked as a warning only (stderr), per the growth budget.
    """
    if (weight is None) == (not sharp_box):
        raise ValueError("choose exactly one of weight= or sharp_box=True")
    if big_b < 1:
        raise ValueError("B must be >= 1")
    if abs(problem.m) > big_b ** (2 - problem.theta):
        import sys

        print(
            f"warning: |m| = {abs(problem.m)} exceeds B^(2-theta) = "
            f"{big_b ** (2 - problem.theta):.3g}",
            file=sys.stderr,
        )
    order = _axis_order(problem)
    coeffs, lam = _permuted(problem, order)
    t0 = time.perf_counter()
    if sharp_box:
        box_xyz = _sharp_box(big_b)
    else:
        box_xyz = _box_from_weight(weight, big_b)
    box = [box_xyz[order[0]], box_xyz[order[1]], box_xyz[order[2]]]
    # stripe layout is independent of worker count: only scheduling varies
    stripe_list = _stripes(box[0][0], box[0][1], FIXED_STRIPES)

    if sharp_box:
        jobs = [(coeffs, problem.m, problem.L, lam, box, s) for s in stripe_list]
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                partials = list(pool.map(_sharp_stripe, jobs))
        else:
            partials = [_sharp_stripe(j) for j in jobs]
        total = 0
        for p in partials:  # stripe order
            total += p
        elapsed = time.perf_counter() - t0
        sample = _collect_samples(problem, box_xyz, sample_points) if sample_points else None
        return CountResult(big_b=big_b, weighted_count=float(total), sharp_count=total,
                           elapsed=elapsed, points_sample=sample)

    center = (weight.center[order[0]], weight.center[order[1]], weight.center[order[2]])
    jobs = [
        (coeffs, problem.m, problem.L, lam, float(big_b), center, weight.radius,
         weight.amplitude, box, s)
        for s in stripe_list
    ]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(_weighted_stripe, jobs))
    else:
        partials = [_weighted_stripe(j) for j in jobs]
    total = 0.0
    comp = 0.0
    for p in partials:  # compensated, fixed stripe order
        y = p - comp
        t = total + y
        comp = (t - total) - y
        total = t
    elapsed = time.perf_counter() - t0
    sample = _collect_samples(problem, box_xyz, sample_points) if sample_points else None
    return CountResult(big_b=big_b, weighted_count=total, sharp_count=None,
                       elapsed=elapsed, points_sample=sample)


def _collect_samples(problem: CountingProblem, box_xyz, limit: int):
    """Small pure-Python pass gathering example solutions (diagnostics only)."""
    out = []
    F = problem.form
    L, lam, m = problem.L, problem.lam, problem.m
    (x1l, x1h), (x2l, x2h), (x3l, x3h) = box_xyz
    for x1 in range(x1l + (lam[0] - x1l) % L, x1h + 1, L):
        for x2 in range(x2l + (lam[1] - x2l) % L, x2h + 1, L):
            for x3 in range(x3l + (lam[2] - x3l) % L, x3h + 1, L):
                if F((x1, x2, x3)) == m:
                    out.append((x1, x2, x3))
                    if len(out) >= limit:
                        return tuple(out)
    return tuple(out)


def count_triple_loop(problem: CountingProblem, big_b: float,
                      weight: BumpWeight | None = None, sharp_box: bool = False) -> CountResult:
    """Independent O(B^3) oracle; B capped at 300."""
    if big_b > 300:
        raise ValueError("triple-loop oracle capped at B = 300")
    if (weight is None) == (not sharp_box):
        raise ValueError("choose exactly one of weight= or sharp_box=True")
    import numpy as np

    box = _sharp_box(big_b) if sharp_box else _box_from_weight(weight, big_b)
    F = problem.form
    L, lam, m = problem.L, problem.lam, problem.m
    t0 = time.perf_counter()
    x2 = np.arange(box[1][0] + (lam[1] - box[1][0]) % L, box[1][1] + 1, L, dtype=np.int64)
    x3 = np.arange(box[2][0] + (lam[2] - box[2][0]) % L, box[2][1] + 1, L, dtype=np.int64)
    g2, g3 = np.meshgrid(x2, x3, indexing="ij")
    a11, a22, a33, a12, a13, a23 = F.coefficients
    sharp = 0
    weighted = 0.0
    for x1 in range(box[0][0] + (lam[0] - box[0][0]) % L, box[0][1] + 1, L):
        vals = (
            a11 * x1 * x1 + a22 * g2 * g2 + a33 * g3 * g3
            + a12 * x1 * g2 + a13 * x1 * g3 + a23 * g2 * g3
        )
        hit = vals == m
        n = int(np.count_nonzero(hit))
        if n == 0:
            continue
        sharp += n
        if weight is not None:
            w = weight(
                np.full(n, x1, dtype=np.float64) / big_b,
                g2[hit].astype(np.float64) / big_b,
                g3[hit].astype(np.float64) / big_b,
            )
            weighted += float(w.sum())
    elapsed = time.perf_counter() - t0
    if weight is None:
        return CountResult(big_b=big_b, weighted_count=float(sharp), sharp_count=sharp,
                           elapsed=elapsed)
    return CountResult(big_b=big_b, weighted_count=weighted, sharp_count=None, elapsed=elapsed)
