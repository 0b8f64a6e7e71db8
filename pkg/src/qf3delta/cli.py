"""Command-line front end: one JSON config drives every experiment.

    qf3delta <subcommand> --config <path> [--out <dir>] [--workers N]

Subcommands: count, predict, densities, expsum, salie-avg, usum,
delta-check, report.  Every run writes CSV artifacts (17-significant-digit
numbers, fixed column order) plus a manifest.json with the config echo and
content hashes; identical configs give byte-identical CSVs.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

from . import __version__, arith, characters, counter, densities, deltaosc, expsums, kernels, predictor
from .deltaosc import BumpWeight, default_kernel
from .forms import CountingProblem, new_form, new_problem

EXIT_USAGE = 2
EXIT_CONFIG = 3
EXIT_BUDGET = 4


class ConfigError(ValueError):
    pass


def fmt(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def load_config(path: str) -> dict:
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"config is not valid JSON: {e}")
    if not isinstance(cfg, dict):
        raise ConfigError("top-level config must be an object")
    return cfg


def build_problem(cfg: dict) -> CountingProblem:
    try:
        form = new_form(cfg["form"])
        return new_problem(
            form,
            int(cfg["m"]),
            int(cfg.get("L", 1)),
            tuple(cfg.get("gamma", (0, 0, 0))),
            float(cfg.get("theta", 0.5)),
        )
    except KeyError as e:
        raise ConfigError(f"missing config key: {e}")
    except (TypeError, ValueError) as e:
        raise ConfigError(str(e))


def build_weight(cfg: dict) -> BumpWeight:
    w = cfg.get("weight", {})
    try:
        return BumpWeight(
            center=tuple(float(x) for x in w.get("center", (0.6, 0.8, 1.0))),
            radius=float(w.get("radius", 0.25)),
            amplitude=float(w.get("amplitude", 1.0)),
        )
    except (TypeError, ValueError) as e:
        raise ConfigError(f"invalid weight: {e}")


def _write_csv(path: Path, header: list[str], rows: list[tuple]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    text = "\n".join(lines) + "\n"
    path.write_text(text)
    return hashlib.sha256(text.encode()).hexdigest()


def _b_grid(cfg: dict) -> list[int]:
    grid = cfg.get("b_grid")
    if not grid:
        raise ConfigError("b_grid must be a nonempty list of integers")
    return [int(b) for b in grid]


def cmd_count(cfg, out, workers):
    problem = build_problem(cfg)
    weight = build_weight(cfg)
    rows = []
    timings = {}
    for big_b in _b_grid(cfg):
        sharp = counter.count(problem, big_b, sharp_box=True, workers=workers)
        weighted = counter.count(problem, big_b, weight=weight, workers=workers)
        rows.append((big_b, sharp.sharp_count, weighted.weighted_count))
        timings[str(big_b)] = sharp.elapsed + weighted.elapsed
    # timings live in the manifest: CSV bytes must be config-determined
    return {"counts.csv": (["B", "sharpCount", "weightedCount"], rows)}, {"count_seconds": timings}


def cmd_predict(cfg, out, workers):
    problem = build_problem(cfg)
    weight = build_weight(cfg)
    trunc = cfg.get("truncations", {})
    secondary = None
    if cfg.get("secondary", False):
        secondary = predictor.secondary_constants(
            problem, weight,
            c_max=int(trunc.get("c_max", 10)),
            k_max_gamma=int(trunc.get("k_max_gamma", 4000)),
        )
    report = predictor.fit_and_compare(problem, weight, _b_grid(cfg), workers=workers,
                                       secondary=secondary)
    rows = [tuple(r) for r in report.rows]
    summary = {
        "alpha_fit": report.alpha_fit,
        "beta_fit": report.beta_fit,
        "alpha_reference": report.alpha_reference,
        "alpha_relative_error": report.alpha_relative_error,
    }
    if secondary is not None:
        summary["secondary"] = {
            "K": [secondary.k_part.real, secondary.k_part.imag],
            "b": [secondary.b_part.real, secondary.b_part.imag],
            "a": [secondary.a_value.real, secondary.a_value.imag],
            "c_max_used": secondary.c_max_used,
            "tail_estimate": secondary.tail_estimate,
        }
        summary["beta_reference"] = secondary.a_value.real
    return (
        {"prediction.csv": (["B", "exactCount", "mainTerm", "secondaryTerm", "ratio"], rows)},
        {"prediction_summary": summary},
    )


def cmd_densities(cfg, out, workers):
    problem = build_problem(cfg)
    primes = cfg.get("density_primes")
    if primes is None:
        primes = sorted({p for p, _ in arith.factorize(problem.m_omega)} | {3, 5, 7, 11, 13})
    rows = []
    for p in primes:
        d = densities.sigma_p(problem, int(p))
        rows.append((d.p, d.value.numerator, d.value.denominator, d.stabilization_level))
    extras = {"singular_series": densities.singular_series(problem)}
    return {"densities.csv": (["p", "numerator", "denominator", "k"], rows)}, extras


def cmd_expsum(cfg, out, workers):
    problem = build_problem(cfg)
    q_max = int(cfg.get("q_max", 60))
    if q_max * problem.L > expsums.BRUTE_QL_LIMIT:
        raise expsums.BudgetError(f"q_max*L = {q_max * problem.L} over brute cap")
    c_list = [tuple(int(x) for x in c) for c in cfg.get("c_list", [[0, 0, 0], [1, 0, 0]])]
    rows = []
    for c in c_list:
        for q in range(1, q_max + 1):
            sv = expsums.s_hat(problem, q, c)
            rows.append((q, c[0], c[1], c[2], sv.value.real, sv.value.imag, sv.method))
            q2 = arith.part_toward(q, problem.m_omega)
            q1 = q // q2
            if math.gcd(q1, 2 * problem.form.discriminant) == 1:
                s1 = expsums.s1_assembled(problem, q1, q2, c)
                s2 = expsums.s_cal_vector(problem, q2, c)[q1 % (q2 * problem.L**2)]
                val = s1 * s2
                rows.append((q, c[0], c[1], c[2], val.real, val.imag, "explicitFormula"))
    return {"expsums.csv": (["q", "c1", "c2", "c3", "real", "imag", "method"], rows)}, {}


def cmd_salie_avg(cfg, out, workers):
    problem = build_problem(cfg)
    trunc = cfg.get("truncations", {})
    xs = [int(x) for x in cfg.get("x_grid_salie", [1000, 10000, 100000])]
    c_list = [tuple(int(x) for x in c) for c in cfg.get("c_list", [[1, 0, 0], [1, 1, 0]])]
    rows = []
    for c in c_list:
        fstar = problem.form.adjoint_value(c)
        eta_val = None
        if fstar <= 0 and arith.is_perfect_square(-fstar):
            eta_val = expsums.eta(problem, c, k_max=int(trunc.get("k_max_gamma", 20000))).value
        for x in xs:
            val = expsums.f_c_sum(problem, c, x)
            rows.append((
                c[0], c[1], c[2], x, val.real, val.imag,
                val.real / x,
                eta_val.real if eta_val is not None else float("nan"),
                eta_val.imag if eta_val is not None else float("nan"),
            ))
    return {
        "salie_avg.csv": (
            ["c1", "c2", "c3", "X", "real", "imag", "slope", "eta_real", "eta_imag"],
            rows,
        )
    }, {}


def cmd_usum(cfg, out, workers):
    problem = build_problem(cfg)
    trunc = cfg.get("truncations", {})
    xs = [int(x) for x in cfg.get("x_grid_usum", [1000, 10000, 100000, 1000000])]
    c_list = [tuple(int(x) for x in c) for c in cfg.get("c_list", [[1, 0, 0], [1, 1, 0]])]
    chi = characters.principal_character(1)
    rows = []
    for c in c_list:
        fstar = problem.form.adjoint_value(c)
        gamma_val = None
        if fstar < 0 and arith.is_perfect_square(-fstar) and problem.square_case:
            gamma_val = expsums.gamma_const(
                problem, chi, 1, 1, c, k_max=int(trunc.get("k_max_gamma", 20000))
            ).value
        for x in xs:
            val = expsums.u_sum(problem, 1, 1, c, chi, x)
            rows.append((
                c[0], c[1], c[2], x, val.real, val.imag, val.real / x,
                gamma_val.real if gamma_val is not None else float("nan"),
            ))
    return {
        "usum.csv": (["c1", "c2", "c3", "X", "real", "imag", "slope", "gamma"], rows)
    }, {}


def cmd_delta_check(cfg, out, workers):
    kernel = default_kernel()
    delta_cfg = cfg.get("delta", {})
    q_values = [float(q) for q in delta_cfg.get("q_values", [4, 6, 8, 12, 16])]
    n_max = int(delta_cfg.get("n_max", 20))
    rows = []
    for big_q in q_values:
        for n in range(-n_max, n_max + 1):
            res = deltaosc.delta_residual(kernel, n, big_q)
            if n == 0:
                res = res - 1.0 / kernel.c_q(big_q)
            rows.append((big_q, n, res))
    cq_rows = [(big_q, kernel.c_q(big_q)) for big_q in q_values]
    return {
        "delta_residuals.csv": (["Q", "n", "residual"], rows),
        "delta_cq.csv": (["Q", "C_Q"], cq_rows),
    }, {}


COMMANDS = {
    "count": cmd_count,
    "predict": cmd_predict,
    "densities": cmd_densities,
    "expsum": cmd_expsum,
    "salie-avg": cmd_salie_avg,
    "usum": cmd_usum,
    "delta-check": cmd_delta_check,
}


def cmd_report(cfg, out, workers):
    files = {}
    extras = {}
    for name in ("delta-check", "densities", "expsum", "salie-avg", "usum", "count", "predict"):
        f, e = COMMANDS[name](cfg, out, workers)
        files.update(f)
        extras.update(e)
    return files, extras


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qf3delta", description=__doc__)
    parser.add_argument("subcommand", choices=sorted(list(COMMANDS) + ["report"]))
    parser.add_argument("--config", required=True)
    parser.add_argument("--out", default="out")
    parser.add_argument("--workers", type=int, default=None)
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else 0
    t0 = time.perf_counter()
    try:
        cfg = load_config(args.config)
        workers = args.workers if args.workers is not None else int(cfg.get("workers", 1))
        out = Path(args.out if args.out != "out" else cfg.get("out_dir", args.out))
        out.mkdir(parents=True, exist_ok=True)
        runner = cmd_report if args.subcommand == "report" else COMMANDS[args.subcommand]
        files, extras = runner(cfg, out, workers)
    except ConfigError as e:
        print(f"error: config: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except expsums.BudgetError as e:
        print(f"error: budget: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, RuntimeError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    hashes = {}
    for fname, (header, rows) in sorted(files.items()):
        hashes[fname] = "sha256:" + _write_csv(out / fname, header, rows)
    manifest = {
        "config": cfg,
        "subcommand": args.subcommand,
        "outputs": hashes,
        "extras": extras,
        "versions": {
            "qf3delta": __version__,
            "python": sys.version.split()[0],
            "kernel_backend": kernels.BACKEND,
        },
        "wall_clock_seconds": time.perf_counter() - t0,
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    print(f"{args.subcommand}: wrote {len(files)} file(s) to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
