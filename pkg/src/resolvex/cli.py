"""Command-line entry point.

Exit codes: 0 success, 2 invalid configuration or input, 3 solver did not
converge. Every failure prints one line ``resolvex: <kind>: <reason>`` on
stderr, with ``kind`` one of ``config`` or ``nonconvergence``.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .algorithms import ConfigError, Method, SolverConfig, SumProblem, resolvent_of_sum
from .core import ConvergenceError
from .zoo import operators as zops
from .zoo.io import write_csv_matrix, write_pgm

EXIT_OK, EXIT_CONFIG, EXIT_NONCONVERGED = 0, 2, 3


class CliError(Exception):
    def __init__(self, kind, message, code):
        super().__init__(message)
        self.kind, self.code = kind, code


def _config_error(msg):
    return CliError("config", msg, EXIT_CONFIG)


def _nonconverged(msg):
    return CliError("nonconvergence", msg, EXIT_NONCONVERGED)


# ---------------------------------------------------------------- config plumbing

def load_config(path):
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise _config_error(f"config file not found: {path}")
    try:
        doc = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise _config_error(f"invalid JSON in {path}: {exc.msg} at line {exc.lineno}")
    if not isinstance(doc, dict):
        raise _config_error(f"config {path} must hold a JSON object")
    return doc


def merged(args, doc, key, default=None, cast=None):
    """Flag value if given, else the JSON value, else ``default``."""
    val = getattr(args, key, None)
    if val is None:
        val = doc.get(key, default)
    if cast is not None and val is not None:
        try:
            val = cast(val)
        except (TypeError, ValueError):
            raise _config_error(f"{key} has invalid value {val!r}")
    return val


def _check(cond, msg):
    if not cond:
        raise _config_error(msg)


def _jobs(args):
    jobs = args.jobs if args.jobs is not None else os.environ.get("RESOLVEX_JOBS", 1)
    try:
        jobs = int(jobs)
    except ValueError:
        raise _config_error(f"jobs must be an integer, got {jobs!r}")
    _check(jobs >= 1, f"jobs must be at least 1, got {jobs}")
    return jobs


def _outdir(args):
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _json_default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    if isinstance(o, np.bool_):
        return bool(o)
    raise TypeError(f"not serializable: {type(o)}")


def _clean(o):
    # JSON has no inf/nan
    if isinstance(o, float) and not math.isfinite(o):
        return None
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    return o


def write_json(path, doc):
    doc = json.loads(json.dumps(doc, default=_json_default))
    Path(path).write_text(json.dumps(_clean(doc), indent=2, sort_keys=True) + "\n")


def _write_csv(path, header, rows):
    import csv
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for r in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in r])


# ---------------------------------------------------------------- solve

def _vec(spec, key):
    try:
        return np.asarray(spec[key], dtype=float)
    except KeyError:
        raise _config_error(f"operator {spec.get('type')!r} needs field {key!r}")
    except (TypeError, ValueError):
        raise _config_error(f"field {key!r} must be numeric")


def build_operator(spec):
    """Map a JSON operator description to a zoo operator."""
    if not isinstance(spec, dict) or "type" not in spec:
        raise _config_error("each operator needs a 'type' field")
    t = spec["type"]
    try:
        if t == "zero":
            return zops.zero_operator()
        if t == "identity":
            return zops.identity_operator()
        if t == "scaled_shift":
            return zops.scaled_shift(float(spec["a"]), _vec(spec, "c"))
        if t == "linear":
            return zops.linear_operator(_vec(spec, "M"), _vec(spec, "b") if "b" in spec else None)
        if t == "box":
            return zops.box_normal_cone(float(spec["lo"]), float(spec["hi"]))
        if t == "nonneg":
            return zops.nonneg_normal_cone()
        if t == "l1":
            return zops.l1_subdifferential(float(spec.get("weight", 1.0)))
        if t == "quadratic":
            return zops.quadratic(float(spec["a"]), _vec(spec, "c")).subdifferential()
    except KeyError as exc:
        raise _config_error(f"operator {t!r} needs field {exc.args[0]!r}")
    raise _config_error(f"unknown operator type {t!r}")


def _solver_config(doc, args):
    sdoc = dict(doc.get("solver", {}))
    for flag, key in (("gamma", "gamma"), ("lam", "lambda"), ("max_iters", "max_iters"),
                      ("stop_tol", "stop_tol")):
        v = getattr(args, flag, None)
        if v is not None:
            sdoc[key] = v
    try:
        return SolverConfig.from_dict(sdoc)
    except ConfigError as exc:
        raise _config_error(str(exc))


def cmd_solve(args):
    doc = load_config(args.config)
    if not doc:
        raise _config_error("solve needs --config with a 'problem' section")
    prob = doc.get("problem")
    _check(isinstance(prob, dict), "config needs a 'problem' object")
    ops = [build_operator(s) for s in prob.get("operators", [])]
    _check(len(ops) in (2, 3), f"problem needs 2 or 3 operators, got {len(ops)}")
    try:
        q = np.asarray(prob["q"], dtype=float)
    except (KeyError, TypeError, ValueError):
        raise _config_error("problem needs a numeric anchor 'q'")
    method = merged(args, doc, "method", "SDR")
    try:
        method = Method(str(method).upper().replace("-", ""))
    except ValueError:
        raise _config_error(f"unknown method {method!r}")
    _check(method is not Method.SPD, "SPD needs a composite term; use bench-rof")
    cfg = _solver_config(doc, args)
    try:
        problem = SumProblem(ops, q, float(prob.get("omega", 1.0)))
        x, trace = resolvent_of_sum(problem, method, cfg)
    except ConvergenceError as exc:
        raise _nonconverged(str(exc))
    except (ConfigError, ValueError, TypeError) as exc:
        raise _config_error(str(exc))
    out = _outdir(args)
    trace.to_csv(out / "trace.csv")
    write_csv_matrix(out / "solution.csv", np.atleast_1d(x).reshape(1, -1) if x.ndim <= 1 else x)
    write_json(out / "report.json", {
        "method": method.value, "x": x, "iterations": trace.iterations,
        "converged": trace.converged, "stop_reason": trace.stop_reason,
        "final_residual": trace.records[-1].residual if trace.records else None,
        "solver": cfg.to_dict()})
    if not trace.converged:
        raise _nonconverged(f"{method.value} stopped after {trace.iterations} iterations "
                            f"without reaching stop_tol={cfg.stop_tol}")


# ---------------------------------------------------------------- bench-matrix

def _matrix_seed(args):
    from .bench.matrix import gen_matrix_instance, run_matrix_bench
    n, seed, beta, lam, tol, max_iters, aamr_kappa = args
    rep = run_matrix_bench(gen_matrix_instance(n, seed), beta, lam, tol,
                           aamr_beta=beta, aamr_kappa=aamr_kappa, max_iters=max_iters)
    return rep


def cmd_bench_matrix(args):
    from .bench.sweep import METHODS, VALUE_FIELDS, write_rows
    doc = load_config(args.config)
    n = merged(args, doc, "n", 25, int)
    seeds = merged(args, doc, "seeds", 20, int)
    beta = merged(args, doc, "beta", 0.99, float)
    lam = merged(args, doc, "lam", doc.get("lambda", 1.0), float)
    tol = merged(args, doc, "tol", 1e-5, float)
    max_iters = merged(args, doc, "max_iters", 20000, int)
    aamr_kappa = merged(args, doc, "aamr_kappa", 0.95, float)
    _check(n >= 5, f"n must be at least 5, got {n}")
    _check(seeds >= 1, "seeds must be positive")
    _check(0 < beta < 1, f"beta must lie in (0, 1), got {beta}")
    _check(0 < lam <= 1, f"lambda must lie in (0, 1], got {lam}")
    _check(0 < aamr_kappa < 1, f"aamr_kappa must lie in (0, 1), got {aamr_kappa}")
    _check(tol > 0, "tol must be positive")
    jobs = _jobs(args)
    pts = [(n, s, beta, lam, tol, max_iters, aamr_kappa) for s in range(seeds)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            reps = list(ex.map(_matrix_seed, pts))
    else:
        reps = [_matrix_seed(p) for p in pts]
    out = _outdir(args)
    rows = []
    for s, rep in enumerate(reps):
        row = {"seed": s, "n": n, "beta": beta, "lambda": lam}
        for m in METHODS:
            for f in VALUE_FIELDS + ("time_s",):
                row[f"{m}_{f}"] = rep["methods"][m].get(f, "")
        rows.append(row)
        if rep.get("solution") is not None:
            write_csv_matrix(out / f"solution_seed{s}.csv", rep["solution"])
    write_rows(out / "bench_matrix.csv", rows)
    summary = {m: {"converged": sum(bool(r[f"{m}_converged"]) for r in rows),
                   "mean_iterations": float(np.mean([r[f"{m}_iterations"] for r in rows
                                                     if r[f"{m}_converged"]] or [np.nan]))}
               for m in METHODS}
    summary["sryu_fewer_than_dykstra"] = sum(
        bool(r["sryu_converged"] and r["dykstra_converged"]
             and r["sryu_iterations"] < r["dykstra_iterations"]) for r in rows)
    summary["sryu_fewer_than_aamr"] = sum(
        bool(r["sryu_converged"] and r["aamr_converged"]
             and r["sryu_iterations"] < r["aamr_iterations"]) for r in rows)
    write_json(out / "report.json", {"n": n, "seeds": seeds, "beta": beta, "lambda": lam,
                                      "tol": tol, "aamr_kappa": aamr_kappa, "summary": summary})
    failed = [f"seed {r['seed']} {m}" for r in rows for m in METHODS if not r[f"{m}_converged"]]
    if failed:
        raise _nonconverged(f"{len(failed)} runs hit the iteration cap: {', '.join(failed[:5])}")


# ---------------------------------------------------------------- bench-rof

def cmd_bench_rof(args):
    from .bench.rof import default_rof_config, gen_rof_instance, run_rof_bench
    doc = load_config(args.config)
    n = merged(args, doc, "n", 64, int)
    seed = merged(args, doc, "seed", 0, int)
    noise = merged(args, doc, "noise_std", 0.1, float)
    eta = merged(args, doc, "eta", 12.0, float)
    iters = merged(args, doc, "iters", 100, int)
    method = str(merged(args, doc, "method", "SPD")).upper().replace("-", "")
    _check(method in ("SPD", "STSENG"), f"unknown ROF method {method!r}")
    _check(n >= 2 and iters >= 1 and eta > 0 and noise >= 0, "invalid ROF instance parameters")
    cfg = default_rof_config(method, iters)
    over = {k: merged(args, doc, k) for k in ("gamma", "tau", "theta")}
    sigma = merged(args, doc, "sigma")
    try:
        fields = {**cfg.to_dict(), **{k: v for k, v in over.items() if v is not None}}
        if sigma is not None:
            fields["sigma"] = sigma
        cfg = SolverConfig.from_dict(fields)
        inst = gen_rof_instance(n, seed, noise, eta)
        rep = run_rof_bench(inst, method, cfg)
    except ConvergenceError as exc:
        raise _nonconverged(str(exc))
    except (ConfigError, ValueError) as exc:
        raise _config_error(str(exc))
    out = _outdir(args)
    rep["trace"].to_csv(out / "trace.csv")
    write_pgm(out / "clean.pgm", inst.clean)
    write_pgm(out / "noisy.pgm", inst.noisy)
    write_pgm(out / "denoised.pgm", rep["x"])
    write_csv_matrix(out / "denoised.csv", rep["x"])
    write_json(out / "report.json", {k: rep[k] for k in
                                      ("method", "iterations", "snr", "objective", "change",
                                       "gamma")} | {"n": n, "seed": seed, "eta": eta,
                                                    "noise_std": noise,
                                                    "solver": cfg.to_dict()})


# ---------------------------------------------------------------- bench-pde

def cmd_bench_pde(args):
    from .bench.pde import gen_pde_instance, obstacle_active_set, rel_l2, run_pde_bench
    doc = load_config(args.config)
    nx = merged(args, doc, "nx", 101, int)
    gamma = merged(args, doc, "gamma", 0.5, float)
    sa = merged(args, doc, "sigma_a", 0.25, float)
    sb = merged(args, doc, "sigma_b", 0.25, float)
    lam = merged(args, doc, "lam", doc.get("lambda", 2.0), float)
    iters = merged(args, doc, "iters", 2000, int)
    stop_tol = merged(args, doc, "stop_tol", 1e-12, float)
    _check(nx >= 3, "nx must be at least 3")
    _check(gamma > 0 and sa > 0 and sb >= 0, "need gamma > 0, sigma_a > 0, sigma_b >= 0")
    _check(0 < lam <= 2, f"lambda must lie in (0, 2], got {lam}")
    try:
        inst = gen_pde_instance(nx, nx)
        ref = obstacle_active_set(inst.laplacian, inst.f)
        rep = run_pde_bench(inst, gamma, sa, sb, lam, iters, stop_tol, reference=ref)
    except ConvergenceError as exc:
        raise _nonconverged(str(exc))
    except (ConfigError, ValueError) as exc:
        raise _config_error(str(exc))
    out = _outdir(args)
    rep["trace"].to_csv(out / "trace.csv")
    write_csv_matrix(out / "v.csv", rep["v"])
    write_csv_matrix(out / "u.csv", rep["u"])
    write_json(out / "report.json", {
        k: rep[k] for k in ("gamma", "sigma_a", "sigma_b", "lambda", "iterations",
                            "converged", "error_v", "error_u", "error_ref")}
        | {"nx": nx, "discretization_error": rel_l2(ref, inst.v_exact)})


# ---------------------------------------------------------------- demo-fp

def cmd_demo_fp(args):
    from .bench.fp import l1_over_sq_norm_instance, run_fp_demo
    doc = load_config(args.config)
    n = merged(args, doc, "n", 3, int)
    eta = merged(args, doc, "eta", 0.25, float)
    outer = merged(args, doc, "outer_iters", 50, int)
    _check(n >= 1 and eta > 0 and outer >= 1, "need n >= 1, eta > 0, outer_iters >= 1")
    try:
        rep = run_fp_demo(l1_over_sq_norm_instance(n, eta), outer_iters=outer)
    except ConvergenceError as exc:
        raise _nonconverged(str(exc))
    out = _outdir(args)
    _write_csv(out / "theta.csv", ["k", "theta"], list(enumerate(rep["theta"])))
    write_json(out / "report.json", rep | {"n": n, "eta": eta})


# ---------------------------------------------------------------- sweep

def _floats(text):
    try:
        return [float(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise _config_error(f"expected comma-separated numbers, got {text!r}")


def cmd_sweep(args):
    from .bench.sweep import default_grid, run_sweep, summarize, summary_columns, write_rows
    doc = load_config(args.config)
    grid = default_grid()
    n = merged(args, doc, "n", 25, int)
    seeds = merged(args, doc, "seeds", 20, int)
    betas = merged(args, doc, "betas", grid["beta"])
    lams = merged(args, doc, "lambdas", grid["lambda"])
    betas = _floats(betas) if isinstance(betas, str) else [float(b) for b in betas]
    lams = _floats(lams) if isinstance(lams, str) else [float(v) for v in lams]
    tol = merged(args, doc, "tol", 1e-5, float)
    max_iters = merged(args, doc, "max_iters", 20000, int)
    _check(n >= 5, f"n must be at least 5, got {n}")
    _check(seeds >= 1 and betas and lams, "grid must be finite and nonempty")
    _check(all(0 < b < 1 for b in betas), "every beta must lie in (0, 1)")
    _check(all(0 < v <= 1 for v in lams), "every lambda must lie in (0, 1]")
    jobs = _jobs(args)
    rows = run_sweep(n, range(seeds), betas, lams, tol, max_iters, jobs)
    out = _outdir(args)
    write_rows(out / "sweep.csv", rows)
    write_rows(out / "sweep_summary.csv", summarize(rows), summary_columns())
    write_json(out / "report.json", {"n": n, "seeds": seeds, "betas": betas, "lambdas": lams,
                                      "rows": len(rows), "tol": tol})


# ---------------------------------------------------------------- parser

def build_parser():
    p = argparse.ArgumentParser(prog="resolvex",
                                description="Resolvents of sums of monotone operators.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, jobs=False):
        sp.add_argument("--config", help="JSON document; flags override its fields")
        sp.add_argument("--output-dir", default="out", help="where outputs are written")
        if jobs:
            sp.add_argument("--jobs", type=int, help="worker processes (env RESOLVEX_JOBS)")
        return sp

    s = common(sub.add_parser("solve", help="resolvent of a sum described in JSON"))
    s.add_argument("--method", choices=[m.value for m in Method])
    s.add_argument("--gamma", type=float)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--max-iters", type=int)
    s.add_argument("--stop-tol", type=float)
    s.set_defaults(func=cmd_solve)

    s = common(sub.add_parser("bench-matrix", help="nearest PSD doubly stochastic matrix"),
               jobs=True)
    s.add_argument("--n", type=int)
    s.add_argument("--seeds", type=int, help="number of seeds, 0..seeds-1")
    s.add_argument("--beta", type=float)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--aamr-kappa", type=float)
    s.add_argument("--tol", type=float)
    s.add_argument("--max-iters", type=int)
    s.set_defaults(func=cmd_bench_matrix)

    s = common(sub.add_parser("bench-rof", help="box-constrained TV denoising"))
    s.add_argument("--n", type=int)
    s.add_argument("--seed", type=int)
    s.add_argument("--noise-std", type=float)
    s.add_argument("--eta", type=float)
    s.add_argument("--method", type=str.upper, choices=["SPD", "STSENG"])
    s.add_argument("--iters", type=int)
    s.add_argument("--gamma", type=float)
    s.add_argument("--tau", type=float)
    s.add_argument("--theta", type=float)
    s.add_argument("--sigma", type=float, nargs=2)
    s.set_defaults(func=cmd_bench_rof)

    s = common(sub.add_parser("bench-pde", help="obstacle problem by strengthened DR"))
    s.add_argument("--nx", type=int, help="grid nodes per axis including the boundary")
    s.add_argument("--gamma", type=float)
    s.add_argument("--sigma-a", type=float)
    s.add_argument("--sigma-b", type=float)
    s.add_argument("--lambda", dest="lam", type=float)
    s.add_argument("--iters", type=int)
    s.add_argument("--stop-tol", type=float)
    s.set_defaults(func=cmd_bench_pde)

    s = common(sub.add_parser("demo-fp", help="fractional programming demo"))
    s.add_argument("--n", type=int)
    s.add_argument("--eta", type=float)
    s.add_argument("--outer-iters", type=int)
    s.set_defaults(func=cmd_demo_fp)

    s = common(sub.add_parser("sweep", help="(beta, lambda) grid of the matrix benchmark"),
               jobs=True)
    s.add_argument("--n", type=int)
    s.add_argument("--seeds", type=int)
    s.add_argument("--betas", help="comma-separated")
    s.add_argument("--lambdas", help="comma-separated")
    s.add_argument("--tol", type=float)
    s.add_argument("--max-iters", type=int)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        args.func(args)
    except CliError as exc:
        print(f"resolvex: {exc.kind}: {' '.join(str(exc).split())}", file=sys.stderr)
        return exc.code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
