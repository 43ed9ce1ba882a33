"""Parameter sweeps of the matrix-nearness benchmark over ``(beta, lambda)`` and seeds."""

from __future__ import annotations

import csv
import itertools
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .matrix import gen_matrix_instance, run_matrix_bench

METHODS = ("sryu", "aamr", "dykstra")
VALUE_FIELDS = ("iterations", "residual", "converged", "error")


def default_grid():
    """10 relaxation values on [0.7, 1] and five values of beta."""
    return {"beta": [0.85, 0.9, 0.95, 0.99, 0.999],
            "lambda": [float(v) for v in np.linspace(0.7, 1.0, 10)]}


def columns():
    head = ["seed", "n", "beta", "lambda"]
    vals = [f"{m}_{f}" for m in METHODS for f in VALUE_FIELDS]
    times = [f"{m}_time_s" for m in METHODS]
    return head + vals + times


def _point(args):
    n, seed, beta, lam, tol, max_iters = args
    inst = gen_matrix_instance(n, seed)
    # AAMR reads the grid's relaxation value as its averaging constant (must stay below 1);
    # per-method failures are recorded in the report and the sweep continues
    rep = run_matrix_bench(inst, beta, lam, tol, aamr_beta=beta, aamr_kappa=lam,
                           max_iters=max_iters, methods=("sryu", "aamr"))
    return rep["methods"]


def _dykstra(args):
    n, seed, tol, max_iters = args
    rep = run_matrix_bench(gen_matrix_instance(n, seed), tol=tol, max_iters=max_iters,
                           methods=("dykstra",))
    return rep["methods"]["dykstra"]


def run_sweep(n=25, seeds=range(20), betas=None, lams=None, tol=1e-5, max_iters=20000, jobs=1):
    """Evaluate every ``(seed, beta, lambda)`` point; returns rows in grid order.

    Dykstra has no parameters, so it runs once per seed and its result is
    repeated on that seed's rows.
    """
    grid = default_grid()
    betas = grid["beta"] if betas is None else list(betas)
    lams = grid["lambda"] if lams is None else list(lams)
    seeds = list(seeds)
    keys = list(itertools.product(seeds, betas, lams))
    points = [(n, s, b, l, tol, max_iters) for s, b, l in keys]
    dpoints = [(n, s, tol, max_iters) for s in seeds]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            dyk = list(ex.map(_dykstra, dpoints))
            results = list(ex.map(_point, points))
    else:
        dyk = [_dykstra(p) for p in dpoints]
        results = [_point(p) for p in points]
    dyk = dict(zip(seeds, dyk))
    rows = []
    for (s, b, l), res in zip(keys, results):
        res = {**res, "dykstra": dyk[s]}
        row = {"seed": s, "n": n, "beta": b, "lambda": l}
        for m in METHODS:
            for f in VALUE_FIELDS + ("time_s",):
                row[f"{m}_{f}"] = res[m].get(f, "")
        rows.append(row)
    return rows


def summarize(rows):
    """Mean iterations and mean time per ``(beta, lambda)`` over seeds and converged runs."""
    out = []
    keyf = lambda r: (r["beta"], r["lambda"])
    for (beta, lam), grp in itertools.groupby(sorted(rows, key=keyf), key=keyf):
        grp = list(grp)
        rec = {"beta": beta, "lambda": lam, "seeds": len(grp)}
        for m in METHODS:
            its = [r[f"{m}_iterations"] for r in grp if r[f"{m}_converged"] is True]
            ts = [r[f"{m}_time_s"] for r in grp if r[f"{m}_converged"] is True]
            rec[f"{m}_converged"] = len(its)
            rec[f"{m}_mean_iterations"] = float(np.mean(its)) if its else ""
            rec[f"{m}_mean_time_s"] = float(np.mean(ts)) if ts else ""
        out.append(rec)
    return out


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def write_rows(path, rows, fields=None):
    fields = fields or (columns() if rows and "seed" in rows[0] else list(rows[0]))
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for r in rows:
            w.writerow({k: _fmt(r.get(k, "")) for k in fields})


def summary_columns():
    cols = ["beta", "lambda", "seeds"]
    cols += [f"{m}_{f}" for m in METHODS for f in ("converged", "mean_iterations")]
    cols += [f"{m}_mean_time_s" for m in METHODS]
    return cols
