"""Nearest PSD doubly stochastic matrix with prescribed entries.

Three methods compute ``P_{C1 & C2 & C3}(X0)``:

* strengthened Ryu with the three projectors (``sigma = (1-beta)/beta``, ``gamma = 1``),
* cyclic Dykstra,
* AAMR on the product space ``H^3`` with the diagonal and ``C1 x C2 x C3``.

All three stop once the shadow ``U`` satisfies ``sum_i ||U - P_Ci(U)|| <= tol``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from ..algorithms import SolverConfig, SumProblem, aamr, dykstra, solve_sryu
from ..core import ConvergenceError
from ..zoo.matrix import (PrescribedNonneg, proj_doubly_stochastic_affine,
                          proj_prescribed_nonneg, proj_psd)
from ..zoo.operators import normal_cone


@dataclass
class MatrixInstance:
    n: int
    seed: int
    X0: np.ndarray
    spec: PrescribedNonneg = field(default_factory=lambda: PrescribedNonneg({(0, 0): 0.25}))

    @property
    def omega_set(self):
        return self.spec.omega_set

    def projectors(self):
        return (proj_doubly_stochastic_affine,
                lambda X: proj_prescribed_nonneg(X, self.spec),
                proj_psd)


def gen_matrix_instance(n, seed, prescribed=None) -> MatrixInstance:
    """Symmetric ``n x n`` matrix with entries uniform on ``(-2, 2)``.

    The upper triangle (with diagonal) is drawn and mirrored, so every entry
    has the uniform law. The entry ``(0, 0)`` is prescribed to 0.25 unless
    ``prescribed`` maps other zero-based indices to values.
    """
    if n < 5:
        raise ValueError(f"need n >= 5 for a positive definite feasible point, got {n}")
    rng = np.random.default_rng(seed)
    U = rng.uniform(-2.0, 2.0, size=(n, n))
    X0 = np.triu(U) + np.triu(U, 1).T
    spec = PrescribedNonneg(prescribed if prescribed is not None else {(0, 0): 0.25})
    spec.validate(n)
    return MatrixInstance(n=n, seed=seed, X0=X0, spec=spec)


def feasibility_residual(U, projectors):
    return float(sum(np.linalg.norm(U - P(U)) for P in projectors))


def _stopper(projectors, tol, key="u", extract=None):
    def cb(k, state):
        U = state[key] if extract is None else extract(state[key])
        return feasibility_residual(U, projectors) <= tol
    return cb


def _run(fn):
    t0 = time.perf_counter()
    try:
        U, trace = fn()
        err = ""
    except (ConvergenceError, ValueError) as exc:
        U, trace, err = None, None, f"{type(exc).__name__}: {exc}"
    elapsed = time.perf_counter() - t0
    # the index k at which the stopping test first held (0 = already feasible)
    out = {"iterations": trace.records[-1].k if trace else None,
           "converged": bool(trace and trace.stop_reason == "callback"),
           "time_s": elapsed, "error": err, "U": U}
    return out


def run_sryu_matrix(inst: MatrixInstance, beta, lam, tol=1e-5, max_iters=20000):
    P = inst.projectors()
    sig = (1.0 - beta) / beta
    ops = [normal_cone(p, name=f"N_C{i + 1}") for i, p in enumerate(P)]
    q = inst.X0
    # theta = 1 and equal sigmas give omega = beta / (3 (1 - beta)); the value is immaterial for projectors
    prob = SumProblem(ops, q, omega=1.0 / (3.0 * sig))
    cfg = SolverConfig(gamma=1.0, lam=lam, theta=1.0, sigma=(sig,) * 3, max_iters=max_iters,
                       stop_tol=0.0)

    def first(k, state):
        return feasibility_residual(state["u"], P) <= tol

    return solve_sryu(prob, cfg, q, q, callback=first)


def run_dykstra_matrix(inst: MatrixInstance, tol=1e-5, max_iters=20000):
    P = inst.projectors()
    cfg = SolverConfig(max_iters=max_iters, stop_tol=0.0)
    return dykstra(P, inst.X0, cfg, callback=_stopper(P, tol, key="x"))


def run_aamr_matrix(inst: MatrixInstance, beta, kappa, tol=1e-5, max_iters=20000):
    """AAMR on ``H^3``: ``A`` = normal cone of the diagonal, ``B`` = of ``C1 x C2 x C3``."""
    P = inst.projectors()
    n = inst.n

    def split(V):
        return V.reshape(3, n, n)

    def proj_diag(V):
        m = split(V).mean(axis=0)
        return np.concatenate([m.ravel()] * 3)

    def proj_prod(V):
        return np.concatenate([p(X).ravel() for p, X in zip(P, split(V))])

    q3 = np.concatenate([inst.X0.ravel()] * 3)
    A, B = normal_cone(proj_diag), normal_cone(proj_prod)

    def first_block(v):
        return split(v)[0]

    u, trace = aamr(A, B, q3, beta, kappa, y0=np.zeros_like(q3), max_iters=max_iters,
                    stop_tol=0.0, callback=_stopper(P, tol, key="u", extract=first_block))
    return first_block(u), trace


def run_matrix_bench(inst: MatrixInstance, beta=0.99, lam=1.0, tol=1e-5, *,
                     aamr_beta=0.99, aamr_kappa=0.95, max_iters=20000, methods=None):
    """Run S-Ryu, Dykstra and AAMR on one instance.

    Returns a report dict with per-method ``iterations``, ``time_s``,
    ``residual`` (final feasibility residual), ``converged`` and ``error``,
    plus ``max_disagreement`` between the computed limits.
    """
    if inst.n < 5:
        raise ValueError("matrix bench needs n >= 5")
    P = inst.projectors()
    methods = methods or ("sryu", "dykstra", "aamr")
    runners = {
        "sryu": lambda: run_sryu_matrix(inst, beta, lam, tol, max_iters),
        "dykstra": lambda: run_dykstra_matrix(inst, tol, max_iters),
        "aamr": lambda: run_aamr_matrix(inst, aamr_beta, aamr_kappa, tol, max_iters),
    }
    report = {"n": inst.n, "seed": inst.seed, "beta": beta, "lambda": lam, "tol": tol,
              "aamr_beta": aamr_beta, "aamr_kappa": aamr_kappa, "methods": {}}
    limits = {}
    for m in methods:
        r = _run(runners[m])
        U = r.pop("U")
        r["residual"] = feasibility_residual(U, P) if U is not None else float("nan")
        if U is not None:
            limits[m] = U
        report["methods"][m] = r
    keys = list(limits)
    dis = [float(np.linalg.norm(limits[a] - limits[b])) for i, a in enumerate(keys)
           for b in keys[i + 1:]]
    report["max_disagreement"] = max(dis) if dis else 0.0
    report["solution"] = limits.get("sryu", next(iter(limits.values()), None))
    return report
