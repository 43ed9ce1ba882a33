"""Obstacle / partially blinded problem on a rectangle by strengthened DR.

With ``A`` the normal cone of the nonnegative grid functions and ``B = -Delta_h``
(homogeneous Dirichlet), ``v = J_{A+B}(f)`` solves the discrete obstacle problem
``0 <= (-Delta_h v + v - f) _|_ v >= 0`` and ``u = f + Delta_h v`` the partially
blinded problem, with ``v = u^+``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..algorithms import SolverConfig, SumProblem, solve_sdr
from ..core import ConvergenceError
from ..zoo.operators import nonneg_normal_cone
from ..zoo.pde import GridLaplacian

TWO_PI = 2.0 * np.pi


def f_blinded(x, y):
    """Piecewise data whose obstacle solution is ``max(0, (2pi - y) y sin(x)^3)``."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    left = -2.0 * ((10.0 * np.pi * y - 5.0 * y ** 2 + 1.0) * np.cos(x) ** 2
                   - 4.0 * np.pi * y + 2.0 * y ** 2 - 1.0) * np.sin(x)
    right = (TWO_PI - y) * y * np.cos(x) ** 2 * np.sin(x) ** 3
    return np.where(x <= np.pi, left, right)


def u_blinded(x, y):
    """Partially blinded solution for :func:`f_blinded`.

    Positive part ``(2pi - y) y sin(x)^3`` on ``x <= pi``; on ``x > pi`` the
    solution is negative, the diffusion term vanishes and ``u = f``.
    """
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    return np.where(x <= np.pi, (TWO_PI - y) * y * np.sin(x) ** 3, f_blinded(x, y))


@dataclass
class PdeInstance:
    nx: int
    ny: int
    h: float
    x: np.ndarray
    y: np.ndarray
    f: np.ndarray
    laplacian: GridLaplacian
    u_exact: Optional[np.ndarray] = None

    @property
    def v_exact(self):
        return None if self.u_exact is None else np.maximum(self.u_exact, 0.0)


def gen_pde_instance(nx=101, ny=101, data: Callable = f_blinded, exact: Callable = u_blinded,
                     method="direct") -> PdeInstance:
    """Tabulate the data on the interior nodes of a uniform grid of ``(0, 2pi)^2``.

    ``nx`` and ``ny`` count grid nodes including the boundary, so there are
    ``(nx-2) x (ny-2)`` unknowns. Both axes must share the mesh width.
    """
    if nx != ny:
        raise ValueError("only square grids of (0, 2pi)^2 are supported")
    if nx < 3:
        raise ValueError("need at least one interior node")
    h = TWO_PI / (nx - 1)
    t = np.linspace(0.0, TWO_PI, nx)[1:-1]
    X, Y = np.meshgrid(t, t, indexing="ij")
    f = data(X, Y)
    u = exact(X, Y) if exact is not None else None
    L = GridLaplacian((nx - 2, ny - 2), h, method=method)
    return PdeInstance(nx, ny, h, X, Y, f, L, u)


def obstacle_active_set(L: GridLaplacian, f, max_iters=200):
    """Exact solution of ``0 <= (L v + v - f) _|_ v >= 0`` by a primal-dual active set method.

    Each step solves the linear system on the inactive set with a sparse
    direct factorization; the method stops when the active set repeats.
    """
    M = (sp.identity(L.size) + L.matrix).tocsr()
    b = np.asarray(f, dtype=float).ravel()
    v = np.maximum(b, 0.0)
    lam = M @ v - b
    active = None
    for _ in range(max_iters):
        new_active = lam - v > 0
        if active is not None and np.array_equal(new_active, active):
            return v.reshape(np.shape(f))
        active = new_active
        free = ~active
        v = np.zeros_like(b)
        if free.any():
            v[free] = spla.spsolve(M[free][:, free].tocsc(), b[free])
        lam = M @ v - b
        lam[free] = 0.0
    raise ConvergenceError(f"active set did not settle in {max_iters} iterations")


def rel_l2(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


def run_pde_bench(inst: PdeInstance, gamma=0.5, sigma_a=0.25, sigma_b=0.25, lam=2.0,
                  iters=2000, stop_tol=1e-12, reference=None):
    """S-DR for ``J_{A+B}(f)`` with ``theta = sigma_a + sigma_b``.

    The trace objective column holds the relative L2 error of the shadow
    iterate against the analytic ``v`` when it is known.

    Returns
    -------
    report : dict
        ``error_v`` and ``error_u`` (relative L2 against the analytic
        solutions), ``iterations``, ``time_s``, and the arrays ``v``, ``u``
        and ``trace``. With ``reference`` (a discrete solution) also
        ``error_ref``.
    """
    if not gamma * sigma_a > 0:
        raise ValueError("need gamma * sigma_a > 0")
    A = nonneg_normal_cone()
    B = inst.laplacian.operator()
    cfg = SolverConfig(gamma=gamma, lam=lam, theta=sigma_a + sigma_b,
                       sigma=(sigma_a, sigma_b), max_iters=iters, stop_tol=stop_tol)
    v_ex = inst.v_exact
    objective = (lambda v: rel_l2(v, v_ex)) if v_ex is not None else None
    t0 = time.perf_counter()
    v, trace = solve_sdr(SumProblem([A, B], inst.f, 1.0), cfg, objective=objective)
    elapsed = time.perf_counter() - t0
    u = inst.f - B(v)
    report = {"gamma": gamma, "sigma_a": sigma_a, "sigma_b": sigma_b, "lambda": lam,
              "iterations": trace.iterations, "time_s": elapsed,
              "converged": trace.converged, "v": v, "u": u, "trace": trace}
    if v_ex is not None:
        report["error_v"] = rel_l2(v, v_ex)
        report["error_u"] = rel_l2(u, inst.u_exact)
    if reference is not None:
        report["error_ref"] = rel_l2(v, reference)
    return report


def plateau_iteration(errors, level, rtol=0.01):
    """First index whose error is within ``rtol`` (relative) of ``level``, or None."""
    errors = np.asarray(errors)
    hit = np.nonzero(np.abs(errors - level) <= rtol * level)[0]
    return int(hit[0]) if hit.size else None
