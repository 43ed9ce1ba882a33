"""Proximal-gradient method for ``min_{x in S} f(x)/g(x)`` with resolvent-of-sum subproblems.

Each outer step needs ``prox_{eta (f + iota_S)}``, i.e. the resolvent of
``eta (df + N_S)``, which is computed from the separate prox of ``f`` and
projector onto ``S`` by the strengthened Douglas-Rachford method.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..algorithms import Method, SolverConfig, SumProblem, resolvent_of_sum
from ..core import ConvergenceError, MonotoneOperator, ProxFunction, as_vector
from ..zoo.operators import box_normal_cone, l1_norm


@dataclass
class FpInstance:
    """``f`` proximable and nonnegative on ``S``; ``g`` differentiable, positive and bounded on ``S``."""

    f: ProxFunction
    g: Callable[[np.ndarray], float]
    grad_g: Callable[[np.ndarray], np.ndarray]
    S: MonotoneOperator
    x0: np.ndarray
    eta: float = 0.5


def l1_over_sq_norm_instance(n=3, eta=0.25):
    """``||x||_1 / ||x||^2`` over ``[1, 2]^n``; the infimum 1/2 is attained at ``x = 2e``."""
    return FpInstance(f=l1_norm(), g=lambda x: float(np.dot(x, x)), grad_g=lambda x: 2.0 * x,
                      S=box_normal_cone(1.0, 2.0), x0=np.full(n, 1.5), eta=eta)


def run_fp_demo(inst: FpInstance, cfg: SolverConfig = None, outer_iters=50, tol=1e-10,
                method=Method.SDR):
    """Run the outer loop with a constant stepsize ``eta``.

    Step ``k`` evaluates ``prox_{eta(f + iota_S)}`` at
    ``x_{k-1} + ratio_{k-1} * eta * grad g(x_{k-1})``, a proximal-gradient
    step on ``f - ratio_{k-1} * g``, so the ratio cannot increase when ``g``
    is convex.

    Returns
    -------
    report : dict
        ``theta`` (ratio sequence starting at ``x0``), ``x``, ``inner_iterations``
        and ``descent_violation`` (largest increase of the ratio between steps).

    Raises
    ------
    ConvergenceError
        If an inner resolvent computation does not reach its tolerance.
    """
    cfg = cfg or SolverConfig(stop_tol=1e-13, max_iters=20000)
    if inst.f.value is None:
        raise ValueError("the demo needs f.value to evaluate the ratio")
    x = as_vector(inst.x0, "x0").copy()
    ratio = inst.f.value(x) / inst.g(x)
    thetas, inner = [ratio], []
    dfh = inst.f.subdifferential()
    for k in range(1, outer_iters + 1):
        q = x + ratio * inst.eta * inst.grad_g(x)
        x_new, trace = resolvent_of_sum(SumProblem([dfh, inst.S], q, inst.eta), method, cfg)
        if not trace.converged:
            raise ConvergenceError(f"inner solve at outer step {k} stopped after "
                                   f"{trace.iterations} iterations ({trace.stop_reason})")
        inner.append(trace.iterations)
        step = float(np.linalg.norm(x_new - x))
        x = x_new
        ratio = inst.f.value(x) / inst.g(x)
        thetas.append(ratio)
        if step <= tol:
            break
    diffs = np.diff(thetas)
    return {"theta": thetas, "x": x, "inner_iterations": inner,
            "descent_violation": float(max(diffs.max(), 0.0)) if diffs.size else 0.0}
