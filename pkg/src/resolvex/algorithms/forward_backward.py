"""Strengthened forward-backward type methods for ``J_{omega(A+B)}(q)``.

All three solvers work directly on the original operators: the strengthening
only changes the resolvent parameter and adds affine terms in ``q``.
"""

from __future__ import annotations

import math

import numpy as np

from ..core import ProxFunction, as_vector, norm, relative_change
from .base import (GOLDEN, ConfigError, Monitor, SolverConfig, SumProblem, _fail,
                   require_assumption, strengthening_split)


def _pair(problem: SumProblem, cfg: SolverConfig):
    if len(problem.operators) != 2:
        raise ConfigError(f"expected two operators (A, B), got {len(problem.operators)}")
    A, B = problem.operators
    if B.forward is None:
        raise ConfigError(f"operator {B.name!r} needs a forward map")
    theta, (sa, sb) = strengthening_split(2, problem.omega, cfg)
    return A, B, theta, sa, sb


def fb_stepsize_bound(B, theta, sigma_b):
    """Largest admissible S-FB stepsize: the better of the Lipschitz and cocoercive windows."""
    bounds = []
    if B.kappa is not None:
        bounds.append(2.0 * (theta * B.alpha + sigma_b) / (theta * B.kappa + sigma_b) ** 2)
    if B.beta is not None:
        bounds.append(2.0 * B.beta / (theta + B.beta * sigma_b))
    if not bounds:
        raise ConfigError(f"operator {B.name!r} needs a Lipschitz or cocoercivity constant")
    return max(bounds)


def fbf_stepsize_bound(B, theta, sigma_b):
    if B.kappa is None:
        raise ConfigError(f"operator {B.name!r} needs a Lipschitz constant")
    return 1.0 / (theta * B.kappa + sigma_b)


def _fb_step(A, B, theta, sa, sb, gamma, q, x, Bx):
    s = 1.0 + gamma * sa
    arg = ((1.0 - gamma * sb) * x - gamma * theta * Bx + gamma * (sa + sb) * q) / s
    return A.resolvent(gamma * theta / s, arg)


def solve_sfb(problem: SumProblem, cfg: SolverConfig, x0=None, *, callback=None,
              objective=None, strict=True):
    """Strengthened forward-backward iteration.

    Converges R-linearly to ``J_{omega(A+B)}(q)`` when the stepsize lies in
    the Lipschitz window ``gamma < 2(theta*alpha_B + sigma_B)/(theta*kappa + sigma_B)^2``
    or the cocoercive window ``gamma < 2 beta/(theta + beta*sigma_B)``.

    Parameters
    ----------
    problem : SumProblem
        Two operators ``(A, B)``; ``B`` must have a forward map and a known
        Lipschitz or cocoercivity constant.
    cfg : SolverConfig
        ``gamma=None`` selects 0.9 times the window bound.
    x0 : array, optional
        Starting point, ``q`` by default.
    strict : bool
        If False, window and assumption violations only warn.

    Returns
    -------
    x : ndarray
    trace : Trace
    """
    A, B, theta, sa, sb = _pair(problem, cfg)
    require_assumption(theta, (A.alpha, B.alpha), (sa, sb), strict=strict)
    bound = fb_stepsize_bound(B, theta, sb)
    gamma = 0.9 * bound if cfg.gamma is None else cfg.gamma
    if gamma >= bound:
        _fail(f"stepsize {gamma} outside the forward-backward window (< {bound})", strict)
    q = problem.q
    x = q.copy() if x0 is None else as_vector(x0, "x0").copy()
    mon = Monitor("S-FB", cfg, callback, objective)
    for k in range(cfg.max_iters):
        x_new = _fb_step(A, B, theta, sa, sb, gamma, q, x, B(x))
        res = relative_change(x_new, x)
        x = x_new
        if mon.update(k, res, {"x": x}, x):
            break
    mon.trace.extras["gamma"] = gamma
    return x, mon.finish(x=x)


def solve_sfbf(problem: SumProblem, cfg: SolverConfig, x0=None, *, callback=None,
               objective=None, strict=True):
    """Strengthened forward-backward-forward (Tseng) iteration.

    Window ``gamma * (theta*kappa + sigma_B) < 1``. Returns the last
    resolvent-step point ``y_k``, which lies in the domain of ``A``;
    ``trace.extras["change"]`` holds ``||x_{k+1} - x_k||``.
    """
    A, B, theta, sa, sb = _pair(problem, cfg)
    require_assumption(theta, (A.alpha, B.alpha), (sa, sb), strict=strict)
    bound = fbf_stepsize_bound(B, theta, sb)
    gamma = 0.9 * bound if cfg.gamma is None else cfg.gamma
    if gamma >= bound:
        _fail(f"stepsize {gamma} outside the forward-backward-forward window (< {bound})",
              strict)
    q = problem.q
    x = q.copy() if x0 is None else as_vector(x0, "x0").copy()
    mon = Monitor("S-FBF", cfg, callback, objective)
    changes = mon.trace.extras.setdefault("change", [])
    y = x
    for k in range(cfg.max_iters):
        Bx = B(x)
        y = _fb_step(A, B, theta, sa, sb, gamma, q, x, Bx)
        x_new = (1.0 - gamma * sb) * y + gamma * sb * x - gamma * theta * (B(y) - Bx)
        res = relative_change(x_new, x)
        changes.append(norm(x_new - x))
        x = x_new
        if mon.update(k, res, {"x": x, "y": y}, y):
            break
    mon.trace.extras["gamma"] = gamma
    return y, mon.finish(x=x, y=y)


def solve_sagraal(g: ProxFunction, B, q, cfg: SolverConfig, x0=None, x1=None, *,
                  omega=1.0, callback=None, objective=None, strict=True):
    """Strengthened adaptive golden ratio algorithm for ``J_{omega(dg + B)}(q)``.

    The stepsize is chosen on the fly from local Lipschitz estimates of the
    strengthened forward map ``theta*B + sigma_B*Id``; no constant of ``B``
    is needed. ``cfg.gamma`` is the initial stepsize ``gamma_0`` and
    ``cfg.gamma_bar`` caps every stepsize. ``trace.extras["gamma"]`` holds
    the stepsize sequence.

    Parameters
    ----------
    g : ProxFunction
    B : MonotoneOperator
        Needs a forward map.
    q : array
        Anchor point.
    x0, x1 : array, optional
        The two starting points. ``x0`` defaults to ``q`` and ``x1`` to one
        forward-backward step from ``x0``.
    """
    if B.forward is None:
        raise ConfigError(f"operator {B.name!r} needs a forward map")
    phi = cfg.phi
    if not 1.0 < phi <= GOLDEN + 1e-15:
        raise ConfigError(f"phi must lie in (1, (1+sqrt5)/2], got {phi}")
    theta, (sa, sb) = strengthening_split(2, omega, cfg)
    require_assumption(theta, (g.alpha, B.alpha), (sa, sb), strict=strict)
    rho = 1.0 / phi + 1.0 / phi ** 2
    q = as_vector(q, "q")
    if cfg.gamma is not None:
        gamma0 = cfg.gamma
    elif B.kappa:
        gamma0 = 1.0 / (theta * B.kappa + sb)
    else:
        gamma0 = 1.0
    gamma0 = min(gamma0, cfg.gamma_bar)

    def prox_step(gamma, xbar, x, Bx):
        s = 1.0 + gamma * sa
        return g.prox(gamma * theta / s,
                      (xbar - gamma * sb * x - gamma * theta * Bx + gamma * (sa + sb) * q) / s)

    x_prev = q.copy() if x0 is None else as_vector(x0, "x0").copy()
    B_prev = B(x_prev)
    x = prox_step(gamma0, x_prev, x_prev, B_prev) if x1 is None else as_vector(x1, "x1").copy()
    xbar = x.copy()
    gam_1, gam_2 = gamma0, phi * gamma0          # gamma_{k-1}, gamma_{k-2}
    mon = Monitor("S-aGRAAL", cfg, callback, objective)
    gammas = mon.trace.extras.setdefault("gamma", [])
    for k in range(1, cfg.max_iters + 1):
        Bx = B(x)
        dx = x - x_prev
        dF = theta * (Bx - B_prev) + sb * dx
        den = float(np.vdot(dF, dF))
        cand = phi ** 2 / (4.0 * gam_2) * float(np.vdot(dx, dx)) / den if den >= 1e-30 else math.inf
        gamma = min(rho * gam_1, cand, cfg.gamma_bar)
        xbar = ((phi - 1.0) * x + xbar) / phi
        x_new = prox_step(gamma, xbar, x, Bx)
        gammas.append(gamma)
        res = relative_change(x_new, x)
        x_prev, B_prev, x = x, Bx, x_new
        gam_2, gam_1 = gam_1, gamma
        if mon.update(k, res, {"x": x, "xbar": xbar, "gamma": gamma}, x):
            break
    mon.trace.extras["rho"] = rho
    return x, mon.finish(x=x, xbar=xbar)
