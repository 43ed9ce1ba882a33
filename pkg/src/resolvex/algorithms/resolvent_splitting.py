"""Backward-only splittings: strengthened Douglas-Rachford and Ryu, their
unstrengthened base forms, AAMR and Dykstra's method."""

from __future__ import annotations

import numpy as np

from ..core import DivergenceError, as_vector, norm, relative_change
from .base import (ConfigError, Monitor, SolverConfig, SumProblem, Trace,
                   require_assumption, strengthening_split)


def _lam_in(lam, upper):
    if not 0.0 < lam <= upper:
        raise ConfigError(f"lambda must lie in (0, {upper:g}], got {lam}")


def _needs_relaxed(sigmas):
    # a slot with sigma_i = 0 is allowed as long as the sum stays strongly monotone
    return any(s == 0 for s in sigmas)


def solve_sdr(problem: SumProblem, cfg: SolverConfig, x0=None, *, callback=None,
              objective=None, strict=True):
    """Strengthened Douglas-Rachford (``lam = 2`` gives Peaceman-Rachford).

    The shadow sequence ``u_k`` converges strongly to ``J_{omega(A+B)}(q)``.
    Only resolvents of ``A`` and ``B`` are used. ``cfg.gamma`` defaults to 1.

    Returns
    -------
    u : ndarray
        Last shadow iterate.
    trace : Trace
        ``trace.final`` holds the governing iterate ``x`` and ``v``.
    """
    if len(problem.operators) != 2:
        raise ConfigError(f"expected two operators (A, B), got {len(problem.operators)}")
    A, B = problem.operators
    lam = cfg.lam
    _lam_in(lam, 2.0)
    theta, (sa, sb) = strengthening_split(2, problem.omega, cfg)
    require_assumption(theta, (A.alpha, B.alpha), (sa, sb), strict=strict,
                       relaxed=_needs_relaxed((sa, sb)))
    gamma = 1.0 if cfg.gamma is None else cfg.gamma
    q = problem.q
    x = q.copy() if x0 is None else as_vector(x0, "x0").copy()
    ka, kb = 1.0 + gamma * sa, 1.0 + gamma * sb
    mu_a, mu_b = gamma * theta / ka, gamma * theta / kb
    mon = Monitor("S-DR", cfg, callback, objective)
    u = v = x
    for k in range(cfg.max_iters):
        u = A.resolvent(mu_a, (x + gamma * sa * q) / ka)
        v = B.resolvent(mu_b, (2.0 * u - x + gamma * sb * q) / kb)
        x_new = x + lam * (v - u)
        res = relative_change(x_new, x)
        x = x_new
        if mon.update(k, res, {"x": x, "u": u, "v": v}, u):
            break
    return u, mon.finish(x=x, v=v)


def solve_sryu(problem: SumProblem, cfg: SolverConfig, x0=None, y0=None, *,
               callback=None, objective=None, strict=True):
    """Strengthened Ryu splitting for ``J_{omega(A+B+C)}(q)``.

    With normal cones of closed convex sets this is a best-approximation
    method for the intersection. A slot may carry ``sigma_i = 0`` (for
    instance a zero operator), provided the remaining strengthening makes the
    sum strongly monotone.

    Returns
    -------
    u : ndarray
        Last shadow iterate.
    trace : Trace
        ``trace.final`` holds ``x``, ``y``, ``v`` and ``w``.
    """
    if len(problem.operators) != 3:
        raise ConfigError(f"expected three operators (A, B, C), got {len(problem.operators)}")
    A, B, C = problem.operators
    lam = cfg.lam
    _lam_in(lam, 1.0)
    theta, (sa, sb, sc) = strengthening_split(3, problem.omega, cfg)
    require_assumption(theta, (A.alpha, B.alpha, C.alpha), (sa, sb, sc), strict=strict,
                       relaxed=_needs_relaxed((sa, sb, sc)))
    gamma = 1.0 if cfg.gamma is None else cfg.gamma
    q = problem.q
    x = q.copy() if x0 is None else as_vector(x0, "x0").copy()
    y = q.copy() if y0 is None else as_vector(y0, "y0").copy()
    ka, kb, kc = 1.0 + gamma * sa, 1.0 + gamma * sb, 1.0 + gamma * sc
    mon = Monitor("S-Ryu", cfg, callback, objective)
    u = v = w = x
    for k in range(cfg.max_iters):
        u = A.resolvent(gamma * theta / ka, (x + gamma * sa * q) / ka)
        v = B.resolvent(gamma * theta / kb, (u + y - (1.0 - gamma * sb) * q) / kb)
        w = C.resolvent(gamma * theta / kc, (u - x + v - y) / kc + q)
        dx, dy = lam * (w - u), lam * (w - v)
        res = float(np.hypot(norm(dx), norm(dy))) / max(1.0, float(np.hypot(norm(x), norm(y))))
        x, y = x + dx, y + dy
        if mon.update(k, res, {"x": x, "y": y, "u": u, "v": v, "w": w}, u):
            break
    return u, mon.finish(x=x, y=y, v=v, w=w)


def ryu_base(A, B, C, gamma, lam, x0, y0, *, max_iters=10000, stop_tol=1e-10,
             z_star=None, callback=None, patience=50):
    """Unstrengthened Ryu splitting for a zero of ``A + B + C``.

    Stops when ``||w_k - u_k|| + ||w_k - v_k|| <= stop_tol``.

    Parameters
    ----------
    z_star : tuple of arrays, optional
        A point ``(x*, y*)`` of the fixed-point set. When given, the trace
        records ``||z_k - z*||^2`` under ``extras["fejer"]`` and the slack of
        the Fejer inequality
        ``||z_k - z*||^2 - ||z_{k+1} - z*||^2 - ((1-lam)/lam)||z_{k+1} - z_k||^2``
        under ``extras["fejer_slack"]``.
    patience : int
        A residual that grows for this many consecutive iterations while
        above its initial value is treated as divergence.

    Returns
    -------
    u : ndarray
    trace : Trace
    """
    _lam_in(lam, 1.0)
    if not gamma > 0:
        raise ConfigError(f"gamma must be positive, got {gamma}")
    cfg = SolverConfig(gamma=gamma, lam=lam, max_iters=max_iters, stop_tol=stop_tol)
    x = as_vector(x0, "x0").copy()
    y = as_vector(y0, "y0").copy()
    mon = Monitor("Ryu", cfg, callback)
    if z_star is not None:
        xs, ys = (as_vector(z, "z_star") for z in z_star)
        fejer = mon.trace.extras.setdefault("fejer", [])
        slack = mon.trace.extras.setdefault("fejer_slack", [])
        fejer.append(norm(x - xs) ** 2 + norm(y - ys) ** 2)
    growing, prev, first = 0, None, None
    u = x
    for k in range(max_iters):
        u = A.resolvent(gamma, x)
        v = B.resolvent(gamma, u + y)
        w = C.resolvent(gamma, u - x + v - y)
        res = norm(w - u) + norm(w - v)
        x_new, y_new = x + lam * (w - u), y + lam * (w - v)
        if z_star is not None:
            d_new = norm(x_new - xs) ** 2 + norm(y_new - ys) ** 2
            step = norm(x_new - x) ** 2 + norm(y_new - y) ** 2
            slack.append(fejer[-1] - d_new - (1.0 - lam) / lam * step)
            fejer.append(d_new)
        x, y = x_new, y_new
        first = res if first is None else first
        growing = growing + 1 if prev is not None and res > prev else 0
        prev = res
        if growing >= patience and res > first:
            mon.trace.stop_reason = "diverged"
            err = DivergenceError(f"Ryu: residual grew for {patience} iterations at k={k}")
            err.trace = mon.trace
            raise err
        if mon.update(k, res, {"x": x, "y": y, "u": u, "v": v, "w": w}, u):
            break
    return u, mon.finish(x=x, y=y)


def douglas_rachford_base(A, B, gamma, lam, x0, *, max_iters=10000, stop_tol=1e-10,
                          callback=None):
    """Plain relaxed Douglas-Rachford for a zero of ``A + B``; returns the shadow."""
    _lam_in(lam, 2.0)
    cfg = SolverConfig(gamma=gamma, lam=lam, max_iters=max_iters, stop_tol=stop_tol)
    x = as_vector(x0, "x0").copy()
    mon = Monitor("DR", cfg, callback)
    u = x
    for k in range(max_iters):
        u = A.resolvent(gamma, x)
        v = B.resolvent(gamma, 2.0 * u - x)
        x_new = x + lam * (v - u)
        res = relative_change(x_new, x)
        x = x_new
        if mon.update(k, res, {"x": x, "u": u}, u):
            break
    return u, mon.finish(x=x)


def aamr(A, B, q, beta, kappa, gamma=1.0, y0=None, *, max_iters=10000, stop_tol=1e-10,
         callback=None):
    """Averaged alternating modified reflections.

    Iterates ``y+ = (1-kappa) y + kappa (2 beta J_B' - Id)(2 beta J_A' - Id) y``
    with ``J_A'(z) = J_{gamma A}(z + q) - q``. The shadow ``J_{gamma A}(y + q)``
    converges to ``J_{omega(A+B)}(q)`` with ``omega = gamma/(2(1-beta))``;
    for normal cones this is the projection onto the intersection.

    Returns
    -------
    u : ndarray
        Last shadow iterate.
    trace : Trace
        ``trace.extras["y"]`` lists every governing iterate, starting at ``y0``.
    """
    if not 0.0 < beta < 1.0:
        raise ConfigError(f"beta must lie in (0, 1), got {beta}")
    if not 0.0 < kappa < 1.0:
        raise ConfigError(f"kappa must lie in (0, 1), got {kappa}")
    q = as_vector(q, "q")
    cfg = SolverConfig(gamma=gamma, lam=2.0 * kappa, max_iters=max_iters, stop_tol=stop_tol)
    y = np.zeros_like(q) if y0 is None else as_vector(y0, "y0").copy()
    mon = Monitor("AAMR", cfg, callback)
    ys = mon.trace.extras.setdefault("y", [y.copy()])
    u = A.resolvent(gamma, y + q)
    for k in range(max_iters):
        u = A.resolvent(gamma, y + q)
        r = 2.0 * beta * (u - q) - y
        v = B.resolvent(gamma, r + q)
        y_new = (1.0 - kappa) * y + kappa * (2.0 * beta * (v - q) - r)
        res = relative_change(y_new, y)
        y = y_new
        ys.append(y.copy())
        if mon.update(k, res, {"y": y, "u": u, "v": v}, u):
            break
    return u, mon.finish(y=y)


def dykstra(projectors, q, cfg: SolverConfig = None, *, callback=None):
    """Cyclic Dykstra projections onto an intersection of closed convex sets.

    One iteration is a full sweep over the projectors. Stops on the relative
    change of the sweep output or when ``callback(k, state)`` returns truthy.
    """
    projectors = list(projectors)
    if not projectors:
        raise ConfigError("need at least one projector")
    cfg = cfg or SolverConfig()
    x = as_vector(q, "q").copy()
    corr = [np.zeros_like(x) for _ in projectors]
    mon = Monitor("Dykstra", cfg, callback)
    for k in range(cfg.max_iters):
        x_old = x
        for i, P in enumerate(projectors):
            z = x + corr[i]
            x = P(z)
            corr[i] = z - x
        if mon.update(k, relative_change(x, x_old), {"x": x}, x):
            break
    return x, mon.finish(x=x)
