"""High-level entry point: ``J_{omega(A_1 + ... + A_n)}(q)`` by any method.

The driver strengthens each operator explicitly, runs the corresponding
*unstrengthened* scheme on the strengthened operators to find their unique
common zero ``z*``, and returns ``theta*z* + q``. This is an independent
route from the closed-form ``solve_*`` iterations, which fold the
strengthening into the update formulas.
"""

from __future__ import annotations

import enum
import math

import numpy as np

from ..core import (MonotoneOperator, ProxFunction, StrengtheningParams, as_vector,
                    relative_change, resolvent_to_zero_point, strengthen,
                    zero_point_to_resolvent)
from ..zoo.operators import zero_operator
from .base import (GOLDEN, ConfigError, Monitor, SolverConfig, SumProblem, Trace, _fail,
                   require_assumption, strengthening_split)
from .forward_backward import fb_stepsize_bound, fbf_stepsize_bound
from .primal_dual import CompositeTerm, solve_spd
from .resolvent_splitting import douglas_rachford_base, ryu_base


class Method(str, enum.Enum):
    SFB = "SFB"
    SFBF = "SFBF"
    SAGRAAL = "SAGRAAL"
    SPD = "SPD"
    SDR = "SDR"
    SRYU = "SRYU"


def forward_backward_base(A, B, gamma, z0, cfg: SolverConfig, callback=None):
    z = as_vector(z0).copy()
    mon = Monitor("FB", cfg, callback)
    for k in range(cfg.max_iters):
        z_new = A.resolvent(gamma, z - gamma * B(z))
        res = relative_change(z_new, z)
        z = z_new
        if mon.update(k, res, {"z": z}):
            break
    return z, mon.finish(z=z)


def tseng_base(A, B, gamma, z0, cfg: SolverConfig, callback=None):
    """Forward-backward-forward; returns the resolvent-step point."""
    z = as_vector(z0).copy()
    v = z
    mon = Monitor("FBF", cfg, callback)
    for k in range(cfg.max_iters):
        Bz = B(z)
        v = A.resolvent(gamma, z - gamma * Bz)
        z_new = v - gamma * (B(v) - Bz)
        res = relative_change(z_new, z)
        z = z_new
        if mon.update(k, res, {"z": z, "v": v}):
            break
    return v, mon.finish(z=z)


def golden_ratio_base(A, F, gamma0, z0, z1, cfg: SolverConfig, callback=None):
    """Adaptive golden ratio algorithm for ``0 in A(z) + F(z)``."""
    phi = cfg.phi
    rho = 1.0 / phi + 1.0 / phi ** 2
    z_prev = as_vector(z0).copy()
    F_prev = F(z_prev)
    z = A.resolvent(gamma0, z_prev - gamma0 * F_prev) if z1 is None else as_vector(z1).copy()
    zbar = z.copy()
    g1, g2 = gamma0, phi * gamma0
    mon = Monitor("aGRAAL", cfg, callback)
    gammas = mon.trace.extras.setdefault("gamma", [])
    for k in range(1, cfg.max_iters + 1):
        Fz = F(z)
        dz, dF = z - z_prev, Fz - F_prev
        den = float(np.vdot(dF, dF))
        cand = phi ** 2 / (4.0 * g2) * float(np.vdot(dz, dz)) / den if den >= 1e-30 else math.inf
        gamma = min(rho * g1, cand, cfg.gamma_bar)
        zbar = ((phi - 1.0) * z + zbar) / phi
        z_new = A.resolvent(gamma, zbar - gamma * Fz)
        gammas.append(gamma)
        res = relative_change(z_new, z)
        z_prev, F_prev, z = z, Fz, z_new
        g2, g1 = g1, gamma
        if mon.update(k, res, {"z": z}):
            break
    return z, mon.finish(z=z)


def _as_operator(op):
    if isinstance(op, ProxFunction):
        return op.subdifferential()
    return op


def resolvent_of_sum(problem: SumProblem, method, cfg: SolverConfig = None, x0=None, y0=None,
                     *, callback=None, strict=True):
    """Compute ``J_{omega(A_1 + ... + A_n)}(q)`` with the selected splitting.

    Parameters
    ----------
    problem : SumProblem
        Two operators for SFB, SFBF, SAGRAAL and SDR; two or three for SRYU
        (with two, a zero operator fills the middle slot with ``sigma = 0``).
        For SPD the operators are ``(g, CompositeTerm)`` and the result is
        ``prox_{omega(g + phi o K)}(q)``.
    method : Method or str
    cfg : SolverConfig, optional
        ``sigma=None`` selects the equal split ``sigma_i = theta/(n*omega)``.
    x0, y0 : array, optional
        Starting points in the original space (default ``q``).

    Returns
    -------
    x : ndarray
    trace : Trace
    """
    method = Method(str(getattr(method, "value", method)).upper().replace("-", ""))
    cfg = cfg or SolverConfig()
    ops = list(problem.operators)
    q = problem.q

    if method is Method.SPD:
        if len(ops) != 2 or not isinstance(ops[1], CompositeTerm):
            raise ConfigError("SPD needs operators (g, CompositeTerm)")
        g = ops[0]
        if isinstance(g, MonotoneOperator):
            g = ProxFunction(prox=g.resolvent, alpha=g.alpha, name=g.name)
        term = ops[1]
        return solve_spd(g, term.phi_star, term.K, q, cfg, x0, y0,
                         sigma=1.0 / problem.omega, callback=callback, strict=strict)

    ops = [_as_operator(op) for op in ops]
    want = {Method.SRYU: (2, 3)}.get(method, (2,))
    if len(ops) not in want:
        raise ConfigError(f"{method.value} takes {want} operators, got {len(ops)}")
    if method is Method.SRYU and len(ops) == 2:
        theta, (sa, sc) = strengthening_split(2, problem.omega, cfg)
        ops = [ops[0], zero_operator(), ops[1]]
        sigmas = (sa, 0.0, sc)
    else:
        theta, sigmas = strengthening_split(len(ops), problem.omega, cfg)
    require_assumption(theta, [op.alpha for op in ops], sigmas, strict=strict,
                       relaxed=any(s == 0 for s in sigmas))
    S = [strengthen(op, StrengtheningParams(theta, s, q)) for op, s in zip(ops, sigmas)]
    start = q if x0 is None else as_vector(x0, "x0")
    z0 = resolvent_to_zero_point(start, theta, q)

    if method in (Method.SFB, Method.SFBF, Method.SAGRAAL) and S[1].forward is None:
        raise ConfigError(f"operator {ops[1].name!r} needs a forward map")

    if method is Method.SFB:
        bound = fb_stepsize_bound(ops[1], theta, sigmas[1])
        gamma = 0.9 * bound if cfg.gamma is None else cfg.gamma
        if gamma >= bound:
            _fail(f"stepsize {gamma} outside the forward-backward window (< {bound})", strict)
        z, trace = forward_backward_base(S[0], S[1], gamma, z0, cfg, callback)
    elif method is Method.SFBF:
        bound = fbf_stepsize_bound(ops[1], theta, sigmas[1])
        gamma = 0.9 * bound if cfg.gamma is None else cfg.gamma
        if gamma >= bound:
            _fail(f"stepsize {gamma} outside the forward-backward-forward window (< {bound})",
                  strict)
        z, trace = tseng_base(S[0], S[1], gamma, z0, cfg, callback)
    elif method is Method.SAGRAAL:
        if cfg.gamma is not None:
            gamma = cfg.gamma
        elif ops[1].kappa:
            gamma = 1.0 / (theta * ops[1].kappa + sigmas[1])
        else:
            gamma = 1.0
        if not 1.0 < cfg.phi <= GOLDEN + 1e-15:
            raise ConfigError(f"phi must lie in (1, (1+sqrt5)/2], got {cfg.phi}")
        z, trace = golden_ratio_base(S[0], S[1], min(gamma, cfg.gamma_bar), z0, None, cfg,
                                     callback)
    elif method is Method.SDR:
        gamma = 1.0 if cfg.gamma is None else cfg.gamma
        z, trace = douglas_rachford_base(S[0], S[1], gamma, cfg.lam, z0,
                                         max_iters=cfg.max_iters, stop_tol=cfg.stop_tol,
                                         callback=callback)
    else:
        gamma = 1.0 if cfg.gamma is None else cfg.gamma
        w0 = resolvent_to_zero_point(q if y0 is None else as_vector(y0, "y0"), theta, q)
        z, trace = ryu_base(S[0], S[1], S[2], gamma, cfg.lam, z0, w0,
                            max_iters=cfg.max_iters, stop_tol=cfg.stop_tol, callback=callback)
    trace.method = method.value
    trace.extras.update(theta=theta, sigma=list(sigmas))
    return zero_point_to_resolvent(z, theta, q), trace

