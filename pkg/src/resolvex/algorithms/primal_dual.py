"""Strengthened primal-dual method for ``prox_{(1/sigma)(g + phi o K)}(q)``."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from ..core import ProxFunction, as_vector, norm
from .base import ConfigError, Monitor, SolverConfig, _fail


@dataclass(frozen=True)
class LinearMap:
    """Bounded linear operator given by its action and adjoint action."""

    apply: Callable[[np.ndarray], np.ndarray]
    adjoint: Callable[[np.ndarray], np.ndarray]
    norm_sq: Optional[float] = None

    @classmethod
    def from_matrix(cls, M):
        M = np.atleast_2d(np.asarray(M, dtype=float))
        return cls(lambda x: M @ x, lambda y: M.T @ y, float(np.linalg.norm(M, 2) ** 2))


@dataclass(frozen=True)
class CompositeTerm:
    """The term ``phi o K`` in a sum, known through ``prox_{gamma phi^*}`` and ``K``."""

    phi_star: ProxFunction
    K: LinearMap
    dual_shape: tuple = ()


def solve_spd(g: ProxFunction, phi_star: ProxFunction, K: LinearMap, q, cfg: SolverConfig,
              x0=None, y0=None, *, sigma=None, callback=None, objective=None, strict=True):
    """Strengthened primal-dual iteration.

    Computes ``prox_{(1/sigma)(g + phi o K)}(q)`` for a ``(-sigma)``-convex
    ``g``; ``phi`` enters only through ``prox_{gamma phi^*}``.

    Parameters
    ----------
    g, phi_star : ProxFunction
    K : LinearMap
        ``K.norm_sq`` (an upper bound on ``||K||^2``) is required to check
        the window ``gamma * tau * ||K||^2 < 1``.
    q : array
    cfg : SolverConfig
        ``gamma`` is the dual step, ``tau`` the primal step, ``lam`` the
        extrapolation weight in ``[0, 1]``.
    x0, y0 : array, optional
        Default to ``q`` and zero.
    sigma : float, optional
        Strengthening weight; defaults to ``cfg.sigma[0]`` or 1.

    Returns
    -------
    x : ndarray
    trace : Trace
        ``trace.extras["change"]`` holds the unnormalized change
        ``||(x_{k+1}, y_{k+1}) - (x_k, y_k)||``; ``trace.final["y"]`` the dual iterate.
    """
    if sigma is None:
        sigma = cfg.sigma[0] if cfg.sigma else 1.0
    if not sigma > 0:
        raise ConfigError(f"sigma must be positive, got {sigma}")
    if g.alpha < -sigma:
        _fail(f"g is only {g.alpha}-convex, needs at least {-sigma}", strict)
    lam = cfg.lam
    if not 0.0 <= lam <= 1.0:
        raise ConfigError(f"lambda must lie in [0, 1] for the primal-dual method, got {lam}")
    q = as_vector(q, "q")
    nK = K.norm_sq
    gamma = cfg.gamma
    if gamma is None:
        gamma = 1.0 / np.sqrt(nK) if nK else 1.0
    tau = cfg.tau
    if tau is None:
        tau = 0.99 / (gamma * nK) if nK else 1.0
    if nK is not None and gamma * tau * nK >= 1.0:
        raise ConfigError(f"stepsizes violate gamma*tau*||K||^2 < 1: "
                          f"{gamma}*{tau}*{nK} = {gamma * tau * nK}")
    x = q.copy() if x0 is None else as_vector(x0, "x0").copy()
    y = np.zeros_like(K.apply(x)) if y0 is None else as_vector(y0, "y0").copy()
    xbar = x.copy()
    s = 1.0 + tau * sigma
    mon = Monitor("S-PD", cfg, callback, objective)
    changes = mon.trace.extras.setdefault("change", [])
    for k in range(cfg.max_iters):
        y_new = phi_star.prox(gamma, y + gamma * K.apply(xbar))
        x_new = g.prox(tau / s, (x - tau * K.adjoint(y_new) + tau * sigma * q) / s)
        xbar = x_new + lam * (x_new - x)
        dx, dy = norm(x_new - x), norm(y_new - y)
        change = float(np.hypot(dx, dy))
        res = change / max(1.0, float(np.hypot(norm(x), norm(y))))
        changes.append(change)
        x, y = x_new, y_new
        if mon.update(k, res, {"x": x, "y": y}, x):
            break
    mon.trace.extras.update(gamma=gamma, tau=tau, sigma=sigma)
    return x, mon.finish(x=x, y=y)
