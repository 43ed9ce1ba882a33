"""Ready-made :class:`~resolvex.core.MonotoneOperator` and
:class:`~resolvex.core.ProxFunction` instances."""

from __future__ import annotations

import numpy as np

from ..core import MonotoneOperator, ProxFunction
from . import matrix as _mat
from .prox import proj_box, proj_nonneg, prox_l1, prox_quadratic


def zero_operator(name="0"):
    return MonotoneOperator(resolvent=lambda gamma, x: np.array(x, dtype=float),
                            forward=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
                            alpha=0.0, kappa=0.0, name=name)


def identity_operator(name="Id"):
    return MonotoneOperator(resolvent=lambda gamma, x: np.asarray(x, dtype=float) / (1.0 + gamma),
                            forward=lambda x: np.array(x, dtype=float),
                            alpha=1.0, kappa=1.0, beta=1.0, name=name)


def scaled_shift(a, c, name="a(x-c)"):
    """``x -> a (x - c)``, the gradient of ``(a/2)||x - c||^2`` for scalar ``a``."""
    a = float(a)
    c = np.asarray(c, dtype=float)
    return MonotoneOperator(resolvent=lambda gamma, x: prox_quadratic(a, c, gamma, x),
                            forward=lambda x: a * (np.asarray(x, dtype=float) - c),
                            alpha=a, kappa=abs(a), beta=(1.0 / a if a > 0 else None),
                            name=name)


def linear_operator(M, b=None, name="Mx+b"):
    """Affine map ``x -> M x + b`` on vectors; monotone iff ``M + M^T`` is PSD.

    Resolvents solve ``(I + gamma M) y = x - gamma b`` directly.
    """
    M = np.atleast_2d(np.asarray(M, dtype=float))
    n = M.shape[0]
    b = np.zeros(n) if b is None else np.asarray(b, dtype=float)
    sym = 0.5 * (M + M.T)
    alpha = float(np.linalg.eigvalsh(sym)[0])
    kappa = float(np.linalg.norm(M, 2))
    beta = None
    if np.allclose(M, M.T) and alpha >= 0 and kappa > 0:
        beta = 1.0 / kappa
    eye = np.eye(n)

    def resolvent(gamma, x):
        return np.linalg.solve(eye + gamma * M, np.asarray(x, dtype=float) - gamma * b)

    return MonotoneOperator(resolvent=resolvent, forward=lambda x: M @ np.asarray(x, dtype=float) + b,
                            alpha=alpha, kappa=kappa, beta=beta, name=name)


def normal_cone(projector, name="N_C"):
    """Normal cone of a closed convex set given its projector (resolvent = projector)."""
    return MonotoneOperator(resolvent=lambda gamma, x: projector(x), name=name)


def box_normal_cone(lo, hi):
    return normal_cone(lambda x: proj_box(lo, hi, x), name=f"N_[{lo},{hi}]")


def nonneg_normal_cone():
    return normal_cone(proj_nonneg, name="N_+")


def psd_normal_cone():
    return normal_cone(_mat.proj_psd, name="N_psd")


def doubly_stochastic_normal_cone():
    return normal_cone(_mat.proj_doubly_stochastic_affine, name="N_ds")


def prescribed_nonneg_normal_cone(spec):
    return normal_cone(lambda X: _mat.proj_prescribed_nonneg(X, spec), name="N_presc")


# proximable functions -------------------------------------------------------

def l1_norm(weight=1.0):
    """``weight * ||x||_1``."""
    w = float(weight)
    return ProxFunction(prox=lambda gamma, x: prox_l1(x, gamma * w),
                        value=lambda x: w * float(np.sum(np.abs(x))),
                        alpha=0.0, name="l1")


def box_indicator(lo, hi):
    def value(x):
        x = np.asarray(x)
        return 0.0 if np.all((x >= lo) & (x <= hi)) else float("inf")

    return ProxFunction(prox=lambda gamma, x: proj_box(lo, hi, x), value=value,
                        alpha=0.0, name="box")


def quadratic(a, c):
    """``(a/2)||x - c||^2`` with ``a >= 0``."""
    c = np.asarray(c, dtype=float)
    return ProxFunction(prox=lambda gamma, x: prox_quadratic(a, c, gamma, x),
                        value=lambda x: 0.5 * a * float(np.sum((np.asarray(x) - c) ** 2)),
                        alpha=float(a), name="quad")


def zero_function():
    return ProxFunction(prox=lambda gamma, x: np.array(x, dtype=float),
                        value=lambda x: 0.0, alpha=0.0, name="0")


def l1_subdifferential(weight=1.0):
    return l1_norm(weight).subdifferential()
