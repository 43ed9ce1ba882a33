"""Discrete gradient, isotropic TV and the saddle-form ROF operators."""

import numpy as np

from ..core import MonotoneOperator, ProductSpace, ProxFunction
from .prox import proj_box


def discrete_gradient(x):
    """Forward differences, zero in the last row (axis 0) and last column (axis 1).

    Returns an array of shape ``(2,) + x.shape``.
    """
    x = np.asarray(x, dtype=float)
    g = np.zeros((2,) + x.shape)
    g[0, :-1, :] = x[1:, :] - x[:-1, :]
    g[1, :, :-1] = x[:, 1:] - x[:, :-1]
    return g


def divergence(y):
    """Negative adjoint of :func:`discrete_gradient`: ``<grad x, y> = -<x, div y>``."""
    y = np.asarray(y, dtype=float)
    p1, p2 = y[0], y[1]
    d = np.zeros(p1.shape)
    d[:-1, :] += p1[:-1, :]
    d[1:, :] -= p1[:-1, :]
    d[:, :-1] += p2[:, :-1]
    d[:, 1:] -= p2[:, :-1]
    return d


def gradient_adjoint(y):
    return -divergence(y)


def total_variation(x):
    """Isotropic TV: sum over pixels of the Euclidean norm of the gradient."""
    g = discrete_gradient(x)
    return float(np.sum(np.sqrt(g[0] ** 2 + g[1] ** 2)))


def prox_tv_conjugate(y, gamma=1.0):
    """Pixelwise projection of ``(y1, y2)`` onto the closed unit disc.

    The conjugate of isotropic TV is the indicator of the dual unit ball, so
    the result does not depend on ``gamma``.
    """
    y = np.asarray(y, dtype=float)
    mag = np.sqrt(y[0] ** 2 + y[1] ** 2)
    return y / np.maximum(mag, 1.0)


def operator_norm_sq(apply, adjoint, shape, iters=200, seed=0):
    """Power-iteration estimate of ``||K||^2 = lambda_max(K^* K)``."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(shape)
    x /= np.linalg.norm(x)
    lam = 0.0
    for _ in range(iters):
        z = adjoint(apply(x))
        lam = float(np.vdot(x, z))
        nz = np.linalg.norm(z)
        if nz == 0:
            return 0.0
        x = z / nz
    return lam


def rof_objective(x, q, eta, lo=0.0, hi=1.0):
    """``(eta/2)||x - q||^2 + TV(x) + indicator_{[lo, hi]}(x)``."""
    x = np.asarray(x, dtype=float)
    if lo is not None and (np.any(x < lo - 1e-12) or np.any(x > hi + 1e-12)):
        return float("inf")
    return 0.5 * eta * float(np.sum((x - q) ** 2)) + total_variation(x)


def rof_saddle_operators(shape, eta, lo=0.0, hi=1.0, grad_norm_sq=8.0):
    """Maximally monotone pair ``(A, B)`` on ``H x H'`` whose resolvent of the sum at
    ``(q, 0)`` is the box-constrained ROF solution paired with a dual field.

    ``A = ((1/eta) N_C, d(iota_ball - ||.||^2/2))`` acts blockwise;
    ``B = (1/eta)[[0, K^*], [-K, 0]]`` is skew and Lipschitz.
    Elements are flat vectors laid out by the returned :class:`ProductSpace`.

    The dual block of ``A`` is only (-1)-monotone, so ``A.alpha = -1``.
    """
    shape = tuple(shape)
    space = ProductSpace([shape, (2,) + shape])

    def res_A(gamma, v):
        if not gamma < 1.0:
            raise ValueError(f"resolvent of the dual block needs gamma < 1, got {gamma}")
        x, y = space.unpack(v)
        return space.pack(proj_box(lo, hi, x), prox_tv_conjugate(y / (1.0 - gamma)))

    def fwd_B(v):
        x, y = space.unpack(v)
        return space.pack(gradient_adjoint(y) / eta, -discrete_gradient(x) / eta)

    def res_B(gamma, v):
        raise NotImplementedError("the skew ROF coupling is only used through forward steps")

    A = MonotoneOperator(resolvent=res_A, alpha=-1.0, name="A_rof")
    B = MonotoneOperator(resolvent=res_B, forward=fwd_B, alpha=0.0,
                         kappa=np.sqrt(grad_norm_sq) / eta, name="B_rof")
    return A, B, space


def tv_dual_ball():
    """Indicator of the pixelwise unit disc (the conjugate of isotropic TV) as a ProxFunction."""
    return ProxFunction(prox=lambda gamma, y: prox_tv_conjugate(y), alpha=0.0, name="tv*")
