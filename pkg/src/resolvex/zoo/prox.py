"""Closed-form proximity operators and projectors on vectors."""

import numpy as np


def prox_l1(x, gamma):
    """Soft thresholding ``sign(x) * max(|x| - gamma, 0)``."""
    x = np.asarray(x, dtype=float)
    return np.sign(x) * np.maximum(np.abs(x) - gamma, 0.0)


def prox_quadratic(a, c, gamma, x):
    """Prox of ``(a/2)||. - c||^2``, i.e. ``(x + gamma*a*c) / (1 + gamma*a)``."""
    x = np.asarray(x, dtype=float)
    return (x + gamma * a * np.asarray(c, dtype=float)) / (1.0 + gamma * a)


def proj_box(lo, hi, x):
    """Componentwise clamp onto ``[lo, hi]``; bounds may be scalars or arrays."""
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    if np.any(lo > hi):
        raise ValueError("box bounds must satisfy lo <= hi")
    return np.clip(np.asarray(x, dtype=float), lo, hi)


def proj_nonneg(g):
    """Pointwise positive part."""
    return np.maximum(np.asarray(g, dtype=float), 0.0)


def proj_ball(x, radius=1.0, center=0.0):
    """Projection onto a closed Euclidean ball."""
    x = np.asarray(x, dtype=float)
    d = x - center
    r = np.linalg.norm(d)
    if r <= radius:
        return x.copy()
    return center + (radius / r) * d


def proj_hyperplane(a, b, x):
    """Projection onto ``{x : <a, x> = b}``."""
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    return x - ((np.vdot(a, x) - b) / np.vdot(a, a)) * a
