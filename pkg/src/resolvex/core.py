"""Operator records and the strengthening calculus.

An operator is described by what can be *done* with it: evaluate its
resolvent, optionally evaluate it forward, and its advertised moduli.
The strengthened inner perturbation ``(A_{-q})^{(theta, sigma)}`` is the map
``x -> A(theta*x + q) + sigma*x``; its resolvent needs one call to the
resolvent of ``A`` at a rescaled parameter, which is what makes splitting
schemes for resolvents of sums practical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Callable, Optional, Sequence

import numpy as np

__all__ = [
    "AssumptionError",
    "ConvergenceError",
    "DivergenceError",
    "MonotoneOperator",
    "StrengtheningParams",
    "AssumptionCheck",
    "ProductSpace",
    "inner",
    "norm",
    "as_vector",
    "strengthen",
    "strengthened_forward",
    "strengthened_resolvent",
    "zero_point_to_resolvent",
    "resolvent_to_zero_point",
    "check_assumption",
    "ProxFunction",
    "relative_change",
]

Resolvent = Callable[[float, np.ndarray], np.ndarray]
Forward = Callable[[np.ndarray], np.ndarray]


class AssumptionError(ValueError):
    """Parameters violate a monotonicity/strengthening requirement."""


class ConvergenceError(RuntimeError):
    """An iterative solver stopped without meeting its tolerance."""


class DivergenceError(ConvergenceError):
    """The residual blew up relative to its initial value."""


def as_vector(x, name="x") -> np.ndarray:
    """Return ``x`` as a float array, rejecting non-finite entries."""
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} has non-finite entries")
    return arr


def inner(a: np.ndarray, b: np.ndarray) -> float:
    """Euclidean inner product over all entries (product spaces included)."""
    return float(np.vdot(a, b))


def norm(a: np.ndarray) -> float:
    return float(np.linalg.norm(np.ravel(a)))


class ProductSpace:
    """Flat storage for elements of ``H_1 x ... x H_m``.

    Components of arbitrary shapes are concatenated into a single 1-D array,
    so the plain Euclidean inner product of the flat arrays is the sum of the
    component inner products.

    >>> P = ProductSpace([(2, 2), (3,)])
    >>> v = P.pack(np.ones((2, 2)), np.zeros(3))
    >>> v.shape
    (7,)
    >>> [c.shape for c in P.unpack(v)]
    [(2, 2), (3,)]
    """

    def __init__(self, shapes: Sequence[Sequence[int]]):
        self.shapes = [tuple(int(n) for n in s) for s in shapes]
        sizes = [int(np.prod(s)) for s in self.shapes]
        self.offsets = np.concatenate([[0], np.cumsum(sizes)]).astype(int)

    @property
    def size(self) -> int:
        return int(self.offsets[-1])

    def pack(self, *parts) -> np.ndarray:
        if len(parts) != len(self.shapes):
            raise ValueError(f"expected {len(self.shapes)} components, got {len(parts)}")
        out = np.empty(self.size)
        for i, (p, s) in enumerate(zip(parts, self.shapes)):
            p = np.asarray(p, dtype=float)
            if p.shape != s:
                raise ValueError(f"component {i} has shape {p.shape}, expected {s}")
            out[self.offsets[i]:self.offsets[i + 1]] = p.ravel()
        return out

    def unpack(self, v: np.ndarray) -> list[np.ndarray]:
        v = np.asarray(v)
        if v.shape != (self.size,):
            raise ValueError(f"vector has shape {v.shape}, expected ({self.size},)")
        return [v[self.offsets[i]:self.offsets[i + 1]].reshape(s)
                for i, s in enumerate(self.shapes)]

    def __repr__(self):
        return f"ProductSpace({self.shapes})"


@dataclass(frozen=True)
class MonotoneOperator:
    """Capability record of a (maximally) ``alpha``-monotone operator.

    Parameters
    ----------
    resolvent : callable ``(gamma, x) -> J_{gamma A}(x)``
        Must be valid for every ``gamma > 0`` with ``1 + gamma*alpha > 0``.
    forward : callable ``x -> A(x)``, optional
        Only for single-valued operators; required by forward steps.
    alpha : float
        Monotonicity modulus (negative for hypomonotone operators).
    kappa : float, optional
        Lipschitz constant of ``forward``. Inferred as ``1/beta`` when only
        the cocoercivity constant is given.
    beta : float, optional
        Cocoercivity constant of ``forward``.
    """

    resolvent: Resolvent
    forward: Optional[Forward] = None
    alpha: float = 0.0
    kappa: Optional[float] = None
    beta: Optional[float] = None
    name: str = "A"

    def __post_init__(self):
        if self.kappa is not None and self.kappa < 0:
            raise ValueError("Lipschitz constant must be nonnegative")
        if self.beta is not None:
            if self.beta <= 0:
                raise ValueError("cocoercivity constant must be positive")
            if self.kappa is None:
                object.__setattr__(self, "kappa", 1.0 / self.beta)

    def __call__(self, x):
        if self.forward is None:
            raise TypeError(f"operator {self.name!r} has no forward map")
        return self.forward(x)

    def renamed(self, name: str) -> "MonotoneOperator":
        return replace(self, name=name)


@dataclass(frozen=True)
class StrengtheningParams:
    """``(theta, sigma, q)`` defining ``x -> A(theta*x + q) + sigma*x``."""

    theta: float
    sigma: float
    q: np.ndarray = field(default_factory=lambda: np.zeros(()))

    def __post_init__(self):
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        object.__setattr__(self, "q", as_vector(self.q, "q"))


@dataclass(frozen=True)
class AssumptionCheck:
    theta: float
    alphas: Sequence[float]
    sigmas: Sequence[float]


def check_assumption(c: AssumptionCheck, relaxed: bool = False) -> bool:
    """Whether ``theta*alpha_i + sigma_i > 0`` holds for every operator.

    With ``relaxed=True`` each strengthened operator need only be monotone
    (``theta*alpha_i + sigma_i >= 0``) as long as the sum is strongly monotone
    (``sum(theta*alpha_i + sigma_i) > 0``), so a monotone slot may carry
    ``sigma_i = 0``, as when an operator is identically zero.
    """
    if len(c.alphas) != len(c.sigmas):
        raise ValueError("alphas and sigmas must have equal length")
    if not c.theta > 0 or any(s < 0 for s in c.sigmas):
        return False
    moduli = [c.theta * a + s for a, s in zip(c.alphas, c.sigmas)]
    if relaxed:
        return all(m >= 0 for m in moduli) and sum(moduli) > 0
    return all(m > 0 for m in moduli)


def strengthened_forward(A: MonotoneOperator, p: StrengtheningParams, x) -> np.ndarray:
    """Evaluate ``A(theta*x + q) + sigma*x``."""
    if A.forward is None:
        raise TypeError(f"operator {A.name!r} has no forward map")
    x = np.asarray(x, dtype=float)
    return A.forward(p.theta * x + p.q) + p.sigma * x


def strengthened_resolvent(A: MonotoneOperator, p: StrengtheningParams,
                           gamma: float, x) -> np.ndarray:
    """Resolvent of the strengthened inner perturbation of ``A``.

    Returns the unique ``y`` with ``x in y + gamma*(A(theta*y + q) + sigma*y)``,
    computed as ``(J_{mu A}(theta*x/s + q) - q)/theta`` with ``s = 1 + gamma*sigma``
    and ``mu = gamma*theta/s``.

    Raises
    ------
    AssumptionError
        If ``1 + gamma*sigma <= 0`` or ``1 + gamma*(theta*alpha + sigma) <= 0``.
    """
    if not gamma > 0:
        raise AssumptionError(f"resolvent parameter must be positive, got {gamma}")
    s = 1.0 + gamma * p.sigma
    if s <= 0:
        raise AssumptionError(f"1 + gamma*sigma = {s} is not positive")
    if 1.0 + gamma * (p.theta * A.alpha + p.sigma) <= 0:
        raise AssumptionError(
            "strengthened resolvent is not single-valued: "
            f"1 + gamma*(theta*alpha + sigma) = {1.0 + gamma * (p.theta * A.alpha + p.sigma)}")
    x = np.asarray(x, dtype=float)
    return (A.resolvent(gamma * p.theta / s, (p.theta / s) * x + p.q) - p.q) / p.theta


def strengthen(A: MonotoneOperator, p: StrengtheningParams) -> MonotoneOperator:
    """Return the operator ``(A_{-q})^{(theta, sigma)}`` with transported moduli."""
    theta, sigma = p.theta, p.sigma
    kappa = None if A.kappa is None else A.kappa * theta + abs(sigma)
    beta = None
    if A.beta is not None and sigma >= 0:
        beta = 1.0 / (theta / A.beta + sigma)
    forward = None
    if A.forward is not None:
        def forward(x, _A=A, _p=p):
            return strengthened_forward(_A, _p, x)

    def resolvent(gamma, x, _A=A, _p=p):
        return strengthened_resolvent(_A, _p, gamma, x)

    return MonotoneOperator(resolvent=resolvent, forward=forward,
                            alpha=theta * A.alpha + sigma, kappa=kappa, beta=beta,
                            name=f"{A.name}^({theta:g},{sigma:g})")


def zero_point_to_resolvent(x, theta: float, q) -> np.ndarray:
    """Map a zero of the strengthened sum to the resolvent value ``theta*x + q``."""
    return theta * np.asarray(x, dtype=float) + np.asarray(q, dtype=float)


def resolvent_to_zero_point(x, theta: float, q) -> np.ndarray:
    return (np.asarray(x, dtype=float) - np.asarray(q, dtype=float)) / theta


@dataclass(frozen=True)
class ProxFunction:
    """A proper lsc ``alpha``-convex function known through its prox.

    ``prox(gamma, x)`` returns ``argmin_u f(u) + ||u - x||^2 / (2*gamma)``;
    ``value`` is optional and only used for objective reporting.
    """

    prox: Resolvent
    value: Optional[Callable[[np.ndarray], float]] = None
    alpha: float = 0.0
    name: str = "f"

    def subdifferential(self) -> MonotoneOperator:
        return MonotoneOperator(resolvent=self.prox, alpha=self.alpha,
                                name=f"d{self.name}")


def relative_change(new: np.ndarray, old: np.ndarray) -> float:
    """``||new - old|| / max(1, ||old||)``, the default stopping residual."""
    return norm(new - old) / max(1.0, norm(old))


def is_close(a: float, b: float, rtol: float = 1e-12) -> bool:
    return math.isclose(a, b, rel_tol=rtol, abs_tol=rtol)
