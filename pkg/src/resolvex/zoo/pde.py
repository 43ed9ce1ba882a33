"""Finite-difference Dirichlet Laplacian and its resolvent."""

from __future__ import annotations

import threading

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from ..core import ConvergenceError, MonotoneOperator


class GridLaplacian:
    """``-Delta_h`` on the interior nodes of a uniform grid, homogeneous Dirichlet.

    Parameters
    ----------
    shape : tuple of int
        Number of interior nodes per axis; one axis gives the 3-point stencil,
        two axes the 5-point stencil.
    h : float
        Mesh width (same on every axis).
    method : {"direct", "cg"}
        How resolvents are computed. ``"direct"`` caches one sparse LU
        factorization per resolvent parameter; ``"cg"`` runs conjugate
        gradients to ``rtol`` with at most ``10 * size`` iterations.
    """

    def __init__(self, shape, h, method="direct", rtol=1e-10):
        self.shape = tuple(int(s) for s in np.atleast_1d(shape))
        if len(self.shape) not in (1, 2) or min(self.shape) < 1:
            raise ValueError(f"grid shape must have 1 or 2 positive axes, got {shape}")
        if not h > 0:
            raise ValueError("mesh width must be positive")
        if method not in ("direct", "cg"):
            raise ValueError(f"unknown method {method!r}")
        self.h = float(h)
        self.method = method
        self.rtol = rtol
        self.matrix = self._assemble().tocsr()
        self._factors = {}
        self._lock = threading.Lock()

    @property
    def size(self):
        return int(np.prod(self.shape))

    def _assemble(self):
        def second_diff(n):
            return sp.diags([-np.ones(n - 1), 2 * np.ones(n), -np.ones(n - 1)], [-1, 0, 1])

        if len(self.shape) == 1:
            L = second_diff(self.shape[0])
        else:
            nx, ny = self.shape
            L = sp.kron(second_diff(nx), sp.identity(ny)) + sp.kron(sp.identity(nx), second_diff(ny))
        return L / self.h ** 2

    def apply(self, w):
        w = np.asarray(w, dtype=float)
        return (self.matrix @ w.ravel()).reshape(w.shape)

    def _system(self, gamma):
        return sp.identity(self.size, format="csc") + gamma * self.matrix.tocsc()

    def _factor(self, gamma):
        with self._lock:
            f = self._factors.get(gamma)
            if f is None:
                f = spla.splu(self._system(gamma))
                self._factors[gamma] = f
            return f

    def resolvent(self, gamma, g):
        """Solve ``(I + gamma*(-Delta_h)) w = g``, i.e. ``-Delta_h w + w/gamma = g/gamma``."""
        if not gamma > 0:
            raise ValueError("resolvent parameter must be positive")
        g = np.asarray(g, dtype=float)
        b = g.ravel()
        if self.method == "direct":
            w = self._factor(float(gamma)).solve(b)
        else:
            w, info = spla.cg(self._system(gamma), b, rtol=self.rtol, atol=0.0,
                              maxiter=10 * self.size)
            if info != 0:
                raise ConvergenceError(f"CG did not converge in {10 * self.size} iterations")
        return w.reshape(g.shape)

    def operator(self) -> MonotoneOperator:
        h = self.h
        lam_max = 4.0 * len(self.shape) / h ** 2
        return MonotoneOperator(resolvent=self.resolvent, forward=self.apply,
                                alpha=0.0, kappa=lam_max, beta=1.0 / lam_max,
                                name="-Laplacian")


def laplacian_resolvent(g, gamma, L: GridLaplacian):
    return L.resolvent(gamma, g)

