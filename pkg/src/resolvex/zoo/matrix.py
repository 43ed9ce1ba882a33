"""Projectors for the nearest doubly stochastic PSD matrix problem."""

from dataclasses import dataclass, field
from typing import Mapping, Sequence, Tuple

import numpy as np


def _square(X, name="X"):
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[0] != X.shape[1]:
        raise ValueError(f"{name} must be a square matrix, got shape {X.shape}")
    return X


def proj_doubly_stochastic_affine(X):
    """Project onto ``{X : X e = X^T e = e}`` via ``(I-J) X (I-J) + J``, ``J = ee^T/n``."""
    X = _square(X)
    n = X.shape[0]
    # (I-J) X (I-J) without forming J: subtract row/col means, add back the grand mean
    row = X.mean(axis=1, keepdims=True)
    col = X.mean(axis=0, keepdims=True)
    return X - row - col + X.mean() + 1.0 / n


@dataclass(frozen=True)
class PrescribedNonneg:
    """Nonnegative matrices with some entries fixed.

    ``entries`` maps zero-based ``(i, j)`` to the prescribed value.
    """

    entries: Mapping[Tuple[int, int], float] = field(default_factory=dict)

    @property
    def omega_set(self) -> Sequence[Tuple[int, int]]:
        return list(self.entries)

    def validate(self, n):
        for (i, j) in self.entries:
            if not (0 <= i < n and 0 <= j < n):
                raise IndexError(f"prescribed index {(i, j)} out of range for n={n}")


def proj_prescribed_nonneg(X, spec: PrescribedNonneg):
    X = _square(X)
    spec.validate(X.shape[0])
    Y = np.maximum(X, 0.0)
    for (i, j), m in spec.entries.items():
        Y[i, j] = m
    return Y


def proj_psd(X):
    """Nearest symmetric PSD matrix: symmetrize, then clip negative eigenvalues."""
    X = _square(X)
    if not np.all(np.isfinite(X)):
        raise np.linalg.LinAlgError("PSD projection of a matrix with non-finite entries")
    Y = 0.5 * (X + X.T)
    w, V = np.linalg.eigh(Y)
    w = np.maximum(w, 0.0)
    P = (V * w) @ V.T
    return 0.5 * (P + P.T)


def feasibility_witness(n):
    """A positive definite point of the affine and prescribed sets (first entry 0.25).

    Its eigenvalues are 1 and (0.25n - 1)/(n - 1), so it is positive definite
    for n >= 5.
    """
    e = np.ones((n, 1))
    return ((0.25 * n - 1) / (n - 1)) * np.eye(n) + (0.75 / (n - 1)) * (e @ e.T)
