"""Solver configuration, iteration traces and the shared run monitor."""

from __future__ import annotations

import csv
import json
import math
import time
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

import numpy as np

from ..core import AssumptionCheck, DivergenceError, as_vector, check_assumption

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


class ConfigError(ValueError):
    """A solver configuration is malformed or outside its admissible window."""


@dataclass
class SolverConfig:
    """Parameters shared by the strengthened splitting solvers.

    ``lam`` is the relaxation parameter (``"lambda"`` in JSON documents).
    ``sigma`` is the per-operator strengthening; when ``None`` the solvers use
    the equal split ``sigma_i = theta / (n * omega)``. ``gamma = None`` lets each
    solver pick a stepsize inside its admissible window.
    """

    gamma: Optional[float] = None
    lam: float = 1.0
    sigma: Optional[Sequence[float]] = None
    theta: float = 1.0
    tau: Optional[float] = None
    phi: float = 1.5
    gamma_bar: float = 1e6
    max_iters: int = 10000
    stop_tol: float = 1e-8
    divergence_factor: float = 1e6

    def __post_init__(self):
        if self.sigma is not None:
            self.sigma = tuple(float(s) for s in np.atleast_1d(self.sigma))
        self.validate()

    def validate(self):
        pos = {"theta": self.theta, "phi": self.phi, "gamma_bar": self.gamma_bar,
               "divergence_factor": self.divergence_factor}
        for key in ("gamma", "tau"):
            if getattr(self, key) is not None:
                pos[key] = getattr(self, key)
        for key, val in pos.items():
            if not (isinstance(val, (int, float)) and math.isfinite(val) and val > 0):
                raise ConfigError(f"{key} must be a positive real, got {val!r}")
        # stop_tol = 0 disables the residual test, so runs last exactly max_iters
        if not (isinstance(self.stop_tol, (int, float)) and math.isfinite(self.stop_tol)
                and self.stop_tol >= 0):
            raise ConfigError(f"stop_tol must be a nonnegative real, got {self.stop_tol!r}")
        if not (isinstance(self.lam, (int, float)) and math.isfinite(self.lam)):
            raise ConfigError(f"lambda must be a real number, got {self.lam!r}")
        if not isinstance(self.max_iters, int) or self.max_iters < 1:
            raise ConfigError(f"max_iters must be a positive integer, got {self.max_iters!r}")
        if self.sigma is not None and any(not math.isfinite(s) or s < 0 for s in self.sigma):
            raise ConfigError(f"sigma entries must be nonnegative reals, got {self.sigma}")

    @classmethod
    def from_dict(cls, doc: dict) -> "SolverConfig":
        doc = dict(doc)
        if "lambda" in doc:
            doc["lam"] = doc.pop("lambda")
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown solver config fields: {sorted(unknown)}")
        try:
            return cls(**doc)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    @classmethod
    def from_json(cls, path) -> "SolverConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        out = {f.name: getattr(self, f.name) for f in fields(self)}
        out["lambda"] = out.pop("lam")
        if out["sigma"] is not None:
            out["sigma"] = list(out["sigma"])
        return out


@dataclass
class TraceRecord:
    k: int
    residual: float
    objective: float
    elapsed_ms: float


@dataclass
class Trace:
    """Per-iteration convergence history of one solver run."""

    method: str = ""
    records: list = field(default_factory=list)
    converged: bool = False
    stop_reason: str = ""
    extras: dict = field(default_factory=dict)
    final: dict = field(default_factory=dict)

    @property
    def iterations(self) -> int:
        return len(self.records)

    @property
    def residuals(self) -> np.ndarray:
        return np.array([r.residual for r in self.records])

    @property
    def objectives(self) -> np.ndarray:
        return np.array([r.objective for r in self.records])

    def append_extra(self, key, value):
        self.extras.setdefault(key, []).append(value)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["k", "residual", "objective", "elapsed_ms"])
            for r in self.records:
                w.writerow([r.k, repr(float(r.residual)), repr(float(r.objective)),
                            f"{r.elapsed_ms:.3f}"])


@dataclass
class SumProblem:
    """Compute ``J_{omega * (A_1 + ... + A_n)}(q)``."""

    operators: Sequence[Any]
    q: np.ndarray
    omega: float = 1.0

    def __post_init__(self):
        self.operators = tuple(self.operators)
        self.q = as_vector(self.q, "q")
        if not self.omega > 0:
            raise ConfigError(f"omega must be positive, got {self.omega}")


def strengthening_split(n: int, omega: float, cfg: SolverConfig):
    """Return ``(theta, sigmas)`` with ``theta / sum(sigmas) = omega``."""
    theta = cfg.theta
    if cfg.sigma is None:
        return theta, (theta / (n * omega),) * n
    sig = tuple(cfg.sigma)
    if len(sig) != n:
        raise ConfigError(f"expected {n} strengthening parameters, got {len(sig)}")
    total = sum(sig)
    if total <= 0 or not math.isclose(theta / total, omega, rel_tol=1e-9):
        raise ConfigError(
            f"theta/sum(sigma) = {theta / total if total > 0 else float('inf')} "
            f"does not match omega = {omega}")
    return theta, sig


def require_assumption(theta, alphas, sigmas, strict=True, relaxed=False):
    """Fail fast (or warn when ``strict`` is False) if the strengthening is inadmissible."""
    ok = check_assumption(AssumptionCheck(theta, list(alphas), list(sigmas)), relaxed=relaxed)
    if not ok:
        msg = (f"strengthening assumption violated: theta={theta}, alphas={list(alphas)}, "
               f"sigmas={list(sigmas)}")
        _fail(msg, strict)


def _fail(msg, strict):
    if strict:
        raise ConfigError(msg)
    import warnings
    warnings.warn(msg, RuntimeWarning, stacklevel=3)


class Monitor:
    """Bookkeeping shared by the iteration loops.

    ``update`` records one iteration and returns True when the run should stop:
    residual at or below ``stop_tol`` (never when ``stop_tol`` is 0), or the
    user callback returned truthy.
    Raises :class:`DivergenceError` on non-finite residuals or growth beyond
    ``divergence_factor`` times the first residual.
    """

    def __init__(self, method, cfg: SolverConfig, callback=None, objective=None,
                 stop_tol=None):
        self.trace = Trace(method=method)
        self.cfg = cfg
        self.callback = callback
        self.objective = objective
        self.stop_tol = cfg.stop_tol if stop_tol is None else stop_tol
        self._t0 = time.perf_counter()
        self._first = None

    def update(self, k, residual, state=None, point=None) -> bool:
        obj = float("nan")
        if self.objective is not None and point is not None:
            obj = float(self.objective(point))
        self.trace.records.append(TraceRecord(k, float(residual), obj,
                                              1e3 * (time.perf_counter() - self._t0)))
        if not math.isfinite(residual):
            self.trace.stop_reason = "diverged"
            raise DivergenceError(f"{self.trace.method}: non-finite residual at k={k}")
        if self._first is None:
            self._first = residual
        elif self._first > 0 and residual > self.cfg.divergence_factor * self._first:
            self.trace.stop_reason = "diverged"
            err = DivergenceError(
                f"{self.trace.method}: residual {residual:.3e} exceeds "
                f"{self.cfg.divergence_factor:g} x initial {self._first:.3e} at k={k}")
            err.trace = self.trace
            raise err
        if self.callback is not None and self.callback(k, state if state is not None else {}):
            self.trace.converged = True
            self.trace.stop_reason = "callback"
            return True
        if self.stop_tol > 0 and residual <= self.stop_tol:
            self.trace.converged = True
            self.trace.stop_reason = "stop_tol"
            return True
        return False

    def finish(self, **final):
        if not self.trace.stop_reason:
            self.trace.stop_reason = "max_iters"
        self.trace.final.update(final)
        return self.trace
