"""Independent reference solvers used by the tests.

Nothing here calls into the resolvent formulas of the package: separable
inclusions are solved by bisection on their graphs, affine ones by a dense
linear solve, and sums of scalar-weight affine maps in closed form.
"""

import numpy as np

from resolvex.zoo import (box_normal_cone, identity_operator, l1_subdifferential,
                          linear_operator, nonneg_normal_cone, scaled_shift, zero_operator)

INF = np.inf


def interval_box(lo, hi):
    def graph(t):
        if t < lo:
            return -INF, -INF
        if t > hi:
            return INF, INF
        return (-INF if t == lo else 0.0), (INF if t == hi else 0.0)
    return graph


def interval_l1(w):
    def graph(t):
        if t > 0:
            return w, w
        if t < 0:
            return -w, -w
        return -w, w
    return graph


def interval_affine(a, c):
    return lambda t: (a * (t - c), a * (t - c))


def solve_scalar_inclusion(graph, x, gamma, theta, sigma, q):
    """Bisection for ``x in y + gamma*(A(theta*y + q) + sigma*y)`` with ``A`` a 1-D graph."""
    def h(y):
        lo, hi = graph(theta * y + q)
        base = (1.0 + gamma * sigma) * y - x
        return base + gamma * lo, base + gamma * hi

    R = 1.0
    while h(-R)[1] >= 0 or h(R)[0] <= 0:
        R *= 2.0
    a, b = -R, R
    for _ in range(400):
        m = 0.5 * (a + b)
        lo, hi = h(m)
        if lo > 0:
            b = m
        elif hi < 0:
            a = m
        else:
            return m
        if b - a <= 1e-16 * max(1.0, abs(m)):
            break
    return 0.5 * (a + b)


def solve_separable_inclusion(graphs, x, gamma, theta, sigma, q):
    return np.array([solve_scalar_inclusion(g, xi, gamma, theta, sigma, qi)
                     for g, xi, qi in zip(graphs, x, q)])


def solve_affine_inclusion(M, b, x, gamma, theta, sigma, q):
    """``x = y + gamma*(M(theta*y + q) + b + sigma*y)`` by a dense linear solve."""
    n = len(x)
    lhs = (1.0 + gamma * sigma) * np.eye(n) + gamma * theta * M
    return np.linalg.solve(lhs, x - gamma * (M @ q + b))


def affine_sum_resolvent(omega, a, c, q):
    """``J_{omega * sum_i a_i(. - c_i)}(q)`` for scalar weights ``a_i``."""
    a = np.asarray(a, dtype=float)
    num = np.asarray(q, dtype=float) + omega * sum(ai * np.asarray(ci) for ai, ci in zip(a, c))
    return num / (1.0 + omega * a.sum())


def monotone_matrix(rng, n, lo=0.2, hi=2.0, skew=1.0):
    """Random ``S + K`` with ``S`` symmetric positive definite and ``K`` skew."""
    Q = np.linalg.qr(rng.normal(size=(n, n)))[0]
    S = Q @ np.diag(rng.uniform(lo, hi, n)) @ Q.T
    G = rng.normal(size=(n, n))
    return S + skew * 0.5 * (G - G.T)


def random_zoo_case(rng, n, theta, sigma):
    """A random vector zoo operator and an oracle ``(x, gamma, q) -> y``."""
    kind = rng.choice(["zero", "identity", "shift", "weak_shift", "linear", "box", "nonneg", "l1"])
    if kind == "zero":
        return zero_operator(), lambda x, g, q: solve_separable_inclusion(
            [interval_affine(0.0, 0.0)] * n, x, g, theta, sigma, q)
    if kind == "identity":
        return identity_operator(), lambda x, g, q: solve_affine_inclusion(
            np.eye(n), np.zeros(n), x, g, theta, sigma, q)
    if kind in ("shift", "weak_shift"):
        # the weak case keeps theta*a + sigma > 0
        a = rng.uniform(0.1, 3.0) if kind == "shift" else -rng.uniform(0.05, 0.9) * sigma / theta
        c = rng.normal(size=n)
        return scaled_shift(a, c), lambda x, g, q: solve_separable_inclusion(
            [interval_affine(a, ci) for ci in c], x, g, theta, sigma, q)
    if kind == "linear":
        M, b = monotone_matrix(rng, n), rng.normal(size=n)
        return linear_operator(M, b), lambda x, g, q: solve_affine_inclusion(
            M, b, x, g, theta, sigma, q)
    if kind == "box":
        lo = rng.uniform(-2.0, 0.0)
        hi = lo + rng.uniform(0.1, 3.0)
        return box_normal_cone(lo, hi), lambda x, g, q: solve_separable_inclusion(
            [interval_box(lo, hi)] * n, x, g, theta, sigma, q)
    if kind == "nonneg":
        return nonneg_normal_cone(), lambda x, g, q: solve_separable_inclusion(
            [interval_box(0.0, INF)] * n, x, g, theta, sigma, q)
    w = rng.uniform(0.1, 2.0)
    return l1_subdifferential(w), lambda x, g, q: solve_separable_inclusion(
        [interval_l1(w)] * n, x, g, theta, sigma, q)
