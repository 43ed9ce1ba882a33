"""Acceptance criteria, one check per criterion.

Run ``python tests/test_acceptance.py`` for a plain pass/fail listing; under
pytest each criterion is a test and its verdict line is printed as it runs.
"""

import time
import warnings

import numpy as np
import pytest

from _oracles import affine_sum_resolvent, monotone_matrix, random_zoo_case
from resolvex import (Method, SolverConfig, StrengtheningParams, SumProblem,
                      resolvent_of_sum, strengthened_resolvent)
from resolvex.algorithms import (aamr, fb_stepsize_bound, fbf_stepsize_bound, ryu_base,
                                 solve_sagraal, solve_sdr, solve_sfb, solve_sfbf, solve_sryu)
from resolvex.bench import (gen_matrix_instance, gen_pde_instance, gen_rof_instance,
                            obstacle_active_set, plateau_iteration, rel_l2, run_matrix_bench,
                            run_pde_bench, run_rof_bench)
from resolvex.core import DivergenceError
from resolvex.zoo import (box_indicator, box_normal_cone, l1_norm, l1_subdifferential,
                          linear_operator, normal_cone, proj_ball, proj_box, quadratic,
                          scaled_shift, zero_operator)

CRITERIA = []


def criterion(number, title, budget_s):
    def wrap(fn):
        CRITERIA.append((number, title, budget_s, fn))
        return fn
    return wrap


def _rel(a, b):
    return float(np.linalg.norm(a - b) / np.linalg.norm(b))


# ------------------------------------------------------------------ 1
@criterion(1, "strengthened resolvent vs brute-force inclusion solver (500 cases, <=1e-8)", 10)
def ac_strengthening_oracle():
    rng = np.random.default_rng(101)
    worst = 0.0
    for _ in range(500):
        n = int(rng.integers(1, 6))
        theta, sigma = rng.uniform(0.1, 5.0), rng.uniform(0.01, 3.0)
        A, oracle = random_zoo_case(rng, n, theta, sigma)
        gamma = rng.uniform(0.1, 5.0)
        q, x = rng.normal(scale=2.0, size=n), rng.normal(scale=2.0, size=n)
        y = strengthened_resolvent(A, StrengtheningParams(theta, sigma, q), gamma, x)
        worst = max(worst, _rel(y, oracle(x, gamma, q)))
    return worst <= 1e-8, f"max rel err {worst:.2e}"


# ------------------------------------------------------------------ 2
@criterion(2, "resolvent_of_sum on 2 and 3 affine operators vs closed form (<=1e-8)", 30)
def ac_affine_closed_form():
    rng = np.random.default_rng(202)
    worst, count = 0.0, 0
    two_op = [Method.SFB, Method.SFBF, Method.SAGRAAL, Method.SDR, Method.SRYU]
    cfg = SolverConfig(stop_tol=1e-14, max_iters=200000)
    for i in range(100):
        for m_ops in (2, 3):
            n = int(rng.integers(1, 6))
            omega = rng.uniform(0.1, 5.0)
            a = rng.uniform(0.1, 3.0, m_ops)
            c = [rng.normal(size=n) for _ in range(m_ops)]
            q = rng.normal(scale=2.0, size=n)
            ops = [scaled_shift(ai, ci) for ai, ci in zip(a, c)]
            if m_ops == 2 and i % 2:
                ops[0] = quadratic(a[0], c[0])   # subdifferential route
            method = two_op[i % len(two_op)] if m_ops == 2 else Method.SRYU
            x, _ = resolvent_of_sum(SumProblem(ops, q, omega), method, cfg)
            worst = max(worst, _rel(x, affine_sum_resolvent(omega, a, c, q)))
            count += 1
    return worst <= 1e-8, f"{count} problems, max rel err {worst:.2e}"


# ------------------------------------------------------------------ 3
def _mixed_instance(rng):
    while True:
        n = int(rng.integers(2, 6))
        kind = ("affine", "box", "l1")[int(rng.integers(3))]
        if kind == "affine":
            a, c = rng.uniform(0.2, 2.0), rng.normal(size=n)
            A, g = scaled_shift(a, c), quadratic(a, c)
        elif kind == "box":
            A, g = box_normal_cone(-0.5, 0.7), box_indicator(-0.5, 0.7)
        else:
            w = rng.uniform(0.05, 0.5)
            A, g = l1_subdifferential(w), l1_norm(w)
        B = linear_operator(monotone_matrix(rng, n, 0.1, 1.5, 0.8), rng.normal(size=n))
        q = rng.normal(scale=2.0, size=n)
        omega = rng.uniform(0.3, 2.0)
        # reference for the non-degeneracy screen
        x, _ = solve_sdr(SumProblem([A, B], q, omega), SolverConfig(stop_tol=1e-12))
        if np.linalg.norm(x) > 0.1:
            return kind, A, g, B, q, omega


@criterion(3, "S-FB, S-FBF, S-DR, S-Ryu(B=0), S-aGRAAL agree pairwise (50 cases, <=1e-6 rel)", 120)
def ac_cross_method():
    rng = np.random.default_rng(303)
    worst = 0.0
    for _ in range(50):
        kind, A, g, B, q, omega = _mixed_instance(rng)
        cfg = SolverConfig(stop_tol=1e-13, max_iters=200000)
        prob = SumProblem([A, B], q, omega)
        s = 1.0 / (2.0 * omega)
        limits = [solve_sfb(prob, cfg)[0], solve_sfbf(prob, cfg)[0], solve_sdr(prob, cfg)[0],
                  solve_sryu(SumProblem([A, zero_operator(), B], q, omega),
                             SolverConfig(sigma=(s, 0.0, s), stop_tol=1e-13,
                                          max_iters=200000))[0],
                  solve_sagraal(g, B, q, cfg, omega=omega)[0]]
        for i in range(len(limits)):
            for j in range(i + 1, len(limits)):
                worst = max(worst, _rel(limits[i], limits[j]))
    return worst <= 1e-6, f"max pairwise rel diff {worst:.2e}"


# ------------------------------------------------------------------ 4
def _log_fit(residuals, floor=1e-12, burn_in=0.1):
    """Slope and correlation of log residual vs k above the roundoff floor.

    The first ``burn_in`` fraction of iterations is left out: the rate is an
    asymptotic property and fast modes die out during the first steps.
    """
    r = np.asarray(residuals)
    k = np.arange(r.size)
    keep = (r > floor) & (k >= int(burn_in * np.count_nonzero(r > floor)))
    k, logs = k[keep], np.log(r[keep])
    return np.polyfit(k, logs, 1)[0], np.corrcoef(k, logs)[0, 1]


@criterion(4, "R-linear rates inside the windows; 2x window violations diverge or slow down", 60)
def ac_rlinear():
    rng = np.random.default_rng(404)
    weakest, bad = 1.0, []
    for t in range(10):
        n = 4
        sym = lambda: monotone_matrix(rng, n, 0.2, 3.0, skew=0.0)
        A = linear_operator(sym(), rng.normal(size=n))
        B = linear_operator(sym(), rng.normal(size=n))
        prob = SumProblem([A, B], rng.normal(size=n), 1.0)
        for solver, bound in ((solve_sfb, fb_stepsize_bound), (solve_sfbf, fbf_stepsize_bound)):
            _, tr = solver(prob, SolverConfig(stop_tol=1e-13, max_iters=20000))
            slope, corr = _log_fit(tr.residuals)
            weakest = min(weakest, abs(corr))
            if not (slope < 0 and abs(corr) >= 0.999):
                bad.append(f"{solver.__name__}#{t} in-window slope={slope:.3g} corr={corr:.5f}")
            gamma = 2.0 * bound(B, 1.0, 0.5)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                try:
                    _, tr2 = solver(prob, SolverConfig(gamma=gamma, stop_tol=1e-13,
                                                       max_iters=20000), strict=False)
                except DivergenceError:
                    continue
            slope2, _ = _log_fit(tr2.residuals)
            if not slope2 > slope:
                bad.append(f"{solver.__name__}#{t} violated window not slower")
    return not bad, (f"weakest |corr| {weakest:.5f}" if not bad else "; ".join(bad[:3]))


# ------------------------------------------------------------------ 5
@criterion(5, "matrix nearness n=25, 20 seeds: S-Ryu beats Dykstra >=18/20, AAMR >=15/20", 120)
def ac_matrix():
    vs_d = vs_a = 0
    unconverged = []
    for seed in range(20):
        rep = run_matrix_bench(gen_matrix_instance(25, seed), beta=0.99, lam=1.0, tol=1e-5,
                               aamr_beta=0.99, aamr_kappa=0.95)
        m = rep["methods"]
        if not all(m[k]["converged"] for k in m):
            unconverged.append(seed)
            continue
        vs_d += m["sryu"]["iterations"] < m["dykstra"]["iterations"]
        vs_a += m["sryu"]["iterations"] < m["aamr"]["iterations"]
    ok = vs_d >= 18 and vs_a >= 15 and not unconverged
    return ok, f"fewer than Dykstra {vs_d}/20, fewer than AAMR {vs_a}/20, unconverged {unconverged}"


# ------------------------------------------------------------------ 6
@criterion(6, "ROF 64x64 eta=12: S-PD and S-Tseng objectives within 0.5%; S-PD iterates in [0,1]", 60)
def ac_rof():
    inst = gen_rof_instance(64, seed=0, noise_std=0.1, eta=12.0)
    outside = []

    def box_check(k, state):
        x = state["x"]
        if x.min() < 0.0 or x.max() > 1.0:
            outside.append(k)

    spd = run_rof_bench(inst, "SPD", iters=1000, callback=box_check)
    tseng = run_rof_bench(inst, "STSENG", iters=1000)
    gap = abs(spd["objective"] - tseng["objective"]) / tseng["objective"]
    ok = gap <= 5e-3 and not outside and spd["iterations"] == 1000
    return ok, (f"S-PD {spd['objective']:.4f} S-Tseng {tseng['objective']:.4f} gap {gap:.2%}, "
                f"iterates outside box: {len(outside)}")


# ------------------------------------------------------------------ 7
@criterion(7, "PDE 101x101: S-DR error <= 2x discretization error; gamma*sigma_A=0.125 plateaus first", 180)
def ac_pde():
    inst = gen_pde_instance(101, 101)
    ref = obstacle_active_set(inst.laplacian, inst.f)
    disc = rel_l2(ref, inst.v_exact)
    fast = run_pde_bench(inst, gamma=0.5, sigma_a=0.25, sigma_b=0.25, iters=5000,
                         stop_tol=1e-12, reference=ref)
    slow = run_pde_bench(inst, gamma=4.0, sigma_a=0.25, sigma_b=0.25, iters=2000,
                         stop_tol=1e-12, reference=ref)
    k_fast = plateau_iteration(fast["trace"].objectives, disc)
    k_slow = plateau_iteration(slow["trace"].objectives, disc)
    ok = (fast["converged"] and fast["error_v"] <= 2.0 * disc and k_fast is not None
          and (k_slow is None or k_fast < k_slow))
    return ok, (f"error {fast['error_v']:.4e} vs discretization {disc:.4e}; "
                f"plateau at k={k_fast} (0.125) vs k={k_slow} (1.0)")


# ------------------------------------------------------------------ 8
def _ryu_instance(rng, n, gamma):
    """Three operators with a known zero ``u`` and fixed point ``(u + gamma a, gamma b)``."""
    w = rng.uniform(0.2, 1.0)
    u = rng.normal(size=n)
    u[rng.random(n) < 0.4] = 0.0
    a = np.where(u != 0, w * np.sign(u), rng.uniform(-w, w, n))   # a in w d||u||_1
    M = monotone_matrix(rng, n, 0.0, 1.0, 1.0)
    b = rng.normal(size=n)
    B = linear_operator(M, b - M @ u)                               # B(u) = b
    ac = rng.uniform(0.5, 2.0)
    C = scaled_shift(ac, u + (a + b) / ac)                          # C(u) = -(a + b)
    return l1_subdifferential(w), B, C, u, (u + gamma * a, gamma * b)


@criterion(8, "Ryu base: Fejer slack >= -1e-12 at every step, residual below 1e-8 (lambda 0.5, 0.9)", 60)
def ac_fejer():
    rng = np.random.default_rng(808)
    min_slack, max_res, fails = np.inf, 0.0, []
    for lam in (0.5, 0.9):
        for t in range(20):
            n, gamma = int(rng.integers(2, 6)), rng.uniform(0.3, 2.0)
            A, B, C, u_star, z_star = _ryu_instance(rng, n, gamma)
            u, tr = ryu_base(A, B, C, gamma, lam, rng.normal(size=n), rng.normal(size=n),
                             max_iters=100000, stop_tol=1e-9, z_star=z_star)
            slack = min(tr.extras["fejer_slack"])
            res = tr.records[-1].residual
            min_slack, max_res = min(min_slack, slack), max(max_res, res)
            if slack < -1e-12 or not res < 1e-8 or np.linalg.norm(u - u_star) > 1e-7:
                fails.append((lam, t))
    return not fails, f"min slack {min_slack:.2e}, max final residual {max_res:.2e}, fails {fails}"


# ------------------------------------------------------------------ 9
@criterion(9, "mapped S-DR iterates equal direct AAMR over 100 iterations (<=1e-12)", 30)
def ac_aamr():
    rng = np.random.default_rng(909)
    worst, compared = 0.0, 0
    for _ in range(20):
        n = int(rng.integers(2, 8))
        lo = rng.uniform(-1.0, 0.0, n)
        hi = lo + rng.uniform(0.5, 2.0, n)
        center, radius = rng.normal(scale=0.5, size=n), rng.uniform(0.5, 2.0)
        A = normal_cone(lambda x, lo=lo, hi=hi: proj_box(lo, hi, x))
        B = normal_cone(lambda x, c=center, r=radius: proj_ball(x, r, c))
        q = rng.normal(scale=2.0, size=n)
        beta, gamma, lam = rng.uniform(0.5, 0.99), rng.uniform(0.5, 2.0), rng.uniform(0.1, 1.9)
        sig = (1.0 - beta) / (gamma * beta)
        x0 = rng.normal(size=n)
        xs = []
        cfg = SolverConfig(gamma=gamma, lam=lam, theta=1.0 / beta, sigma=(sig, sig),
                           max_iters=100, stop_tol=0.0)
        solve_sdr(SumProblem([A, B], q, gamma / (2.0 * (1.0 - beta))), cfg, x0,
                  callback=lambda k, st: xs.append(st["x"].copy()))
        _, tr = aamr(A, B, q, beta, lam / 2.0, gamma, y0=beta * (x0 - q), max_iters=100,
                     stop_tol=0.0)
        ys = tr.extras["y"][1:]
        if not len(xs) == len(ys) == 100:
            return False, f"iterate counts differ: {len(xs)} vs {len(ys)}"
        compared += len(xs)
        for x, y in zip(xs, ys):
            worst = max(worst, float(np.linalg.norm(beta * (x - q) - y)) / max(1.0, np.linalg.norm(y)))
    return worst <= 1e-12, f"{compared} iterate pairs, max mismatch {worst:.2e}"


def run_criterion(number):
    _, title, budget, fn = next(c for c in CRITERIA if c[0] == number)
    t0 = time.perf_counter()
    ok, detail = fn()
    elapsed = time.perf_counter() - t0
    ok = ok and elapsed < budget
    line = f"AC{number} {'PASS' if ok else 'FAIL'}: {title} | {detail} | {elapsed:.1f}s (< {budget}s)"
    return ok, line


@pytest.mark.parametrize("number", [c[0] for c in CRITERIA])
def test_acceptance(number, capsys):
    ok, line = run_criterion(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [run_criterion(c[0]) for c in CRITERIA]
    for _, line in results:
        print(line)
    raise SystemExit(0 if all(ok for ok, _ in results) else 1)
