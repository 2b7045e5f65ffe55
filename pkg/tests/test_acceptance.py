"""Acceptance suite: ten criteria at their stated tolerances and time budgets.

Run ``pytest tests/test_acceptance.py -v -s`` (or ``python tests/test_acceptance.py``)
to see one PASS/FAIL line per criterion.
"""

import math
import sys
import time

import numpy as np
import pytest

from dirichlet_spectra import (
    GridSpec,
    KernelSpec,
    assemble,
    ball_exhaustion,
    bottom_of_spectrum,
    bound_check,
    capacity_qp,
    confining_potential,
    domination_check,
    equilibrium_potential,
    fractional_graph,
    fractional_kernel,
    general_jump_graph,
    l1_bound_check,
    lattice_grid,
    lattice_path,
    make_perturbation,
    mc_hitting_laplace,
    mc_killed_semigroup,
    perturbed_bound_check,
    perturbed_persson,
    persson_sweep,
    random_graph,
    restrict,
    semigroup_matrix,
    spectrum_dense,
    tail_bound_profile,
    variational_chain,
)

SLACK = 1e-10
MC_SAMPLES = 100_000
TAIL_NS = [2**k for k in range(11)]
# collected for the pytest terminal summary (see conftest.py)
REPORT_LINES = []


def report(number, ok, detail, elapsed, budget=None):
    within = budget is None or elapsed < budget
    status = "PASS" if ok and within else "FAIL"
    limit = f" (budget {budget:.0f} s)" if budget else ""
    line = f"[criterion {number:2d}] {status}  {detail}  [{elapsed:.1f} s{limit}]"
    REPORT_LINES.append(line)
    print(line)
    return ok and within


def random_subset(rng, n, low=1, high=None):
    high = n if high is None else high
    size = int(rng.integers(low, high + 1))
    return sorted(rng.choice(n, size=size, replace=False).tolist())


def bound_instances(count=300, seed=20240601):
    """Random graphs with n <= 60, a proper nonempty B and a nonempty A."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(2, 61))
        g = random_graph(rng, n, density=float(rng.uniform(0.02, 0.3)))
        B = random_subset(rng, n, 1, max(1, n // 3))
        A = random_subset(rng, n)
        out.append((assemble(g), B, A))
    return out


def mc_instances(count, seed):
    """Small connected graphs with a target set and a start outside it."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        n = int(rng.integers(3, 13))
        g = random_graph(rng, n, density=0.3, kill_prob=0.3)
        B = random_subset(rng, n, 1, max(1, n // 3))
        x = int(rng.choice(np.setdiff1d(np.arange(n), B)))
        out.append((assemble(g), B, x))
    return out


def sigma_verdict(devs):
    """Deviation policy: none beyond 5 sigma, at most one of twenty beyond 3 sigma."""
    devs = np.asarray(devs)
    return bool(np.all(devs <= 5) and np.sum(devs > 3) <= 1), int(np.sum(devs > 3)), float(devs.max())


def z_score(est, exact):
    if est.std_error == 0:
        return 0.0 if abs(est.mean - exact) <= 1e-12 else math.inf
    return abs(est.mean - exact) / est.std_error


# ---------------------------------------------------------------------------


def criterion_1():
    t0 = time.perf_counter()
    worst = -math.inf
    checks = 0
    for fs, B, A in bound_instances():
        for t in (0.1, 1.0, 5.0):
            res = bound_check(fs, B, A, t, slack=SLACK)
            worst = max(worst, res.lhs - res.rhs_prob, res.rhs_prob - res.rhs_eq)
            checks += 1
            if not res.passed:
                return report(1, False, f"bound failed at t={t}", time.perf_counter() - t0, 60)
    canon = bound_check(assemble(lattice_path(2)), [1], [0], 1.0)
    ref = (0.4762, 0.7951, 1.1659)
    got = (canon.lhs, canon.rhs_prob, canon.rhs_eq)
    canon_ok = all(abs(g - r) < 1e-4 for g, r in zip(got, ref))
    detail = (f"{checks} checks, max(lhs-rhs) = {worst:.3e}; canonical "
              f"({got[0]:.6f}, {got[1]:.6f}, {got[2]:.6f})")
    return report(1, canon_ok, detail, time.perf_counter() - t0, 60)


def criterion_2():
    t0 = time.perf_counter()
    ok = True
    for fs, B, _ in bound_instances():
        for t in (0.1, 1.0, 5.0):
            prof = tail_bound_profile(fs, B, t, TAIL_NS)
            lhs = [p[0] for p in prof]
            ok &= all(p[0] <= p[1] + SLACK for p in prof)
            ok &= all(a >= b - SLACK for a, b in zip(lhs, lhs[1:]))
    return report(2, ok, "900 tail profiles over n in 1..1024", time.perf_counter() - t0, 60)


def criterion_3():
    t0 = time.perf_counter()
    devs = []
    qp_err = 0.0
    for i, (fs, B, x) in enumerate(mc_instances(20, 303)):
        eq = equilibrium_potential(fs, B)
        est = mc_hitting_laplace(fs, B, x, MC_SAMPLES, seed=1000 + i)
        devs.append(z_score(est, eq.e_B[x]))
        cap, v = capacity_qp(fs, B, return_minimizer=True)
        qp_err = max(qp_err, abs(eq.cap - cap) / eq.cap, float(np.max(np.abs(eq.e_B - v))))
    ok, n3, zmax = sigma_verdict(devs)
    ok &= qp_err <= 1e-8
    detail = f"20 MC instances, max |z| = {zmax:.2f}, beyond 3 sigma: {n3}; QP rel err {qp_err:.1e}"
    return report(3, ok, detail, time.perf_counter() - t0, 120)


def criterion_4():
    t0 = time.perf_counter()
    devs = []
    rng = np.random.default_rng(404)
    for i, (fs, B, x) in enumerate(mc_instances(20, 404)):
        t = float(rng.choice([0.3, 1.0, 2.0]))
        f = rng.uniform(-1, 1, fs.n)
        exact = (semigroup_matrix(restrict(fs, B), t) @ f)[x]
        est = mc_killed_semigroup(fs, B, f, x, t, MC_SAMPLES, seed=2000 + i)
        devs.append(z_score(est, exact))
    ok, n3, zmax = sigma_verdict(devs)
    detail = f"20 killed-semigroup instances, max |z| = {zmax:.2f}, beyond 3 sigma: {n3}"
    return report(4, ok, detail, time.perf_counter() - t0, 120)


def criterion_5():
    t0 = time.perf_counter()
    g = lattice_path(2001)
    fs = assemble(g)
    exhaustion = ball_exhaustion(g, 1000, range(201))
    sweep = persson_sweep(fs, exhaustion)
    ok = sweep.monotone_flag and sweep.lambda0 <= 1e-4
    methods = bottom_of_spectrum(restrict(fs, exhaustion[-1]).S).method
    detail = f"lambda0 = {sweep.lambda0:.3e}, monotone = {sweep.monotone_flag} ({methods})"
    return report(5, ok, detail, time.perf_counter() - t0, 30)


def criterion_6():
    t0 = time.perf_counter()
    g = confining_potential(lattice_path(2001), 1000, 2)
    sweep = persson_sweep(assemble(g), ball_exhaustion(g, 1000, range(21)))
    margins = [lam - M * M for M, lam in enumerate(sweep.ground_values)]
    ok = min(margins) >= 0 and sweep.monotone_flag
    detail = f"min(lambda_M - M^2) = {min(margins):.3f}, lambda_20 = {sweep.ground_values[-1]:.2f}"
    return report(6, ok, detail, time.perf_counter() - t0, 30)


def criterion_7():
    t0 = time.perf_counter()
    rng = np.random.default_rng(707)
    worst = -math.inf
    for _ in range(500):
        n = int(rng.integers(2, 31))
        fs = assemble(random_graph(rng, n, density=float(rng.uniform(0.05, 0.6))))
        B = random_subset(rng, n, 1, n - 1)
        full = spectrum_dense(fs.S).eigenvalues
        sub = spectrum_dense(restrict(fs, B).S).eigenvalues
        k = np.arange(sub.size)
        worst = max(worst, np.max(full[k] - sub), np.max(sub - full[k + len(B)]))
    g = lattice_grid((41, 41))
    center = 20 * 41 + 20
    exhaustion = ball_exhaustion(g, center, range(3, 16))
    B = [center, center + 1, center - 41]
    fs = assemble(g)
    direct = persson_sweep(fs, exhaustion).lambda0
    removed_first = persson_sweep(restrict(fs, B), exhaustion).lambda0
    shift = abs(direct - removed_first)
    ok = worst <= SLACK and shift <= 1e-8
    detail = f"500 pairs, worst interlacing excess {worst:.1e}; lambda0 shift after removal {shift:.1e}"
    return report(7, ok, detail, time.perf_counter() - t0, 60)


def criterion_8():
    t0 = time.perf_counter()
    rng = np.random.default_rng(808)
    spread = 0.0
    for _ in range(50):
        n = int(rng.integers(4, 41))
        g = random_graph(rng, n, density=float(rng.uniform(0.05, 0.5)))
        order = rng.permutation(n).tolist()
        sizes = sorted(set(rng.integers(0, n, size=4).tolist()))
        exhaustion = [order[:s] for s in sizes]
        vals = variational_chain(assemble(g), exhaustion)
        spread = max(spread, max(vals) - min(vals))
    return report(8, spread <= 1e-10, f"50 instances, max spread {spread:.1e}", time.perf_counter() - t0)


def criterion_9():
    t0 = time.perf_counter()
    rng = np.random.default_rng(909)
    worst = 0.0
    count = 0
    bound_ok = True
    while count < 200:
        n = int(rng.integers(2, 31))
        fs = assemble(random_graph(rng, n, density=0.3))
        minus = rng.uniform(0, 0.3, n) * (rng.random(n) < 0.5)
        pert = make_perturbation(fs, rng.uniform(0, 2, n), minus, alpha=1.0)
        if not pert.admissible_flag:
            continue
        B = random_subset(rng, n, 1, max(1, n // 3))
        A = random_subset(rng, n)
        t = float(rng.choice([0.1, 1.0, 5.0]))
        dom = domination_check(fs, B, pert, rng.normal(size=n), t)
        worst = max(worst, dom.max_violation)
        bound_ok &= perturbed_bound_check(fs, B, A, pert, t).passed
        count += 1
    two = assemble(lattice_path(2))
    shift = make_perturbation(two, minus=[0.1, 0.1], alpha=1.0)
    l1_err = max(abs(l1_bound_check(two, shift, t) - math.exp(0.1 * t)) for t in (0.5, 1.0, 2.0))
    base = lattice_path(2001)
    plus = confining_potential(base, 1000, 2).kill
    fs = assemble(base)
    sweep = perturbed_persson(fs, make_perturbation(fs, plus=plus), ball_exhaustion(base, 1000, range(21)))
    diverges = all(lam >= M * M for M, lam in enumerate(sweep.ground_values)) and sweep.monotone_flag
    ok = worst <= SLACK and bound_ok and l1_err <= 1e-10 and diverges
    detail = (f"domination worst {worst:.1e}, perturbed bound ok = {bound_ok}, "
              f"l1 err {l1_err:.1e}, confining divergence = {diverges}")
    return report(9, ok, detail, time.perf_counter() - t0, 90)


def criterion_10():
    t0 = time.perf_counter()
    identical = True
    for dim, side, alpha, h in [(1, 9, 1.0, 0.125), (1, 17, 0.4, 1 / 16), (2, 5, 1.5, 0.25), (3, 3, 0.9, 0.5)]:
        grid = GridSpec(dim, (side,) * dim, h)
        spec = KernelSpec(alpha, 1.0, fractional_kernel(dim, alpha))
        identical &= fractional_graph(grid, alpha) == general_jump_graph(grid, spec)
    # ambient grid on [-0.5, 1.5]; boxes are nested intervals ending at [0, 1]
    h = 0.01
    n = 201
    fs = assemble(fractional_graph(GridSpec(1, (n,), h, origin=(-0.5,)), 1.0))
    coords = -0.5 + h * np.arange(n)
    values = []
    for half in (0.1, 0.2, 0.3, 0.4, 0.5):
        inside = np.abs(coords - 0.5) <= half + 1e-9
        rs = restrict(fs, np.flatnonzero(~inside).tolist())
        values.append(spectrum_dense(rs.S).eigenvalues[0])
    decreasing = all(b <= a + SLACK for a, b in zip(values, values[1:]))
    detail = f"bitwise equal = {identical}; ground values {', '.join(f'{v:.4f}' for v in values)}"
    return report(10, identical and decreasing, detail, time.perf_counter() - t0)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_acceptance(criterion):
    assert criterion()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
    sys.exit(0 if all(results) else 1)
