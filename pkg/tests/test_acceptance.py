"""Acceptance suite: ten criteria at their stated tolerances and runtime budgets.

Run with pytest (a per-criterion table is printed in the terminal summary)
or directly as ``python3 tests/test_acceptance.py``.
"""
import hashlib
import os
import sys
import time
from fractions import Fraction
from math import comb

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

import oracles  # noqa: E402
from fraccut import fixtures as fx  # noqa: E402
from fraccut import io  # noqa: E402
from fraccut.balanced import NotFound, find_balanced_hyperplane, verify_witness  # noqa: E402
from fraccut.sandwich import (Charge, ContinuationConfig, choose_order, epsilon_not_permuted_probe,  # noqa: E402
                              find_charge_bisection, find_equal_fraction_halfspace)
from fraccut.window import (GVConfig, build_interval_counterexample, convex_window, extract_convex_cell,  # noqa: E402
                            find_interval_window, gv_equipartition, midpoint_probe,
                            verify_interval_counterexample)

pytestmark = pytest.mark.acceptance

RESULTS = {}  # criterion -> (ok, seconds, budget, detail)
DIGESTS = {}  # criterion -> sha256 of every emitted output, in order


class Log:
    """Collects failures and a digest of the outputs of one suite."""

    def __init__(self):
        self.h = hashlib.sha256()
        self.failures = []

    def out(self, text):
        self.h.update(text.encode())

    def check(self, cond, what):
        if not cond:
            self.failures.append(what)

    @property
    def digest(self):
        return self.h.hexdigest()


# --- the suites ---------------------------------------------------------------------------------------

def ac1(log):
    for seed in range(200):
        n = 2 + seed % 5
        s = fx.bereg_kano(n, seed)
        w = find_balanced_hyperplane(s)
        log.check(not isinstance(w, NotFound) and verify_witness(s, w), f"bereg-kano n={n} seed={seed}")
        log.out(io.format_witness(w) if not isinstance(w, NotFound) else io.format_not_found(w))
    return "200 instances"


def ac2(log):
    for seed in range(200):
        d, n = 2 + seed % 2, 2 + (seed // 2) % 4
        s = fx.hull_inside_points(d, n, seed)
        w = find_balanced_hyperplane(s)
        log.check(not isinstance(w, NotFound) and verify_witness(s, w), f"hull-inside d={d} n={n} seed={seed}")
        log.out(io.format_witness(w) if not isinstance(w, NotFound) else io.format_not_found(w))
    return "200 instances"


def ac3(log):
    counts = []
    for n in range(2, 6):
        s = fx.triangle_rays_points(n, 0)
        N = len(s.points)
        r = find_balanced_hyperplane(s)
        expected = 2 * sum(comb(N - 1, i) for i in range(3))
        log.check(isinstance(r, NotFound), f"three-rays n={n} returned a witness")
        if isinstance(r, NotFound):
            log.check(r.subsets_inspected == expected, f"n={n}: {r.subsets_inspected} != {expected}")
            counts.append(r.subsets_inspected)
            log.out(io.format_not_found(r))
    return f"subsets inspected {counts}"


def ac4(log):
    worst = 0.0
    for seed in range(100):
        charges = [Charge(fx.random_charge(2 * seed, size=16)), Charge(fx.random_charge(2 * seed + 1, size=16))]
        u, H = find_charge_bisection(charges)
        for k, c in enumerate(charges):
            half = oracles.halfplane_mass_shapely(c.grid, *u.u, refine=2)
            err = abs(half - c.total / 2) / c.total_variation
            worst = max(worst, err)
            log.check(err <= 1e-6, f"seed={seed} charge {k}: relative error {err:.2e}")
        log.out(io.format_halfspace(H))
    return f"worst |rho(H) - rho/2| / TV = {worst:.2e}"


def ac5(log):
    eps = 0.05
    cfg = ContinuationConfig(epsilon=eps)
    worst_spread = worst_eq2 = 0.0
    for seed in range(100):
        grids, _ = fx.remark13_triple(seed)
        rep = epsilon_not_permuted_probe(grids, eps, budget=20_000)
        order = choose_order(rep, 2)
        try:
            r = find_equal_fraction_halfspace(grids, cfg, order=order)
        except Exception as exc:  # any solver failure is a failed instance
            log.check(False, f"seed={seed}: {type(exc).__name__}: {exc}")
            continue
        fr = [oracles.halfplane_mass_shapely(g, *r.u.u, refine=2) / float(g.total) for g in grids]
        spread = max(fr) - min(fr)
        t = float(np.mean(fr))
        worst_spread = max(worst_spread, spread)
        log.check(spread <= 1e-4, f"seed={seed}: fraction spread {spread:.2e}")
        log.check(eps - 1e-4 <= t <= 0.5 + 1e-4, f"seed={seed}: common fraction {t}")
        solver = [grids[o] for o in order]
        for step in r.steps:
            mu = [oracles.halfplane_mass_shapely(g, *step.u, refine=1) / float(g.total) for g in solver]
            eq2 = max(abs(mu[i - 1] - (1 + step.s) * mu[i] + step.s / 2) for i in range(1, len(mu)))
            worst_eq2 = max(worst_eq2, eq2)
            log.check(eq2 <= 1e-8, f"seed={seed} s={step.s:.2e}: eq2 residual {eq2:.2e}")
        log.out(io.format_fraction_cut(r.u.u, r.fractions, r.common_fraction, r.residual))
    return f"worst spread {worst_spread:.2e}, worst eq2 {worst_eq2:.2e}"


def _exact_fraction(g, a, b):
    h, vals = g.spacing[0], list(g.values)
    total = oracles.step_cdf_exact(g.origin[0], h, vals, g.origin[0] + h * len(vals))
    return (oracles.step_cdf_exact(g.origin[0], h, vals, b) - oracles.step_cdf_exact(g.origin[0], h, vals, a)) / total


def ac6(log):
    for seed in range(100):
        m = 2 + seed % 5
        rng = np.random.default_rng(seed)
        m0, m1 = fx.random_rational_density(rng), fx.random_rational_density(rng)
        w = find_interval_window(m0, m1, Fraction(1, m))
        for k, g in enumerate((m0, m1)):
            f = _exact_fraction(g, w.a, w.b)
            log.check(f == Fraction(1, m), f"seed={seed} m={m} measure {k}: {f}")
        log.out(io.format_interval(w))
    return "all fractions exactly 1/m"


def ac7(log):
    for n in range(2, 6):
        lo, hi = Fraction(1, n + 1), Fraction(1, n)
        for k in (1, 2, 3):
            alpha = lo + (hi - lo) * Fraction(k, 4)
            m0, m1 = build_interval_counterexample(n, alpha, (alpha - lo) / 2)
            rep = verify_interval_counterexample(m0, m1, alpha)
            log.check(rep.impossible, f"n={n} alpha={alpha}: not impossible")
            log.check(rep.min_m1_over_family >= Fraction(1, n), f"n={n} alpha={alpha}: min {rep.min_m1_over_family}")
            # independent spot check: m0 is uniform on [0, 1], so its alpha-intervals are [a, a + alpha]
            for j in range(101):
                a = (1 - alpha) * Fraction(j, 100)
                log.check(_exact_fraction(m1, a, a + alpha) >= Fraction(1, n), f"n={n} alpha={alpha} a={a}")
            log.out(f"{n} {alpha} {rep.min_m1_over_family}\n")
    return "12 (n, alpha) pairs"


def ac8(log):
    worst = 0.0
    for seed in range(20):
        grids = fx.random_measures(seed)
        for m in (2, 3):
            try:
                p = gv_equipartition(grids, m, GVConfig(seed=seed))
            except Exception as exc:
                log.check(False, f"seed={seed} m={m}: {type(exc).__name__}: {exc}")
                continue
            F = oracles.hard_cell_fractions(grids, p.matrix(), k=8)
            res = float(np.max(np.abs(F - 1 / m)))
            worst = max(worst, res)
            log.check(res <= 1e-3, f"seed={seed} m={m}: residual {res:.2e}")
            cell = extract_convex_cell(p)
            log.check(all(c.kind in ("halfplane", "disk") and c.q >= 0 for c in cell.constraints),
                      f"seed={seed} m={m}: unclassified constraint")
            pts = np.random.default_rng(seed).uniform(-0.25, 1.25, size=(20_000, 2))
            bad = midpoint_probe(cell, pts, pairs=10_000, seed=seed)
            log.check(bad == 0, f"seed={seed} m={m}: {bad} midpoints left the cell")
            log.out(io.format_partition(p))
    return f"worst residual {worst:.2e}"


def ac9(log):
    worst = 0.0
    for seed in range(10):
        grids = fx.random_measures(seed)
        for m in (4, 6):
            try:
                w = convex_window(grids, m, GVConfig(seed=seed))
            except Exception as exc:
                log.check(False, f"seed={seed} m={m}: {type(exc).__name__}: {exc}")
                continue
            for k, g in enumerate(grids):
                pts, wt = g.cell_centers(8), g.sample_weights(8)
                inside = np.ones(len(pts), dtype=bool)
                for c in w.cells:
                    inside &= c.contains(pts)
                err = abs(float(wt[inside].sum() / wt.sum()) - 1 / m)
                worst = max(worst, err)
                log.check(err <= 2e-3, f"seed={seed} m={m} measure {k}: error {err:.2e}")
            log.out(io.format_window(w))
    return f"worst error {worst:.2e}"


SUITES = {
    "AC1 balanced existence, bereg-kano": (ac1, 60),
    "AC2 balanced existence, hull-inside": (ac2, 120),
    "AC3 certified negative, three rays": (ac3, 30),
    "AC4 charge bisection": (ac4, 120),
    "AC5 fraction cut, remark family": (ac5, 600),
    "AC6 1D window, positive": (ac6, 30),
    "AC7 1D counterexample": (ac7, 30),
    "AC8 GV equipartition m=2,3": (ac8, 1200),
    "AC9 composite m convex window": (ac9, 1800),
}
RANDOMIZED = [k for k in SUITES if not k.startswith(("AC3", "AC7"))]


def run_suite(name):
    fn, budget = SUITES[name]
    log = Log()
    t0 = time.perf_counter()
    detail = fn(log)
    dt = time.perf_counter() - t0
    ok = not log.failures and dt <= budget
    if log.failures:
        detail = f"{len(log.failures)} failures, first: {log.failures[0]}"
    elif dt > budget:
        detail = f"{detail}; over the {budget} s budget"
    DIGESTS.setdefault(name, log.digest)
    RESULTS[name] = (ok, dt, budget, detail)
    return ok, log.digest


def run_determinism():
    t0 = time.perf_counter()
    mismatched = []
    for name in RANDOMIZED:
        if name not in DIGESTS:
            run_suite(name)
        first = DIGESTS[name]
        fn, _ = SUITES[name]
        log = Log()
        fn(log)
        if log.digest != first:
            mismatched.append(name.split()[0])
    ok = not mismatched
    detail = f"{len(RANDOMIZED)} suites byte-identical" if ok else f"outputs differ: {mismatched}"
    RESULTS["AC10 determinism"] = (ok, time.perf_counter() - t0, None, detail)
    return ok


def summary_lines():
    lines = []
    for name, (ok, dt, budget, detail) in RESULTS.items():
        lim = f"/{budget}s" if budget else ""
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name:<40} {dt:8.1f}s{lim:<7} {detail}")
    return lines


# --- pytest entry points ----------------------------------------------------------------------------

@pytest.mark.parametrize("name", list(SUITES))
def test_criterion(name):
    ok, _ = run_suite(name)
    assert ok, RESULTS[name][3]


def test_ac10_determinism():
    assert run_determinism(), RESULTS["AC10 determinism"][3]


if __name__ == "__main__":
    for name in SUITES:
        run_suite(name)
        print(summary_lines()[-1], flush=True)
    run_determinism()
    print(summary_lines()[-1])
    sys.exit(0 if all(r[0] for r in RESULTS.values()) else 1)
