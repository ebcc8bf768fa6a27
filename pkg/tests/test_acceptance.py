"""Acceptance checks AC1-AC12 at their stated tolerances.

Run alone with ``python3 tests/test_acceptance.py``; a PASS/FAIL line per
criterion is printed at the end of the pytest session.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from chromvar.analytic import (ScalePoint, alpha0, asymptotic_record, chi_estimate,
                               chi_estimate_derivative)
from chromvar.coupling import (coupling_chain_experiment, exact_dist_check, mu_exact,
                               planted_counts, var_Xa_exact)
from chromvar.experiments import SIMULATE_COLUMNS
from chromvar.graphs import all_graphs, brute_force_count_colourings
from chromvar.predict import g0_formula, theorem_bounds, w_n, w_tilde
from chromvar.profile import (dL0_dk_at_rho, exact_E, hatL0, k_star_closed_form,
                              k_star_derivative, k_t_exact, partials, solve_k_star,
                              solve_lagrange, tL0)
from chromvar.cli import main

from oracles import grid_entropy_max

HALF = Fraction(1, 2)


def ac(n, title):
    return pytest.mark.criterion(f"AC{n}", title)


@ac(1, "exact_E equals the all-graph average of brute-force counts, n <= 5")
def test_ac1_exact_oracle():
    start = time.perf_counter()
    for n in range(1, 6):
        graphs = list(all_graphs(n))
        for t in range(1, n + 1):
            for k in range(-(-n // t), n + 1):
                avg = Fraction(sum(brute_force_count_colourings(g, k, t) for g in graphs), len(graphs))
                assert exact_E(n, k, t).value == avg, (n, k, t)
    assert time.perf_counter() - start < 60


@ac(2, "k_2(4) = 3 and k_2(3) = 2")
def test_ac2_k_t():
    start = time.perf_counter()
    assert k_t_exact(4, 2) == 3
    assert k_t_exact(3, 2) == 2
    assert time.perf_counter() - start < 1


@ac(3, "Lagrange optimum matches a 1e-4 simplex grid")
@pytest.mark.parametrize("t,rho", [(3, 1.5), (3, 2.0), (4, 2.5)])
def test_ac3_lagrange_vs_grid(t, rho):
    start = time.perf_counter()
    s = solve_lagrange(rho, t)
    i = np.arange(1, t + 1)
    assert abs(s.p.sum() - 1) <= 1e-10
    assert abs(i @ s.p - rho) <= 1e-10
    assert abs(-(s.x + rho * s.y) - grid_entropy_max(rho, t, 1e-4)) <= 1e-6
    assert time.perf_counter() - start < 60


@ac(4, "dx/drho + rho dy/drho = 0 at 30 random (rho, t)")
def test_ac4_envelope_identity():
    rng = np.random.default_rng(4)
    for _ in range(30):
        t = int(rng.integers(3, 61))
        rho = float(rng.uniform(1.05, t - 0.05))
        h = 1e-5 * rho
        up, dn = solve_lagrange(rho + h, t), solve_lagrange(rho - h, t)
        xp, yp = (up.x - dn.x) / (2 * h), (up.y - dn.y) / (2 * h)
        assert abs(xp + rho * yp) <= 1e-6 * (abs(xp) + rho * abs(yp) + 1), (rho, t)


@ac(5, "closed-form partials of the relaxed objectives match finite differences")
def test_ac5_partials():
    rng = np.random.default_rng(5)

    def cd(f, v, h):
        return (f(v + h) - f(v - h)) / (2 * h)

    for _ in range(20):
        t = int(rng.integers(3, 40))
        n = float(10 ** rng.uniform(2, 12))
        rho = float(rng.uniform(1.1, t - 0.1))
        k = n / rho
        p = partials(n, k, t)
        fd = [cd(lambda r: tL0(r, k, t), rho, 1e-5 * rho),
              cd(lambda kk: tL0(rho, kk, t), k, 1e-5 * k),
              cd(lambda nn: hatL0(nn, k, t), n, 1e-6 * n),
              cd(lambda kk: hatL0(n, kk, t), k, 1e-6 * k)]
        exact = [p.dtL0_drho, p.dtL0_dk, p.dhatL0_dn, p.dhatL0_dk]
        for f, e in zip(fd, exact):
            assert abs(f - e) <= 1e-6 * abs(e), (n, k, t)


@ac(6, "k* residual, closed form and derivative")
def test_ac6_k_star():
    r6 = solve_k_star(10**6)
    assert r6.residual <= 1e-9
    assert abs(r6.n_over_k - k_star_closed_form(10**6)) <= 0.5
    s30 = ScalePoint.of(10**30)
    r30 = solve_k_star(s30)
    assert r30.residual <= 1e-9
    assert abs(r30.n_over_k - k_star_closed_form(s30)) <= 0.1
    n = 1e6
    h = n * 1e-5
    fd = (solve_k_star(n + h).k_star - solve_k_star(n - h).k_star) / (2 * h)
    assert abs(fd - k_star_derivative(n)) <= 1e-3 * abs(fd)


@ac(7, "size-bias identity over all labelled graphs, n <= 5")
def test_ac7_size_bias():
    start = time.perf_counter()
    for p in (Fraction(1, 4), HALF):
        for a in (2, 3):
            for n in range(a, 6):
                assert exact_dist_check(n, a, p).max_abs <= 1e-12, (n, a, p)
    assert time.perf_counter() - start < 120


@ac(8, "exact variance and planted moment identity")
def test_ac8_variance_and_planted_mean():
    assert var_Xa_exact(3, 2, HALF) == Fraction(3, 4)
    n, a, trials = 20, 4, 100_000
    x = planted_counts(n, a, 0.5, trials, 8).astype(float)
    mu = mu_exact(n, a, HALF)
    target = float((var_Xa_exact(n, a, HALF) + mu * mu) / mu)
    se = x.std(ddof=1) / math.sqrt(trials)
    assert abs(x.mean() - target) <= 4 * se


@ac(9, "chain coupling monotone in every trial; r = 0 control TV within 3 sigma of 0")
def test_ac9_chain():
    start = time.perf_counter()
    st = coupling_chain_experiment(45, 7, 2, 0.5, 500, seed=9)
    assert st.invalid == 0
    assert st.monotone_fraction == 1.0
    assert st.budget == pytest.approx(0.215, abs=5e-4)
    ctl = coupling_chain_experiment(45, 7, 0, 0.5, 500, seed=10)
    assert ctl.invalid == 0
    # sigma: RMS of the TV statistic under its permutation null (both samples from one law)
    assert ctl.tv <= 3 * ctl.tv_null_rms
    assert time.perf_counter() - start < 30 * 60


@ac(10, "log-only asymptotic regime checks")
def test_ac10_asymptotics():
    start = time.perf_counter()
    for e, tol in ((1000, 0.02), (4000, 0.005)):
        rec = asymptotic_record(ScalePoint.pow10(e))
        assert abs(rec.rho_hat - (rec.alpha0 - rec.alpha)) <= tol
    for e in np.linspace(10, 1000, 400):
        s = ScalePoint.pow10(e)
        rec = asymptotic_record(s)
        a, rh = rec.alpha, rec.rho_hat
        assert abs(chi_estimate_derivative(s) - (1 / a + (1 - rh) / a**2)) * s.log_n**3 <= 50
    for e in np.linspace(6, 100, 200):
        s = ScalePoint.pow10(e)
        r = solve_k_star(s)
        d = dL0_dk_at_rho(s.log_n, r.rho, r.beta)
        assert abs(d - 2 / math.log(2) * s.log_n**2) / (s.log_n * math.log(s.log_n)) <= 20
    assert time.perf_counter() - start < 60


@ac(11, "numeric spot values")
def test_ac11_spot_values():
    assert abs(w_n(1e6) - 0.996) <= 0.01
    assert abs(w_tilde(1e6) - 0.319) <= 0.005
    assert abs(theorem_bounds(1e6, eps=0.1, mu_alpha=1e4).nstar - 0.0557) <= 0.001
    assert abs(g0_formula(1e4, 1.0, 1e6) - 0.2384) <= 0.002


@ac(12, "desk-scale simulation band and byte-identical rerun")
def test_ac12_simulate(tmp_path):
    start = time.perf_counter()
    args = ["simulate", "--n", "30", "40", "--trials", "200", "--p", "0.5", "--seed", "12"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    first = (tmp_path / "a" / "simulate.csv").read_bytes()
    assert first == (tmp_path / "b" / "simulate.csv").read_bytes()
    lines = first.decode("utf-8").splitlines()
    assert lines[0].split(",") == SIMULATE_COLUMNS
    for line in lines[1:]:
        row = dict(zip(SIMULATE_COLUMNS, line.split(",")))
        n = int(row["n"])
        mean = float(row["chi_mean"])
        assert n / alpha0(n) <= mean <= 1.3 * chi_estimate(n)
        assert float(row["chi_var"]) > 0
        assert int(row["invalid_trials"]) == 0
    assert time.perf_counter() - start < 30 * 60


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-v", "-p", "no:cacheprovider"]))
