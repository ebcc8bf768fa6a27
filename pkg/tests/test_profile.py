import math
from fractions import Fraction

import numpy as np
import pytest

from chromvar.analytic import DomainError, ScalePoint, SizeError, alpha0, log_mu
from chromvar.profile import (L0, L_profile, NoSignChange, dL0_dk_at_rho, exact_E, hatL0,
                              hatL0_approx, k_star_closed_form, k_star_derivative, k_t_exact,
                              log_d, partials, profile_objective, profiles, solve_k_star,
                              solve_lagrange, tL0, y_calibration)

from oracles import grid_entropy_max, integer_profiles


def test_log_d_examples():
    assert log_d(1) == 0.0
    assert log_d(3) == pytest.approx(math.log(48), rel=1e-13)
    assert log_d(4) == pytest.approx(math.log(1536), rel=1e-13)
    for i in range(1, 30):
        assert log_d(i) == pytest.approx(math.log(2 ** math.comb(i, 2) * math.factorial(i)), rel=1e-13)


def test_lagrange_t2_closed_form():
    s = solve_lagrange(1.5, 2)
    assert s.p == pytest.approx([0.5, 0.5], abs=1e-12)
    assert s.y == pytest.approx(math.log(4), abs=1e-12)
    assert s.x == pytest.approx(-math.log(8), abs=1e-12)
    assert s.converged


def test_lagrange_y_zero_point():
    rho = (1 + 2 / 4 + 3 / 48) / (1 + 1 / 4 + 1 / 48)
    assert rho == pytest.approx(1.22951, abs=1e-5)
    s = solve_lagrange(rho, 3)
    assert s.y == pytest.approx(0.0, abs=1e-9)
    assert s.x == pytest.approx(-math.log(1 + 1 / 4 + 1 / 48), abs=1e-9)


@pytest.mark.parametrize("rho,t", [(1.01, 5), (4.99, 5), (30.0, 60), (399.0, 400), (1.5, 400)])
def test_lagrange_invariants(rho, t):
    s = solve_lagrange(rho, t)
    i = np.arange(1, t + 1)
    assert np.all(np.isfinite(s.log_p))
    assert abs(s.p.sum() - 1) <= 1e-10
    assert abs(i @ s.p - rho) <= 1e-10
    assert s.converged
    ld = np.array([log_d(k) for k in i])
    # log p_i = x + i*y - log d_i; each term can be ~1e5 so compare relative to that size
    scale = 1.0 + np.abs(i * s.y) + ld
    assert np.all(np.abs(s.log_p - (s.x + i * s.y - ld)) <= 1e-12 * scale)


def test_lagrange_domain():
    with pytest.raises(DomainError):
        solve_lagrange(1.0, 3)
    with pytest.raises(DomainError):
        solve_lagrange(3.0, 3)


def test_lagrange_matches_grid_t3():
    s = solve_lagrange(2.0, 3)
    assert -(s.x + 2.0 * s.y) == pytest.approx(grid_entropy_max(2.0, 3), abs=1e-6)


def test_tL0_examples():
    assert tL0(1.5, 10, 2) == pytest.approx(1.5 * math.log(15) - math.log(10) - 0.5, abs=1e-12)
    assert tL0(1.5, 10, 2) == pytest.approx(1.2595, abs=1e-3)


def test_tL0_k_shift():
    for rho, t in [(1.7, 3), (4.2, 9)]:
        d = tL0(rho, 7.0, t) - tL0(rho, 300.0, t)
        assert d == pytest.approx((rho - 1) * (math.log(7) - math.log(300)), abs=1e-11)


def test_tL0_matches_grid_sup():
    rho, k, t = 2.0, 5.0, 3
    const = rho * math.log(rho * k) - math.log(k) - rho + 1
    assert tL0(rho, k, t) == pytest.approx(const + grid_entropy_max(rho, t), abs=1e-5)


def test_tL0_dominates_feasible_profiles():
    rng = np.random.default_rng(0)
    rho, k, t = 2.3, 4.0, 4
    top = tL0(rho, k, t)
    for _ in range(200):
        # random feasible p: solve the two constraints for p1, p2 given p3, p4
        p3, p4 = rng.uniform(0, 0.4, 2)
        p2 = rho - 1 - 2 * p3 - 3 * p4
        p1 = 1 - p2 - p3 - p4
        if p1 < 0 or p2 < 0:
            continue
        assert profile_objective([p1, p2, p3, p4], rho, k, t) <= top + 1e-12


def test_L0_examples():
    assert L0(15, 10, 2) == pytest.approx(12.595, abs=1e-2)
    assert hatL0(15, 10, 2) * 10 == L0(15, 10, 2)
    with pytest.raises(DomainError):
        L0(10, 10, 3)


def test_L0_dominates_integer_profiles():
    n, k, t = 12, 5, 3
    best = max(L_profile(c) for c in integer_profiles(n, k, t))
    assert L0(n, k, t) >= best
    assert sorted(profiles(n, k, t)) == sorted(integer_profiles(n, k, t))


def test_L0_dominance_all_small():
    for n in range(3, 13):
        for t in range(2, 5):
            for k in range(-(-n // t) + 1, n):
                if not 1 < n / k < t:
                    continue
                ps = profiles(n, k, t)
                if ps:
                    assert L0(n, k, t) >= max(L_profile(c) for c in ps) - 1e-9


def test_small_n_consistency():
    # exp(best L_pi) and E_{n,k,t} agree up to the profile-count factor (n+1)^t
    for n in range(4, 13):
        for t in (2, 3):
            for k in range(-(-n // t), n + 1):
                ps = profiles(n, k, t)
                if not ps:
                    continue
                best = max(L_profile(c) for c in ps)
                e = exact_E(n, k, t).log_value
                assert abs(best - e) <= t * math.log(n + 1) + 1e-9


def test_partials_examples():
    p = partials(15, 10, 2)
    assert p.dtL0_dk == pytest.approx(0.05)
    assert p.dtL0_drho == pytest.approx(math.log(15) - math.log(4), abs=1e-12)
    assert p.dtL0_drho == pytest.approx(1.3218, abs=1e-4)


def test_exact_E_examples():
    assert exact_E(4, 2, 2).value == Fraction(3, 4)
    assert exact_E(4, 3, 2).value == 3
    assert exact_E(3, 2, 2).value == Fraction(3, 2)
    e = exact_E(7, 4, 3)
    assert e.log_value == pytest.approx(math.log(float(e.value)), abs=1e-12)


def test_exact_E_size_cap():
    with pytest.raises(SizeError):
        exact_E(15, 5, 3)


def test_k_t_exact_examples():
    assert k_t_exact(4, 2) == 3
    assert k_t_exact(3, 2) == 2
    for n in range(1, 10):
        assert k_t_exact(n, 1) == n


def test_k_t_exact_is_first_k_with_E_at_least_one():
    for n in range(2, 10):
        for t in range(1, n + 1):
            ks = [k for k in range(-(-n // t), n + 1) if exact_E(n, k, t).value >= 1]
            assert k_t_exact(n, t) == ks[0]


def test_E_not_monotone_near_k_equals_n():
    # n-1 classes: one pair plus singletons, C(n,2) ways each surviving w.p. 1/2
    for n in range(3, 9):
        assert exact_E(n, n - 1, 2).value == Fraction(n * (n - 1), 4)
        assert exact_E(n, n, 2).value == 1


def test_k_star_examples():
    r = solve_k_star(10**6)
    assert r.residual <= 1e-9
    assert abs(r.rho - k_star_closed_form(10**6)) <= 0.5
    lo, hi = r.bracket
    assert lo <= r.k_star <= hi
    assert 2 < r.n_over_k < r.beta
    beta = r.beta
    k = r.k_star
    a, b = hatL0(1e6, k * (1 - 1e-6), beta), hatL0(1e6, k * (1 + 1e-6), beta)
    assert a < 0 < b


def test_k_star_log_only():
    s = ScalePoint(30 * math.log(10))
    assert s.log_only
    r = solve_k_star(s)
    assert r.k_star is None
    assert abs(r.rho - k_star_closed_form(s)) <= 0.1


def test_k_star_beta_alpha_minus_two():
    r = solve_k_star(1e9, math.floor(alpha0(1e9)) - 2)
    assert r.residual <= 1e-9


def test_k_star_no_sign_change():
    with pytest.raises(NoSignChange) as exc:
        solve_k_star(10**6, 8)
    assert len(exc.value.scan) == 64


def test_k_star_derivative():
    n = 1e6
    r = solve_k_star(n)
    assert abs(r.reciprocal - (r.rho + 2 / math.log(2))) <= 10 / math.log(n)
    h = n * 1e-5
    fd = (solve_k_star(n + h).k_star - solve_k_star(n - h).k_star) / (2 * h)
    assert fd == pytest.approx(k_star_derivative(n), rel=1e-3)
    for e in (4, 8, 20, 60):
        assert solve_k_star(ScalePoint.pow10(e)).derivative > 0


def test_hatL0_increasing_in_k_near_k_star():
    for n in (1e4, 1e7, 1e12):
        r = solve_k_star(n)
        # positive slope holds on the part of the bracket near k*, not near n/2
        ks = n / np.linspace(0.6 * r.beta, r.beta - 0.01, 64)
        assert ks.min() <= r.k_star <= ks.max()
        for k in ks:
            h = k * 1e-6
            assert hatL0(n, k + h, r.beta) - hatL0(n, k - h, r.beta) > 0


def test_hatL0_approximation_bounded():
    for e in np.linspace(6, 100, 12):
        s = ScalePoint.pow10(e)
        beta = math.floor(alpha0(s)) - 1
        for rho in np.linspace(beta - 2, beta - 0.5, 4):
            lhs = dL0_dk_at_rho(s.log_n, rho, beta)  # smoke: finite
            assert math.isfinite(lhs)
            val = _hat(s, rho, beta)
            approx = ((beta - rho - 1 - 2 / math.log(2)) * (s.log_n - math.log(s.log_n))
                      + log_mu(beta, s))
            assert abs(val - approx) <= 20


def _hat(s, rho, t):
    from chromvar.profile import _hat_from_log
    return _hat_from_log(s.log_n, rho, t)[0]


def test_hatL0_approx_helper():
    n, k = 1e6, 1e6 / 30
    assert hatL0_approx(n, k, 31) == pytest.approx(
        (31 - 30 - 1 - 2 / math.log(2)) * (math.log(n) - math.log(math.log(n))) + log_mu(31, n))


def test_y_calibration():
    rows = y_calibration([2], c=0.5)
    t, rho, dy, xa_t, _ = rows[0]
    assert dy == pytest.approx(-math.log(2), abs=1e-12)
    # x + 2y - log d_2 = -log 8 + 2 log 4 - log 4 = -log 2
    assert xa_t == pytest.approx(-math.log(2), abs=1e-12)
    for c in (0.5, 2.0, 3.0):
        arr = np.array(y_calibration(range(10, 401, 15), c))
        assert np.all(np.abs(arr[:, 2:]) <= 10)


def test_hatL0_slope_changes_sign_on_lower_bracket():
    r = solve_k_star(1e7)
    k = 1e7 / 4.0
    assert hatL0(1e7, k * (1 + 1e-6), r.beta) < hatL0(1e7, k * (1 - 1e-6), r.beta)
