"""First-moment calculus over colouring profiles of G(n, 1/2).

A profile lists how many colour classes of each size 1..t a colouring has.
Relaxing counts to reals and maximising the log-expectation gives an
exponential-family maximiser ``p_i = exp(x + i*y) / d_i``; the root of the
per-colour log-expectation in k is the threshold ``k*``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np
from scipy.optimize import brentq
from scipy.special import logsumexp

from .analytic import DomainError, ScalePoint, SizeError, alpha0, log_mu

LOG2 = math.log(2.0)
MAX_EXACT_N = 14


class ConvergenceError(RuntimeError):
    pass


class NoSignChange(DomainError):
    def __init__(self, message, scan):
        super().__init__(message)
        self.scan = scan


def log_d(i: int) -> float:
    """log of d_i = 2^C(i,2) * i!."""
    if i < 1:
        raise DomainError("i must be >= 1")
    return math.comb(i, 2) * LOG2 + math.lgamma(i + 1)


@lru_cache(maxsize=1024)
def _log_d_vec(t: int) -> np.ndarray:
    v = np.array([log_d(i) for i in range(1, t + 1)])
    v.setflags(write=False)
    return v


@lru_cache(maxsize=1024)
def _log_d_steps(t: int) -> np.ndarray:
    # log d_{j+1} - log d_j = j log 2 + log(j + 1), j = 1..t-1
    j = np.arange(1, t, dtype=float)
    v = j * LOG2 + np.log1p(j)
    v.setflags(write=False)
    return v


def _rel_log_weights(y: float, t: int) -> np.ndarray:
    """i*y - log d_i minus its maximum, accumulated outward from the mode.

    Summing increments from the mode keeps the weights that carry the mass
    accurate even when i*y and log d_i are both ~1e5.
    """
    inc = y - _log_d_steps(t)  # w_{j+1} - w_j, decreasing in j
    r = int(np.searchsorted(-inc, 0.0))  # first j (0-based) with inc <= 0
    w = np.empty(t)
    w[r] = 0.0
    if r + 1 < t:
        w[r + 1:] = np.cumsum(inc[r:])
    if r > 0:
        w[:r] = -np.cumsum(inc[:r][::-1])[::-1]
    return w


@dataclass(frozen=True)
class LagrangeSolution:
    rho: float
    t: int
    x: float
    y: float
    log_p: np.ndarray = field(repr=False)
    converged: bool
    residuals: tuple

    @property
    def p(self) -> np.ndarray:
        return np.exp(self.log_p)

    @property
    def entropy_term(self) -> float:
        """sum_i p_i log(p_i d_i), which equals x + rho*y at the maximiser."""
        return self.x + self.rho * self.y


def _mean_at(y: float, idx: np.ndarray, t: int) -> float:
    w = np.exp(_rel_log_weights(y, t))
    return float(idx @ w / w.sum())


def solve_lagrange(rho: float, t: int) -> LagrangeSolution:
    if not 1.0 < rho < t:
        raise DomainError(f"rho={rho} outside (1, {t})")
    idx = np.arange(1, t + 1, dtype=float)

    def g(y):
        return _mean_at(y, idx, t) - rho

    lo, hi = -4.0 * t, 4.0 * t
    while g(lo) > 0.0:
        lo *= 2.0
    while g(hi) < 0.0:
        hi *= 2.0
    try:
        y = brentq(g, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps, maxiter=200)
    except RuntimeError as exc:
        raise ConvergenceError(str(exc)) from exc
    w = _rel_log_weights(y, t)
    lse = float(logsumexp(w))
    log_p = w - lse
    r = int(np.argmax(w))
    x = -(lse + (r + 1) * y - log_d(r + 1))
    p = np.exp(log_p)
    res = (float(p.sum() - 1.0), float(idx @ p - rho))
    ok = abs(res[0]) <= 1e-10 and abs(res[1]) <= 1e-10
    return LagrangeSolution(rho, t, x, float(y), log_p, ok, res)


def tL0(rho: float, k: float, t: int) -> float:
    s = solve_lagrange(rho, t)
    return rho * math.log(rho * k) - math.log(k) - rho + 1.0 - s.x - rho * s.y


def profile_objective(p, rho: float, k: float, t: int) -> float:
    """rho log(rho k) - log k - rho + 1 - sum p_i log(p_i d_i) for any feasible p."""
    p = np.asarray(p, dtype=float)
    ld = _log_d_vec(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        ent = np.where(p > 0, p * (np.log(p) + ld), 0.0).sum(axis=-1)
    return rho * math.log(rho * k) - math.log(k) - rho + 1.0 - ent


def _hat_from_log(log_n: float, rho: float, t: int) -> tuple:
    # per-colour log-expectation with k = n/rho, usable when n is log-only
    s = solve_lagrange(rho, t)
    val = (rho - 1.0) * log_n + math.log(rho) - rho + 1.0 - s.x - rho * s.y
    return val, s


def _check(n, k, t):
    s = ScalePoint.of(n)
    if k <= 0:
        raise DomainError("k must be positive")
    rho = n / k
    if not 1.0 < rho < t:
        raise DomainError(f"n/k={rho} outside (1, {t})")
    return s, rho


def hatL0(n, k: float, t: int) -> float:
    s, rho = _check(n, k, t)
    return _hat_from_log(s.log_n, rho, t)[0]


def L0(n, k: float, t: int) -> float:
    return k * hatL0(n, k, t)


def L_profile(counts) -> float:
    """Stirling-level log-expectation n log n - n + k - sum n_i log(n_i d_i) of one profile."""
    counts = list(counts)
    n = sum((i + 1) * c for i, c in enumerate(counts))
    k = sum(counts)
    val = n * math.log(n) - n + k
    for i, c in enumerate(counts, start=1):
        if c > 0:
            val -= c * (math.log(c) + log_d(i))
    return val


@dataclass(frozen=True)
class Partials:
    dtL0_drho: float
    dtL0_dk: float
    dhatL0_dn: float
    dhatL0_dk: float


def partials(n, k: float, t: int) -> Partials:
    s, rho = _check(n, k, t)
    y = solve_lagrange(rho, t).y
    return Partials(
        dtL0_drho=s.log_n - y,  # log(rho k) = log n
        dtL0_dk=(rho - 1.0) / k,
        dhatL0_dn=(s.log_n - y) / k,
        dhatL0_dk=-(rho / k) * (s.log_n - y) + (rho - 1.0) / k,
    )


def dL0_dk(n, k: float, t: int) -> float:
    """Derivative of L0 = k * hatL0 in k at fixed n."""
    s, rho = _check(n, k, t)
    val, sol = _hat_from_log(s.log_n, rho, t)
    return val + rho * (sol.y - s.log_n) + rho - 1.0


def dL0_dk_at_rho(log_n: float, rho: float, t: int) -> float:
    val, sol = _hat_from_log(log_n, rho, t)
    return val + rho * (sol.y - log_n) + rho - 1.0


# --- threshold ------------------------------------------------------------

@dataclass(frozen=True)
class ThresholdResult:
    log_n: float
    n: float | None
    beta: int
    rho: float
    k_star: float | None
    log_k: float
    residual: float
    log_bracket: tuple
    derivative: float
    reciprocal: float
    y: float

    @property
    def n_over_k(self) -> float:
        return self.rho

    @property
    def bracket(self) -> tuple:
        return tuple(math.exp(v) for v in self.log_bracket)


def default_beta(s, shift: int = 1) -> int:
    if shift not in (1, 2):
        raise DomainError("beta is alpha - 1 or alpha - 2")
    return math.floor(alpha0(s)) - shift


def _reciprocal(log_n: float, rho: float, y: float) -> float:
    return rho - (rho - 1.0) / (log_n - y)


def solve_k_star(n, beta: int | None = None, scan_points: int = 64) -> ThresholdResult:
    """Root k* of hatL0(n, k, beta) in k over [n/(beta - 0.01), n/2]."""
    s = ScalePoint.of(n)
    if beta is None:
        beta = default_beta(s)
    hi_rho = beta - 0.01
    if hi_rho <= 2.0:
        raise DomainError(f"beta={beta} too small for the bracket")
    # k grid from n/hi_rho to n/2, carried as rho = n/k
    fr = np.linspace(0.0, 1.0, scan_points)
    rhos = 1.0 / (1.0 / hi_rho + fr * (0.5 - 1.0 / hi_rho))
    vals = np.array([_hat_from_log(s.log_n, r, beta)[0] for r in rhos])
    signs = np.sign(vals)
    changes = int(np.count_nonzero(signs[1:] != signs[:-1]))
    scan = list(zip(rhos.tolist(), vals.tolist()))
    if changes != 1 or vals[0] >= 0.0:
        raise NoSignChange(f"found {changes} sign changes of hatL0 on the k bracket", scan)
    j = int(np.flatnonzero(signs[1:] != signs[:-1])[0])
    f = lambda r: _hat_from_log(s.log_n, r, beta)[0]
    rho = brentq(f, rhos[j + 1], rhos[j], xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
    val, sol = _hat_from_log(s.log_n, rho, beta)
    log_k = s.log_n - math.log(rho)
    k = s.n / rho if s.n is not None else None
    recip = _reciprocal(s.log_n, rho, sol.y)
    return ThresholdResult(
        log_n=s.log_n, n=s.n, beta=beta, rho=rho, k_star=k, log_k=log_k,
        residual=abs(val),
        log_bracket=(s.log_n - math.log(hi_rho), s.log_n - math.log(2.0)),
        derivative=1.0 / recip, reciprocal=recip, y=sol.y,
    )


def k_star_derivative(n, beta: int | None = None) -> float:
    return solve_k_star(n, beta).derivative


def k_star_reciprocal_simplified(n, beta: int | None = None) -> float:
    r = solve_k_star(n, beta)
    return r.rho + 2.0 / LOG2


def k_star_closed_form(n) -> float:
    """Leading-order n/k*: alpha - 1 - 2/log 2 + log mu_alpha / (log n - loglog n)."""
    s = ScalePoint.of(n)
    a = math.floor(alpha0(s))
    return a - 1.0 - 2.0 / LOG2 + log_mu(a, s) / (s.log_n - math.log(s.log_n))


def hatL0_approx(n, k: float, a: int) -> float:
    """(a - rho - 1 - 2/log 2)(log n - loglog n) + log mu_a(n)."""
    s = ScalePoint.of(n)
    rho = n / k
    return (a - rho - 1.0 - 2.0 / LOG2) * (s.log_n - math.log(s.log_n)) + log_mu(a, s)


# --- exact small-n first moment ------------------------------------------

@dataclass(frozen=True)
class ExactExpectation:
    n: int
    k: int
    t: int
    value: Fraction
    log_value: float


def profiles(n: int, k: int, t: int):
    """Integer profiles (n_1..n_t) with sum n_i = k and sum i n_i = n."""
    out = []

    def rec(i, left_n, left_k, acc):
        if i == 0:
            if left_n == 0 and left_k == 0:
                out.append(tuple(reversed(acc)))
            return
        # classes of size i; the remaining sizes are < i
        for c in range(min(left_k, left_n // i), -1, -1):
            rn, rk = left_n - c * i, left_k - c
            if rk > rn or rn > rk * (i - 1):
                continue
            rec(i - 1, rn, rk, acc + [c])

    rec(t, n, k, [])
    return out


def profile_expectation(counts) -> Fraction:
    n = sum((i + 1) * c for i, c in enumerate(counts))
    num = math.factorial(n)
    den = 1
    pairs = 0
    for i, c in enumerate(counts, start=1):
        den *= math.factorial(c) * math.factorial(i) ** c
        pairs += c * math.comb(i, 2)
    return Fraction(num, den * 2 ** pairs)


def exact_E(n: int, k: int, t: int) -> ExactExpectation:
    if n > MAX_EXACT_N:
        raise SizeError(f"exact enumeration supports n <= {MAX_EXACT_N}")
    if min(n, k, t) < 1:
        raise DomainError("n, k, t must be positive")
    total = sum((profile_expectation(c) for c in profiles(n, k, t)), Fraction(0))
    logv = math.log(total.numerator) - math.log(total.denominator) if total > 0 else -math.inf
    return ExactExpectation(n, k, t, total, logv)


def k_t_exact(n: int, t: int) -> int:
    if n > MAX_EXACT_N:
        raise SizeError(f"exact enumeration supports n <= {MAX_EXACT_N}")
    for k in range(-(-n // t), n + 1):
        if exact_E(n, k, t).value >= 1:
            return k
    raise AssertionError("E_{n,n,t} = 1, so the scan always stops")


def y_calibration(t_values, c: float = 2.0) -> list:
    """Rows (t, rho, y - log(t 2^t), x + t y - log d_t, x + (t+1) y - log d_{t+1}) at rho = t - c."""
    rows = []
    for t in t_values:
        rho = t - c
        s = solve_lagrange(rho, t)
        rows.append((
            t, rho, s.y - math.log(t) - t * LOG2,
            s.x + t * s.y - log_d(t),
            s.x + (t + 1) * s.y - log_d(t + 1),
        ))
    return rows
