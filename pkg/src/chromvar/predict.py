"""Width predictions for chi(G(n, 1/2)) and the bounds they are compared with.

Quantities that overflow a double at large n are carried as logs
(``log_*`` fields) with a float view that may be ``inf``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq

from .analytic import (HALF, LARGE_P, DomainError, ModelParams, ScalePoint,
                       alpha0, asymptotic_record, lam, log_binom, log_mu)
from .profile import solve_k_star

CASE_I_MAX = 0.1
CASE_II_MAX = 10.0
CASE_IV_POWER = 4
BAD_DELTA = 0.05
MATCH_LINEAR_MAX = 0.01


class RegimeError(DomainError):
    pass


def _exp(v: float) -> float:
    return math.exp(v) if v < 709.0 else math.inf


def _refuse_large_p(m: ModelParams):
    if m.p > LARGE_P:
        raise DomainError(f"predictions need p <= 1 - 1/e^2, got p={m.p}")


# --- zigzag ---------------------------------------------------------------

@dataclass(frozen=True)
class ZigzagBounds:
    log_lower_alpha_sets: float
    log_lower_alpha_minus_1_sets: float
    lam: float

    @property
    def lower_alpha_sets(self) -> float:
        return _exp(self.log_lower_alpha_sets)

    @property
    def lower_alpha_minus_1_sets(self) -> float:
        return _exp(self.log_lower_alpha_minus_1_sets)


def zigzag_bounds(n, m: ModelParams = HALF) -> ZigzagBounds:
    """sqrt(mu_alpha)/log n and n/(sqrt(mu_{alpha-1}) log^3 n), with lambda(n)."""
    s = ScalePoint.of(n)
    rec = asymptotic_record(s, m)
    ll = math.log(s.log_n)
    low_a = 0.5 * rec.log_mu_alpha - ll
    low_am1 = s.log_n - 0.5 * log_mu(rec.alpha - 1, s, m) - 3.0 * ll
    return ZigzagBounds(low_a, low_am1, rec.lam)


# --- g0 and cases ---------------------------------------------------------

def log_g0(log_mu_a: float, log_x: float, log_n: float, m: ModelParams = HALF) -> float:
    """log of sqrt(mu_a) (loglog n + |log x|) / (c0 (1 + x) log^2 n)."""
    ll = math.log(log_n)
    return (0.5 * log_mu_a + math.log(ll + abs(log_x)) - math.log(m.c0)
            - float(np.logaddexp(0.0, log_x)) - 2.0 * ll)


def g0_formula(mu_a: float, x: float, n, m: ModelParams = HALF) -> float:
    s = ScalePoint.of(n)
    return _exp(log_g0(math.log(mu_a), math.log(x), s.log_n, m))


def g0_case_i(mu_a: float, x: float, n, m: ModelParams = HALF) -> float:
    """sqrt(mu_a) (loglog n + log(1/x)) / (c0 log^2 n), the small-x form."""
    ln = ScalePoint.of(n).log_n
    return math.sqrt(mu_a) * (math.log(ln) - math.log(x)) / (m.c0 * ln ** 2)


def g0_case_iv(mu_a: float, x: float, n, m: ModelParams = HALF) -> float:
    """sqrt(mu_a) (loglog n + log x) / (c0 x log^2 n), the large-x form."""
    ln = ScalePoint.of(n).log_n
    return math.sqrt(mu_a) * (math.log(ln) + math.log(x)) / (m.c0 * x * ln ** 2)


def case_tag(log_x: float, log_n: float, rho_hat: float | None = None) -> str:
    """Case i/ii/iii/iv from x, or "bad" when mu_alpha is within n^(1/2 +- 0.05).

    Case iv wins where it overlaps iii; x between n^0.01 and log^4 n (where
    n^0.01 is the smaller) counts as iii.
    """
    if rho_hat is not None and abs(rho_hat - 0.5) <= BAD_DELTA:
        return "bad"
    if log_x >= CASE_IV_POWER * math.log(log_n):
        return "iv"
    if log_x < math.log(CASE_I_MAX):
        return "i"
    if log_x <= math.log(CASE_II_MAX):
        return "ii"
    return "iii"


# --- matching heuristic ---------------------------------------------------

def matching_fraction_log(log_x: float) -> float:
    """y(x) for x = exp(log_x): y = x below 0.01, else the root of y + log y = log x + 1."""
    if log_x <= math.log(MATCH_LINEAR_MAX):
        return math.exp(log_x)
    target = log_x + 1.0
    hi = max(1.0, target) + 1.0
    return brentq(lambda y: y + math.log(y) - target, 1e-12, hi, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def matching_fraction(x: float) -> float:
    if not x > 0:
        raise DomainError("x must be positive")
    if x <= MATCH_LINEAR_MAX:
        return float(x)
    return matching_fraction_log(math.log(x))


def matching_slope(log_x: float) -> tuple:
    """(dy/dx, log dy/dx) by a centred difference of y in log x; exactly 1 on the linear branch."""
    if log_x <= math.log(MATCH_LINEAR_MAX):
        return 1.0, 0.0
    h = min(1e-5, 0.5 * (log_x - math.log(MATCH_LINEAR_MAX)))
    dy_dlogx = (matching_fraction_log(log_x + h) - matching_fraction_log(log_x - h)) / (2.0 * h)
    lg = math.log(dy_dlogx) - log_x
    return _exp(lg), lg


def benefit(n, log_mu_prime: float, m: ModelParams = HALF) -> float:
    """-log mu' / (c0 log^2 n)."""
    if log_mu_prime >= 0.0:
        raise RegimeError(f"log mu' = {log_mu_prime:.4g} is not negative")
    ln = ScalePoint.of(n).log_n
    return -log_mu_prime / (m.c0 * ln ** 2)


@dataclass(frozen=True)
class Pipeline:
    log_n: float
    a: int
    x: float
    log_x: float
    y: float
    t_used_fraction: float
    log_n_prime: float
    log_mu_prime: float
    dy_dx: float
    benefit: float
    log_mu_a: float
    log_variance_estimate: float
    log_g0: float
    provenance: tuple

    @property
    def estimate(self) -> float:
        return _exp(self.log_variance_estimate)

    @property
    def g0(self) -> float:
        return _exp(self.log_g0)

    @property
    def ratio_to_g0(self) -> float:
        return math.exp(self.log_variance_estimate - self.log_g0)


def variance_pipeline(n, m: ModelParams = HALF, x: float | None = None) -> Pipeline:
    """sqrt(mu_a) * dy/dx * B with mu' = mu_{a+1}(n'), n' = n - a t_used.

    ``x`` overrides x(n); mu_a is then taken as 2 x n / a^2 and mu' is moved
    by the same factor.
    """
    _refuse_large_p(m)
    s = ScalePoint.of(n)
    a = math.floor(alpha0(s, m) - 0.5)
    log_mu_a_nat = log_mu(a, s, m)
    if x is None:
        log_x = log_mu_a_nat + 2.0 * math.log(a) - math.log(2.0) - s.log_n
        log_mu_a = log_mu_a_nat
    else:
        log_x = math.log(x)
        log_mu_a = math.log(2.0 * x) + s.log_n - 2.0 * math.log(a)
    y = matching_fraction_log(log_x) if x is None else matching_fraction(x)
    frac = 2.0 * y / a  # share of vertices covered: a * t_used / n
    if frac >= 1.0:
        raise RegimeError(f"matching covers all vertices (a t/n = {frac:.3g})")
    s_prime = ScalePoint(s.log_n + math.log1p(-frac), None if s.n is None else s.n * (1.0 - frac))
    # mu_{a+1}(n') / mu_a(n) = C(n', a+1) q^a / C(n, a)
    log_mu_prime = log_mu_a + log_binom(s_prime, a + 1) - log_binom(s, a) + a * m.log_q
    slope, log_slope = matching_slope(log_x)
    b_val = benefit(s, log_mu_prime, m)
    est = 0.5 * log_mu_a + log_slope + math.log(b_val)
    return Pipeline(
        log_n=s.log_n, a=a, x=_exp(log_x) if x is None else float(x), log_x=log_x, y=y, t_used_fraction=2.0 * y / a ** 2,
        log_n_prime=s_prime.log_n, log_mu_prime=log_mu_prime, dy_dx=slope, benefit=b_val,
        log_mu_a=log_mu_a, log_variance_estimate=est, log_g0=log_g0(log_mu_a, log_x, s.log_n, m),
        provenance=("o(1) in the matching equation set to 0", "O(at/n) correction set to 0",
                    "B taken at leading order"),
    )


# --- alpha-shift floor ----------------------------------------------------

@dataclass(frozen=True)
class AlphaShift:
    k_star: float
    mu: float
    nu: float
    delta: float
    d: float
    m_plus: float
    floor: float
    in_regime: bool


def alphashift_floor(n, m: ModelParams = HALF, C: float = 3.0, mu_alpha: float | None = None,
                     check_regime: bool = True, k_star: float | None = None) -> AlphaShift:
    """k*(n) - d with nu = (n/log n)/mu_alpha, delta = C/log nu, d = (1 + 5 delta) mu log nu / (alpha (log n - loglog n))."""
    if m.p != 0.5:
        raise DomainError("the alpha-shift floor is stated for p = 1/2")
    if C < 3:
        raise DomainError("C must be >= 3")
    s = ScalePoint.of(n)
    n_f = s.n_float()
    a = math.floor(alpha0(s, m))
    mu = math.exp(log_mu(a, s, m)) if mu_alpha is None else float(mu_alpha)
    in_regime = s.log_n ** 5 <= mu
    if check_regime and not in_regime:
        raise RegimeError(f"mu_alpha = {mu:.4g} is below log^5 n = {s.log_n ** 5:.4g}")
    nu = (n_f / s.log_n) / mu
    if nu <= 1.0:
        raise RegimeError("nu must exceed 1")
    delta = C / math.log(nu)
    d = (1.0 + 5.0 * delta) * mu * math.log(nu) / (a * (s.log_n - math.log(s.log_n)))
    k = solve_k_star(s).k_star if k_star is None else k_star
    return AlphaShift(k, mu, nu, delta, d, mu * (1.0 + delta), k - d, in_regime)


# --- width from a sloped estimate plus a coupling ------------------------

@dataclass(frozen=True)
class FrameworkParams:
    p: float
    delta: float
    Delta: float
    n_minus: int
    n_plus: int
    a: int
    r: float | Sequence | Callable = 1.0

    def __post_init__(self):
        if not self.n_minus < self.n_plus:
            raise DomainError("need n_minus < n_plus")
        if min(self.p, self.delta, self.Delta) <= 0:
            raise DomainError("p, delta, Delta must be positive")
        if isinstance(self.r, (list, tuple)):
            vals = [v for _, v in self.r]
            if any(b < a for a, b in zip(vals, vals[1:])):
                raise DomainError("r must be nondecreasing")

    def r_at(self, n: int) -> float:
        if callable(self.r):
            return float(self.r(n))
        if isinstance(self.r, (list, tuple)):
            # step table of (n_from, value) breakpoints
            val = None
            for start, v in self.r:
                if start <= n:
                    val = v
            if val is None:
                raise DomainError(f"r table does not cover n={n}")
            return float(val)
        return float(self.r)


@dataclass(frozen=True)
class FrameworkResult:
    valid: bool
    reasons: tuple
    bound: float


def framework_bound(fp: FrameworkParams) -> FrameworkResult:
    width = fp.n_plus - fp.n_minus
    reasons = []
    if width < 5.0 * fp.Delta / fp.delta:
        reasons.append(f"n+ - n- = {width} < 5 Delta / delta = {5.0 * fp.Delta / fp.delta:.6g}")
    if width < 5.0 * fp.a * fp.r_at(fp.n_plus):
        reasons.append(f"n+ - n- = {width} < 5 a r(n+) = {5.0 * fp.a * fp.r_at(fp.n_plus):.6g}")
    # r is nondecreasing, so its minimum over [n-, n+] sits at n-
    bound = fp.a * fp.delta * fp.r_at(fp.n_minus) / 2.0
    return FrameworkResult(not reasons, tuple(reasons), bound)


# --- proven lower bounds -------------------------------------------------

@dataclass(frozen=True)
class TheoremBounds:
    nstar: float
    nstar_applicable: bool
    polylog: float
    w_n: float
    w_tilde: float


def w_n(n) -> float:
    ln = ScalePoint.of(n).log_n
    return _exp(0.5 * ln + math.log(math.log(ln)) - 3.0 * math.log(ln))


def w_tilde(n) -> float:
    ln = ScalePoint.of(n).log_n
    return _exp(0.25 * ln - 1.75 * math.log(ln))


def theorem_bounds(n, m: ModelParams = HALF, eps: float = 0.1, c: float = 1.0,
                   mu_alpha: float | None = None) -> TheoremBounds:
    s = ScalePoint.of(n)
    log_mu_a = log_mu(math.floor(alpha0(s, m)), s, m) if mu_alpha is None else math.log(mu_alpha)
    ll = math.log(s.log_n)
    nstar = _exp(math.log(eps * m.log_b / 9.0) + 0.5 * log_mu_a - ll)
    return TheoremBounds(
        nstar=nstar,
        nstar_applicable=log_mu_a < (1.0 - eps) * s.log_n,
        polylog=c * w_n(s),
        w_n=w_n(s),
        w_tilde=w_tilde(s),
    )


def in_w_window(n, c1: float, m: ModelParams = HALF) -> bool:
    """mu_alpha in [c1 n/(e log^2 n), c1 n/log^2 n]; needs c1 < 1/(5 c0^2)."""
    if not 0.0 < c1 < 1.0 / (5.0 * m.c0 ** 2):
        raise DomainError(f"c1 must lie in (0, {1.0 / (5.0 * m.c0 ** 2):.6g})")
    s = ScalePoint.of(n)
    lm = log_mu(math.floor(alpha0(s, m)), s, m)
    top = math.log(c1) + s.log_n - 2.0 * math.log(s.log_n)
    return top - 1.0 <= lm <= top


# --- combined prediction ---------------------------------------------------

@dataclass(frozen=True)
class Prediction:
    log_n: float
    case_tag: str
    x_case: str
    log_g0: float
    w_n: float
    w_tilde: float
    nstar_bound: float
    nstar_applicable: bool
    polylog_bound: float
    alphashift_floor: float
    k_star: float
    components: dict = field(default_factory=dict)

    @property
    def g0(self) -> float:
        return _exp(self.log_g0)


def g0_prediction(n, m: ModelParams = HALF, eps: float = 0.1, c: float = 1.0,
                  C: float = 3.0) -> Prediction:
    _refuse_large_p(m)
    s = ScalePoint.of(n)
    rec = asymptotic_record(s, m)
    a = rec.a_half
    lmu_a = log_mu(a, s, m)
    lg = log_g0(lmu_a, rec.log_x, s.log_n, m)
    tb = theorem_bounds(s, m, eps, c)
    comps = {"a": a, "log_mu_a": lmu_a, "x": rec.x_scaled, "log_x": rec.log_x,
             "rho_hat": rec.rho_hat, "lambda": lam(rec.rho_hat)}
    k_val = math.nan
    if m.p == 0.5:  # the profile threshold is worked out for p = 1/2
        try:
            k = solve_k_star(s)
            k_val = k.k_star if k.k_star is not None else _exp(k.log_k)
        except DomainError:
            pass
    floor = math.nan
    if m.p == 0.5 and not s.log_only:
        try:
            sh = alphashift_floor(s, m, C, k_star=None if math.isnan(k_val) else k_val)
            floor = sh.floor
            comps.update(nu=sh.nu, delta=sh.delta, d=sh.d, m_plus=sh.m_plus)
        except DomainError:
            pass
    try:
        pl = variance_pipeline(s, m)
        comps.update(y=pl.y, B=pl.benefit, log_mu_prime=pl.log_mu_prime,
                     log_pipeline=pl.log_variance_estimate)
    except DomainError:
        pass
    x_case = case_tag(rec.log_x, s.log_n)
    return Prediction(
        log_n=s.log_n, case_tag=case_tag(rec.log_x, s.log_n, rec.rho_hat), x_case=x_case,
        log_g0=lg, w_n=tb.w_n, w_tilde=tb.w_tilde, nstar_bound=tb.nstar,
        nstar_applicable=tb.nstar_applicable, polylog_bound=tb.polylog,
        alphashift_floor=floor, k_star=k_val, components=comps,
    )
