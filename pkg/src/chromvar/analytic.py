"""Closed-form asymptotics for independent sets and colourings of G(n, p).

Everything works in natural-log space so that n may be far beyond float
range.  A :class:`ScalePoint` carries ``log_n`` and, when it fits, ``n``
itself; scale points built from ``log_n`` alone are "log-only".
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

LARGE_P = 1.0 - math.exp(-2.0)
GAP_WARN = 1e-9


class DomainError(ValueError):
    pass


class SizeError(ValueError):
    """Instance is outside the size range an exact routine supports."""


class EstimateUnavailable(DomainError):
    """The simple n/(alpha - 1) form does not apply at this (n, p)."""


@dataclass(frozen=True)
class ModelParams:
    p: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.p < 1.0:
            raise DomainError(f"p={self.p} must lie in (0, 1)")

    @property
    def q(self) -> float:
        return 1.0 - self.p

    @property
    def log_b(self) -> float:
        return -math.log1p(-self.p)

    @property
    def b(self) -> float:
        return 1.0 / self.q

    @property
    def c0(self) -> float:
        return 2.0 / math.log(2.0)

    @property
    def log_q(self) -> float:
        return math.log1p(-self.p)


HALF = ModelParams(0.5)


@dataclass(frozen=True)
class ScalePoint:
    """A vertex count given exactly (int or float) or through its natural log."""

    log_n: float
    n: float | int | None = None

    def __post_init__(self):
        if not self.log_n > 0.0:
            raise DomainError(f"need n > 1 (log n = {self.log_n})")

    @classmethod
    def of(cls, n) -> "ScalePoint":
        if isinstance(n, ScalePoint):
            return n
        if n <= 1:
            raise DomainError(f"need n > 1, got {n}")
        return cls(math.log(n), n)

    @classmethod
    def from_log(cls, log_n: float) -> "ScalePoint":
        """Log-only point; ``n`` is kept when exp(log_n) is a finite float."""
        n = math.exp(log_n) if log_n < 700.0 else None
        return cls(log_n, n)

    @classmethod
    def pow10(cls, e: float) -> "ScalePoint":
        return cls.from_log(e * math.log(10.0))

    @property
    def log_only(self) -> bool:
        return self.n is None

    @property
    def inv_n(self) -> float:
        if self.n is not None and self.log_n < 700.0:
            return 1.0 / self.n
        return math.exp(-self.log_n)

    def n_float(self) -> float:
        if self.n is None:
            raise DomainError("n is not representable at this scale point")
        return float(self.n)


def _sp(s) -> ScalePoint:
    return ScalePoint.of(s)


def log_binom(s, t: int) -> float:
    """log C(n, t) for real n, as a falling factorial so large n keeps full precision."""
    s = _sp(s)
    if t < 0:
        raise DomainError("t must be >= 0")
    if s.n is not None and t > s.n:
        raise DomainError(f"t={t} exceeds n={s.n}")
    inv = s.inv_n
    acc = t * s.log_n - math.lgamma(t + 1)
    for j in range(1, t):
        acc += math.log1p(-j * inv)
    return acc


def alpha0(s, m: ModelParams = HALF) -> float:
    s = _sp(s)
    lb = s.log_n / m.log_b
    if lb <= 1.0:
        raise DomainError(f"log_b n = {lb} must exceed 1")
    return 2.0 * lb - 2.0 * math.log(lb) / m.log_b + 2.0 * (1.0 - math.log(2.0)) / m.log_b + 1.0


def log_mu(t: int, s, m: ModelParams = HALF) -> float:
    """log of mu_t = C(n, t) q^C(t, 2)."""
    if t < 1:
        raise DomainError("t must be >= 1")
    return log_binom(s, t) + math.comb(t, 2) * m.log_q


def lam(rho_hat: float) -> float:
    return max(rho_hat / 2.0, (1.0 - rho_hat) / 2.0)


def _f_denominator(a0: float, m: ModelParams) -> float:
    return a0 - 1.0 - 2.0 / m.log_b


def chi_estimate(s, m: ModelParams = HALF) -> float:
    s = _sp(s)
    n = s.n_float()
    a0 = alpha0(s, m)
    if m.p <= LARGE_P:
        return n / _f_denominator(a0, m)
    a = math.floor(a0)
    if a0 - a < 2.0 / m.log_b:
        raise EstimateUnavailable(f"alpha0 - alpha = {a0 - a:.4g} below u = {2.0 / m.log_b:.4g}")
    return n / (a - 1)


def chi_estimate_derivative(s, m: ModelParams = HALF) -> float:
    """df/dn of f = n/(alpha0 - 1 - 2/log b), differentiated exactly."""
    s = _sp(s)
    if m.p > LARGE_P:
        raise EstimateUnavailable("derivative is defined for p <= 1 - 1/e^2 only")
    d = _f_denominator(alpha0(s, m), m)
    return 1.0 / d - (2.0 / m.log_b) * (1.0 - 1.0 / s.log_n) / d ** 2


def chi_estimate_derivative_truncated(s, m: ModelParams = HALF) -> float:
    a0 = alpha0(s, m)
    return 1.0 / a0 + 1.0 / a0 ** 2


def phi(x: float, d: float, u: float) -> float:
    w = 1.0 - d + x
    return w * math.log(w) + (d - x) * (1.0 - d) / u


def phi_root(d: float, u: float) -> float:
    """Smallest x >= 0 with phi(x) <= 0; phi is convex in x with phi(d) = 0."""
    if not 0.0 <= d < 1.0 or not 0.0 < u < 1.0:
        raise DomainError("need 0 <= d < 1 and 0 < u < 1")
    if phi(0.0, d, u) <= 0.0:
        return 0.0
    # minimiser of phi; a root below d exists only if phi dips negative there
    xm = math.exp((1.0 - d) / u - 1.0) - 1.0 + d
    if not 0.0 < xm < d or phi(xm, d, u) >= 0.0:
        return d
    return brentq(phi, 0.0, xm, args=(d, u), xtol=1e-15, rtol=4 * np.finfo(float).eps)


@dataclass(frozen=True)
class AsymptoticRecord:
    log_n: float
    alpha0: float
    alpha: int
    boundary_gap: float
    log_mu_alpha: float
    rho_hat: float
    lam: float
    a_half: int
    log_x: float
    x_scaled: float
    f_est: float | None
    f_deriv: float
    near_boundary: bool

    @property
    def lambda_(self) -> float:
        return self.lam


def _safe_exp(v: float) -> float:
    return math.exp(v) if v < 709.0 else math.inf


def asymptotic_record(s, m: ModelParams = HALF) -> AsymptoticRecord:
    s = _sp(s)
    a0 = alpha0(s, m)
    a = math.floor(a0)
    gap = a0 - a
    if gap < GAP_WARN:
        warnings.warn(f"alpha0 within {gap:.2e} of an integer", RuntimeWarning, stacklevel=2)
    lma = log_mu(a, s, m)
    rho = lma / s.log_n
    ah = math.floor(a0 - 0.5)
    log_x = log_mu(ah, s, m) + 2.0 * math.log(ah) - math.log(2.0) - s.log_n
    try:
        f_est = chi_estimate(s, m) if not s.log_only else None
    except EstimateUnavailable:
        f_est = None
    f_deriv = chi_estimate_derivative(s, m) if m.p <= LARGE_P else math.nan
    return AsymptoticRecord(
        log_n=s.log_n, alpha0=a0, alpha=a, boundary_gap=gap, log_mu_alpha=lma,
        rho_hat=rho, lam=lam(rho), a_half=ah, log_x=log_x, x_scaled=_safe_exp(log_x),
        f_est=f_est, f_deriv=f_deriv, near_boundary=gap < GAP_WARN,
    )
