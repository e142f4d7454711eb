"""Finite-N analytic predictions for hole-radius moment sums.

The quadrature route integrates the exact facet-cap density
    (2/B(d^2/2, 1/2)) C(n, d+1) rho^(p + d^2 - 1) (1 - lambda)^(n-d-1)
        (1 - rho^2/4)^(d^2/2 - 1)
over rho in [0, sqrt(2)], with lambda the normalized cap area.  The branch
involving lambda^(n-d-1) (origin outside the hull) is dropped: it is bounded
by (1/2)^(n-d-1), below 1e-15 relative for n >= 60.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from . import constants
from .specfun import ln_gamma

_QUAD_RELTOL = 1e-8
_QUAD_LIMIT = 2000


@dataclass(frozen=True)
class MomentPrediction:
    d: int
    p: float
    n: int
    value: float
    method: str


def _log_binomial(n: int, k: int) -> float:
    # sum of log terms; direct binomials overflow long before n = 1e7
    if k < 0 or k > n:
        return -math.inf
    i = np.arange(1, k + 1, dtype=float)
    return float(np.sum(np.log((n - k + i) / i)))


def _check_args(d: int, p: float, n: int) -> None:
    constants.check_dimension(d)
    if p < 0:
        raise ValueError(f"moment order must be nonnegative, got {p}")
    n = int(n)
    if n < d + 2:
        raise ValueError(f"need n >= d + 2 = {d + 2} points, got {n}")


def _integrand_log_factory(d: int, p: float, n: int):
    dd = d * d
    rho_exp = p + dd - 1.0
    lam_exp = n - d - 1.0
    body_exp = dd / 2.0 - 1.0

    def log_f(rho: float) -> float:
        if rho <= 0.0:
            return -math.inf
        lam = constants.cap_area_euclid(d, rho)
        if lam >= 1.0:
            return -math.inf
        t = 1.0 - rho * rho / 4.0
        if t <= 0.0:
            return -math.inf if body_exp > 0 else body_exp * math.log(abs(t) + 1e-300)
        return rho_exp * math.log(rho) + lam_exp * math.log1p(-lam) + body_exp * math.log(t)

    return log_f


def moment_quadrature(d: int, p: float, n: int, reltol: float = _QUAD_RELTOL) -> MomentPrediction:
    """E[sum of rho_k^p] at finite n by adaptive quadrature of the facet-cap density."""
    _check_args(d, p, n)
    n = int(n)
    dd = d * d
    log_front = (
        math.log(2.0)
        - (ln_gamma(dd / 2.0) + ln_gamma(0.5) - ln_gamma((dd + 1) / 2.0))
        + _log_binomial(n, d + 1)
    )
    log_f = _integrand_log_factory(d, p, n)

    # the integrand peaks near rho* where the rho-power and the cap-area decay balance
    kap = constants.kappa(d)
    rho_star = ((p + dd - 1.0) / (kap * d * max(n - d - 1, 1))) ** (1.0 / d)
    upper = math.sqrt(2.0)
    pts = sorted({min(max(rho_star * s, 1e-12), upper * (1 - 1e-12)) for s in (0.25, 1.0, 4.0, 16.0)})

    def integrand(rho: float) -> float:
        v = log_front + log_f(rho)
        return math.exp(v) if v > -700.0 else 0.0

    value, _ = quad(integrand, 0.0, upper, points=pts, limit=_QUAD_LIMIT, epsabs=0.0, epsrel=reltol)
    return MomentPrediction(d=d, p=float(p), n=n, value=float(value), method="quadrature")


def moment_asymptotic(d: int, p: float, n: int) -> MomentPrediction:
    """Leading-order prediction B_d kappa^(-p/d) Gamma(d+p/d)Gamma(n+1) / (Gamma(d)Gamma(n+p/d))."""
    _check_args(d, p, n)
    n = int(n)
    kap = constants.kappa(d)
    log_val = (
        math.log(constants.big_b(d))
        - (p / d) * math.log(kap)
        + ln_gamma(d + p / d)
        - ln_gamma(d)
        + ln_gamma(n + 1.0)
        - ln_gamma(n + p / d)
    )
    return MomentPrediction(d=d, p=float(p), n=n, value=math.exp(log_val), method="asymptotic")


def moment_exact_d2(p: float, n: int) -> MomentPrediction:
    """The d=2 closed form (2n-4) 2^p Gamma(2+p/2) Gamma(n+1) / Gamma(n+1+p/2)."""
    if p < 0:
        raise ValueError(f"moment order must be nonnegative, got {p}")
    return MomentPrediction(
        d=2, p=float(p), n=int(n), value=constants.d2_moment_refined(p, int(n)), method="exact_d2"
    )


def mean_cap_area_sum(d: int, n: int, reltol: float = _QUAD_RELTOL) -> float:
    """E[sum of normalized cap areas] at finite n: the moment quadrature with
    rho^p replaced by the cap area lambda(rho) in the integrand."""
    _check_args(d, 0.0, n)
    n = int(n)
    dd = d * d
    log_front = (
        math.log(2.0)
        - (ln_gamma(dd / 2.0) + ln_gamma(0.5) - ln_gamma((dd + 1) / 2.0))
        + _log_binomial(n, d + 1)
    )
    log_f = _integrand_log_factory(d, 0.0, n)

    kap = constants.kappa(d)
    rho_star = ((dd - 1.0 + d) / (kap * d * max(n - d - 1, 1))) ** (1.0 / d)
    upper = math.sqrt(2.0)
    pts = sorted({min(max(rho_star * s, 1e-12), upper * (1 - 1e-12)) for s in (0.25, 1.0, 4.0, 16.0)})

    def integrand(rho: float) -> float:
        lam = constants.cap_area_euclid(d, rho)
        if lam <= 0.0:
            return 0.0
        v = log_front + log_f(rho) + math.log(lam)
        return math.exp(v) if v > -700.0 else 0.0

    value, _ = quad(integrand, 0.0, upper, points=pts, limit=_QUAD_LIMIT, epsabs=0.0, epsrel=reltol)
    return float(value)
