"""Closed-form constants, densities and CDFs for spheres S^d, d = 1..8.

The sphere dimension d is capped at 8: that is the tabulated range, and the
hull pipeline stops earlier anyway.  All values come from the Gamma-function
forms evaluated through specfun.
"""

from __future__ import annotations

import math
import operator
from dataclasses import dataclass

from . import specfun

MAX_DIMENSION = 8


def check_dimension(d: int) -> int:
    """Validate a sphere dimension, returning it as a plain int."""
    try:
        d = operator.index(d)
    except TypeError:
        raise ValueError(f"dimension must be an integer, got {d!r}") from None
    if not 1 <= d <= MAX_DIMENSION:
        raise ValueError(f"unsupported dimension {d}; need 1 <= d <= {MAX_DIMENSION}")
    return d


def _kappa_any(d: int) -> float:
    # Gamma-ratio form, valid for any positive integer (big_b needs d*d).
    return math.exp(specfun.ln_gamma((d + 1) / 2.0) - specfun.ln_gamma(d / 2.0)) / (
        d * math.sqrt(math.pi)
    )


def kappa(d: int) -> float:
    """Small-cap area coefficient: sigma_d(C_rho) ~ kappa_d rho^d as rho -> 0."""
    d = check_dimension(d)
    return _kappa_any(d)


def big_b(d: int) -> float:
    """Facets-per-point coefficient: the expected facet count grows like big_b(d) * n."""
    d = check_dimension(d)
    return 2.0 / (d + 1) * _kappa_any(d * d) / _kappa_any(d) ** d


def e_moment(d: int, p: float) -> float:
    """p-th moment of the limiting hole-radius distribution."""
    d = check_dimension(d)
    if p < 0:
        raise ValueError(f"moment order must be nonnegative, got {p}")
    return math.exp(specfun.ln_gamma(d + p / d) - specfun.ln_gamma(d)) * kappa(d) ** (-p / d)


def c_moment(d: int, p: float) -> float:
    """Limit of E[sum of hole radii^p] / n^(1-p/d): big_b(d) * e_moment(d, p)."""
    return big_b(d) * e_moment(d, p)


def hole_pdf(d: int, x: float) -> float:
    """Density of the scaled hole radius n^(1/d) * rho in the large-n limit."""
    d = check_dimension(d)
    if x < 0:
        raise ValueError(f"hole_pdf requires x >= 0, got {x}")
    k = kappa(d)
    if x == 0.0:
        return k if d == 1 else 0.0
    return math.exp(
        math.log(d) - specfun.ln_gamma(d) + d * math.log(k)
        + (d * d - 1) * math.log(x) - k * x**d
    )


def hole_cdf(d: int, x: float) -> float:
    """CDF of the scaled hole radius: regularized incomplete gamma P(d, kappa_d x^d)."""
    d = check_dimension(d)
    if x < 0:
        raise ValueError(f"hole_cdf requires x >= 0, got {x}")
    return specfun.reg_inc_gamma_p(float(d), kappa(d) * x**d)


def sep_limit_cdf(d: int, t: float) -> float:
    """Limiting CDF of the scaled separation n^(2/d) * theta_min."""
    d = check_dimension(d)
    if t < 0:
        return 0.0
    return -math.expm1(-kappa(d) * t**d / 2.0)


def sep_c(d: int) -> float:
    """Limiting mean of the scaled separation: (kappa_d/2)^(-1/d) Gamma(1 + 1/d)."""
    d = check_dimension(d)
    return (kappa(d) / 2.0) ** (-1.0 / d) * math.exp(specfun.ln_gamma(1.0 + 1.0 / d))


def sep_var_limit(d: int) -> float:
    """Limiting variance of the scaled separation.

    For d=1 this equals 4 pi^2 (Gamma(3) - Gamma(2)^2 = 1); the general form
    is (kappa_d/2)^(-2/d) (Gamma(1+2/d) - Gamma(1+1/d)^2).
    """
    d = check_dimension(d)
    g1 = math.exp(specfun.ln_gamma(1.0 + 1.0 / d))
    g2 = math.exp(specfun.ln_gamma(1.0 + 2.0 / d))
    return (kappa(d) / 2.0) ** (-2.0 / d) * (g2 - g1 * g1)


def covering_coeff(d: int) -> float:
    """Conjectured covering-radius rate coefficient kappa_d^(-1/d)."""
    d = check_dimension(d)
    return kappa(d) ** (-1.0 / d)


def sep_prob_bound(d: int) -> float:
    """Lower bound for P(scaled separation >= sep_c(d)): 1 - Gamma(1 + 1/d)^d.

    The closed form extends to any d >= 1 (it tends to 1 - e^(-gamma)), so
    unlike the table-backed constants this one is not capped at 8.
    """
    try:
        d = operator.index(d)
    except TypeError:
        raise ValueError(f"sep_prob_bound requires a positive integer d, got {d!r}") from None
    if d < 1:
        raise ValueError(f"sep_prob_bound requires d >= 1, got {d}")
    return 1.0 - math.exp(d * specfun.ln_gamma(1.0 + 1.0 / d))


def sep_lower_factor(d: int) -> float:
    """Finite-n factor: mean scaled separation >= sep_c(d) * sep_lower_factor(d) for all n >= 2."""
    d = check_dimension(d)
    return (d + 1.0) ** (-1.0 / d) / math.exp(specfun.ln_gamma(2.0 + 1.0 / d))


def cap_area_euclid(d: int, rho: float) -> float:
    """Normalized area of a spherical cap with Euclidean boundary radius rho.

    sigma_d(C_rho) = I_{rho^2/4}(d/2, d/2).  For rho <= sqrt(2) this equals
    kappa_d rho^d 2F1(1 - d/2, d/2; 1 + d/2; rho^2/4), which the tests use as
    the cross-check route.
    """
    d = check_dimension(d)
    if not 0.0 <= rho <= 2.0:
        raise ValueError(f"cap radius must be in [0, 2], got {rho}")
    return specfun.reg_inc_beta(rho * rho / 4.0, d / 2.0, d / 2.0)


def cap_area_hypergeom(d: int, rho: float) -> float:
    """Hypergeometric form of cap_area_euclid, valid for rho <= sqrt(2)."""
    d = check_dimension(d)
    if not 0.0 <= rho <= math.sqrt(2.0):
        raise ValueError(f"hypergeometric cap form needs rho in [0, sqrt(2)], got {rho}")
    return kappa(d) * rho**d * specfun.gauss_2f1(
        1.0 - d / 2.0, d / 2.0, 1.0 + d / 2.0, rho * rho / 4.0
    )


def cap_area_geodesic(d: int, eps: float) -> float:
    """Normalized area of a spherical cap with geodesic radius eps in [0, pi]."""
    d = check_dimension(d)
    if not 0.0 <= eps <= math.pi:
        raise ValueError(f"geodesic cap radius must be in [0, pi], got {eps}")
    return cap_area_euclid(d, 2.0 * math.sin(eps / 2.0))


def angle_pdf(d: int, theta: float) -> float:
    """Density of the angle between two independent uniform points on S^d."""
    d = check_dimension(d)
    if not 0.0 <= theta <= math.pi:
        raise ValueError(f"angle must be in [0, pi], got {theta}")
    return d * kappa(d) * math.sin(theta) ** (d - 1)


def circle_gap_mean(n: int, k: int) -> float:
    """Expected arc length of the k-th largest gap of n uniform points on the circle."""
    if n < 2:
        raise ValueError(f"circle_gap_mean requires n >= 2, got {n}")
    if not 1 <= k <= n:
        raise ValueError(f"circle_gap_mean requires 1 <= k <= n, got k={k}")
    return 2.0 * math.pi / n * specfun.harmonic(n, k)


def circle_cov_mean(n: int) -> float:
    """Expected geodesic covering radius of n uniform points on the circle."""
    if n < 2:
        raise ValueError(f"circle_cov_mean requires n >= 2, got {n}")
    return math.pi / n * specfun.harmonic(n, 1)


def d2_moment_refined(p: float, n: int) -> float:
    """Finite-n mean of the hole-radius power sum on S^2, up to an exponentially small tail.

    Exact Gamma-ratio product (2n-4) 2^p Gamma(2+p/2) Gamma(n+1) / Gamma(n+1+p/2);
    no series truncation.  The first-order correction coefficient of the
    matching 1/n expansion is exposed as d2_moment_correction.
    """
    if n < 4:
        raise ValueError(f"d2_moment_refined requires n >= 4, got {n}")
    if p < 0:
        raise ValueError(f"moment order must be nonnegative, got {p}")
    return (2.0 * n - 4.0) * 2.0**p * math.exp(
        specfun.ln_gamma(2.0 + p / 2.0)
        + specfun.ln_gamma(n + 1.0)
        - specfun.ln_gamma(n + 1.0 + p / 2.0)
    )


def d2_moment_correction(p: float) -> float:
    """First-order 1/n correction coefficient of d2_moment_refined: (1 + p/2) / 2."""
    if p < 0:
        raise ValueError(f"moment order must be nonnegative, got {p}")
    return (1.0 + p / 2.0) / 2.0


@dataclass(frozen=True)
class ConstantsTable:
    """All per-dimension scalar constants in one immutable record."""

    d: int
    kappa: float
    big_b: float
    sep_c: float
    covering_coeff: float
    sep_var_limit: float
    sep_lower_factor: float
    sep_prob_bound: float


def constants_table(d: int) -> ConstantsTable:
    d = check_dimension(d)
    return ConstantsTable(
        d=d,
        kappa=kappa(d),
        big_b=big_b(d),
        sep_c=sep_c(d),
        covering_coeff=covering_coeff(d),
        sep_var_limit=sep_var_limit(d),
        sep_lower_factor=sep_lower_factor(d),
        sep_prob_bound=sep_prob_bound(d),
    )


def sphere_area(d: int) -> float:
    """Surface measure of S^d in R^(d+1) (the un-normalized total area)."""
    d = check_dimension(d)
    return 2.0 * math.pi ** ((d + 1) / 2.0) / math.exp(specfun.ln_gamma((d + 1) / 2.0))


def ball_volume(d: int) -> float:
    """Volume of the unit ball in R^(d+1)."""
    return sphere_area(d) / (d + 1)
