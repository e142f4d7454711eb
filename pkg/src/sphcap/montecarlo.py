"""Seeded Monte Carlo experiments over random sphere configurations.

Trials are keyed by (master_seed, trial_index) counter-based substreams, so
results are bit-exact regardless of worker count: workers process fixed
64-trial chunks and the runner merges per-trial outputs in index order.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import constants, metrics
from .empirical import EmpiricalDistribution
from .hull import DegenerateInputError, convex_hull
from .metrics import DuplicatePointError
from .sampling import Configuration, SeedSpec, _draw_uniform

log = logging.getLogger(__name__)

_CHUNK = 64
_MAX_RETRIES = 3

STATISTICS = (
    "moment",
    "facet_count",
    "covering",
    "separation",
    "scaled_separation",
    "gap",
    "weighted_rho2",
    "cap_area_sum",
    "scaled_hole_radii",
    "angle_dist",
)
# statistics whose trials are pooled into one empirical distribution
_POOLED = {"scaled_hole_radii", "angle_dist"}
_NEEDS_HULL = {"moment", "facet_count", "covering", "weighted_rho2", "cap_area_sum", "scaled_hole_radii"}


@dataclass(frozen=True)
class ExperimentConfig:
    d: int
    n_points: int
    n_trials: int
    master_seed: int
    statistic: str
    p: float | None = None
    k: int | None = None
    output: str | None = None

    def __post_init__(self):
        constants.check_dimension(self.d)
        if self.n_points < 2:
            raise ValueError(f"need at least 2 points, got {self.n_points}")
        if self.n_trials < 1:
            raise ValueError(f"need at least 1 trial, got {self.n_trials}")
        if not 0 <= int(self.master_seed) < 2**64:
            raise ValueError("master_seed must fit in 64 bits")
        if self.statistic not in STATISTICS:
            raise ValueError(f"unknown statistic {self.statistic!r}")
        if self.statistic == "moment":
            if self.p is None or self.p < 0:
                raise ValueError("moment statistic needs a nonnegative order p")
        elif self.statistic == "gap":
            if self.d != 1:
                raise ValueError("gap statistic is defined for d=1 only")
            if self.k is None or not 1 <= self.k <= self.n_points:
                raise ValueError(f"gap rank k must lie in 1..{self.n_points}")
        else:
            if self.p is not None or self.k is not None:
                raise ValueError(f"statistic {self.statistic!r} takes no p or k parameter")
        if self.statistic in _NEEDS_HULL and self.n_points < self.d + 2:
            raise ValueError(f"hull statistics need at least d+2 = {self.d + 2} points")


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    trials: int
    raw_samples: np.ndarray | None = None


def _gap_fast_values(cfg: ExperimentConfig, gaps: np.ndarray) -> np.ndarray:
    """d=1 statistics straight from the descending gap vector (no hull)."""
    stat = cfg.statistic
    if stat == "facet_count":
        return np.array([float(gaps.size)])
    if stat == "gap":
        return np.array([gaps[cfg.k - 1]])
    if stat == "covering":
        return np.array([gaps[0] / 2.0])
    rho = 2.0 * np.sin(gaps / 4.0)
    if stat == "moment":
        return np.array([float(gaps.size)]) if cfg.p == 0 else np.array([np.sum(rho**cfg.p)])
    if stat == "scaled_hole_radii":
        return cfg.n_points * rho
    if stat == "cap_area_sum":
        return np.array([np.sum(gaps) / (2.0 * np.pi)])
    if stat == "weighted_rho2":
        chord = 2.0 * np.sin(gaps / 2.0)
        return np.array([np.sum(chord * rho**2) / np.sum(chord)])
    raise AssertionError(stat)


def _hull_values(cfg: ExperimentConfig, config: Configuration) -> np.ndarray:
    hull = convex_hull(config)
    stat = cfg.statistic
    if stat == "facet_count":
        return np.array([float(hull.facet_count)])
    holes = metrics.hole_radii(config, hull)
    if stat == "moment":
        return np.array([metrics.moment_sum(holes, cfg.p)])
    if stat == "covering":
        return np.array([holes.covering_alpha])
    if stat == "weighted_rho2":
        return np.array([holes.weighted_rho2])
    if stat == "cap_area_sum":
        return np.array([holes.cap_area_sum])
    if stat == "scaled_hole_radii":
        return cfg.n_points ** (1.0 / cfg.d) * holes.rho
    raise AssertionError(stat)


def _evaluate(cfg: ExperimentConfig, config: Configuration) -> np.ndarray:
    stat = cfg.statistic
    if stat == "angle_dist":
        return metrics.pairwise_angle_distribution(config).samples
    if stat in ("separation", "scaled_separation"):
        sep = metrics.separation(config)
        value = sep.theta_min
        if stat == "scaled_separation":
            value *= cfg.n_points ** (2.0 / cfg.d)
        return np.array([value])
    if cfg.d == 1:
        gaps = metrics.circle_gaps(config)
        if gaps[0] < np.pi:    # origin strictly inside; the generic hull path handles the rest
            return _gap_fast_values(cfg, gaps)
    return _hull_values(cfg, config)


def _run_trial(cfg: ExperimentConfig, trial_index: int) -> np.ndarray:
    rng = SeedSpec(cfg.master_seed, trial_index).generator()
    for attempt in range(_MAX_RETRIES + 1):
        pts = _draw_uniform(rng, cfg.d, cfg.n_points)
        config = Configuration(
            cfg.d, pts, provenance=f"uniform(seed={cfg.master_seed}, trial={trial_index})"
        )
        try:
            return _evaluate(cfg, config)
        except (DegenerateInputError, DuplicatePointError) as exc:
            log.warning(
                "trial %d attempt %d degenerate (%s); redrawing", trial_index, attempt + 1, exc
            )
    raise RuntimeError(f"trial {trial_index} still degenerate after {_MAX_RETRIES} retries")


def _run_chunk(cfg: ExperimentConfig, start: int, stop: int) -> list[np.ndarray]:
    return [_run_trial(cfg, t) for t in range(start, stop)]


def _chunk_ranges(n_trials: int):
    return [(s, min(s + _CHUNK, n_trials)) for s in range(0, n_trials, _CHUNK)]


def _collect(cfg: ExperimentConfig, workers: int) -> list[np.ndarray]:
    ranges = _chunk_ranges(cfg.n_trials)
    if workers > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_run_chunk, cfg, a, b) for a, b in ranges]
            per_chunk = [f.result() for f in futures]
    else:
        per_chunk = [_run_chunk(cfg, a, b) for a, b in ranges]
    return [arr for chunk in per_chunk for arr in chunk]


def run(cfg: ExperimentConfig, workers: int = 1):
    """Execute all trials; Estimate for scalar statistics, pooled distribution otherwise."""
    values = _collect(cfg, workers)
    if cfg.statistic in _POOLED:
        return EmpiricalDistribution(np.concatenate(values))
    samples = np.concatenate(values)
    mean = float(np.mean(samples))
    stderr = float(np.std(samples, ddof=1) / math.sqrt(samples.size)) if samples.size > 1 else 0.0
    return Estimate(mean=mean, stderr=stderr, trials=cfg.n_trials, raw_samples=samples)


def scaled_separation_cdf(cfg: ExperimentConfig, workers: int = 1) -> EmpiricalDistribution:
    """Pooled N^(2/d) theta_min samples across trials."""
    if cfg.statistic != "scaled_separation":
        raise ValueError("config statistic must be scaled_separation")
    est = run(cfg, workers=workers)
    return EmpiricalDistribution(est.raw_samples)


def scaled_hole_radii_pool(cfg: ExperimentConfig, workers: int = 1) -> EmpiricalDistribution:
    """Pooled N^(1/d) rho_k over all facets and trials."""
    if cfg.statistic != "scaled_hole_radii":
        raise ValueError("config statistic must be scaled_hole_radii")
    return run(cfg, workers=workers)


def _gap_vector_trial(master_seed: int, n_points: int, t: int) -> np.ndarray:
    rng = SeedSpec(master_seed, t).generator()
    for attempt in range(_MAX_RETRIES + 1):
        pts = _draw_uniform(rng, 1, n_points)
        config = Configuration(1, pts, provenance=f"uniform(seed={master_seed}, trial={t})")
        try:
            return metrics.circle_gaps(config)
        except DuplicatePointError as exc:
            log.warning("trial %d attempt %d degenerate (%s); redrawing", t, attempt + 1, exc)
    raise RuntimeError(f"trial {t} still degenerate after {_MAX_RETRIES} retries")


def _gap_vector_chunk(master_seed: int, n_points: int, a: int, b: int):
    total = np.zeros(n_points)
    total_sq = np.zeros(n_points)
    for t in range(a, b):
        gaps = _gap_vector_trial(master_seed, n_points, t)
        total += gaps
        total_sq += gaps * gaps
    return total, total_sq


def gap_experiment(cfg: ExperimentConfig, workers: int = 1) -> list[Estimate]:
    """Mean arc length of the k-th largest circle gap, for every rank k.

    Per-trial gap vectors are accumulated as fixed-chunk partial sums and the
    partials merged in chunk order, keeping the totals worker-count independent.
    """
    if cfg.d != 1:
        raise ValueError("gap experiment is defined for d=1 only")
    ranges = _chunk_ranges(cfg.n_trials)
    if workers > 1 and len(ranges) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_gap_vector_chunk, cfg.master_seed, cfg.n_points, a, b)
                for a, b in ranges
            ]
            partials = [f.result() for f in futures]
    else:
        partials = [_gap_vector_chunk(cfg.master_seed, cfg.n_points, a, b) for a, b in ranges]

    total = np.zeros(cfg.n_points)
    total_sq = np.zeros(cfg.n_points)
    for t_sum, t_sq in partials:
        total += t_sum
        total_sq += t_sq
    n_t = cfg.n_trials
    means = total / n_t
    if n_t > 1:
        var = np.maximum(total_sq - n_t * means**2, 0.0) / (n_t - 1)
        errs = np.sqrt(var / n_t)
    else:
        errs = np.zeros(cfg.n_points)
    return [
        Estimate(mean=float(means[k]), stderr=float(errs[k]), trials=n_t)
        for k in range(cfg.n_points)
    ]


def bounds_experiment(cfg: ExperimentConfig, workers: int = 1, grid_size: int = 10) -> dict:
    """Empirical separation survival P(sep >= eps) against the product and
    linear bounds, plus the probability bound at the limiting constant."""
    if cfg.statistic != "separation":
        raise ValueError("config statistic must be separation")
    est = run(cfg, workers=workers)
    theta = est.raw_samples
    d, n, n_t = cfg.d, cfg.n_points, cfg.n_trials

    # grid capped where the linear lower bound crosses zero: kappa C(n,2) eps^d = 1
    pairs = n * (n - 1) / 2.0
    eps_max = (1.0 / (constants.kappa(d) * pairs)) ** (1.0 / d)
    eps_grid = eps_max * np.linspace(0.1, 1.0, grid_size)

    k_range = np.arange(1, n, dtype=float)
    empirical, sigma, upper, lower_prod, lower_lin = [], [], [], [], []
    for eps in eps_grid:
        p_hat = float(np.mean(theta >= eps))
        empirical.append(p_hat)
        sigma.append(math.sqrt(max(p_hat * (1.0 - p_hat), 1e-12) / n_t))
        a_half = constants.cap_area_geodesic(d, eps / 2.0)
        a_full = constants.cap_area_geodesic(d, eps)
        upper.append(float(np.prod(np.clip(1.0 - k_range * a_half, 0.0, 1.0))))
        lower_prod.append(float(np.prod(np.clip(1.0 - k_range * a_full, 0.0, 1.0))))
        lower_lin.append(max(1.0 - constants.kappa(d) * pairs * eps**d, 0.0))

    scale = n ** (2.0 / d)
    scaled = scale * theta
    c_d = constants.sep_c(d)
    p_at_c = float(np.mean(scaled >= c_d))
    return {
        "epsilon": [float(e) for e in eps_grid],
        "empirical": empirical,
        "sigma": sigma,
        "upper": upper,
        "lower_product": lower_prod,
        "lower_linear": lower_lin,
        "prob_at_c": p_at_c,
        "prob_at_c_sigma": math.sqrt(max(p_at_c * (1.0 - p_at_c), 1e-12) / n_t),
        "prob_bound": constants.sep_prob_bound(d),
        "scaled_mean": float(np.mean(scaled)),
        "scaled_stderr": float(np.std(scaled, ddof=1) / math.sqrt(n_t)) if n_t > 1 else 0.0,
        "lower_factor_target": constants.sep_c(d) * constants.sep_lower_factor(d),
    }


def covering_trend(d: int, n_ladder, trials: int, master_seed: int, workers: int = 1) -> list[dict]:
    """Mean covering radius along an n-ladder against the conjectured
    covering_coeff(d) (log n / n)^(1/d) rate.  Report-only: the convergence
    is known to be slow, so no pass/fail is attached."""
    rows = []
    for n in n_ladder:
        cfg = ExperimentConfig(
            d=d, n_points=int(n), n_trials=trials, master_seed=master_seed, statistic="covering"
        )
        est = run(cfg, workers=workers)
        alpha = est.raw_samples
        rho = 2.0 * np.sin(alpha / 2.0)      # exact per-sample transform of the geodesic radius
        target = constants.covering_coeff(d) * (math.log(n) / n) ** (1.0 / d)
        row = {
            "n": int(n),
            "trials": trials,
            "mean_alpha": est.mean,
            "stderr_alpha": est.stderr,
            "mean_rho": float(np.mean(rho)),
            "coeff_ratio": float(np.mean(rho)) / target,
        }
        if d == 1:
            row["exact_ratio"] = est.mean / constants.circle_cov_mean(int(n))
        rows.append(row)
    return rows
