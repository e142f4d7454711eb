"""Geometric statistics of a single configuration: hole radii, covering
radius, separation, pairwise angles, circle gaps, cap-area and weighted
facet sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import constants
from .empirical import EmpiricalDistribution
from .hull import HullResult, convex_hull
from .sampling import Configuration

_DUPLICATE_TOL = 1e-14
_GRID_MIN_POINTS = 256


class DuplicatePointError(ValueError):
    """Coincident points (pair distance below 1e-14); the statistics assume distinct points."""


class HoleSummary:
    """Per-facet hole radii of one hull, with the derived covering statistics.

    rho[k] is the Euclidean radius of the empty cap cut off by facet k,
    alpha[k] the matching geodesic radius (rho = 2 sin(alpha/2)).  When the
    origin lies outside the hull the unique facet with minimal |offset| gets
    the complementary-cap radius sqrt(2 + 2a) instead of sqrt(2 - 2a).
    """

    def __init__(self, d: int, rho: np.ndarray, weighted_rho2: float, origin_inside: bool):
        self.d = d
        self.rho = rho
        self.alpha = 2.0 * np.arcsin(np.clip(rho, 0.0, 2.0) / 2.0)
        self.covering_rho = float(rho.max())
        self.covering_alpha = float(2.0 * math.asin(min(self.covering_rho / 2.0, 1.0)))
        self.weighted_rho2 = weighted_rho2
        self.origin_inside = origin_inside

    @cached_property
    def cap_area_sum(self) -> float:
        """Sum of normalized cap areas, computed on demand."""
        if self.d == 2:
            # sigma_2 of a cap is rho^2/4 exactly
            return float(np.sum(self.rho**2) / 4.0)
        return float(sum(constants.cap_area_euclid(self.d, r) for r in self.rho))


def hole_radii(config: Configuration, hull: HullResult) -> HoleSummary:
    """Hole radii for every facet of the hull of a configuration."""
    d = config.d
    offs = hull.offsets
    rho_sq = 2.0 - 2.0 * offs
    if not hull.origin_inside:
        k_star = int(np.argmin(np.abs(offs)))
        rho_sq = rho_sq.copy()
        rho_sq[k_star] = 2.0 + 2.0 * offs[k_star]
    rho = np.sqrt(np.clip(rho_sq, 0.0, 4.0))
    weighted = float(np.sum(hull.areas * rho_sq) / hull.surface_area)
    return HoleSummary(d, rho, weighted, hull.origin_inside)


def moment_sum(holes: HoleSummary, p: float) -> float:
    """Sum of the p-th powers of the hole radii; p = 0 counts facets."""
    if p < 0:
        raise ValueError(f"moment order must be nonnegative, got {p}")
    if p == 0:
        return float(holes.rho.size)
    return float(np.sum(holes.rho**p))


@dataclass(frozen=True)
class WeightedFacetStat:
    weighted_rho2: float
    one_minus_AN_over_A: float
    one_minus_VN_over_V: float
    cross_term: float


def weighted_facet_stat(config: Configuration, hull: HullResult, holes: HoleSummary) -> WeightedFacetStat:
    """Area-weighted squared hole radii and its volume/area-deficit decomposition.

    The exact identity
        weighted_rho2 = 2(1 - V_N/V) - 2(1 - A_N/A) + cross_term,
        cross_term    = 2(1 - A_N/A)(1 - (d+1) V_N/A_N)
    holds whenever the origin is inside the hull.
    """
    if not hull.origin_inside:
        raise ValueError("weighted facet statistic requires the origin inside the hull")
    d = config.d
    area_deficit = 1.0 - hull.surface_area / constants.sphere_area(d)
    vol_deficit = 1.0 - hull.volume / constants.ball_volume(d)
    cross = 2.0 * area_deficit * (1.0 - (d + 1) * hull.volume / hull.surface_area)
    return WeightedFacetStat(
        weighted_rho2=holes.weighted_rho2,
        one_minus_AN_over_A=area_deficit,
        one_minus_VN_over_V=vol_deficit,
        cross_term=cross,
    )


@dataclass(frozen=True)
class SeparationSummary:
    theta_min: float
    euclid_min: float
    argmin_pair: tuple[int, int]


def _pair_from_candidates(pts: np.ndarray, ii: np.ndarray, jj: np.ndarray) -> tuple[float, int, int]:
    """Exact minimum over candidate pairs; lexicographic (i, j) on distance ties."""
    dots = np.einsum("ij,ij->i", pts[ii], pts[jj])
    sq = np.maximum(2.0 - 2.0 * dots, 0.0)
    best = sq.min()
    tied = np.flatnonzero(sq == best)
    lo = np.minimum(ii[tied], jj[tied])
    hi = np.maximum(ii[tied], jj[tied])
    k = tied[np.lexsort((hi, lo))[0]]
    i, j = int(min(ii[k], jj[k])), int(max(ii[k], jj[k]))
    # direct subtraction is exact for coincident rows and loses no digits for
    # near pairs, unlike the cancellation-prone 2 - 2<x,y> route
    return float(np.linalg.norm(pts[i] - pts[j])), i, j


def _separation_brute(pts: np.ndarray) -> tuple[float, int, int]:
    n = pts.shape[0]
    block = 2048 if n > 4096 else n
    best = (np.inf, -1, -1)
    for start in range(0, n, block):
        stop = min(start + block, n)
        gram = pts[start:stop] @ pts.T
        sq = 2.0 - 2.0 * gram
        rows = np.arange(start, stop)
        mask = rows[:, None] < np.arange(n)[None, :]
        sq = np.where(mask, sq, np.inf)
        k = int(np.argmin(sq))
        i, j = divmod(k, n)
        val = sq[i, j]
        if val < best[0]:
            best = (val, start + i, j)
        elif val == best[0] and (start + i, j) < (best[1], best[2]):
            best = (val, start + i, j)
    # re-evaluate the winning pair with the same pairwise formula the grid uses
    ii = np.array([best[1]])
    jj = np.array([best[2]])
    return _pair_from_candidates(pts, ii, jj)


def _separation_grid(pts: np.ndarray) -> tuple[float, int, int]:
    n, m = pts.shape
    # initial upper bound from points adjacent in the last coordinate
    order = np.argsort(pts[:, -1], kind="stable")
    diffs = pts[order[1:]] - pts[order[:-1]]
    bound = float(np.sqrt(np.min(np.einsum("ij,ij->i", diffs, diffs))))
    if bound == 0.0:
        return _pair_from_candidates(pts, order[:-1], order[1:])
    cell = bound
    keys = np.floor(pts / cell).astype(np.int64)

    korder = np.lexsort(keys.T[::-1])
    sk = keys[korder]
    breaks = np.flatnonzero(np.any(np.diff(sk, axis=0) != 0, axis=1))
    starts = np.concatenate(([0], breaks + 1, [n]))
    cells: dict[tuple[int, ...], np.ndarray] = {}
    for a, b in zip(starts[:-1], starts[1:]):
        cells[tuple(int(v) for v in sk[a])] = korder[a:b]

    # half of the 3^m - 1 neighbor offsets (first nonzero component +1)
    offsets = []
    for flat in range(3**m):
        delta = [((flat // 3**t) % 3) - 1 for t in range(m)]
        nz = [v for v in delta if v != 0]
        if nz and nz[0] == 1:
            offsets.append(tuple(delta))

    ii_parts, jj_parts = [], []
    for key, idx in cells.items():
        if idx.size > 1:
            a, b = np.triu_indices(idx.size, k=1)
            ii_parts.append(idx[a])
            jj_parts.append(idx[b])
        for delta in offsets:
            other = cells.get(tuple(k + o for k, o in zip(key, delta)))
            if other is not None:
                ii_parts.append(np.repeat(idx, other.size))
                jj_parts.append(np.tile(other, idx.size))
    ii = np.concatenate(ii_parts)
    jj = np.concatenate(jj_parts)
    return _pair_from_candidates(pts, ii, jj)


def separation(config: Configuration, method: str = "auto") -> SeparationSummary:
    """Minimum pairwise geodesic distance, with the realizing pair.

    method="brute" always scans all pairs; "grid" uses the cell-grid
    acceleration (d = 2, 3); "auto" picks the grid for large configurations.
    Both paths return the identical pair.
    """
    pts = config.points
    n = pts.shape[0]
    if method == "auto":
        method = "grid" if config.d in (2, 3) and n >= _GRID_MIN_POINTS else "brute"
    if method == "grid":
        if config.d not in (2, 3):
            raise ValueError(f"grid separation supports d=2,3 only, got d={config.d}")
        euclid, i, j = _separation_grid(pts)
    elif method == "brute":
        euclid, i, j = _separation_brute(pts)
    else:
        raise ValueError(f"unknown separation method {method!r}")
    if euclid < _DUPLICATE_TOL:
        raise DuplicatePointError(f"duplicate points at indices ({i}, {j}): distance {euclid:.3e}")
    theta = 2.0 * math.asin(min(euclid / 2.0, 1.0))
    return SeparationSummary(theta_min=theta, euclid_min=euclid, argmin_pair=(i, j))


def pairwise_angle_distribution(config: Configuration) -> EmpiricalDistribution:
    """Empirical distribution of all C(N,2) pairwise geodesic angles."""
    pts = config.points
    n = pts.shape[0]
    if n < 2:
        raise ValueError("pairwise angles need at least two points")
    chunks = []
    block = 2048 if n > 4096 else n
    for start in range(0, n, block):
        stop = min(start + block, n)
        gram = pts[start:stop] @ pts.T
        rows = np.arange(start, stop)
        mask = rows[:, None] < np.arange(n)[None, :]
        vals = gram[mask]
        chunks.append(np.arccos(np.clip(vals, -1.0, 1.0)))
    return EmpiricalDistribution(np.concatenate(chunks))


def circle_gaps(config: Configuration) -> np.ndarray:
    """Arc lengths between consecutive circle points, sorted descending."""
    if config.d != 1:
        raise ValueError(f"circle gaps are defined for d=1 only, got d={config.d}")
    ang = np.sort(np.arctan2(config.points[:, 1], config.points[:, 0]))
    gaps = np.diff(ang, append=ang[0] + 2.0 * np.pi)
    if gaps.min() < _DUPLICATE_TOL:
        raise DuplicatePointError("duplicate points on the circle")
    return np.sort(gaps)[::-1]


def configuration_metrics(config: Configuration, hull: HullResult | None = None):
    """Hull, holes and separation of one configuration in a single record."""
    if hull is None:
        hull = convex_hull(config)
    holes = hole_radii(config, hull)
    sep = separation(config)
    return hull, holes, sep
