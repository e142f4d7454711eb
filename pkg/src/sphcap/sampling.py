"""Point generation on S^d: seeded uniform/density sampling, Fibonacci points, file I/O.

A Configuration is an (n, d+1) float64 array of unit rows plus a provenance
tag.  Randomness always flows through a SeedSpec; the per-trial stream is a
pure function of (master_seed, trial_index) via a counter-based generator, so
results cannot depend on scheduling or worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .constants import check_dimension

_NORM_TOL = 1e-12
_LOAD_NORM_TOL = 1e-9
_MAX_REJECTION_FACTOR = 10**6


@dataclass(frozen=True)
class SeedSpec:
    """Addresses one reproducible random stream."""

    master_seed: int
    trial_index: int = 0

    def generator(self) -> np.random.Generator:
        # SeedSequence hashes the (master_seed, trial_index) pair into the
        # Philox key; streams for distinct trials never share state.
        ss = np.random.SeedSequence((int(self.master_seed), int(self.trial_index)))
        return np.random.Generator(np.random.Philox(ss))


@dataclass(frozen=True)
class Configuration:
    """An ordered set of points on S^d.

    points has shape (n, d+1); each row is a unit vector (the SpherePoint).
    """

    d: int
    points: np.ndarray = field(repr=False)
    provenance: str = "unknown"

    def __post_init__(self):
        d = check_dimension(self.d)
        pts = np.asarray(self.points, dtype=np.float64)
        if pts.ndim != 2 or pts.shape[1] != d + 1:
            raise ValueError(
                f"points must have shape (n, {d + 1}) for d={d}, got {pts.shape}"
            )
        if pts.shape[0] < 2:
            raise ValueError(f"a configuration needs at least 2 points, got {pts.shape[0]}")
        norms = np.linalg.norm(pts, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > _NORM_TOL)
        if bad.size:
            raise ValueError(
                f"points at rows {bad[:8].tolist()} are off the unit sphere "
                f"(|norm - 1| up to {np.abs(norms - 1.0).max():.3e})"
            )
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "points", pts)

    @property
    def n(self) -> int:
        return self.points.shape[0]


def _normalize_rows(x: np.ndarray) -> np.ndarray:
    return x / np.linalg.norm(x, axis=1, keepdims=True)


def _draw_uniform(rng: np.random.Generator, d: int, n: int) -> np.ndarray:
    """n uniform points via normalized Gaussians, redrawn on (measure-zero) zero rows."""
    pts = rng.standard_normal((n, d + 1))
    norms = np.linalg.norm(pts, axis=1)
    while np.any(norms < 1e-8):
        bad = norms < 1e-8
        pts[bad] = rng.standard_normal((int(bad.sum()), d + 1))
        norms = np.linalg.norm(pts, axis=1)
    return pts / norms[:, None]


def sample_uniform(d: int, n: int, seed: SeedSpec) -> Configuration:
    """n i.i.d. uniform points on S^d, deterministic given the SeedSpec."""
    d = check_dimension(d)
    if n < 2:
        raise ValueError(f"sample_uniform requires n >= 2, got {n}")
    pts = _draw_uniform(seed.generator(), d, n)
    return Configuration(
        d=d, points=pts, provenance=f"uniform(seed={seed.master_seed}, trial={seed.trial_index})"
    )


def sample_density(
    d: int,
    n: int,
    seed: SeedSpec,
    eta: Callable[[np.ndarray], np.ndarray],
    eta_max: float,
) -> Configuration:
    """n i.i.d. points with density eta (w.r.t. the uniform measure) by rejection.

    eta is called on an (m, d+1) block of proposal points and must return the
    m density values, all positive and <= eta_max.  With eta identically 1
    and eta_max = 1 every proposal is accepted, reproducing sample_uniform
    draw for draw.
    """
    d = check_dimension(d)
    if n < 2:
        raise ValueError(f"sample_density requires n >= 2, got {n}")
    if not eta_max > 0.0:
        raise ValueError(f"eta_max must be positive, got {eta_max}")
    rng = seed.generator()
    kept: list[np.ndarray] = []
    accepted = 0
    proposals = 0
    budget = _MAX_REJECTION_FACTOR * n
    m = n
    while accepted < n:
        block = _draw_uniform(rng, d, m)
        u = rng.random(m)
        values = np.asarray(eta(block), dtype=np.float64)
        if values.shape != (m,):
            raise ValueError(f"eta must return shape ({m},), got {values.shape}")
        if np.any(values <= 0.0):
            raise ValueError("eta must be strictly positive on the sphere")
        if np.any(values > eta_max * (1.0 + 1e-12)):
            raise ValueError("eta exceeds the declared eta_max")
        take = u * eta_max < values
        kept.append(block[take])
        accepted += int(take.sum())
        proposals += m
        if proposals > budget and accepted < n:
            raise ValueError(
                f"rejection sampling used {proposals} proposals for {accepted}/{n} "
                f"accepted points; eta_max={eta_max} looks far too large"
            )
        # grow the proposal block geometrically (memory-capped) so a hopeless
        # acceptance rate hits the budget check in O(log budget) rounds
        m = min(2 * m, 1 << 19)
    pts = np.concatenate(kept, axis=0)[:n]
    return Configuration(
        d=d, points=pts, provenance=f"density(seed={seed.master_seed}, trial={seed.trial_index})"
    )


def fibonacci_s2(n: int) -> Configuration:
    """The n-point Fibonacci configuration on S^2."""
    if n < 2:
        raise ValueError(f"fibonacci_s2 requires n >= 2, got {n}")
    j = np.arange(1, n + 1, dtype=np.float64)
    z = 1.0 - (2.0 * j - 1.0) / n
    sin_theta = np.sqrt(np.clip(1.0 - z * z, 0.0, 1.0))
    golden = (1.0 + np.sqrt(5.0)) / 2.0
    phi = np.mod(np.pi / golden * (n + 1.0 - 2.0 * j), 2.0 * np.pi)
    pts = np.column_stack((sin_theta * np.cos(phi), sin_theta * np.sin(phi), z))
    pts = _normalize_rows(pts)
    return Configuration(d=2, points=pts, provenance="fibonacci")


def load_external(path) -> Configuration:
    """Read a point file: one point per line, d+1 whitespace-separated floats, '#' comments."""
    rows: list[list[float]] = []
    width = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            body = line.split("#", 1)[0].strip()
            if not body:
                continue
            try:
                values = [float(tok) for tok in body.split()]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: cannot parse point: {exc}") from None
            if width is None:
                width = len(values)
                if width < 2:
                    raise ValueError(f"{path}:{lineno}: points need at least 2 coordinates")
            elif len(values) != width:
                raise ValueError(
                    f"{path}:{lineno}: expected {width} coordinates, got {len(values)}"
                )
            rows.append(values)
    if width is None or len(rows) < 2:
        raise ValueError(f"{path}: need at least 2 points, got {len(rows)}")
    pts = np.array(rows, dtype=np.float64)
    norms = np.linalg.norm(pts, axis=1)
    bad = np.flatnonzero(np.abs(norms - 1.0) > _LOAD_NORM_TOL)
    if bad.size:
        raise ValueError(
            f"{path}: rows {(bad + 1)[:8].tolist()} are off the unit sphere beyond "
            f"{_LOAD_NORM_TOL:g} (worst |norm - 1| = {np.abs(norms - 1.0).max():.3e})"
        )
    if np.abs(norms - 1.0).max() > _NORM_TOL:
        pts = pts / norms[:, None]
    return Configuration(d=width - 1, points=pts, provenance=f"external({path})")


def format_points(config: Configuration, header: tuple[str, ...] = ()) -> str:
    """Serialize a Configuration in the external file format (round-trip exact)."""
    lines = [f"# {h}" for h in header]
    for row in config.points:
        lines.append(" ".join(format(v, ".17g") for v in row))
    return "\n".join(lines) + "\n"
