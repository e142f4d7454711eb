"""Convex hulls of sphere configurations: simplicial facets with outward
normals, signed origin offsets, areas, and volume cross-checks.

Facet combinatorics come from qhull; every geometric quantity (normals via
generalized cross products, areas via Gram determinants, volumes via pyramid
sums and raw simplex determinants) is recomputed here so the cross-checks
stay independent of the hull library.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import ConvexHull as _QhullConvexHull
from scipy.spatial import QhullError

from .sampling import Configuration

MAX_HULL_DIMENSION = 5      # sphere dimension; ambient hulls live in R^6 at most
# two-stage merged-facet detection: near-parallel adjacent normals flag a
# candidate pair (random hulls produce dihedral angles this small routinely),
# then the neighbor's vertices must actually sit on the facet's hyperplane
_COPLANAR_NORMAL_TOL = 1e-8
_COPLANAR_DIST_TOL = 1e-12
_DUPLICATE_ANGLE_TOL = 1e-14


class DegenerateInputError(ValueError):
    """Raised when d+2 input points share a supporting hyperplane (or coincide)."""

    def __init__(self, message: str, indices=()):
        super().__init__(message)
        self.indices = tuple(int(i) for i in indices)


@dataclass(frozen=True)
class Facet:
    """One simplicial hull facet: d+1 vertex indices plus its supporting plane."""

    vertex_indices: tuple[int, ...]
    unit_normal: np.ndarray = field(repr=False)
    offset_a: float
    area: float


@dataclass(frozen=True)
class HullResult:
    facets: list[Facet] = field(repr=False)
    facet_count: int
    origin_inside: bool
    volume: float
    surface_area: float
    euler_check: bool | None   # d = 2 only, None otherwise

    # dense per-facet views kept alongside the Facet list for vector math
    normals: np.ndarray = field(repr=False, default=None)
    offsets: np.ndarray = field(repr=False, default=None)
    areas: np.ndarray = field(repr=False, default=None)
    simplices: np.ndarray = field(repr=False, default=None)


def _cross_normals(edges: np.ndarray) -> np.ndarray:
    """Generalized cross product of d edge vectors in R^(d+1), batched.

    edges has shape (f, d, d+1); the result (f, d+1) is orthogonal to every
    edge, with magnitude d! times the facet area.
    """
    f, d, m = edges.shape
    normals = np.empty((f, m))
    cols = np.arange(m)
    for i in range(m):
        minor = edges[:, :, cols != i]
        normals[:, i] = (-1.0) ** i * np.linalg.det(minor)
    return normals


def _gram_areas(edges: np.ndarray) -> np.ndarray:
    """Facet simplex d-volumes from Gram determinants of the edge vectors."""
    d = edges.shape[1]
    gram = np.einsum("fij,fkj->fik", edges, edges)
    det = np.linalg.det(gram)
    return np.sqrt(np.clip(det, 0.0, None)) / math.factorial(d)


def facet_area(config: Configuration, vertex_indices) -> float:
    """d-volume of the simplex spanned by the given configuration points."""
    idx = tuple(int(i) for i in vertex_indices)
    if len(idx) != config.d + 1:
        raise ValueError(f"a facet in d={config.d} has {config.d + 1} vertices, got {len(idx)}")
    if len(set(idx)) != len(idx):
        raise ValueError(f"facet vertex indices must be distinct, got {idx}")
    verts = config.points[list(idx)]
    edges = verts[1:] - verts[0]
    return float(_gram_areas(edges[None, :, :])[0])


def _circle_simplices(config: Configuration) -> np.ndarray:
    """d=1 hull combinatorics: edges between angularly adjacent points."""
    ang = np.arctan2(config.points[:, 1], config.points[:, 0])
    order = np.argsort(ang, kind="stable")
    sorted_ang = ang[order]
    gaps = np.diff(sorted_ang, append=sorted_ang[0] + 2.0 * np.pi)
    dup = np.flatnonzero(gaps < _DUPLICATE_ANGLE_TOL)
    if dup.size:
        j = int(dup[0])
        pair = (int(order[j]), int(order[(j + 1) % len(order)]))
        raise DegenerateInputError(
            f"duplicate points on the circle at indices {pair}", indices=pair
        )
    nxt = np.roll(order, -1)
    return np.column_stack((order, nxt)).astype(np.intp)


def _qhull_simplices(config: Configuration) -> tuple[np.ndarray, np.ndarray]:
    pts = config.points
    n = pts.shape[0]
    try:
        qh = _QhullConvexHull(pts)
    except QhullError as exc:
        raise DegenerateInputError(
            f"input of {n} points is not full-dimensional in R^{config.d + 1}: {exc}",
            indices=range(n),
        ) from exc
    if len(qh.vertices) != n:
        missing = sorted(set(range(n)) - set(int(v) for v in qh.vertices))
        raise DegenerateInputError(
            f"points at indices {missing[:8]} are not hull vertices (coincident or "
            f"on a facet hyperplane)",
            indices=missing,
        )
    return qh.simplices.astype(np.intp), qh.neighbors.astype(np.intp)


def convex_hull(config: Configuration) -> HullResult:
    """All facets of the convex hull of a configuration.

    Normals are unit and outward (centroid side test), offsets are the signed
    distances from the origin to the facet hyperplanes, areas come from Gram
    determinants.  Inputs with d+2 points on a common supporting hyperplane
    raise DegenerateInputError with the offending indices.
    """
    d = config.d
    n = config.n
    if d > MAX_HULL_DIMENSION:
        raise ValueError(f"convex hulls are supported for d <= {MAX_HULL_DIMENSION}, got d={d}")
    if n < d + 2:
        raise ValueError(f"a full-dimensional hull in R^{d + 1} needs at least {d + 2} points")

    neighbors = None
    if d == 1:
        simplices = _circle_simplices(config)
    else:
        simplices, neighbors = _qhull_simplices(config)

    pts = config.points
    verts = pts[simplices]                       # (f, d+1, d+1)
    edges = verts[:, 1:, :] - verts[:, :1, :]    # (f, d, d+1)

    normals = _cross_normals(edges)
    lengths = np.linalg.norm(normals, axis=1)
    flat = np.flatnonzero(lengths <= 1e-13)
    if flat.size:
        bad = sorted(set(simplices[flat].ravel().tolist()))
        raise DegenerateInputError(
            f"facet through points {bad[:8]} has no well-defined normal "
            f"(degenerate simplex)",
            indices=bad,
        )
    normals /= lengths[:, None]

    # orient away from the hull interior; the vertex centroid is always interior
    centroid = pts.mean(axis=0)
    offsets = np.einsum("fi,fi->f", normals, verts[:, 0, :])
    wrong_side = normals @ centroid > offsets
    normals[wrong_side] *= -1.0
    offsets[wrong_side] *= -1.0

    if neighbors is not None:
        # adjacent coplanar simplices mean qhull triangulated a merged facet,
        # i.e. d+2 input points share a supporting hyperplane
        ndots = np.einsum("fi,fni->fn", normals, normals[neighbors])
        cand_f, cand_i = np.nonzero(ndots > 1.0 - _COPLANAR_NORMAL_TOL)
        for k, i in zip(cand_f, cand_i):
            j = int(neighbors[k, i])
            dist = np.abs(pts[simplices[j]] @ normals[k] - offsets[k]).max()
            if dist < _COPLANAR_DIST_TOL:
                bad = sorted(set(simplices[k].tolist()) | set(simplices[j].tolist()))
                raise DegenerateInputError(
                    f"points {bad} lie on a common facet hyperplane", indices=bad
                )

    areas = _gram_areas(edges)
    surface_area = float(areas.sum())
    volume = float((areas * offsets).sum() / (d + 1))
    origin_inside = bool(offsets.min() > 0.0)
    euler_check = bool(2 * n - simplices.shape[0] == 4) if d == 2 else None

    facets = [
        Facet(
            vertex_indices=tuple(int(i) for i in simplices[k]),
            unit_normal=normals[k],
            offset_a=float(offsets[k]),
            area=float(areas[k]),
        )
        for k in range(simplices.shape[0])
    ]
    return HullResult(
        facets=facets,
        facet_count=simplices.shape[0],
        origin_inside=origin_inside,
        volume=volume,
        surface_area=surface_area,
        euler_check=euler_check,
        normals=normals,
        offsets=offsets,
        areas=areas,
        simplices=simplices,
    )


def hull_volume_signed(config: Configuration, hull: HullResult, method: str = "pyramid") -> float:
    """Hull volume by signed facet pyramids, or independently by raw simplex determinants.

    method="pyramid" sums area_k * offset_k / (d+1).  method="determinant"
    sums sign(offset_k) |det W_k| / (d+1)! with W_k the matrix of facet vertex
    coordinates; the two routes must agree to 1e-9 relative.
    """
    d = config.d
    if method == "pyramid":
        return float((hull.areas * hull.offsets).sum() / (d + 1))
    if method == "determinant":
        verts = config.points[hull.simplices]          # (f, d+1, d+1)
        dets = np.abs(np.linalg.det(verts))
        signs = np.sign(hull.offsets)
        return float((signs * dets).sum() / math.factorial(d + 1))
    raise ValueError(f"unknown volume method {method!r}")
