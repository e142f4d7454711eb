"""Shared test oracles: brute-force covering-radius estimation on probe meshes."""

from __future__ import annotations

import math

import numpy as np

from sphcap.sampling import fibonacci_s2


def _nearest_dist_max(mesh: np.ndarray, pts: np.ndarray):
    """Max over mesh of Euclidean distance to the nearest configuration point."""
    gram = mesh @ pts.T
    best = gram.max(axis=1)                       # nearest = largest dot product
    dist = np.sqrt(np.maximum(2.0 - 2.0 * best, 0.0))
    k = int(np.argmax(dist))
    return float(dist[k]), mesh[k]


def _cap_mesh(center: np.ndarray, radius: float, count: int) -> np.ndarray:
    """Spiral mesh filling the geodesic cap of the given radius around center."""
    ez = np.array([0.0, 0.0, 1.0])
    if abs(center @ ez) > 0.9:
        ez = np.array([1.0, 0.0, 0.0])
    u = np.cross(center, ez)
    u /= np.linalg.norm(u)
    v = np.cross(center, u)
    j = np.arange(count)
    t = radius * np.sqrt((j + 0.5) / count)
    phi = j * (math.pi * (3.0 - math.sqrt(5.0)))
    return (
        np.cos(t)[:, None] * center
        + np.sin(t)[:, None] * (np.cos(phi)[:, None] * u + np.sin(phi)[:, None] * v)
    )


def probe_mesh_covering(points: np.ndarray, mesh_size: int = 20000, refine_rounds: int = 4) -> float:
    """Covering radius (Euclidean) of a point set on S^2 by brute-force probing.

    A global low-discrepancy mesh locates candidate deep holes; each candidate
    is then refined by shrinking cap meshes.  The covering function is
    1-Lipschitz, so the final cap spacing bounds the error (well under 1e-3).
    """
    mesh = fibonacci_s2(mesh_size).points
    gram = mesh @ points.T
    dist = np.sqrt(np.maximum(2.0 - 2.0 * gram.max(axis=1), 0.0))
    order = np.argsort(dist)[::-1]
    spacing = math.sqrt(4.0 * math.pi / mesh_size)

    best = 0.0
    for cand in order[:5]:
        center = mesh[cand]
        radius = 2.0 * spacing
        local_best, local_center = float(dist[cand]), center
        for _ in range(refine_rounds):
            cap = _cap_mesh(local_center, radius, 400)
            cap /= np.linalg.norm(cap, axis=1, keepdims=True)
            d, c = _nearest_dist_max(cap, points)
            if d > local_best:
                local_best, local_center = d, c
            radius *= 0.12
        best = max(best, local_best)
    return best
