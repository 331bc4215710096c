"""Graph approximation of the distance on a Herglotz disk.

Nodes sit on concentric rings; nodes closer than a few ring spacings are
joined by straight edges weighted by Euclidean length over the sound speed at
the edge midpoint.  Shortest paths then overestimate the true distance by an
amount that shrinks linearly with the ring spacing.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra
from scipy.spatial import cKDTree

from ..spaces import SampledSpace, _finish, _symmetric
from .profile import RadialProfile, require_herglotz


def polar_grid(rings: int, boundary_points: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Centre plus ``rings`` circles with near-uniform spacing; returns points and boundary indices."""
    h = 1.0 / rings
    pts = [np.zeros((1, 2))]
    for k in range(1, rings + 1):
        rho = k * h
        m = max(6, round(2 * math.pi * rho / h))
        if k == rings and boundary_points:
            m = boundary_points
        ang = 2 * math.pi * (np.arange(m) + 0.5 * (k % 2)) / m
        pts.append(np.column_stack([rho * np.cos(ang), rho * np.sin(ang)]))
    P = np.vstack(pts)
    boundary = np.arange(len(P) - len(pts[-1]), len(P))
    return P, boundary


def disk_distance_matrix(
    profile: RadialProfile,
    rings: int = 24,
    reach: float = 1.0,
    boundary_points: int | None = None,
) -> SampledSpace:
    """Sampled Herglotz disk; sensors are the boundary ring."""
    require_herglotz(profile)
    P, boundary = polar_grid(rings, boundary_points)
    tree = cKDTree(P)
    # reach ~ sqrt(spacing): directional error ~ spacing, so paths converge
    pairs = tree.query_pairs(reach * math.sqrt(1.0 / rings), output_type="ndarray")
    a, b = pairs[:, 0], pairs[:, 1]
    seg = np.hypot(*(P[a] - P[b]).T)
    mid = np.hypot(*((P[a] + P[b]) / 2).T)
    w = seg / profile.c(mid)
    n = len(P)
    G = coo_matrix((np.concatenate([w, w]), (np.concatenate([a, b]), np.concatenate([b, a]))), shape=(n, n)).tocsr()
    D = dijkstra(G, directed=False)
    D = np.minimum(D, D.T)
    labels = [f"d{i}" for i in range(n)]
    prov = {"generator": "herglotz-disk", "profile": profile.describe(), "rings": rings, "reach": reach}
    return _finish(_symmetric(D), labels, boundary, prov, P)
