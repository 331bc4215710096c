"""Sampled model length spaces with their measurement sets.

Each generator returns a :class:`SampledSpace`: the distance matrix on the
samples (exact on the samples, up to float rounding), the sensor indices, and
``step``, the largest nearest-neighbour gap between samples.  ``step`` is the
scale at which the continuum statements hold on a sample, so checks default
to a tolerance of a small multiple of it.
"""

from __future__ import annotations

import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .errors import DomainError, SpecError
from .metric_core import FiniteMetricSpace, _trusted
from .travel_time import MeasurementSet


@dataclass(frozen=True, eq=False)
class SampledSpace:
    space: FiniteMetricSpace
    S: MeasurementSet
    step: float
    provenance: dict = field(default_factory=dict)
    points: np.ndarray | None = None

    def document(self) -> dict:
        from .io import space_to_dict

        prov = dict(self.provenance)
        prov["step"] = self.step
        return space_to_dict(self.space, prov)


def nearest_neighbour_step(dist: np.ndarray) -> float:
    """Largest distance from a sample to its nearest other sample."""
    if dist.shape[0] < 2:
        return 0.0
    d = np.array(dist, dtype=float)
    np.fill_diagonal(d, np.inf)
    return float(d.min(axis=1).max())


def _finish(dist, labels, sensors, provenance, points=None) -> SampledSpace:
    sensors = tuple(int(i) for i in sensors)
    space = _trusted(dist, labels, sensors)
    step = nearest_neighbour_step(space.dist)
    return SampledSpace(space, MeasurementSet(sensors), step, provenance, points)


def _symmetric(upper: np.ndarray) -> np.ndarray:
    # mirror the strict upper triangle so that d[i, j] == d[j, i] bit for bit
    u = np.triu(upper, k=1)
    return u + u.T


# --------------------------------------------------------------------------
# metric trees


@dataclass(frozen=True)
class TreeSpec:
    edges: tuple[tuple[Hashable, Hashable, float], ...]

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple((u, v, float(w)) for u, v, w in self.edges))

    @property
    def nodes(self) -> list:
        seen = {}
        for u, v, _ in self.edges:
            seen.setdefault(u, None)
            seen.setdefault(v, None)
        return list(seen)

    @property
    def leaves(self) -> list:
        deg = defaultdict(int)
        for u, v, _ in self.edges:
            deg[u] += 1
            deg[v] += 1
        return [n for n in self.nodes if deg[n] == 1]

    def validate(self) -> None:
        if not self.edges:
            raise SpecError("a tree needs at least one edge")
        parent: dict = {}

        def find(a):
            while parent.setdefault(a, a) != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        for u, v, w in self.edges:
            if not (w > 0 and math.isfinite(w)):
                raise SpecError(f"edge ({u}, {v}) has non-positive length {w}")
            if u == v:
                raise SpecError(f"self-loop at node {u}")
            ru, rv = find(u), find(v)
            if ru == rv:
                raise SpecError(f"edge ({u}, {v}) closes a cycle")
            parent[ru] = rv
        roots = {find(n) for n in self.nodes}
        if len(roots) != 1:
            raise SpecError(f"tree is disconnected ({len(roots)} components)")


def star_spec(n_leaves: int = 3, length: float = 1.0) -> TreeSpec:
    return TreeSpec(tuple(("c", f"l{i}", length) for i in range(n_leaves)))


def random_tree_spec(n_nodes: int, rng: np.random.Generator, low: float = 0.2, high: float = 2.0) -> TreeSpec:
    """Random recursive tree: node ``i`` hangs off a uniformly chosen earlier node."""
    if n_nodes < 2:
        raise SpecError("a tree needs at least two nodes")
    edges = []
    for i in range(1, n_nodes):
        parent = int(rng.integers(0, i))
        edges.append((f"n{parent}", f"n{i}", float(rng.uniform(low, high))))
    return TreeSpec(tuple(edges))


def tree_distances(n: int, adjacency: dict[int, list[tuple[int, float]]]) -> np.ndarray:
    """All-pairs distances of a weighted tree by one traversal per source."""
    D = np.zeros((n, n))
    for src in range(n):
        row = D[src]
        seen = np.zeros(n, dtype=bool)
        seen[src] = True
        queue = deque([src])
        while queue:
            a = queue.popleft()
            for b, w in adjacency[a]:
                if not seen[b]:
                    seen[b] = True
                    row[b] = row[a] + w
                    queue.append(b)
    return D


def build_tree(spec: TreeSpec, extra_samples_per_edge: int = 0) -> SampledSpace:
    """Sample a metric tree; every edge is cut into ``extra + 1`` equal pieces.

    The measurement set is the leaves of the original tree.
    """
    spec.validate()
    if extra_samples_per_edge < 0:
        raise SpecError("extra_samples_per_edge must be nonnegative")
    nodes = spec.nodes
    index = {v: i for i, v in enumerate(nodes)}
    labels = [str(v) for v in nodes]
    adjacency: dict[int, list] = defaultdict(list)
    k = extra_samples_per_edge
    for u, v, w in spec.edges:
        piece = w / (k + 1)
        chain = [index[u]]
        for s in range(1, k + 1):
            chain.append(len(labels))
            labels.append(f"{u}-{v}:{s}")
        chain.append(index[v])
        for a, b in zip(chain, chain[1:]):
            adjacency[a].append((b, piece))
            adjacency[b].append((a, piece))
    n = len(labels)
    D = tree_distances(n, adjacency)
    sensors = [index[v] for v in spec.leaves]
    prov = {
        "generator": "tree",
        "edges": [[str(u), str(v), w] for u, v, w in spec.edges],
        "extra_samples_per_edge": k,
    }
    return _finish(_symmetric(D), labels, sensors, prov)


# --------------------------------------------------------------------------
# planar annulus with the inner disk removed


@dataclass(frozen=True)
class AnnulusSpec:
    r: float
    R: float
    n_boundary: int = 120
    n_interior: int = 1500

    def __post_init__(self):
        if not 0 < self.r < self.R:
            raise SpecError(f"annulus needs 0 < r < R, got r={self.r}, R={self.R}")
        if self.n_boundary < 3 or self.n_interior < 3:
            raise SpecError("annulus sample counts must be at least 3")


def annulus_distance_matrix(P, Q, r: float) -> np.ndarray:
    """Length-metric distances between point sets outside the disk of radius ``r``.

    A straight segment is used when it does not enter the open inner disk
    (grazing counts as visible); otherwise the path is tangent, arc, tangent.
    Points within 1e-12 of the circle are snapped onto it.
    """
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    rp = np.hypot(P[:, 0], P[:, 1])
    rq = np.hypot(Q[:, 0], Q[:, 1])
    slack = 1e-12 * max(r, 1.0)
    if (rp < r - slack).any() or (rq < r - slack).any():
        raise DomainError(f"point inside the inner disk of radius {r}")
    # the tangent angle arccos(r/|x|) is ill-conditioned at |x| = r; snap from both sides
    rp = np.where(np.abs(rp - r) <= slack, r, rp)[:, None]
    rq = np.where(np.abs(rq - r) <= slack, r, rq)[None, :]

    euclid = np.hypot(Q[None, :, 0] - P[:, None, 0], Q[None, :, 1] - P[:, None, 1])
    cross = P[:, None, 0] * Q[None, :, 1] - P[:, None, 1] * Q[None, :, 0]
    dot = P[:, None, 0] * Q[None, :, 0] + P[:, None, 1] * Q[None, :, 1]
    dtheta = np.arctan2(np.abs(cross), dot)
    # the segment misses the open disk iff the angular gap is covered by the
    # two tangent angles; an exact zero is grazing and counts as visible
    arc = dtheta - np.arccos(np.minimum(r / rp, 1.0)) - np.arccos(np.minimum(r / rq, 1.0))
    tangent_p = np.sqrt(np.maximum(rp * rp - r * r, 0.0))
    tangent_q = np.sqrt(np.maximum(rq * rq - r * r, 0.0))
    wrapped = tangent_p + tangent_q + r * arc
    return np.where(arc <= 0, euclid, np.maximum(wrapped, euclid))


def annulus_distance(x, y, r: float) -> float:
    return float(annulus_distance_matrix([x], [y], r)[0, 0])


def sample_annulus(spec: AnnulusSpec) -> SampledSpace:
    """Polar-grid sample; sensors are the outer-circle samples."""
    r, R = spec.r, spec.R
    h = math.sqrt(math.pi * (R * R - r * r) / spec.n_interior)
    n_rings = max(1, round((R - r) / h))
    pts = []
    for k in range(n_rings):
        rho = r + k * (R - r) / n_rings
        m = max(3, round(2 * math.pi * rho / h))
        phase = 0.5 * (k % 2)
        ang = 2 * math.pi * (np.arange(m) + phase) / m
        pts.append(np.column_stack([rho * np.cos(ang), rho * np.sin(ang)]))
    ang = 2 * math.pi * np.arange(spec.n_boundary) / spec.n_boundary
    outer = np.column_stack([R * np.cos(ang), R * np.sin(ang)])
    interior = np.vstack(pts)
    P = np.vstack([interior, outer])
    D = annulus_distance_matrix(P, P, r)
    sensors = range(len(interior), len(P))
    labels = [f"a{i}" for i in range(len(P))]
    prov = {"generator": "annulus", "r": r, "R": R, "n_boundary": spec.n_boundary, "n_interior": spec.n_interior}
    return _finish(_symmetric(D), labels, sensors, prov, P)


# --------------------------------------------------------------------------
# unit sphere


def sphere_distance_matrix(P, Q) -> np.ndarray:
    """Great-circle distances, via atan2 so small and near-antipodal angles stay accurate."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    Q = np.atleast_2d(np.asarray(Q, dtype=float))
    out = np.empty((len(P), len(Q)))
    for a in range(0, len(P), 256):
        blk = P[a : a + 256]
        cr = np.cross(blk[:, None, :], Q[None, :, :])
        out[a : a + 256] = np.arctan2(np.linalg.norm(cr, axis=2), blk @ Q.T)
    return out


def sphere_points(resolution: float) -> tuple[np.ndarray, list[int]]:
    """Near-uniform latitude rings; returns points and the equator ring indices.

    Rings thin out towards the poles.  Southern rings are rotated by half a
    longitude step so no southern sample mirrors a northern one through the
    equatorial plane; only the two poles are mirror images of each other.
    """
    if not 0 < resolution < 1.0:
        raise SpecError("sphere resolution must lie in (0, 1) radians")
    n_lat = max(2, round(math.pi / resolution))
    n_lat += n_lat % 2  # keep an equator ring
    pts = [np.array([[0.0, 0.0, 1.0]])]
    equator = []
    count = 1
    for k in range(1, n_lat):
        theta = math.pi * k / n_lat
        m = max(3, round(2 * math.pi * math.sin(theta) / resolution))
        phase = 0.5 if 2 * k > n_lat else 0.0
        phi = 2 * math.pi * (np.arange(m) + phase) / m
        z = 0.0 if 2 * k == n_lat else math.cos(theta)
        s = 1.0 if 2 * k == n_lat else math.sin(theta)
        ring = np.column_stack([s * np.cos(phi), s * np.sin(phi), np.full(m, z)])
        if 2 * k == n_lat:
            equator = list(range(count, count + m))
        pts.append(ring)
        count += m
    pts.append(np.array([[0.0, 0.0, -1.0]]))
    return np.vstack(pts), equator


def distance_to_meridian(P) -> np.ndarray:
    """Distance from unit vectors to the half great circle of longitude 0, pole to pole."""
    P = np.atleast_2d(np.asarray(P, dtype=float))
    x, y, z = P[:, 0], P[:, 1], P[:, 2]
    to_circle = np.arcsin(np.clip(np.abs(y), 0.0, 1.0))
    to_poles = np.arctan2(np.hypot(x, y), np.abs(z))
    return np.where(x >= 0, to_circle, to_poles)


@dataclass(frozen=True)
class SphereBandSpec:
    band_radius: float
    resolution: float = 0.08

    def __post_init__(self):
        if not 0 < self.band_radius < math.pi / 2:
            raise SpecError("band radius must lie in (0, pi/2)")


def sphere_band(spec: SphereBandSpec) -> SampledSpace:
    """Unit sphere sampled on latitude rings; sensors within ``r`` of the meridian."""
    P, _ = sphere_points(spec.resolution)
    D = sphere_distance_matrix(P, P)
    sensors = np.flatnonzero(distance_to_meridian(P) <= spec.band_radius + 1e-12)
    labels = [f"s{i}" for i in range(len(P))]
    prov = {"generator": "sphere-band", "band_radius": spec.band_radius, "resolution": spec.resolution}
    return _finish(_symmetric(D), labels, sensors, prov, P)


def sphere_equator(resolution: float = 0.1, drop_south_pole: bool = False) -> SampledSpace:
    """Sphere sample measured on the equator; the two poles share a travel time row."""
    P, equator = sphere_points(resolution)
    if drop_south_pole:
        P = P[:-1]
    D = sphere_distance_matrix(P, P)
    labels = [f"s{i}" for i in range(len(P))]
    labels[0] = "north"
    if not drop_south_pole:
        labels[-1] = "south"
    prov = {"generator": "sphere-equator", "resolution": resolution, "drop_south_pole": drop_south_pole}
    return _finish(_symmetric(D), labels, equator, prov, P)


# --------------------------------------------------------------------------
# convex polygons


def _orientation(V):
    e = np.roll(V, -1, axis=0) - V
    nxt = np.roll(e, -1, axis=0)
    return e[:, 0] * nxt[:, 1] - e[:, 1] * nxt[:, 0]


def convex_polygon(vertices: Sequence[Sequence[float]], resolution: float) -> SampledSpace:
    """Square-grid interior samples plus boundary samples; Euclidean metric.

    The measurement set is the boundary samples (vertices included).
    """
    V = np.asarray(vertices, dtype=float)
    if V.ndim != 2 or V.shape[1] != 2 or len(V) < 3:
        raise SpecError("polygon needs at least three 2D vertices")
    if not resolution > 0:
        raise SpecError("resolution must be positive")
    turns = _orientation(V)
    scale = float(np.abs(V).max()) ** 2 or 1.0
    if np.any(np.abs(turns) <= 1e-12 * scale) or not (np.all(turns > 0) or np.all(turns < 0)):
        raise SpecError("vertices do not describe a strictly convex polygon")
    if turns[0] < 0:
        V = V[::-1]

    boundary = []
    for a, b in zip(V, np.roll(V, -1, axis=0)):
        m = max(1, math.ceil(np.linalg.norm(b - a) / resolution))
        t = np.arange(m)[:, None] / m
        boundary.append(a + t * (b - a))
    boundary = np.vstack(boundary)

    lo, hi = V.min(axis=0), V.max(axis=0)
    gx = np.arange(lo[0] + resolution / 2, hi[0], resolution)
    gy = np.arange(lo[1] + resolution / 2, hi[1], resolution)
    G = np.array([(x, y) for y in gy for x in gx]).reshape(-1, 2)
    # keep grid points at least a quarter step inside every edge
    e = np.roll(V, -1, axis=0) - V
    elen = np.linalg.norm(e, axis=1)
    rel = G[:, None, :] - V[None, :, :]
    signed = (e[None, :, 0] * rel[:, :, 1] - e[None, :, 1] * rel[:, :, 0]) / elen[None, :]
    G = G[np.all(signed > 0.25 * resolution, axis=1)]

    P = np.vstack([G, boundary])
    D = np.hypot(P[:, None, 0] - P[None, :, 0], P[:, None, 1] - P[None, :, 1])
    sensors = range(len(G), len(P))
    labels = [f"g{i}" for i in range(len(P))]
    prov = {"generator": "polygon", "vertices": V.tolist(), "resolution": resolution}
    return _finish(_symmetric(D), labels, sensors, prov, P)


# --------------------------------------------------------------------------
# intervals


def interval(length: float, n_points: int) -> SampledSpace:
    """``n_points`` equally spaced samples of ``[0, length]``; sensors are the endpoints."""
    if not length > 0 or n_points < 2:
        raise SpecError("interval needs positive length and at least two points")
    x = np.linspace(0.0, length, n_points)
    D = np.abs(x[:, None] - x[None, :])
    labels = [repr(float(v)) for v in x]
    prov = {"generator": "interval", "length": float(length), "n_points": int(n_points)}
    return _finish(_symmetric(D), labels, (0, n_points - 1), prov, x[:, None])
