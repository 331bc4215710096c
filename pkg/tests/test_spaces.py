import itertools
import math

import networkx as nx
import numpy as np
import pytest
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from ttlab import spaces
from ttlab.errors import DomainError, SpecError
from ttlab.metric_core import validate_metric
from ttlab.travel_time import check_flie, condition_b_witnesses


# ---------------------------------------------------------------- trees


def test_star_leaves():
    t = spaces.build_tree(spaces.star_spec(3))
    S = t.S.indices
    for a, b in itertools.combinations(S, 2):
        assert t.space.dist[a, b] == 2


def test_single_edge():
    t = spaces.build_tree(spaces.TreeSpec((("a", "b", 2.5),)))
    assert t.space.n == 2 and t.space.dist[0, 1] == 2.5 and set(t.S.indices) == {0, 1}


@pytest.mark.parametrize(
    "edges",
    [
        (("a", "b", 1), ("b", "c", 1), ("c", "a", 1)),
        (("a", "b", 1), ("c", "d", 1)),
        (("a", "b", 0),),
        (("a", "a", 1),),
        (),
    ],
)
def test_bad_trees(edges):
    with pytest.raises(SpecError):
        spaces.build_tree(spaces.TreeSpec(edges))


@pytest.mark.parametrize("seed", range(4))
def test_random_tree_matches_networkx(seed):
    rng = np.random.default_rng(seed)
    spec = spaces.random_tree_spec(11, rng)
    extra = 2
    t = spaces.build_tree(spec, extra)
    G = nx.Graph()
    for u, v, w in spec.edges:
        chain = [str(u)] + [f"{u}-{v}:{s}" for s in range(1, extra + 1)] + [str(v)]
        for a, b in zip(chain, chain[1:]):
            G.add_edge(a, b, weight=w / (extra + 1))
    ref = dict(nx.all_pairs_dijkstra_path_length(G))
    L = t.space.labels
    oracle = np.array([[ref[a][b] for b in L] for a in L])
    assert np.abs(oracle - t.space.dist).max() <= 1e-12
    leaves = {str(n) for n in G.nodes if G.degree(n) == 1}
    assert {L[i] for i in t.S.indices} == leaves
    assert t.step == pytest.approx(max(w for *_, w in spec.edges) / (extra + 1))


def test_four_point_condition():
    t = spaces.build_tree(spaces.random_tree_spec(9, np.random.default_rng(4)), 1)
    d = t.space.dist
    n = t.space.n
    for a, b, c, e in itertools.combinations(range(n), 4):
        s = sorted((d[a, b] + d[c, e], d[a, c] + d[b, e], d[a, e] + d[b, c]))
        assert s[2] - s[1] <= 1e-12


# ---------------------------------------------------------------- annulus


def visibility_oracle(x, y, r, m=6000):
    """Shortest path among straight visible segments and arcs through m inner-circle nodes."""
    ang = 2 * math.pi * np.arange(m) / m
    C = r * np.column_stack([np.cos(ang), np.sin(ang)])
    P = np.vstack([x, y, C])

    def seg_ok(a, b):
        ab = b - a
        t = np.clip(-(a @ ab) / (ab @ ab), 0, 1)
        return np.hypot(*(a + t * ab)) >= r * (1 - 1e-9)

    rows, cols, w = [], [], []
    for i in (0, 1):
        for j in range(len(P)):
            if j != i and seg_ok(P[i], P[j]):
                rows.append(i)
                cols.append(j)
                w.append(np.hypot(*(P[i] - P[j])))
    for k in range(m):
        rows.append(2 + k)
        cols.append(2 + (k + 1) % m)
        w.append(r * 2 * math.pi / m)
    G = coo_matrix((w, (rows, cols)), shape=(len(P), len(P))).tocsr()
    return dijkstra(G, directed=False, indices=0)[1]


def test_annulus_line_of_sight():
    x, y = np.array([1.0, 0.0]), np.array([0.9, 0.3])
    assert spaces.annulus_distance(x, y, 0.4) == np.hypot(*(x - y))


def test_annulus_antipodal():
    r, rho = 0.4, 0.8
    expect = 2 * math.sqrt(rho**2 - r**2) + r * (math.pi - 2 * math.acos(r / rho))
    assert spaces.annulus_distance([rho, 0], [-rho, 0], r) == pytest.approx(expect, abs=1e-14)


def test_annulus_grazing_is_visible():
    r = 0.5
    x, y = np.array([r, -1.0]), np.array([r, 1.0])
    assert spaces.annulus_distance(x, y, r) == pytest.approx(2.0, abs=1e-14)


def test_annulus_domain_error():
    with pytest.raises(DomainError):
        spaces.annulus_distance([0.1, 0], [1, 0], 0.4)


def test_annulus_matches_visibility_graph():
    rng = np.random.default_rng(0)
    r = 0.4
    for _ in range(12):
        rad = rng.uniform(r, 1.0, 2)
        th = rng.uniform(0, 2 * math.pi, 2)
        x, y = (np.array([rad[i] * math.cos(th[i]), rad[i] * math.sin(th[i])]) for i in (0, 1))
        d = spaces.annulus_distance(x, y, r)
        assert d >= np.hypot(*(x - y)) - 1e-15
        assert d == pytest.approx(visibility_oracle(x, y, r), abs=1e-3)


def test_annulus_sample_small_r_is_euclidean():
    a = spaces.sample_annulus(spaces.AnnulusSpec(1e-4, 1.0, 40, 200))
    P = a.points
    E = np.hypot(*(P[:, None] - P[None]).transpose(2, 0, 1))
    assert np.abs(a.space.dist - E).max() < 1e-3


def test_annulus_spec_validation():
    with pytest.raises(SpecError):
        spaces.AnnulusSpec(1.0, 0.5)


# ---------------------------------------------------------------- sphere


def test_sphere_poles_antipodal():
    eq = spaces.sphere_equator(0.2)
    assert eq.space.dist[0, -1] == pytest.approx(math.pi, abs=1e-15)
    z = eq.points[list(eq.S.indices), 2]
    assert np.all(z == 0)


def test_sphere_antipode_identity():
    P, _ = spaces.sphere_points(0.25)
    D = spaces.sphere_distance_matrix(P, P)
    Dm = spaces.sphere_distance_matrix(P, -P)
    assert np.abs(D + Dm - math.pi).max() <= 1e-12


def test_equator_rows_and_dropping_a_pole():
    from ttlab.travel_time import find_duplicate_rows, travel_time_data

    full = spaces.sphere_equator(0.15)
    data = travel_time_data(full.space, full.S)
    assert np.array_equal(data.rows[0], data.rows[-1])
    assert find_duplicate_rows(data, full.space.diam) == (0, full.space.n - 1)
    cut = spaces.sphere_equator(0.15, drop_south_pole=True)
    assert find_duplicate_rows(travel_time_data(cut.space, cut.S), cut.space.diam) is None


def test_band_flie_small_eps_and_failure_at_3r():
    r = 0.4
    b = spaces.sphere_band(spaces.SphereBandSpec(r, 0.12))
    assert check_flie(b.space, b.S, r, tol=2 * b.step).passed
    rep = check_flie(b.space, b.S, 3 * r, tol=2 * b.step)
    assert not rep.passed
    p, q, gap = rep.worst_pair
    assert b.space.dist[p, q] < 3 * r and gap > 2 * b.step


def test_distance_to_meridian():
    pts = np.array([[1, 0, 0], [0, 1, 0], [-1, 0, 0], [0, 0, 1], [math.cos(0.3), math.sin(0.3), 0]])
    d = spaces.distance_to_meridian(pts)
    assert d == pytest.approx([0, math.pi / 2, math.pi / 2, 0, 0.3], abs=1e-15)


# ---------------------------------------------------------------- polygon


def test_polygon_euclidean_and_flie():
    q = spaces.convex_polygon([(0, 0), (1, 0), (1, 1), (0, 1)], 0.1)
    P = q.points
    for i, j in itertools.combinations(range(0, len(P), 7), 2):
        assert q.space.dist[i, j] == np.hypot(P[i, 0] - P[j, 0], P[i, 1] - P[j, 1])
    assert check_flie(q.space, q.S, q.space.diam, tol=2 * q.step).passed
    sensor, gap = condition_b_witnesses(q.space, q.S)
    assert gap.max() <= 2 * q.step


def test_polygon_rejects_non_convex():
    with pytest.raises(SpecError):
        spaces.convex_polygon([(0, 0), (2, 0), (1, 0.5), (2, 2), (0, 2)], 0.1)
    with pytest.raises(SpecError):
        spaces.convex_polygon([(0, 0), (1, 0), (2, 0)], 0.1)


def test_polygon_orientation_independent():
    a = spaces.convex_polygon([(0, 0), (1, 0), (0, 1)], 0.1)
    b = spaces.convex_polygon([(0, 1), (1, 0), (0, 0)], 0.1)
    assert a.space.n == b.space.n


# ---------------------------------------------------------------- all generators


@pytest.mark.parametrize(
    "make",
    [
        lambda: spaces.build_tree(spaces.random_tree_spec(12, np.random.default_rng(1)), 3),
        lambda: spaces.sample_annulus(spaces.AnnulusSpec(0.4, 1.0, 60, 300)),
        lambda: spaces.sphere_band(spaces.SphereBandSpec(0.4, 0.2)),
        lambda: spaces.sphere_equator(0.2),
        lambda: spaces.convex_polygon([(0, 0), (2, 0), (2.5, 1), (1, 2)], 0.15),
        lambda: spaces.interval(2.0, 30),
    ],
)
def test_generators_emit_valid_metrics(make):
    s = make()
    validate_metric(s.space.dist)
    assert len(s.S) > 0 and s.step > 0
    doc = s.document()
    assert doc["provenance"]["step"] == s.step
