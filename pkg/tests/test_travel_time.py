import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_metric
from ttlab import io, spaces
from ttlab.errors import InjectivityError, ParameterError, PreconditionError
from ttlab.metric_core import validate_metric
from ttlab.travel_time import (
    SensorMatching,
    TravelTimeData,
    check_blie,
    check_flie,
    condition_b_witnesses,
    data_hausdorff,
    max_blie_epsilon,
    midpoint_test,
    sup_distance,
    sup_distance_matrix,
    travel_time_data,
    verify_stability,
)


def random_tree(seed, n_nodes=8, extra=1):
    rng = np.random.default_rng(seed)
    return spaces.build_tree(spaces.random_tree_spec(n_nodes, rng), extra)


def circle_arc(n=121, length=1.5 * math.pi):
    """Samples of an arc of the unit circle with the chordal-free intrinsic circle metric."""
    t = np.linspace(0, length, n)
    gap = np.abs(t[:, None] - t[None])
    d = np.minimum(gap, 2 * math.pi - gap)
    return validate_metric(d)


# ---------------------------------------------------------------- data


def test_interval_midpoint_row():
    X = validate_metric([[0, 0.5, 1], [0.5, 0, 0.5], [1, 0.5, 0]])
    data = travel_time_data(X, [0, 2])
    assert tuple(data.rows[1]) == (0.5, 0.5)


def test_star_center_row():
    star = spaces.build_tree(spaces.star_spec(3))
    data = travel_time_data(star.space, star.S)
    assert tuple(data.rows[0]) == (1.0, 1.0, 1.0)


def test_sphere_pole_rows_agree():
    eq = spaces.sphere_equator(0.2)
    rows = travel_time_data(eq.space, eq.S).rows
    assert np.array_equal(rows[0], rows[-1])


def test_empty_measurement_set():
    with pytest.raises(ParameterError):
        travel_time_data(validate_metric([[0, 1], [1, 0]]), [])


def test_sup_distance_examples():
    assert sup_distance([1, 2], [1, 2]) == 0
    assert sup_distance([0, 1], [1, 0]) == 1
    with pytest.raises(ParameterError):
        sup_distance([0, 1], [0])


@settings(max_examples=40, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), n=st.integers(2, 10))
def test_travel_time_map_is_1_lipschitz(seed, n):
    rng = np.random.default_rng(seed)
    X = random_metric(rng, n, "graph")
    S = sorted(set(rng.integers(0, n, 3).tolist()))
    data = travel_time_data(X, S)
    assert np.all(sup_distance_matrix(data.rows) <= X.dist + 1e-12)
    assert np.all(data.rows >= 0)
    for p in range(n):
        for z, s in enumerate(S):
            assert (data.rows[p, z] == 0) == (p == s)


# ---------------------------------------------------------------- data distance


def test_data_hausdorff_examples():
    t = random_tree(1)
    d = travel_time_data(t.space, t.S)
    assert data_hausdorff(d, d) == 0
    shifted = TravelTimeData(d.rows + 0.3, d.source_labels, d.sensor_labels)
    assert data_hausdorff(d, shifted) == pytest.approx(0.3, abs=1e-12)


def test_data_hausdorff_matches_brute_force():
    base = spaces.star_spec(3)
    a = spaces.build_tree(base, 2)
    b = spaces.build_tree(spaces.TreeSpec((("c", "l0", 1.0), ("c", "l1", 1.0), ("c", "l2", 1.2))), 2)
    d1, d2 = travel_time_data(a.space, a.S), travel_time_data(b.space, b.S)
    brute = 0.0
    for r in d1.rows:
        brute = max(brute, min(np.abs(r - s).max() for s in d2.rows))
    for s in d2.rows:
        brute = max(brute, min(np.abs(r - s).max() for r in d1.rows))
    assert data_hausdorff(d1, d2) == brute


def test_data_hausdorff_pseudometric_and_permutation():
    rng = np.random.default_rng(3)
    ds = []
    for _ in range(3):
        rows = rng.random((6, 4))
        ds.append(TravelTimeData(rows, tuple("abcdef"), tuple("wxyz")))
    a, b, c = ds
    assert data_hausdorff(a, b) == data_hausdorff(b, a)
    assert data_hausdorff(a, b) <= data_hausdorff(a, c) + data_hausdorff(c, b) + 1e-15
    perm = TravelTimeData(a.rows[::-1], a.source_labels, a.sensor_labels)
    assert data_hausdorff(perm, b) == data_hausdorff(a, b)
    phi = SensorMatching((1, 0, 3, 2))
    swapped = TravelTimeData(a.rows[:, [1, 0, 3, 2]], a.source_labels, a.sensor_labels)
    assert data_hausdorff(a, swapped, phi) == 0


def test_sensor_matching_validation():
    with pytest.raises(ParameterError):
        SensorMatching((0, 0))
    d = TravelTimeData(np.ones((2, 2)), ("a", "b"), ("x", "y"))
    e = TravelTimeData(np.ones((2, 3)), ("a", "b"), ("x", "y", "z"))
    with pytest.raises(ParameterError):
        data_hausdorff(d, e)


def test_csv_round_trip():
    t = random_tree(5)
    d = travel_time_data(t.space, t.S)
    back = io.data_from_csv(io.data_to_csv(d))
    assert np.array_equal(back.rows, d.rows)
    assert back.sensor_labels == d.sensor_labels and back.source_labels == d.source_labels


# ---------------------------------------------------------------- FLIE / BLIE


@pytest.mark.parametrize("seed", range(5))
def test_trees_are_globally_isometric(seed):
    t = random_tree(seed)
    X, S = t.space, t.S
    sup = sup_distance_matrix(travel_time_data(X, S).rows)
    assert np.abs(sup - X.dist).max() <= 1e-12
    for eps in (0.1, 1.0, math.inf):
        assert check_flie(X, S, eps).passed
        assert check_blie(X, S, eps).passed
    assert max_blie_epsilon(X, S) == X.diam
    sensor, gap = condition_b_witnesses(X, S)
    assert np.abs(gap).max() <= 1e-12


def test_flie_fails_near_poles():
    band = spaces.sphere_band(spaces.SphereBandSpec(0.2, 0.15))
    # sensors near the meridian; the opposite meridian is far
    rep = check_flie(band.space, band.S, 2.0, tol=2 * band.step)
    assert not rep.passed and rep.worst_pair is not None


def test_blie_reports_duplicates():
    eq = spaces.sphere_equator(0.2)
    with pytest.raises(InjectivityError) as exc:
        check_blie(eq.space, eq.S)
    assert exc.value.pair == (0, eq.space.n - 1)
    with pytest.raises(InjectivityError):
        max_blie_epsilon(eq.space, eq.S)


def test_circle_arc_local_isometry_radii():
    # the arc of length 3pi/2 sits inside the unit circle; S = all samples of the arc,
    # the ambient circle plays the role of the data space
    X = circle_arc()
    t = np.linspace(0, 1.5 * math.pi, 121)
    arc = validate_metric(np.abs(t[:, None] - t[None]))
    # forward map arc -> circle preserves distances below pi, fails above
    fwd_ok = np.all((arc.dist >= math.pi) | (np.abs(arc.dist - X.dist) <= 1e-12))
    assert fwd_ok
    assert np.any((arc.dist < math.pi + 0.05) & (np.abs(arc.dist - X.dist) > 1e-9))
    # inverse preserves circle distances only below pi/2 among arc images
    inv_ok = np.all((X.dist >= math.pi / 2) | (np.abs(arc.dist - X.dist) <= 1e-12))
    assert inv_ok
    assert np.any((X.dist < math.pi / 2 + 0.05) & (np.abs(arc.dist - X.dist) > 1e-9))
    # the same verdicts through the travel time checks: arc with S = both ends
    S = [0, 120]
    rep = check_blie(arc, S, math.pi / 2 - 0.01)
    assert rep.passed


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 2**32 - 1), e1=st.floats(0.05, 3.0), e2=st.floats(0.05, 3.0))
def test_checks_monotone_in_eps_and_blie_implies_flie(seed, e1, e2):
    rng = np.random.default_rng(seed)
    X = random_metric(rng, 9, "euclid")
    S = [0, 1, 2]
    lo, hi = sorted((e1, e2))
    for check in (check_flie, check_blie):
        if check(X, S, hi).passed:
            assert check(X, S, lo).passed
    for eps in (lo, hi):
        if check_blie(X, S, eps).passed:
            assert check_flie(X, S, eps).passed


def test_max_blie_epsilon_is_sharp():
    rng = np.random.default_rng(11)
    X = random_metric(rng, 12, "euclid")
    S = [0, 1, 2]
    e = max_blie_epsilon(X, S)
    assert e <= X.diam
    assert check_blie(X, S, e).passed
    if e < X.diam:
        assert not check_blie(X, S, math.nextafter(e, math.inf)).passed


def test_max_blie_epsilon_sphere_band_reported():
    band = spaces.sphere_band(spaces.SphereBandSpec(0.3, 0.2))
    e = max_blie_epsilon(band.space, band.S, tol=2 * band.step)
    assert 0 < e <= band.space.diam


@pytest.mark.parametrize("bad", [dict(epsilon=0), dict(epsilon=-1), dict(tol=-1)])
def test_check_parameter_errors(bad):
    t = random_tree(0)
    with pytest.raises(ParameterError):
        check_flie(t.space, t.S, **{"epsilon": 1.0, "tol": 0.0, **bad})


# ---------------------------------------------------------------- midpoints


def tree_midpoint_oracle(X, p, q):
    """Distance from the exact tree midpoint of p, q to the nearest sample (brute force on the sample)."""
    half = X.dist[p, q] / 2
    miss = np.maximum(np.abs(X.dist[p] - half), np.abs(X.dist[q] - half))
    return miss.min()


def test_midpoint_on_dense_tree():
    t = spaces.build_tree(spaces.star_spec(3), 8)
    data = travel_time_data(t.space, t.S)
    rep = midpoint_test(data, 3.0, tol=t.step)
    assert rep.passed
    p, q, gap = rep.worst_pair
    assert gap == pytest.approx(tree_midpoint_oracle(t.space, p, q), abs=1e-12)


def test_midpoint_two_rows_fail():
    data = TravelTimeData(np.array([[0.0], [1.0]]), ("a", "b"), ("z",))
    assert not midpoint_test(data, 2.0).passed


def test_midpoint_plus_flie_gives_blie_on_trees():
    for seed in range(4):
        t = random_tree(seed, 7, 3)
        data = travel_time_data(t.space, t.S)
        mid = midpoint_test(data, 1.0, tol=t.step)
        assert mid.passed
        assert check_flie(t.space, t.S, 0.5).passed
        assert check_blie(t.space, t.S, 1.0).passed


# ---------------------------------------------------------------- stability


def star(lengths, extra=0):
    return spaces.build_tree(spaces.TreeSpec(tuple(("c", f"l{i}", w) for i, w in enumerate(lengths))), extra)


def test_stability_identical():
    a = star((1, 1, 1))
    rep = verify_stability(a.space, a.S, a.space, a.S, None, 1.0)
    assert rep.data_distance == 0 and rep.gh.exact == 0 and rep.gh_truncated.exact == 0 and rep.holds


@pytest.mark.parametrize("delta", [0.01, 0.1, 0.5])
def test_stability_star_pair(delta):
    a, b = star((1, 1, 1)), star((1, 1, 1 + delta))
    rep = verify_stability(a.space, a.S, b.space, b.S, None, 0.8)
    assert rep.holds
    assert rep.gh.exact is not None and rep.slack_full >= 0 and rep.slack_truncated >= 0
    assert rep.data_distance == pytest.approx(delta)


def test_stability_precondition():
    eq = spaces.sphere_equator(0.3)
    a = star((1, 1, 1))
    with pytest.raises((PreconditionError, InjectivityError)):
        verify_stability(eq.space, eq.S, a.space, a.S, None, 1.0)
    arc = circle_arc(41)
    with pytest.raises(PreconditionError) as exc:
        verify_stability(arc, [0], arc, [0], None, 4.0)
    assert exc.value.report is not None and not exc.value.report.passed


def test_report_json_shape():
    t = random_tree(2)
    d = check_flie(t.space, t.S, 1.0).to_dict()
    assert set(d) == {"passed", "epsilon", "tol", "worst_pair", "margin"}
    assert set(d["worst_pair"]) == {"p", "q", "gap"}
