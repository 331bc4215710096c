"""Travel time data of sampled spaces and the FLIE / BLIE / midpoint checks.

For a source ``p`` the travel time row is ``z -> d(p, z)`` over the sensor
points ``z``.  Rows are compared in the sup norm.  Because of the triangle
inequality the map ``p -> row(p)`` never increases distances, so all checks
below measure the same one-sided gap ``d(p, q) - sup|row(p) - row(q)| >= 0``
on different families of pairs:

* FLIE(eps): pairs with ``d(p, q) < eps``;
* BLIE(eps): pairs with ``sup|row(p) - row(q)| < eps``.

Every check takes an explicit ``tol`` that absorbs sampling error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InjectivityError, ParameterError, PreconditionError
from .metric_core import (
    DEFAULT_GH_CAP,
    FiniteMetricSpace,
    GhEstimate,
    gh_estimate,
    truncated_gh,
)

# rows closer than this (relative to the space diameter) count as identical
INJECTIVITY_RTOL = 1e-12
# verdicts forgive this much float rounding (relative to the diameter) on top of tol
ROUNDING_RTOL = 1e-12


@dataclass(frozen=True)
class MeasurementSet:
    indices: tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if not idx:
            raise ParameterError("measurement set must be nonempty")
        if len(set(idx)) != len(idx):
            raise ParameterError("measurement set has repeated indices")
        object.__setattr__(self, "indices", idx)

    def check(self, space: FiniteMetricSpace) -> None:
        bad = [i for i in self.indices if not 0 <= i < space.n]
        if bad:
            raise ParameterError(f"measurement indices {bad[:5]} outside a {space.n}-point space")

    def __len__(self):
        return len(self.indices)


def as_measurement_set(space: FiniteMetricSpace, S=None) -> MeasurementSet:
    if S is None:
        if space.measurement_set is None:
            raise ParameterError("no measurement set given and the space carries none")
        S = space.measurement_set
    ms = S if isinstance(S, MeasurementSet) else MeasurementSet(tuple(S))
    ms.check(space)
    return ms


@dataclass(frozen=True, eq=False)
class TravelTimeData:
    """``rows[p, z] = d(p, S[z])``; one row per source point."""

    rows: np.ndarray
    source_labels: tuple[str, ...]
    sensor_labels: tuple[str, ...]

    def __post_init__(self):
        r = np.array(self.rows, dtype=float, copy=True)
        if r.ndim != 2:
            raise ParameterError("travel time rows must form a matrix")
        if np.any(r < 0) or not np.all(np.isfinite(r)):
            raise ParameterError("travel times must be finite and nonnegative")
        r.setflags(write=False)
        object.__setattr__(self, "rows", r)

    @property
    def n_sources(self) -> int:
        return self.rows.shape[0]

    @property
    def n_sensors(self) -> int:
        return self.rows.shape[1]


@dataclass(frozen=True)
class SensorMatching:
    """Sensor ``k`` of the first set is matched with sensor ``bijection[k]`` of the second."""

    bijection: tuple[int, ...]

    def __post_init__(self):
        b = tuple(int(i) for i in self.bijection)
        if sorted(b) != list(range(len(b))):
            raise ParameterError("sensor matching must be a bijection of 0..n-1")
        object.__setattr__(self, "bijection", b)

    @classmethod
    def identity(cls, n: int) -> "SensorMatching":
        return cls(tuple(range(n)))


@dataclass(frozen=True)
class CheckReport:
    passed: bool
    epsilon: float
    tol: float
    worst_pair: tuple[int, int, float] | None
    margin: float
    n_pairs: int = 0

    def to_dict(self) -> dict:
        from .io import check_report_to_dict

        return check_report_to_dict(self)


def travel_time_data(space: FiniteMetricSpace, S=None) -> TravelTimeData:
    ms = as_measurement_set(space, S)
    idx = list(ms.indices)
    return TravelTimeData(
        space.dist[:, idx],
        space.labels,
        tuple(space.labels[i] for i in idx),
    )


def sup_distance(a, b) -> float:
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ParameterError(f"row length mismatch: {a.shape} vs {b.shape}")
    if a.size == 0:
        return 0.0
    return float(np.max(np.abs(a - b)))


def sup_distance_matrix(rows_a, rows_b=None) -> np.ndarray:
    rows_a = np.asarray(rows_a, dtype=float)
    rows_b = rows_a if rows_b is None else np.asarray(rows_b, dtype=float)
    return cdist(rows_a, rows_b, metric="chebyshev")


def data_hausdorff(data1: TravelTimeData, data2: TravelTimeData, phi: SensorMatching | None = None) -> float:
    """Hausdorff distance of the two row sets after pulling data2 back through ``phi``."""
    if data1.n_sensors != data2.n_sensors:
        raise ParameterError(
            f"sensor counts differ ({data1.n_sensors} vs {data2.n_sensors}); resample first"
        )
    if phi is None:
        phi = SensorMatching.identity(data1.n_sensors)
    if len(phi.bijection) != data1.n_sensors:
        raise ParameterError("sensor matching size does not match the sensor count")
    pulled = data2.rows[:, list(phi.bijection)]
    D = sup_distance_matrix(data1.rows, pulled)
    return float(max(D.min(axis=1).max(), D.min(axis=0).max()))


def _gap_report(d, sup, mask, epsilon, tol) -> CheckReport:
    iu, ju = np.nonzero(np.triu(mask, k=1))
    if iu.size == 0:
        return CheckReport(True, float(epsilon), float(tol), None, float(tol), 0)
    gaps = d[iu, ju] - sup[iu, ju]
    w = int(np.argmax(gaps))
    worst = float(gaps[w])
    return CheckReport(
        passed=worst <= tol + ROUNDING_RTOL * float(d.max()),
        epsilon=float(epsilon),
        tol=float(tol),
        worst_pair=(int(iu[w]), int(ju[w]), worst),
        margin=float(tol - worst),
        n_pairs=int(iu.size),
    )


def _check_eps_tol(epsilon, tol):
    if not epsilon > 0:
        raise ParameterError(f"epsilon must be positive, got {epsilon!r}")
    if not tol >= 0:
        raise ParameterError(f"tol must be nonnegative, got {tol!r}")


def check_flie(space: FiniteMetricSpace, S=None, epsilon: float = math.inf, tol: float = 0.0) -> CheckReport:
    """Is the travel time map an epsilon-local isometry (up to ``tol``)?

    Passes iff every pair with ``d(p, q) < epsilon`` has
    ``sup|r_p - r_q| >= d(p, q) - tol``.  The reported margin is ``tol`` minus
    the largest gap, so negative margins measure the violation.
    """
    _check_eps_tol(epsilon, tol)
    data = travel_time_data(space, S)
    sup = sup_distance_matrix(data.rows)
    d = space.dist
    return _gap_report(d, sup, d < epsilon, epsilon, tol)


def find_duplicate_rows(data: TravelTimeData, scale: float = 1.0):
    """First pair of sources whose rows coincide, or None."""
    if data.n_sources < 2:
        return None
    sup = sup_distance_matrix(data.rows)
    np.fill_diagonal(sup, np.inf)
    hit = np.argwhere(sup <= INJECTIVITY_RTOL * max(scale, 1e-300))
    hit = hit[hit[:, 0] < hit[:, 1]]
    if hit.size:
        return int(hit[0, 0]), int(hit[0, 1])
    return None


def check_blie(space: FiniteMetricSpace, S=None, epsilon: float = math.inf, tol: float = 0.0) -> CheckReport:
    """Is the inverse of the travel time map an epsilon-local isometry?

    Passes iff every pair with ``sup|r_p - r_q| < epsilon`` has
    ``d(p, q) <= sup|r_p - r_q| + tol``.

    Raises
    ------
    InjectivityError
        If two distinct sources share a row; the inverse map does not exist.
    """
    _check_eps_tol(epsilon, tol)
    data = travel_time_data(space, S)
    dup = find_duplicate_rows(data, space.diam)
    if dup is not None:
        raise InjectivityError(*dup)
    sup = sup_distance_matrix(data.rows)
    return _gap_report(space.dist, sup, sup < epsilon, epsilon, tol)


def midpoint_test(data: TravelTimeData, epsilon: float, tol: float = 0.0) -> CheckReport:
    """Local midpoint property of the row set in the sup norm.

    For every pair of rows closer than ``epsilon`` some row ``m`` must lie
    within ``tol`` of half the pair distance from both.  The worst pair is the
    one whose best candidate misses by the most.

    A pass here supports BLIE only together with a separate FLIE pass at some
    smaller epsilon; on its own it says nothing about the space.
    """
    _check_eps_tol(epsilon, tol)
    D = sup_distance_matrix(data.rows)
    n = D.shape[0]
    worst = (-math.inf, None)
    n_pairs = 0
    for a in range(n):
        bs = np.flatnonzero((D[a] < epsilon) & (np.arange(n) > a))
        if bs.size == 0:
            continue
        n_pairs += bs.size
        half = 0.5 * D[a, bs]  # (k,)
        # miss[k, m] = how far row m is from being a midpoint of (a, bs[k])
        miss = np.maximum(
            np.abs(D[a][None, :] - half[:, None]),
            np.abs(D[bs] - half[:, None]),
        )
        best = miss.min(axis=1)
        k = int(np.argmax(best))
        if best[k] > worst[0]:
            worst = (float(best[k]), (a, int(bs[k])))
    if worst[1] is None:
        return CheckReport(True, float(epsilon), float(tol), None, float(tol), 0)
    gap, (p, q) = worst
    passed = gap <= tol + ROUNDING_RTOL * float(D.max())
    return CheckReport(passed, float(epsilon), float(tol), (p, q, gap), float(tol - gap), n_pairs)


def max_blie_epsilon(space: FiniteMetricSpace, S=None, tol: float = 0.0) -> float:
    """Largest epsilon at which :func:`check_blie` passes.

    The verdict can only change at pairwise sup distances, so the answer is
    the smallest sup distance among violating pairs, capped at the diameter.
    """
    if not tol >= 0:
        raise ParameterError("tol must be nonnegative")
    data = travel_time_data(space, S)
    dup = find_duplicate_rows(data, space.diam)
    if dup is not None:
        raise InjectivityError(*dup)
    sup = sup_distance_matrix(data.rows)
    iu, ju = np.triu_indices(space.n, k=1)
    gaps = space.dist[iu, ju] - sup[iu, ju]
    bad = gaps > tol + ROUNDING_RTOL * space.diam
    if not bad.any():
        return float(space.diam)
    return float(min(sup[iu, ju][bad].min(), space.diam))


def condition_b_witnesses(space: FiniteMetricSpace, S=None):
    """For every pair, the sensor maximising ``|r_p(z) - r_q(z)|`` and the gap left.

    Returns ``(sensor, gap)`` arrays of shape (n, n).  ``gap == 0`` means the
    sensor lies on a minimising curve through both points (global isometry).
    """
    r = travel_time_data(space, S).rows
    n = space.n
    sensor = np.empty((n, n), dtype=int)
    best = np.empty((n, n))
    for p in range(n):
        diff = np.abs(r - r[p])
        sensor[p] = diff.argmax(axis=1)
        best[p] = diff.max(axis=1)
    return sensor, space.dist - best


@dataclass(frozen=True)
class StabilityReport:
    data_distance: float
    gh_truncated: GhEstimate
    gh: GhEstimate
    epsilon: float
    diam_bound: float
    factor: float
    slack_truncated: float
    slack_full: float
    holds: bool
    blie_reports: tuple[CheckReport, CheckReport] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "data_distance": self.data_distance,
            "gh_truncated": self.gh_truncated.to_dict(),
            "gh": self.gh.to_dict(),
            "epsilon": self.epsilon,
            "diam_bound": self.diam_bound,
            "factor": self.factor,
            "slack_truncated": self.slack_truncated,
            "slack_full": self.slack_full,
            "holds": self.holds,
            "blie": [r.to_dict() for r in self.blie_reports],
        }


def verify_stability(
    space1: FiniteMetricSpace,
    S1,
    space2: FiniteMetricSpace,
    S2,
    phi: SensorMatching | None = None,
    epsilon: float = 1.0,
    diam_bound: float | None = None,
    cap: int = DEFAULT_GH_CAP,
    tol: float = 0.0,
) -> StabilityReport:
    """Check both stability inequalities on a pair of sampled spaces.

    With ``h`` the data distance, asserts::

        ghd_eps(X1, X2) <= h
        ghd(X1, X2)     <= (2 D / eps + 1) * h

    using the exact Gromov-Hausdorff value when both spaces have at most
    ``cap`` points and the lower bound otherwise.  Both spaces must pass
    :func:`check_blie` at ``epsilon``; the diameters must not exceed ``D``.
    """
    if diam_bound is None:
        diam_bound = max(space1.diam, space2.diam)
    if not diam_bound > 0:
        raise ParameterError("diameter bound must be positive")
    reports = []
    for k, (sp, S) in enumerate(((space1, S1), (space2, S2)), start=1):
        rep = check_blie(sp, S, epsilon, tol)
        if not rep.passed:
            raise PreconditionError(f"space {k} fails BLIE at epsilon={epsilon}", rep)
        if sp.diam > diam_bound:
            raise PreconditionError(f"space {k} has diameter {sp.diam} > D = {diam_bound}")
        reports.append(rep)

    data1 = travel_time_data(space1, S1)
    data2 = travel_time_data(space2, S2)
    h = data_hausdorff(data1, data2, phi)
    gh_eps = truncated_gh(space1, space2, epsilon, cap)
    gh = gh_estimate(space1, space2, cap)
    factor = 2.0 * diam_bound / epsilon + 1.0
    slack_t = h - gh_eps.best_lower
    slack_f = factor * h - gh.best_lower
    rounding = 1e-12 * max(1.0, space1.diam, space2.diam)
    return StabilityReport(
        data_distance=h,
        gh_truncated=gh_eps,
        gh=gh,
        epsilon=float(epsilon),
        diam_bound=float(diam_bound),
        factor=factor,
        slack_truncated=slack_t,
        slack_full=slack_f,
        holds=bool(slack_t >= -rounding and slack_f >= -rounding),
        blie_reports=tuple(reports),
    )
