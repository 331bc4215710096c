"""Finite metric spaces, truncation, Hausdorff and Gromov-Hausdorff distances.

Everything here works on dense distance matrices.  Spaces are immutable once
validated: the matrix is copied and flagged read-only, and the diameter is
cached at construction time so that every bound below uses the same number.

The Gromov-Hausdorff distance of two finite spaces is computed through
correspondences::

    ghd(X, Y) = 1/2 * inf { dis(R) : R a correspondence between X and Y }

Exact minimisation is exponential, so :func:`gh_exact_small` refuses inputs
above a point cap.  :func:`gh_bounds` gives a cheap bracket for anything
larger.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import CoverageError, MetricValidationError, ParameterError, SizeError

# relative tolerance of the triangle check in strict mode
TRIANGLE_RTOL = 1e-12
DEFAULT_GH_CAP = 5


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """A validated finite metric space.

    Do not build this directly from untrusted data; go through
    :func:`validate_metric`.
    """

    dist: np.ndarray
    labels: tuple[str, ...]
    measurement_set: tuple[int, ...] | None = None
    diam: float = field(default=0.0)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def __len__(self):
        return self.n

    def with_measurement_set(self, indices: Iterable[int] | None) -> "FiniteMetricSpace":
        ms = _check_indices(indices, self.n, "measurement set") if indices is not None else None
        return FiniteMetricSpace(self.dist, self.labels, ms, self.diam)

    def subspace(self, indices: Sequence[int]) -> "FiniteMetricSpace":
        """Restriction to ``indices``; the measurement set is re-indexed."""
        idx = np.asarray(_check_indices(indices, self.n, "subspace"), dtype=int)
        sub = self.dist[np.ix_(idx, idx)]
        ms = None
        if self.measurement_set is not None:
            pos = {int(k): i for i, k in enumerate(idx)}
            ms = tuple(pos[k] for k in self.measurement_set if k in pos) or None
        return _trusted(sub, tuple(self.labels[k] for k in idx), ms)


def _trusted(dist, labels=None, measurement_set=None) -> FiniteMetricSpace:
    # internal constructor for matrices that are metrics by construction
    d = np.array(dist, dtype=float, copy=True)
    d.setflags(write=False)
    n = d.shape[0]
    if labels is None:
        labels = tuple(str(i) for i in range(n))
    diam = float(d.max()) if n else 0.0
    return FiniteMetricSpace(d, tuple(labels), measurement_set, diam)


def _check_indices(indices, n, what) -> tuple[int, ...]:
    out = tuple(int(i) for i in indices)
    if not out:
        raise ParameterError(f"{what} must be nonempty")
    bad = [i for i in out if i < 0 or i >= n]
    if bad:
        raise ParameterError(f"{what} has indices outside 0..{n - 1}: {bad[:5]}")
    return out


def validate_metric(
    matrix,
    labels: Sequence[str] | None = None,
    measurement_set: Iterable[int] | None = None,
    slack: float = 0.0,
) -> FiniteMetricSpace:
    """Check the metric axioms and return an immutable space.

    Parameters
    ----------
    matrix : array_like, shape (n, n)
        Candidate distance matrix.
    labels : sequence of str, optional
        Point ids; defaults to ``"0" .. "n-1"``.
    measurement_set : iterable of int, optional
        Indices of the sensor points.
    slack : float
        Extra absolute tolerance for the symmetry and triangle checks.  The
        default (strict) mode only allows ``1e-12 * diam`` of rounding.

    Raises
    ------
    MetricValidationError
        Naming the offending pair (diagonal, symmetry, positivity) or the
        offending triple ``(i, j, k)`` with ``d[i,k] > d[i,j] + d[j,k]``.
    """
    d = np.asarray(matrix, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise MetricValidationError(f"distance matrix must be square, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        i, j = np.argwhere(~np.isfinite(d))[0]
        raise MetricValidationError(f"non-finite entry at ({i}, {j})", (i, j))
    if slack < 0:
        raise ParameterError("slack must be nonnegative")
    n = d.shape[0]
    diam = float(d.max()) if n else 0.0
    tol = TRIANGLE_RTOL * diam + slack

    diag = np.flatnonzero(np.diag(d) != 0.0)
    if diag.size:
        i = int(diag[0])
        raise MetricValidationError(f"nonzero diagonal entry d[{i},{i}] = {d[i, i]!r}", (i, i))
    asym = np.argwhere(np.abs(d - d.T) > tol)
    if asym.size:
        i, j = (int(v) for v in asym[0])
        raise MetricValidationError(
            f"asymmetric entries d[{i},{j}] = {d[i, j]!r}, d[{j},{i}] = {d[j, i]!r}", (i, j)
        )
    off = ~np.eye(n, dtype=bool)
    nonpos = np.argwhere(off & (d <= 0.0))
    if nonpos.size:
        i, j = (int(v) for v in nonpos[0])
        raise MetricValidationError(f"distinct points {i} and {j} at distance {d[i, j]!r}", (i, j))
    if d.min(initial=0.0) < 0:
        i, j = (int(v) for v in np.argwhere(d < 0)[0])
        raise MetricValidationError(f"negative distance at ({i}, {j})", (i, j))

    triple = find_triangle_violation(d, tol)
    if triple is not None:
        i, j, k = triple
        raise MetricValidationError(
            f"triangle inequality fails at ({i}, {j}, {k}): "
            f"d[{i},{k}] = {d[i, k]!r} > d[{i},{j}] + d[{j},{k}] = {d[i, j] + d[j, k]!r}",
            triple,
        )

    if labels is not None:
        labels = tuple(str(s) for s in labels)
        if len(labels) != n:
            raise MetricValidationError(f"{len(labels)} labels for {n} points")
    ms = _check_indices(measurement_set, n, "measurement set") if measurement_set is not None else None
    return _trusted(d, labels, ms)


def find_triangle_violation(d: np.ndarray, tol: float = 0.0):
    """First ``(i, j, k)`` with ``d[i,k] > d[i,j] + d[j,k] + tol``, scanning j outermost."""
    d = np.ascontiguousarray(d, dtype=float)
    n = d.shape[0]
    buf = np.empty_like(d)
    for j in range(n):
        # excess of d[i,k] over the detour through j, computed in place
        np.add(d[:, j, None], d[None, j, :], out=buf)
        np.subtract(d, buf, out=buf)
        if buf.max(initial=-np.inf) > tol:
            i, k = np.argwhere(buf > tol)[0]
            return int(i), j, int(k)
    return None


def truncate(space: FiniteMetricSpace, epsilon: float) -> FiniteMetricSpace:
    """The epsilon-truncation: every distance replaced by ``min(d, epsilon)``."""
    if not epsilon > 0 or not math.isfinite(epsilon):
        raise ParameterError(f"truncation epsilon must be a positive finite number, got {epsilon!r}")
    return _trusted(np.minimum(space.dist, epsilon), space.labels, space.measurement_set)


def hausdorff(space: FiniteMetricSpace, A: Iterable[int], B: Iterable[int]) -> float:
    """Hausdorff distance between two index subsets of ``space``."""
    a = _check_indices(A, space.n, "subset A")
    b = _check_indices(B, space.n, "subset B")
    sub = space.dist[np.ix_(a, b)]
    return float(max(sub.min(axis=1).max(), sub.min(axis=0).max()))


def hausdorff_of_sets(values_a, values_b) -> float:
    """Hausdorff distance between two finite subsets of the real line."""
    a = np.asarray(values_a, dtype=float).ravel()
    b = np.asarray(values_b, dtype=float).ravel()
    gaps = np.abs(a[:, None] - b[None, :])
    return float(max(gaps.min(axis=1).max(), gaps.min(axis=0).max()))


@dataclass(frozen=True)
class Correspondence:
    """A relation between ``range(nx)`` and ``range(ny)`` covering both sides."""

    pairs: tuple[tuple[int, int], ...]
    nx: int
    ny: int

    def __post_init__(self):
        pairs = tuple(sorted({(int(i), int(j)) for i, j in self.pairs}))
        object.__setattr__(self, "pairs", pairs)
        for i, j in pairs:
            if not (0 <= i < self.nx and 0 <= j < self.ny):
                raise CoverageError(f"pair ({i}, {j}) outside {self.nx} x {self.ny}")
        left = {i for i, _ in pairs}
        right = {j for _, j in pairs}
        missing_x = sorted(set(range(self.nx)) - left)
        missing_y = sorted(set(range(self.ny)) - right)
        if missing_x:
            raise CoverageError(f"points of X not covered: {missing_x}")
        if missing_y:
            raise CoverageError(f"points of Y not covered: {missing_y}")

    @classmethod
    def identity(cls, n: int) -> "Correspondence":
        return cls(tuple((i, i) for i in range(n)), n, n)

    def arrays(self):
        p = np.asarray(self.pairs, dtype=int).reshape(-1, 2)
        return p[:, 0], p[:, 1]


def distortion(corr: Correspondence, X: FiniteMetricSpace, Y: FiniteMetricSpace) -> float:
    """``sup |d_X(x,x') - d_Y(y,y')|`` over all pairs of pairs in ``corr``."""
    if corr.nx != X.n or corr.ny != Y.n:
        raise CoverageError(
            f"correspondence is {corr.nx} x {corr.ny} but spaces have {X.n} and {Y.n} points"
        )
    xi, yi = corr.arrays()
    return _distortion(X.dist, Y.dist, xi, yi)


def _distortion(dX, dY, xi, yi) -> float:
    if len(xi) == 0:
        return 0.0
    return float(np.abs(dX[np.ix_(xi, xi)] - dY[np.ix_(yi, yi)]).max())


@dataclass(frozen=True)
class GhEstimate:
    lower: float
    upper: float
    exact: float | None = None

    def __post_init__(self):
        # bounds are exact inequalities; allow only rounding slack
        slack = 1e-12 * max(1.0, abs(self.upper))
        if self.lower > self.upper + slack:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")
        if self.exact is not None and not (self.lower - slack <= self.exact <= self.upper + slack):
            raise ValueError(f"exact value {self.exact} outside [{self.lower}, {self.upper}]")

    @property
    def best_lower(self) -> float:
        return self.exact if self.exact is not None else self.lower

    def to_dict(self) -> dict:
        return {"lower": self.lower, "upper": self.upper, "exact": self.exact}


def eccentricities(space: FiniteMetricSpace) -> np.ndarray:
    return space.dist.max(axis=1) if space.n else np.zeros(0)


def greedy_correspondence(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> Correspondence:
    """Cheap deterministic correspondence used for upper bounds.

    Each point of X, in index order, is paired with the point of Y that adds
    the least distortion against the pairs chosen so far (ties go to the
    lowest index).  Points of Y left uncovered are then patched in the same
    way.  Not claimed to be optimal.
    """
    dX, dY = X.dist, Y.dist
    xs: list[int] = []
    ys: list[int] = []
    for x in range(X.n):
        if xs:
            inc = np.abs(dX[x, xs][None, :] - dY[:, ys]).max(axis=1)
            y = int(np.argmin(inc))
        else:
            y = 0
        xs.append(x)
        ys.append(y)
    covered = np.zeros(Y.n, dtype=bool)
    covered[ys] = True
    for y in np.flatnonzero(~covered):
        inc = np.abs(dX[:, xs] - dY[y, ys][None, :]).max(axis=1)
        x = int(np.argmin(inc))
        xs.append(x)
        ys.append(int(y))
    return Correspondence(tuple(zip(xs, ys)), X.n, Y.n)


def _transpose(corr: Correspondence) -> Correspondence:
    return Correspondence(tuple((j, i) for i, j in corr.pairs), corr.ny, corr.nx)


def gh_bounds(X: FiniteMetricSpace, Y: FiniteMetricSpace) -> GhEstimate:
    """Bracket the Gromov-Hausdorff distance without enumeration.

    The lower bound is the larger of half the diameter gap and half the
    Hausdorff distance between the two eccentricity value sets (the latter
    dominates the former).  The upper bound is the smallest of half the larger
    diameter and half the distortion of a few explicit correspondences:
    greedy in both directions, plus the index identity when sizes agree.
    """
    diam_gap = 0.5 * abs(X.diam - Y.diam)
    ecc_gap = 0.5 * hausdorff_of_sets(eccentricities(X), eccentricities(Y))
    lower = max(diam_gap, ecc_gap)

    candidates = [0.5 * max(X.diam, Y.diam)]
    candidates.append(0.5 * distortion(greedy_correspondence(X, Y), X, Y))
    candidates.append(0.5 * distortion(_transpose(greedy_correspondence(Y, X)), X, Y))
    if X.n == Y.n:
        candidates.append(0.5 * distortion(Correspondence.identity(X.n), X, Y))
    upper = min(candidates)
    # both bounds are exact inequalities; clip rounding noise in the last ulp
    return GhEstimate(min(lower, upper), upper)


def optimal_correspondence(
    X: FiniteMetricSpace, Y: FiniteMetricSpace, cap: int = DEFAULT_GH_CAP
) -> tuple[float, Correspondence]:
    """Minimum-distortion correspondence by exhaustive branch and bound.

    Every correspondence contains the union of the graph of some map X -> Y
    and the transposed graph of some map Y -> X, and distortion can only grow
    when pairs are added.  So it suffices to search over such unions: first a
    partner for every x, then a partner for every y still uncovered.  Branches
    are cut once their distortion reaches the best one found.
    """
    if X.n > cap or Y.n > cap:
        raise SizeError(
            f"exact Gromov-Hausdorff enumeration capped at {cap} points per side; "
            f"got {X.n} and {Y.n}"
        )
    if X.n == 0 or Y.n == 0:
        raise ParameterError("spaces must be nonempty")
    dX, dY = X.dist, Y.dist
    nx, ny = X.n, Y.n

    seed = greedy_correspondence(X, Y)
    best = [distortion(seed, X, Y), seed.pairs]
    xs: list[int] = []
    ys: list[int] = []

    def added(x, y):
        if not xs:
            return 0.0
        return float(np.abs(dX[x, xs] - dY[y, ys]).max())

    def place_y(pos, uncovered, cur):
        if pos == len(uncovered):
            if cur < best[0]:
                best[0] = cur
                best[1] = tuple(zip(xs, ys))
            return
        y = uncovered[pos]
        for x in range(nx):
            c = max(cur, added(x, y))
            if c >= best[0]:
                continue
            xs.append(x)
            ys.append(y)
            place_y(pos + 1, uncovered, c)
            xs.pop()
            ys.pop()

    def place_x(x, cur):
        if x == nx:
            uncovered = sorted(set(range(ny)) - set(ys))
            place_y(0, uncovered, cur)
            return
        for y in range(ny):
            c = max(cur, added(x, y))
            if c >= best[0]:
                continue
            xs.append(x)
            ys.append(y)
            place_x(x + 1, c)
            xs.pop()
            ys.pop()

    if best[0] > 0.0:
        place_x(0, 0.0)
    return best[0], Correspondence(best[1], nx, ny)


def gh_exact_small(X: FiniteMetricSpace, Y: FiniteMetricSpace, cap: int = DEFAULT_GH_CAP) -> float:
    """Exact Gromov-Hausdorff distance of two small finite spaces.

    Raises :class:`SizeError` when either side has more than ``cap`` points.
    """
    dis, _ = optimal_correspondence(X, Y, cap)
    return 0.5 * dis


def truncated_gh(
    X: FiniteMetricSpace, Y: FiniteMetricSpace, epsilon: float, cap: int = DEFAULT_GH_CAP
) -> GhEstimate:
    """Gromov-Hausdorff estimate of the two epsilon-truncations.

    ``exact`` is filled in when both sides have at most ``cap`` points.
    """
    Xe, Ye = truncate(X, epsilon), truncate(Y, epsilon)
    return gh_estimate(Xe, Ye, cap)


def gh_estimate(X: FiniteMetricSpace, Y: FiniteMetricSpace, cap: int = DEFAULT_GH_CAP) -> GhEstimate:
    """Bounds for any size, plus the exact value when both sides fit under ``cap``."""
    b = gh_bounds(X, Y)
    if X.n <= cap and Y.n <= cap:
        exact = gh_exact_small(X, Y, cap)
        # tighten the bracket with the exact value; it lies inside by theory
        return GhEstimate(min(b.lower, exact), max(b.upper, exact), exact)
    return b
