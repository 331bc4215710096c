"""Conjugate radii: critical points of the truncated opening angle.

``alpha_tilde(r; r0)`` is the angle swept by the geodesic tipping at ``r``
between radii ``r`` and ``r0``.  Its ``r``-derivative vanishes where nearby
geodesics refocus at radius ``r0``.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from ..errors import DomainError, QuadratureError
from .integrals import partial_opening_angle
from .profile import RadialProfile

log = logging.getLogger(__name__)

FD_STEP = 1e-4


def truncated_angle(profile: RadialProfile, r: float, r0: float) -> float:
    return partial_opening_angle(profile, r, r, r0)


def truncated_angle_slope(profile: RadialProfile, r: float, r0: float, h: float = FD_STEP) -> float:
    """Central difference in ``r`` with one Richardson step (error O(h^4))."""

    def central(step):
        return (truncated_angle(profile, r + step, r0) - truncated_angle(profile, r - step, r0)) / (2 * step)

    return (4 * central(h / 2) - central(h)) / 3


def conjugate_radii(
    profile: RadialProfile,
    r0: float,
    bracket_grid: int = 200,
    h: float = FD_STEP,
    xtol: float = 1e-6,
) -> list[float]:
    """Sign changes of the slope on a uniform grid in ``(0, r0)``, refined by bisection."""
    if not 0 < r0 <= 1:
        raise DomainError(f"r0 must lie in (0, 1], got {r0}")
    # the slope blows up like (r0 - r)^(-1/2); stay a few steps away from both ends
    lo, hi = max(4 * h, 0.002 * r0), r0 * (1 - 0.01) - 4 * h
    if hi <= lo:
        return []
    grid = np.linspace(lo, hi, bracket_grid)
    slopes = []
    for r in grid:
        try:
            slopes.append(truncated_angle_slope(profile, r, r0, h))
        except QuadratureError as exc:
            log.warning("slope evaluation failed at r=%.6g (%s); dropping grid point", r, exc)
            slopes.append(math.nan)
    slopes = np.array(slopes)
    ok = np.isfinite(slopes)
    if not ok.all():
        log.warning("conjugate search domain shrunk: %d of %d grid points unusable", (~ok).sum(), len(grid))
    grid, slopes = grid[ok], slopes[ok]

    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], slopes[:-1], slopes[1:]):
        if fa == 0:
            roots.append(float(a))
            continue
        if fa * fb > 0:
            continue
        while b - a > xtol:
            mid = 0.5 * (a + b)
            fm = truncated_angle_slope(profile, mid, r0, h)
            if fa * fm <= 0:
                b = mid
            else:
                a, fa = mid, fm
        roots.append(float(0.5 * (a + b)))
    return roots
