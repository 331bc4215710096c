"""Geodesics traced as solutions of Hamilton's equations.

Used as an oracle that shares nothing with the quadrature code: with
``H = c(x)^2 |p|^2 / 2`` and ``|p| = 1/c`` the curve has unit speed in the
metric ``c^{-2} |dx|^2``, so time equals length.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .profile import RadialProfile
from .search import IntersectionTriple

RTOL = 1e-11
ATOL = 1e-12


@dataclass
class Trace:
    tip_radius: float
    sign: int
    solution: object
    t_tip: float
    t_exit: float

    def position(self, t):
        return self.solution.sol(t)[:2]

    def radius(self, t):
        return float(np.hypot(*self.position(t)))

    def polyline(self, n: int = 200) -> np.ndarray:
        t = np.linspace(0.0, self.t_exit, n)
        return self.solution.sol(t)[:2].T


def trace(profile: RadialProfile, r: float, sign: int = 1, t_max: float = 20.0) -> Trace:
    """Geodesic from (1, 0) whose closest approach to the centre is ``r``.

    ``sign = +1`` turns counter-clockwise.
    """

    def rhs(_, y):
        x1, x2, p1, p2 = y
        rad = math.hypot(x1, x2)
        c = float(profile.c(rad))
        g = float(profile.dlog_c(rad)) / rad if rad > 0 else 0.0
        pp = p1 * p1 + p2 * p2
        # p' = -c grad(c) |p|^2 = -c^2 (dlog c / dr) (x / r) |p|^2
        return [c * c * p1, c * c * p2, -c * c * g * x1 * pp, -c * c * g * x2 * pp]

    c1 = float(profile.c(1.0))
    s = c1 * r / float(profile.c(r))
    d = np.array([-math.sqrt(max(0.0, 1 - s * s)), sign * s])
    y0 = [1.0, 0.0, *(d / c1)]

    def turning(_, y):
        return y[0] * y[2] + y[1] * y[3]

    turning.direction = 1

    def leaving(t, y):
        return (y[0] ** 2 + y[1] ** 2 - 1.0) if t > 1e-9 else -1.0

    leaving.terminal = True
    leaving.direction = 1

    sol = solve_ivp(rhs, (0.0, t_max), y0, method="DOP853", rtol=RTOL, atol=ATOL,
                    dense_output=True, events=(turning, leaving))
    t_exit = float(sol.t_events[1][0]) if len(sol.t_events[1]) else float(sol.t[-1])
    tips = sol.t_events[0]
    t_tip = float(tips[0]) if len(tips) else 0.5 * t_exit
    return Trace(float(r), int(sign), sol, t_tip, t_exit)


def _time_at_radius(tr: Trace, r2: float, outgoing: bool) -> float:
    f = lambda t: tr.radius(t) - r2
    if f(tr.t_tip) >= 0:
        return tr.t_tip
    if outgoing:
        return brentq(f, tr.t_tip, tr.t_exit, xtol=1e-13)
    return brentq(f, 0.0, tr.t_tip, xtol=1e-13)


@dataclass
class Replay:
    ok: bool
    gap: float
    point0: tuple[float, float]
    point1: tuple[float, float]
    time0: float
    time1: float


class ReplayOracle:
    """Replays triples; traces are cached per (tipping radius, turning sign)."""

    def __init__(self, profile: RadialProfile, tol: float = 1e-3):
        self.profile = profile
        self.tol = tol
        self._cache: dict[tuple[float, int], Trace] = {}

    def trace(self, r: float, sign: int) -> Trace:
        key = (float(r), int(sign))
        if key not in self._cache:
            self._cache[key] = trace(self.profile, r, sign)
        return self._cache[key]

    def replay(self, t: IntersectionTriple) -> Replay:
        """Both geodesics leave (1, 0); check they meet again at radius ``r2``."""
        g0 = self.trace(t.r0, 1)
        g1 = self.trace(t.r1, t.sign)
        t0 = _time_at_radius(g0, t.r2, outgoing=True)
        t1 = _time_at_radius(g1, t.r2, outgoing=(t.branch == 2))
        p0, p1 = g0.position(t0), g1.position(t1)
        gap = float(np.hypot(*(p0 - p1)))
        return Replay(gap <= self.tol, gap, tuple(map(float, p0)), tuple(map(float, p1)), t0, t1)
