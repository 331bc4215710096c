"""Search for pairs of boundary geodesics that meet a second time.

Two geodesics leave the same boundary point.  Angles are measured from that
point in the turning direction of the first geodesic (tipping radius ``r0``);
the second one (``r1``) turns the same way (``sign = +1``) or the other way
(``sign = -1``).  At a radius ``r2`` the first geodesic, on its way back out,
sits at angle ``A0 + a0(r2)``, where ``A0`` is its half opening angle and
``a0(r2)`` the angle swept from the tip out to ``r2``.  The second one sits at
``A1 - a1(r2)`` on its way in (branch 1) or ``A1 + a1(r2)`` on its way out
(branch 2).  A meeting point is a zero of the angle difference modulo 2 pi.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..errors import DomainError
from .integrals import _checked, integrand
from .profile import RadialProfile

log = logging.getLogger(__name__)

_GL_X, _GL_W = np.polynomial.legendre.leggauss(12)
REL_TIE = 1e-8


def search_radii(grid: int) -> np.ndarray:
    """``k / (grid + 1)`` for ``k = 1..grid``; grid ``2n + 1`` contains grid ``n``."""
    return np.arange(1, grid + 1) / (grid + 1)


def thread_count() -> int:
    env = os.environ.get("TTLAB_THREADS")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


class GeodesicTables:
    """Cumulative angle and length from the tip outwards, for many tipping radii.

    Each radius gets ``panels`` equal panels in ``u = sqrt(s - r)`` with
    12-point Gauss-Legendre sums; evaluation inside a panel integrates the
    remaining piece with the same rule, so values are accurate to rounding.
    """

    def __init__(self, profile: RadialProfile, radii, panels: int = 64):
        _checked(profile)
        self.profile = profile
        self.radii = np.asarray(radii, dtype=float)
        if np.any(self.radii <= 0) or np.any(self.radii >= 1):
            raise DomainError("tipping radii must lie in (0, 1)")
        self.panels = panels
        self.umax = np.sqrt(1.0 - self.radii)
        self.du = self.umax / panels
        a = self.du[:, None] * np.arange(panels)[None, :]
        nodes = a[:, :, None] + self.du[:, None, None] * (_GL_X + 1) / 2
        r3 = self.radii[:, None, None]
        half = self.du[:, None] / 2
        self.cum = {}
        for kind in ("angle", "length"):
            pieces = half * (integrand(profile, r3, nodes, kind) @ _GL_W)
            self.cum[kind] = np.concatenate([np.zeros((len(self.radii), 1)), np.cumsum(pieces, axis=1)], axis=1)
        self.total_angle = self.cum["angle"][:, -1]
        self.total_length = self.cum["length"][:, -1]

    def partial(self, idx, s, kind: str):
        """Integral from the tip of geodesic ``idx`` out to radius ``s`` (broadcasting)."""
        idx = np.asarray(idx)
        r = self.radii[idx]
        u = np.sqrt(np.maximum(np.asarray(s, dtype=float) - r, 0.0))
        du = self.du[idx]
        p = np.minimum((u / du).astype(int), self.panels - 1)
        start = p * du
        width = u - start
        base = self.cum[kind][idx, p]
        nodes = start[..., None] + width[..., None] * (_GL_X + 1) / 2
        extra = width / 2 * (integrand(self.profile, r[..., None], nodes, kind) @ _GL_W)
        return base + extra


@dataclass(frozen=True, order=True)
class IntersectionTriple:
    r0: float
    r1: float
    r2: float
    m: int
    branch: int
    sign: int
    length0: float = field(compare=False, default=math.nan)
    length1: float = field(compare=False, default=math.nan)
    ext0: float = field(compare=False, default=math.nan)
    ext1: float = field(compare=False, default=math.nan)

    def to_dict(self) -> dict:
        return asdict(self)


def winding_bound(tables: GeodesicTables) -> int:
    """Largest |m| that can balance the angle equations.

    Both sides lie in ``[0, 2 max A]`` up to sign, so the difference is below
    ``4 max A``; ``|m| <= floor(4 max A / 2 pi)``.
    """
    amax = float(tables.total_angle.max())
    return int(math.floor(4 * amax / (2 * math.pi)))


def _scan_row(tables: GeodesicTables, i: int, windings, samples: int):
    n = len(tables.radii)
    j = np.arange(n)
    lo = np.maximum(tables.radii[i], tables.radii)
    t = np.linspace(0.0, 1.0, samples)
    s = lo[:, None] + (1.0 - lo[:, None]) * t[None, :] ** 2
    s[:, -1] = 1.0
    lhs = tables.total_angle[i] + tables.partial(np.full(s.shape, i), s, "angle")
    a1 = tables.partial(np.broadcast_to(j[:, None], s.shape), s, "angle")
    A1 = tables.total_angle[:, None]
    found = []
    for branch, rhs in ((1, A1 - a1), (2, A1 + a1)):
        for sign in (1, -1):
            for m in windings:
                F = lhs - sign * rhs - 2 * math.pi * m
                if sign == 1:
                    F[i] = np.nan  # the geodesic itself
                hit = np.sign(F[:, :-1]) * np.sign(F[:, 1:]) < 0
                for jj, kk in zip(*np.nonzero(hit)):
                    found.append((int(jj), branch, sign, m, s[jj, kk], s[jj, kk + 1]))
    out = []
    for jj, branch, sign, m, a, b in found:
        r2 = _refine(tables, i, jj, branch, sign, m, a, b)
        out.append(_triple(tables, i, jj, r2, m, branch, sign))
    return out


def _residual(tables, i, j, branch, sign, m):
    A0, A1 = tables.total_angle[i], tables.total_angle[j]

    def g(x):
        a0 = tables.partial(i, x, "angle")
        a1 = tables.partial(j, x, "angle")
        rhs = A1 - a1 if branch == 1 else A1 + a1
        return float(A0 + a0 - sign * rhs - 2 * math.pi * m)

    return g


def _refine(tables, i, j, branch, sign, m, a, b):
    return brentq(_residual(tables, i, j, branch, sign, m), a, b, xtol=1e-14, rtol=1e-15)


def _triple(tables, i, j, r2, m, branch, sign):
    l0 = float(tables.partial(i, r2, "length"))
    l1 = float(tables.partial(j, r2, "length"))
    L0, L1 = tables.total_length[i], tables.total_length[j]
    ext1 = -l1 if branch == 1 else l1
    return IntersectionTriple(
        float(tables.radii[i]), float(tables.radii[j]), float(r2), int(m), branch, sign,
        float(L0 + l0), float(L1 + ext1), l0, float(ext1),
    )


def find_intersecting_pairs(
    profile: RadialProfile,
    grid: int = 200,
    samples: int = 96,
    panels: int = 64,
    tables: GeodesicTables | None = None,
) -> list[IntersectionTriple]:
    """All second meetings for tipping radii on ``search_radii(grid)``, sorted."""
    if tables is None:
        tables = GeodesicTables(profile, search_radii(grid), panels)
    mb = winding_bound(tables)
    log.info("winding bound |m| <= %d (max half angle %.6f)", mb, float(tables.total_angle.max()))
    windings = range(-max(mb, 1), max(mb, 1) + 1)
    rows = range(len(tables.radii))
    with ThreadPoolExecutor(thread_count()) as pool:
        parts = list(pool.map(lambda i: _scan_row(tables, i, windings, samples), rows))
    return sorted(t for part in parts for t in part)


@dataclass
class MinimalityReport:
    failing_triples: list[IntersectionTriple]
    extension_times: list[tuple[int, int, float]]
    delta: float
    n_triples: int = 0

    def to_dict(self) -> dict:
        return {
            "delta": None if math.isinf(self.delta) else self.delta,
            "delta_is_infinite": math.isinf(self.delta),
            "n_triples": self.n_triples,
            "n_failing": len(self.failing_triples),
            "failing_triples": [t.to_dict() for t in self.failing_triples],
            "extension_times": [{"triple": a, "geodesic": b, "time": t} for a, b, t in self.extension_times],
        }


def minimality_margin(profile: RadialProfile, triples) -> MinimalityReport:
    """Keep meetings where the two connecting lengths differ, and how far past the tip they lie.

    The lengths from the shared boundary point to the meeting point are
    compared with relative tolerance ``REL_TIE``; equal lengths do not count
    as a failure.  For a failing pair each geodesic that reaches the meeting
    point on its outgoing half contributes its time past the tip.  ``delta``
    is the smallest such time, or ``inf`` when nothing fails.
    """
    triples = list(triples)
    failing, ext = [], []
    for t in triples:
        l0, l1 = t.length0, t.length1
        if abs(l0 - l1) <= REL_TIE * max(l0, l1):
            continue
        k = len(failing)
        failing.append(t)
        for which, e in ((0, t.ext0), (1, t.ext1)):
            if e >= 0:
                ext.append((k, which, float(e)))
    delta = min((e for _, _, e in ext), default=math.inf)
    return MinimalityReport(failing, ext, delta, len(triples))


def flie_from_delta(delta: float) -> float:
    """Open upper end ``2 delta`` of the certified FLIE range ``0 < eps < 2 delta``."""
    if not delta > 0:
        raise DomainError(f"delta must be positive, got {delta}")
    return 2.0 * float(delta)
