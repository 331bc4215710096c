"""Length and angle integrals of geodesics in a radial Herglotz disk.

A geodesic with tipping radius ``r`` satisfies ``s sin(angle)/c(s) = r/c(r)``.
Its half length and half opening angle are integrals over ``s`` in ``[r, 1]``
with an inverse square root singularity at ``s = r``.  The substitution
``s = r + u**2`` removes it; in ``u`` the integrands are bounded and smooth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.integrate import quad

from ..errors import DomainError, QuadratureError
from .profile import RadialProfile, require_herglotz

DEFAULT_TOL = 1e-13
_ACCEPT = 1e-9  # error estimates above this are reported as failures


@lru_cache(maxsize=64)
def _checked(profile: RadialProfile) -> float:
    return require_herglotz(profile)


def integrand(profile: RadialProfile, r, u, kind: str):
    """Substituted integrand at tipping radius ``r`` and ``u = sqrt(s - r)``.

    ``kind`` is ``"length"`` or ``"angle"``.  Vectorised; ``r > 0``.
    """
    r = np.asarray(r, dtype=float)
    u = np.asarray(u, dtype=float)
    u2 = u * u
    s = r + u2
    delta = profile.log_ratio(r, s)
    logq = np.log1p(u2 / r) - delta
    with np.errstate(divide="ignore", invalid="ignore"):
        if kind == "length":
            w = np.exp(-profile.log_c(s))
        elif kind == "angle":
            w = r * np.exp(delta) / (s * s)
        else:
            raise ValueError(f"unknown integrand kind {kind!r}")
        val = 2.0 * u * w * np.exp(logq) / np.sqrt(np.expm1(2.0 * logq))
    tiny = u < 1e-30
    if np.any(tiny):
        if kind == "length":
            w0 = np.exp(-profile.log_c(r))
        else:
            w0 = 1.0 / r
        lim = w0 * np.sqrt(2.0 / (1.0 / r - profile.dlog_c(r)))
        val = np.where(tiny, lim, val)
    return val


def _quad(f, a, b, tol):
    # full_output silences scipy's warnings; the error estimate is checked by the caller
    val, err, *_ = quad(f, a, b, epsabs=tol, epsrel=tol, limit=200, full_output=1)
    return val, err


def _integrate(profile, r, lo, hi, kind, tol):
    _checked(profile)
    r, lo, hi = float(r), float(lo), float(hi)
    slack = 1e-14
    if not (0.0 <= r <= lo + slack and lo <= hi + slack and hi <= 1.0 + slack):
        raise DomainError(f"need 0 <= r <= lo <= hi <= 1, got r={r}, lo={lo}, hi={hi}")
    lo, hi = max(lo, r), min(max(hi, lo), 1.0)
    if hi <= lo:
        return 0.0, 0.0
    if r == 0.0:
        if kind == "angle":
            return 0.0, 0.0
        val, err = _quad(lambda s: math.exp(-float(profile.log_c(s))), lo, hi, tol)
    else:
        f = lambda u: float(integrand(profile, r, u, kind))
        val, err = _quad(f, math.sqrt(lo - r), math.sqrt(hi - r), tol)
    if not math.isfinite(val) or err > max(_ACCEPT, 100 * tol):
        raise QuadratureError(f"{kind} integral at r={r} did not converge", estimate=(val, err))
    return val, err


def _out(pair, return_error):
    return pair if return_error else pair[0]


def half_length(profile: RadialProfile, r: float, tol: float = DEFAULT_TOL, return_error: bool = False):
    """Length from the boundary to the tipping point; ``r = 0`` is the diameter half."""
    return _out(_integrate(profile, r, r, 1.0, "length", tol), return_error)


def opening_angle(profile: RadialProfile, r: float, tol: float = DEFAULT_TOL, return_error: bool = False):
    """Angle between the tipping point and the boundary endpoint, seen from the centre."""
    if r == 0:
        _checked(profile)
        # the radial line: the limit value, not the singular integral
        return _out((math.pi / 2, 0.0), return_error)
    return _out(_integrate(profile, r, r, 1.0, "angle", tol), return_error)


def partial_opening_angle(profile, r, r_lo, r_hi, tol: float = DEFAULT_TOL, return_error: bool = False):
    """Angle swept by the geodesic tipping at ``r`` between radii ``r_lo`` and ``r_hi``."""
    return _out(_integrate(profile, r, r_lo, r_hi, "angle", tol), return_error)


def partial_length(profile, r, r_lo, r_hi, tol: float = DEFAULT_TOL, return_error: bool = False):
    return _out(_integrate(profile, r, r_lo, r_hi, "length", tol), return_error)


@dataclass(frozen=True)
class GeodesicRecord:
    tip_radius: float
    half_length: float
    half_angle: float


def geodesic_record(profile: RadialProfile, r: float, tol: float = DEFAULT_TOL) -> GeodesicRecord:
    return GeodesicRecord(float(r), half_length(profile, r, tol), opening_angle(profile, r, tol))


def geodesic_table(profile: RadialProfile, radii, tol: float = DEFAULT_TOL) -> list[GeodesicRecord]:
    return [geodesic_record(profile, r, tol) for r in radii]
