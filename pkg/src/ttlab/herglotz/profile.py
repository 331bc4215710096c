"""Radially symmetric sound speeds on the closed unit disk."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import ProfileError


@dataclass(frozen=True, eq=False)
class RadialProfile:
    """Sound speed ``c(r)`` given through ``log c`` and its derivative.

    Working with ``log c`` lets the geodesic integrands be evaluated without
    cancellation near the tipping point.  ``log_c_diff(r, s)`` may be supplied
    to compute ``log c(s) - log c(r)`` accurately when ``s`` is close to ``r``.
    """

    log_c: Callable[[np.ndarray], np.ndarray]
    dlog_c: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"
    params: dict = field(default_factory=dict)
    log_c_diff: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None

    def c(self, r):
        return np.exp(self.log_c(np.asarray(r, dtype=float)))

    def dc(self, r):
        r = np.asarray(r, dtype=float)
        return self.c(r) * self.dlog_c(r)

    def log_ratio(self, r, s):
        """``log c(s) - log c(r)``."""
        if self.log_c_diff is not None:
            return self.log_c_diff(r, s)
        return self.log_c(s) - self.log_c(r)

    def describe(self) -> dict:
        return {"name": self.name, **self.params}


def gaussian_profile(k: float = 1.6, sigma: float = 0.4) -> RadialProfile:
    """``c(r) = exp(-k/2 * exp(-r^2 / (2 sigma^2)))``."""
    if not sigma > 0:
        raise ProfileError("sigma must be positive")
    two_s2 = 2.0 * sigma * sigma

    def log_c(r):
        return -0.5 * k * np.exp(-np.square(r) / two_s2)

    def dlog_c(r):
        return 0.5 * k * np.exp(-np.square(r) / two_s2) * r / (sigma * sigma)

    def diff(r, s):
        # exp(-s^2/2s2) - exp(-r^2/2s2) without cancellation
        gap = (s - r) * (s + r)
        return -0.5 * k * np.exp(-np.square(r) / two_s2) * np.expm1(-gap / two_s2)

    return RadialProfile(log_c, dlog_c, "gaussian", {"k": float(k), "sigma": float(sigma)}, diff)


def constant_profile(value: float = 1.0) -> RadialProfile:
    if not value > 0:
        raise ProfileError("constant speed must be positive")
    lv = math.log(value)
    return RadialProfile(
        lambda r: np.full(np.shape(r), lv),
        lambda r: np.zeros(np.shape(r)),
        "constant",
        {"value": float(value)},
        lambda r, s: np.zeros(np.broadcast(r, s).shape),
    )


def from_speed(c: Callable, dc: Callable, name: str = "custom") -> RadialProfile:
    """Wrap a plain speed function and its derivative."""

    def log_c(r):
        v = np.asarray(c(r), dtype=float)
        if np.any(~(v > 0)):
            raise ProfileError(f"{name}: sound speed is not positive")
        return np.log(v)

    return RadialProfile(log_c, lambda r: np.asarray(dc(r), dtype=float) / np.asarray(c(r), dtype=float), name)


def herglotz_margin(profile: RadialProfile, grid: int = 2001) -> float:
    """Minimum of ``d/dr (r / c(r)) = (c - r c') / c^2`` over a uniform grid of [0, 1]."""
    r = np.linspace(0.0, 1.0, grid)
    c = np.exp(profile.log_c(r))
    if np.any(~np.isfinite(c)) or np.any(c <= 0):
        raise ProfileError(f"{profile.name}: sound speed is not positive and finite on [0, 1]")
    dc = c * profile.dlog_c(r)
    return float(np.min((c - r * dc) / (c * c)))


def require_herglotz(profile: RadialProfile) -> float:
    m = herglotz_margin(profile)
    if m <= 0:
        raise ProfileError(f"{profile.name}: Herglotz margin {m:.3g} is not positive")
    return m
