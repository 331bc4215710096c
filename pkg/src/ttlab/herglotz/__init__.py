"""Geodesics, conjugate points and minimisation margins in radial Herglotz disks."""

from .conjugate import conjugate_radii, truncated_angle, truncated_angle_slope
from .disk import disk_distance_matrix, polar_grid
from .integrals import (
    GeodesicRecord,
    geodesic_record,
    geodesic_table,
    half_length,
    opening_angle,
    partial_length,
    partial_opening_angle,
)
from .ode import ReplayOracle, trace
from .profile import RadialProfile, constant_profile, from_speed, gaussian_profile, herglotz_margin
from .search import (
    GeodesicTables,
    IntersectionTriple,
    MinimalityReport,
    find_intersecting_pairs,
    flie_from_delta,
    minimality_margin,
    search_radii,
)

__all__ = [name for name in dir() if not name.startswith("_")]
