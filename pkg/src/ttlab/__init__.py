"""Travel time data of finite metric spaces, Gromov-Hausdorff tools and Herglotz disks."""

from .errors import (
    CoverageError,
    DomainError,
    InjectivityError,
    MetricValidationError,
    ParameterError,
    PreconditionError,
    ProfileError,
    QuadratureError,
    SizeError,
    SpecError,
    TTLabError,
)
from .metric_core import (
    Correspondence,
    FiniteMetricSpace,
    GhEstimate,
    distortion,
    gh_bounds,
    gh_estimate,
    gh_exact_small,
    hausdorff,
    optimal_correspondence,
    truncate,
    truncated_gh,
    validate_metric,
)
from .travel_time import (
    CheckReport,
    MeasurementSet,
    SensorMatching,
    TravelTimeData,
    check_blie,
    check_flie,
    condition_b_witnesses,
    data_hausdorff,
    max_blie_epsilon,
    midpoint_test,
    sup_distance,
    travel_time_data,
    verify_stability,
)

__version__ = "0.1.0"
