"""Set systems as indicator bit-vectors: types, oracles, geometric generators."""

from .core import (
    BudgetError,
    CsParams,
    IncidenceVector,
    IndexSample,
    PointSet,
    SetSystem,
    ShatterProfile,
    cs_profile,
    distance,
    project,
    projection_count,
    shatter_function_exact,
    unit_distance_density,
    vc_dimension_exact,
)
from .generators import (
    build_balls,
    build_halfspaces,
    build_rectangle_grid_dual,
    build_slabs,
    clustered_points,
    convex_position_points,
    random_points,
)

__all__ = [
    "BudgetError",
    "CsParams",
    "IncidenceVector",
    "IndexSample",
    "PointSet",
    "SetSystem",
    "ShatterProfile",
    "build_balls",
    "build_halfspaces",
    "build_rectangle_grid_dual",
    "build_slabs",
    "clustered_points",
    "convex_position_points",
    "cs_profile",
    "distance",
    "project",
    "projection_count",
    "random_points",
    "shatter_function_exact",
    "unit_distance_density",
    "vc_dimension_exact",
]
