"""Example functions on the cube and their bounded-difference profiles."""
from .convex import PointSet, convex_distance, convex_distance_table, min_norm_point
from .lis import count_nondecreasing, lis_length, lis_log_count
from .profile import (
    DerivativeProfile,
    SelfBoundingResult,
    TableEvaluator,
    derivative_profile,
    exact_profile,
    self_bounding_check,
)
from .rademacher import VectorFamily, rademacher_sup
from .spectral import adjacency_largest_eigenvalue, largest_eigenvalues, vertices_for_edges
from .weights import (
    RandomWeightInstance,
    assignment_cost,
    hungarian,
    instance_cost,
    mst_cost,
    mst_edges,
    random_instance,
    truncate_discretize,
    truncate_discretize_weights,
)

__all__ = [
    "PointSet",
    "convex_distance",
    "convex_distance_table",
    "min_norm_point",
    "count_nondecreasing",
    "lis_length",
    "lis_log_count",
    "DerivativeProfile",
    "SelfBoundingResult",
    "TableEvaluator",
    "derivative_profile",
    "exact_profile",
    "self_bounding_check",
    "VectorFamily",
    "rademacher_sup",
    "adjacency_largest_eigenvalue",
    "largest_eigenvalues",
    "vertices_for_edges",
    "RandomWeightInstance",
    "assignment_cost",
    "hungarian",
    "instance_cost",
    "mst_cost",
    "mst_edges",
    "random_instance",
    "truncate_discretize",
    "truncate_discretize_weights",
]
