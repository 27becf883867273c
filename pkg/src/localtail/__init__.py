"""Local quantile-gap bounds for functions on the r-ary hypercube.

Fourier analysis on ``{0..r-1}^n``, variance and gap bounds, example
functions with bounded-difference profiles, and exact or Monte Carlo
quantile series compared against those bounds.
"""
from .bounds import (
    BoundResult,
    PhiSpec,
    gap_bound_adjacent,
    gap_bound_cor41,
    gap_bound_thm21,
    gap_bound_thm22,
    gap_bound_thm23,
    gap_bound_thm31,
    gap_bound_thm31_adjacent,
    local_mass_lower_bound,
    monotone_tail_threshold,
    mst_truncation_failure_bound,
    subgaussian_tail,
    thm31_fixed_point,
    variance_upper_bound,
)
from .cube import (
    CubePoint,
    FourierSpectrum,
    TabulatedFunction,
    delta_i,
    fourier_transform,
    hypercontractivity_check,
    inverse_transform,
    low_degree_projection,
    naive_fourier_transform,
    norm_q,
    shift,
    variance,
)
from .exceptions import (
    ArgumentError,
    CapacityError,
    DomainError,
    NumericIntegrityError,
    UndefinedBoundError,
)
from .experiments import ExperimentConfig, run_experiment
from .quantiles import (
    EmpiricalQuantiles,
    GapBoundReport,
    QuantileSeries,
    TailBins,
    exact_quantiles,
    gap_report,
    local_mass_report,
    mc_quantiles,
    tail_bins,
)

__version__ = "0.1.0"

__all__ = [
    "BoundResult",
    "PhiSpec",
    "gap_bound_adjacent",
    "gap_bound_cor41",
    "gap_bound_thm21",
    "gap_bound_thm22",
    "gap_bound_thm23",
    "gap_bound_thm31",
    "gap_bound_thm31_adjacent",
    "local_mass_lower_bound",
    "monotone_tail_threshold",
    "mst_truncation_failure_bound",
    "subgaussian_tail",
    "thm31_fixed_point",
    "variance_upper_bound",
    "CubePoint",
    "FourierSpectrum",
    "TabulatedFunction",
    "delta_i",
    "fourier_transform",
    "hypercontractivity_check",
    "inverse_transform",
    "low_degree_projection",
    "naive_fourier_transform",
    "norm_q",
    "shift",
    "variance",
    "ArgumentError",
    "CapacityError",
    "DomainError",
    "NumericIntegrityError",
    "UndefinedBoundError",
    "ExperimentConfig",
    "run_experiment",
    "EmpiricalQuantiles",
    "GapBoundReport",
    "QuantileSeries",
    "TailBins",
    "exact_quantiles",
    "gap_report",
    "local_mass_report",
    "mc_quantiles",
    "tail_bins",
]
