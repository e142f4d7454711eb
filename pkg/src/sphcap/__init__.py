"""Hole, covering and separation statistics of random point configurations on spheres."""

__version__ = "0.1.0"

from .constants import (
    ConstantsTable,
    big_b,
    c_moment,
    cap_area_euclid,
    cap_area_geodesic,
    cap_area_hypergeom,
    constants_table,
    e_moment,
    hole_cdf,
    hole_pdf,
    kappa,
    sep_c,
    sep_limit_cdf,
    sep_var_limit,
)
from .empirical import EmpiricalDistribution
from .hull import DegenerateInputError, Facet, HullResult, convex_hull, facet_area, hull_volume_signed
from .metrics import (
    DuplicatePointError,
    HoleSummary,
    SeparationSummary,
    circle_gaps,
    hole_radii,
    moment_sum,
    pairwise_angle_distribution,
    separation,
    weighted_facet_stat,
)
from .montecarlo import (
    Estimate,
    ExperimentConfig,
    bounds_experiment,
    covering_trend,
    gap_experiment,
    run,
    scaled_hole_radii_pool,
    scaled_separation_cdf,
)
from .oracle import MomentPrediction, mean_cap_area_sum, moment_asymptotic, moment_exact_d2, moment_quadrature
from .sampling import Configuration, SeedSpec, fibonacci_s2, load_external, sample_density, sample_uniform

__all__ = [
    "__version__",
    "ConstantsTable",
    "Configuration",
    "DegenerateInputError",
    "DuplicatePointError",
    "EmpiricalDistribution",
    "Estimate",
    "ExperimentConfig",
    "Facet",
    "HoleSummary",
    "HullResult",
    "MomentPrediction",
    "SeedSpec",
    "SeparationSummary",
    "big_b",
    "bounds_experiment",
    "c_moment",
    "cap_area_euclid",
    "cap_area_geodesic",
    "cap_area_hypergeom",
    "circle_gaps",
    "constants_table",
    "convex_hull",
    "covering_trend",
    "e_moment",
    "facet_area",
    "fibonacci_s2",
    "gap_experiment",
    "hole_cdf",
    "hole_pdf",
    "hole_radii",
    "hull_volume_signed",
    "kappa",
    "load_external",
    "mean_cap_area_sum",
    "moment_asymptotic",
    "moment_exact_d2",
    "moment_quadrature",
    "moment_sum",
    "pairwise_angle_distribution",
    "run",
    "sample_density",
    "sample_uniform",
    "scaled_hole_radii_pool",
    "scaled_separation_cdf",
    "sep_c",
    "sep_limit_cdf",
    "sep_var_limit",
    "separation",
    "weighted_facet_stat",
]
