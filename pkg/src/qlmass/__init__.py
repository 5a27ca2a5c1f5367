"""Quasi-local masses, horizons and horizon-existence criteria on spherically
symmetric, conformally flat, asymptotically flat 3-manifolds."""

__version__ = "0.1.0"

from .criteria import CriteriaReport, evaluate_criteria, minkowski_bound_check, round_sphere_criterion
from .errors import (
    BoundaryNotMeanConvex,
    ConfigError,
    FlowObstruction,
    InvalidParams,
    NoHorizon,
    NonMonotoneBridge,
    NotAsymptoticallyFlat,
    OutOfDomain,
    ParseError,
    QLMassError,
    ValidationError,
)
from .horizons import HorizonRecord, find_horizons, outer_minimizing_check, penrose_check
from .imcf_hulls import (
    AlphaParams,
    ImcfTrace,
    alpha_coefficient,
    geroch_report,
    imcf_trace,
    m_omega,
    m_region,
    radial_hull_check,
)
from .profiles import G1Params, G2Params, build_flat, build_g1, build_g2, build_schwarzschild, smooth_monotone_bridge
from .quasimass import MassSummary, adm_mass, brown_york_radial, hawking_mass, torus_hawking_mass
from .radial_metric import (
    RadialMetric,
    RadialProfile,
    SphereReport,
    eval_profile,
    radial_distance,
    scalar_curvature,
    sectional_bounds,
    sphere_geometry,
)
