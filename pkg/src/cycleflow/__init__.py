"""Numerical laboratory for a planar descent-ascent flow: its limit cycle,
a Lyapunov-style stability certificate, and interacting-particle runs of
the associated stochastic mean-field dynamics."""

__version__ = "0.1.0"

from .dynamics import (
    ANNULUS,
    Annulus,
    Params,
    Point2,
    angular_velocity,
    divergence,
    jacobian,
    payoff,
    radial_derivative,
    vector_field,
)
from .flow import (
    BlowupError,
    CycleConvergenceError,
    LimitCycle,
    Trajectory,
    WindingAliasingError,
    default_dt,
    find_limit_cycle,
    integrate,
    time_average,
    winding_number,
)
from .geometry import CycleGeometry, ProjectionNeighborhoodWarning, distance_to_cycle, track_cycle
from .lyapunov import CertReport, certify_annulus, decay_check, quadratic_form, remainder
from .particles import (
    Classification,
    ConfigError,
    Ensemble,
    InitSpec,
    MomentSeries,
    NoiseStream,
    SimConfig,
    SimulationBlowupError,
    classify,
    em_step,
    init_ensemble,
    moments,
    simulate,
)

__all__ = [
    "ANNULUS",
    "Annulus",
    "BlowupError",
    "CertReport",
    "Classification",
    "ConfigError",
    "CycleConvergenceError",
    "CycleGeometry",
    "Ensemble",
    "InitSpec",
    "LimitCycle",
    "MomentSeries",
    "NoiseStream",
    "Params",
    "Point2",
    "ProjectionNeighborhoodWarning",
    "SimConfig",
    "SimulationBlowupError",
    "Trajectory",
    "WindingAliasingError",
    "angular_velocity",
    "certify_annulus",
    "classify",
    "decay_check",
    "default_dt",
    "distance_to_cycle",
    "divergence",
    "em_step",
    "find_limit_cycle",
    "init_ensemble",
    "integrate",
    "jacobian",
    "moments",
    "payoff",
    "quadratic_form",
    "radial_derivative",
    "remainder",
    "simulate",
    "time_average",
    "track_cycle",
    "vector_field",
    "winding_number",
]
