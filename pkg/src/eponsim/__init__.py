"""Stability, delay and Monte Carlo analysis of EPON ONU registration."""
from .errors import (
    BracketError,
    ConfigError,
    DegenerateError,
    DiscriminantError,
    DomainError,
    EponError,
    InsufficientDataError,
    RegimeError,
    RegionError,
)
from .model import (
    State,
    StationaryDistribution,
    SystemParams,
    TransitionMatrix,
    attempt_probability,
    p_rer,
    solve_stationary,
    success_probability,
    transition_matrix,
)
from .stability import Region, StabilityReport, classify, critical_omegas
from .delay import DelayEstimate, delay_bound, mean_delay
from .simulator import SimConfig, SimTrace, run, run_replications

__version__ = "0.1.0"

__all__ = [
    "BracketError",
    "ConfigError",
    "DegenerateError",
    "DiscriminantError",
    "DomainError",
    "EponError",
    "InsufficientDataError",
    "RegimeError",
    "RegionError",
    "State",
    "StationaryDistribution",
    "SystemParams",
    "TransitionMatrix",
    "attempt_probability",
    "p_rer",
    "solve_stationary",
    "success_probability",
    "transition_matrix",
    "Region",
    "StabilityReport",
    "classify",
    "critical_omegas",
    "DelayEstimate",
    "delay_bound",
    "mean_delay",
    "SimConfig",
    "SimTrace",
    "run",
    "run_replications",
]
