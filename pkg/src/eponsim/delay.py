"""Mean registration delay and registration efficiency.

A registering ONU waits a residual d_r from turn-on to the next window, then
spends k >= 1 windows contending, so d = d_r + M + (k-1)T with k geometric in
the per-window success probability.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import RegionError
from .model import StationaryDistribution, SystemParams, attempt_probability

UNBOUNDED_ATTEMPTS = 1e6


@dataclass(frozen=True)
class DelayEstimate:
    mean_residual: float
    mean_attempts: float
    mean_attempting: float
    mean_attempting_approx: float
    mean_total: float
    mean_total_approx: float
    bound: float
    efficiency: float
    ideal: float
    unbounded: bool


def mean_residual_delay(params: SystemParams) -> float:
    return 0.5 * params.cycle


def delay_bound(params: SystemParams) -> float:
    """Universal upper bound (e^2 - 1/2) T on the stable-region mean delay."""
    return (math.e**2 - 0.5) * params.cycle


def efficiency(params: SystemParams, dist: StationaryDistribution, h: float | None = None) -> float:
    """Successful registrations per second of discovery window, N h (1 - pi_R) / M."""
    if h is None:
        h = attempt_probability(params)
    return params.n_onus * h * (1.0 - dist.pi_r) / params.window


def mean_delay(
    params: SystemParams, dist: StationaryDistribution, h: float | None = None
) -> DelayEstimate:
    """Delay components at one stationary point.

    ``mean_total`` keeps the discovery-window length M in the attempting
    delay; ``mean_total_approx`` drops it, as in the closed form
    ``[pi_R / ((1 - pi_R) h) - 1/2] T``.
    """
    if dist.role == "u":
        raise RegionError("the middle (unstable) root has no meaningful delay")
    if h is None:
        h = attempt_probability(params)
    T = params.cycle
    attempts = 1.0 / dist.p_suc if dist.p_suc > 0.0 else math.inf
    residual = mean_residual_delay(params)
    attempting = params.window + (attempts - 1.0) * T
    attempting_approx = (attempts - 1.0) * T
    return DelayEstimate(
        mean_residual=residual,
        mean_attempts=attempts,
        mean_attempting=attempting,
        mean_attempting_approx=attempting_approx,
        mean_total=residual + attempting,
        mean_total_approx=residual + attempting_approx,
        bound=delay_bound(params),
        efficiency=efficiency(params, dist, h),
        ideal=0.5 * T,
        unbounded=attempts > UNBOUNDED_ATTEMPTS,
    )
