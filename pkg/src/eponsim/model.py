"""Three-state registration chain of a tagged ONU and its stationary solution.

States are sampled at the start of each discovery window: ``A`` registered
online, ``F`` powered off, ``R`` registering. All times are in seconds.
"""
from __future__ import annotations

import dataclasses
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, RegimeError
from .special import INV_E


class State(enum.IntEnum):
    A = 0
    F = 1
    R = 2


@dataclass(frozen=True)
class SystemParams:
    """EPON parameter set.

    Attributes
    ----------
    n_onus : int
        Number of ONUs sharing the discovery window.
    tau_a, tau_f : float
        Mean online and power-off holding times.
    cycle : float
        Registration cycle, the spacing between discovery-window starts.
    req_len : float
        Duration of a REQ message.
    max_wait : float
        Maximum waiting time; REQ offsets are uniform on [0, max_wait].
    one_trip : float
        Maximal one-way propagation time.
    """

    n_onus: int
    tau_a: float
    tau_f: float
    cycle: float
    req_len: float
    max_wait: float
    one_trip: float

    def __post_init__(self):
        if int(self.n_onus) != self.n_onus or self.n_onus < 1:
            raise ConfigError(f"n_onus must be a positive integer, got {self.n_onus!r}")
        for name in ("tau_a", "tau_f", "cycle", "req_len", "max_wait", "one_trip"):
            value = getattr(self, name)
            if not (value > 0) or math.isnan(value):
                raise ConfigError(f"{name} must be > 0, got {value!r}")
        if self.req_len >= self.max_wait:
            raise ConfigError("req_len must be smaller than max_wait")

    @property
    def slot(self) -> float:
        """Discovery slot D = max_wait + req_len."""
        return self.max_wait + self.req_len

    @property
    def window(self) -> float:
        """Discovery window M = 2*one_trip + D."""
        return 2.0 * self.one_trip + self.slot

    @property
    def load_scale(self) -> float:
        """Exponent scale 2*L*N/omega of the success probability."""
        return 2.0 * self.req_len * self.n_onus / self.max_wait

    def replace(self, **changes) -> "SystemParams":
        return dataclasses.replace(self, **changes)

    def with_wait(self, max_wait: float) -> "SystemParams":
        return dataclasses.replace(self, max_wait=max_wait)


@dataclass(frozen=True)
class TransitionMatrix:
    p: np.ndarray

    def __getitem__(self, key):
        return float(self.p[key])

    def row_sums(self) -> np.ndarray:
        return self.p.sum(axis=1)


@dataclass(frozen=True)
class StationaryDistribution:
    pi_a: float
    pi_f: float
    pi_r: float
    g: float
    p_suc: float
    lambda_out: float
    role: str = ""
    multiplicity: int = 1

    def as_vector(self) -> np.ndarray:
        return np.array([self.pi_a, self.pi_f, self.pi_r])


@dataclass(frozen=True)
class RegimeDiagnostics:
    h: float
    cycle_limit: float
    cycle_within_limit: bool
    cycle_at_limit: bool
    alpha_in_domain: bool
    h_below_sixteenth: bool
    t_over_tau_a: float
    t_over_tau_f: float
    holding_times_dominate: bool


def _one_minus_exp(x: float) -> float:
    return -math.expm1(-x)


# below this relative gap the closed form loses more digits than the limit
_EQUAL_TAU_RTOL = 1e-7


def p_rer(params: SystemParams) -> float:
    """Pr{t_A + t_F < T | t_A < T} for exponential holding times.

    The tau_a == tau_f singularity is removable; the limit
    ``[1 - (1 + T/tau) exp(-T/tau)] / (1 - exp(-T/tau))`` is used when the
    two means are within a relative 1e-7.
    """
    ta, tf, T = params.tau_a, params.tau_f, params.cycle
    qa = _one_minus_exp(T / ta)
    if qa == 0.0:
        return 0.0
    if abs(ta - tf) < _EQUAL_TAU_RTOL * max(ta, tf):
        tau = 0.5 * (ta + tf)
        x = T / tau
        # 1 - (1+x)e^{-x}, written to avoid cancellation for small x
        num = -math.expm1(-x) - x * math.exp(-x)
        value = num / _one_minus_exp(x)
    else:
        qf = _one_minus_exp(T / tf)
        value = (tf * qf - ta * qa) / ((tf - ta) * qa)
    return min(max(value, 0.0), 1.0)


def attempt_probability_exact(params: SystemParams) -> float:
    """Attempt probability h from the exact balance reduction of the chain."""
    ta, tf, T = params.tau_a, params.tau_f, params.cycle
    qa = _one_minus_exp(T / ta)
    qf = _one_minus_exp(T / tf)
    denom = _one_minus_exp(T / ta + T / tf) - p_rer(params) * qa
    return qa * qf / denom


def attempt_probability_approx(params: SystemParams) -> float:
    return params.cycle / (params.tau_a + params.tau_f)


def attempt_probability(params: SystemParams, exact: bool = True) -> float:
    if exact:
        return attempt_probability_exact(params)
    return attempt_probability_approx(params)


def success_probability(pi_r, params: SystemParams):
    """Large-N success probability exp(-(2L/omega) * N * pi_r)."""
    return np.exp(-params.load_scale * np.asarray(pi_r, dtype=float))[()]


def success_probability_finite(pi_r, params: SystemParams):
    """Finite-N form (1 - 2L*pi_r/omega)^(N-1)."""
    q = 1.0 - 2.0 * params.req_len * np.asarray(pi_r, dtype=float) / params.max_wait
    return (q ** (params.n_onus - 1))[()]


def transition_matrix(params: SystemParams, p_suc: float) -> TransitionMatrix:
    if not 0.0 <= p_suc <= 1.0:
        raise ValueError(f"p_suc must lie in [0, 1], got {p_suc!r}")
    T = params.cycle
    stay_a = math.exp(-T / params.tau_a)
    leave_a = _one_minus_exp(T / params.tau_a)
    stay_f = math.exp(-T / params.tau_f)
    rer = p_rer(params)

    p = np.zeros((3, 3))
    p[State.A, State.A] = stay_a
    p[State.A, State.F] = leave_a * (1.0 - rer)
    p[State.A, State.R] = leave_a * rer
    p[State.F, State.F] = stay_f
    p[State.F, State.R] = _one_minus_exp(T / params.tau_f)
    p[State.R, State.A] = p_suc * stay_a
    p[State.R, State.F] = p_suc * leave_a * (1.0 - rer)
    p[State.R, State.R] = 1.0 - p_suc + p_suc * leave_a * rer
    return TransitionMatrix(p)


def characteristic_residual(x, params: SystemParams, h: float):
    """F(x) = (1 - x) h - x exp(-(2LN/omega) x); zero at stationary pi_R.

    Accepts scalars or arrays.
    """
    x = np.asarray(x, dtype=float)
    return ((1.0 - x) * h - x * np.exp(-params.load_scale * x))[()]


def check_alpha(h: float) -> float:
    """Return alpha = -e*h, raising RegimeError when it leaves the W domain."""
    alpha = -math.e * h
    if alpha < -INV_E and not math.isclose(alpha, -INV_E, rel_tol=1e-12):
        raise RegimeError(
            f"attempt probability h={h:.6g} exceeds e^-2: alpha=-e*h={alpha:.6g} < -1/e; "
            "the cycle T is too large relative to tau_a + tau_f (T <= (tau_a+tau_f)/e^2 violated)"
        )
    return alpha


def stationary_from_root(
    pi_r: float, params: SystemParams, role: str = "", multiplicity: int = 1
) -> StationaryDistribution:
    """Expand a characteristic root to the full (pi_A, pi_F, pi_R) vector."""
    p_suc = float(success_probability(pi_r, params))
    stay_a = math.exp(-params.cycle / params.tau_a)
    pi_a = pi_r * p_suc * stay_a / _one_minus_exp(params.cycle / params.tau_a)
    pi_f = 1.0 - pi_a - pi_r
    n = params.n_onus
    return StationaryDistribution(
        pi_a=pi_a,
        pi_f=pi_f,
        pi_r=pi_r,
        g=n * pi_r,
        p_suc=p_suc,
        lambda_out=n * pi_r * p_suc,
        role=role,
        multiplicity=multiplicity,
    )


def solve_stationary(params: SystemParams, h: float | None = None) -> list[StationaryDistribution]:
    """All stationary points of the chain, ascending in pi_R.

    ``h`` defaults to the exact attempt probability.
    """
    # stability builds on this module; imported here to keep the dependency one-way
    from .stability import characteristic_roots

    if h is None:
        h = attempt_probability_exact(params)
    return [
        stationary_from_root(r.pi_r, params, r.role, r.multiplicity)
        for r in characteristic_roots(params, h)
    ]


def two_state_transition(params: SystemParams, dist: StationaryDistribution) -> float:
    """P_{0,1}: probability that a non-registering ONU registers next window."""
    tm = transition_matrix(params, dist.p_suc)
    idle = dist.pi_a + dist.pi_f
    return (tm[State.A, State.R] * dist.pi_a + tm[State.F, State.R] * dist.pi_f) / idle


def check_regime(params: SystemParams, h: float | None = None) -> RegimeDiagnostics:
    if h is None:
        h = attempt_probability_exact(params)
    limit = (params.tau_a + params.tau_f) / math.e**2
    at_limit = math.isclose(params.cycle, limit, rel_tol=1e-12)
    ta_ratio = params.cycle / params.tau_a
    tf_ratio = params.cycle / params.tau_f
    return RegimeDiagnostics(
        h=h,
        cycle_limit=limit,
        cycle_within_limit=params.cycle <= limit or at_limit,
        cycle_at_limit=at_limit,
        alpha_in_domain=-math.e * h >= -INV_E,
        h_below_sixteenth=h < 1.0 / 16.0,
        t_over_tau_a=ta_ratio,
        t_over_tau_f=tf_ratio,
        holding_times_dominate=max(ta_ratio, tf_ratio) < 0.1,
    )
