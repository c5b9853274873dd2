"""Critical waiting times, region classification and root structure.

The characteristic residual ``f(x) = (1-x)h - x exp(-kx)`` with
``k = 2LN/omega`` has critical points ``x0 <= x1`` given by the two real
Lambert branches at ``alpha = -e*h``. It decreases on [0, x0], increases on
[x0, x1] and decreases again beyond x1, so its roots are found by bisection
on those three monotone pieces.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

from .errors import DiscriminantError, RegionError
from .model import (
    SystemParams,
    attempt_probability,
    characteristic_residual,
    check_alpha,
)
from .special import find_root_bracketed, lambert_w0, lambert_wm1

BOUNDARY_RTOL = 1e-12


class Region(str, enum.Enum):
    SATURATED = "saturated"
    BOUNDARY_SATURATED = "boundary_saturated"
    UNPREDICTABLE = "unpredictable"
    BOUNDARY_STABLE = "boundary_stable"
    STABLE = "stable"


@dataclass(frozen=True)
class Root:
    pi_r: float
    role: str  # "d", "u" or "s"
    multiplicity: int = 1


@dataclass(frozen=True)
class StabilityReport:
    omega: float
    h: float
    alpha: float
    omega0: float
    omega_m1: float
    region: Region
    strictly_stable: bool
    roots: list[Root]
    x0: float
    x1: float
    f_x0: float
    f_x1: float
    pi_r_lower: float
    pi_r_upper: float
    strict_threshold: float = field(default=float("nan"))


def _branches(h: float) -> tuple[float, float]:
    alpha = check_alpha(h)
    return lambert_w0(alpha).value, lambert_wm1(alpha).value


def _omega_of_branch(w: float, params: SystemParams) -> float:
    return -2.0 * params.req_len * params.n_onus * w / (1.0 - w) ** 2


def critical_omegas(params: SystemParams, h: float) -> tuple[float, float]:
    """(omega0, omega_m1): the root count changes at these maximum waiting times."""
    w0, wm1 = _branches(h)
    return _omega_of_branch(w0, params), _omega_of_branch(wm1, params)


def critical_points(params: SystemParams, h: float) -> tuple[float, float, float, float]:
    """Local minimum x0, local maximum x1 and the residual at each.

    Extreme values use the closed forms h(1 - omega/omega0) and
    h(1 - omega/omega_m1).
    """
    w0, wm1 = _branches(h)
    scale = params.max_wait / (2.0 * params.req_len * params.n_onus)
    x0 = scale * (1.0 - w0)
    x1 = scale * (1.0 - wm1)
    om0 = _omega_of_branch(w0, params)
    om1 = _omega_of_branch(wm1, params)
    return x0, x1, h * (1.0 - params.max_wait / om0), h * (1.0 - params.max_wait / om1)


def region_of(omega: float, omega0: float, omega_m1: float) -> Region:
    if math.isclose(omega, omega_m1, rel_tol=BOUNDARY_RTOL):
        return Region.BOUNDARY_STABLE
    if math.isclose(omega, omega0, rel_tol=BOUNDARY_RTOL):
        return Region.BOUNDARY_SATURATED
    if omega < omega0:
        return Region.SATURATED
    if omega > omega_m1:
        return Region.STABLE
    return Region.UNPREDICTABLE


def _root_on(f, lo: float, hi: float, fallback: float) -> float:
    """Bisect one monotone piece; if rounding hides the sign change, the
    piece's extremum is the (tangent) root."""
    lo, hi = max(lo, 0.0), min(hi, 1.0)
    if hi <= lo:
        return fallback
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        return fallback
    return find_root_bracketed(f, lo, hi)


def characteristic_roots(params: SystemParams, h: float) -> list[Root]:
    """All real roots of the characteristic equation, ascending.

    Raises RegimeError if alpha = -e*h < -1/e.
    """
    om0, om1 = critical_omegas(params, h)
    x0, x1, _, _ = critical_points(params, h)
    region = region_of(params.max_wait, om0, om1)

    def f(x: float) -> float:
        return float(characteristic_residual(x, params, h))

    x0c, x1c = min(x0, 1.0), min(x1, 1.0)
    if region is Region.SATURATED:
        return [Root(_root_on(f, x1c, 1.0, x1c), "s")]
    if region is Region.STABLE:
        return [Root(_root_on(f, 0.0, x0c, x0c), "d")]
    if region is Region.BOUNDARY_SATURATED:
        return [Root(x0, "d", 2), Root(_root_on(f, x1c, 1.0, x1c), "s")]
    if region is Region.BOUNDARY_STABLE:
        return [Root(_root_on(f, 0.0, x0c, x0c), "d"), Root(x1, "s", 2)]
    return [
        Root(_root_on(f, 0.0, x0c, x0c), "d"),
        Root(_root_on(f, x0c, x1c, x0c), "u"),
        Root(_root_on(f, x1c, 1.0, x1c), "s"),
    ]


def strict_stability_threshold(params: SystemParams, h: float) -> float:
    """8LNh/(1+h)^2, the smallest omega for which the quadratic approximation is real."""
    return 8.0 * params.req_len * params.n_onus * h / (1.0 + h) ** 2


def strict_stability_necessary(h: float) -> bool:
    """Necessary condition for strict stability: h < 1/16."""
    return h < 1.0 / 16.0


def strict_stability_sharp(h: float) -> bool:
    """Sharper test h < -W_{-1}(alpha) / (4 [1 - W_{-1}(alpha)]^2)."""
    if -math.e * h < -0.36787944117144233:
        return False
    wm1 = lambert_wm1(-math.e * h).value
    return h < -wm1 / (4.0 * (1.0 - wm1) ** 2)


def _bounds(h: float) -> tuple[float, float]:
    w0 = lambert_w0(check_alpha(h)).value
    return h / (1.0 + h), -w0 / (1.0 - w0)


def pi_r_bounds(params: SystemParams, h: float) -> tuple[float, float]:
    """Lower h/(1+h) and upper -W0(alpha)/(1-W0(alpha)) on the stable root."""
    om0, om1 = critical_omegas(params, h)
    if region_of(params.max_wait, om0, om1) is not Region.STABLE:
        raise RegionError(
            f"pi_r bounds hold only for omega > omega_m1={om1:.6g}s (omega={params.max_wait:.6g}s)"
        )
    return _bounds(h)


def pi_r_quadratic_approx(params: SystemParams, h: float) -> float:
    omega = params.max_wait
    ln = params.req_len * params.n_onus
    disc = 1.0 - 8.0 * ln * h / ((1.0 + h) ** 2 * omega)
    if disc < 0.0:
        if disc > -1e-12:
            disc = 0.0
        else:
            raise DiscriminantError(
                f"omega={omega:.6g}s below 8LNh/(1+h)^2={strict_stability_threshold(params, h):.6g}s"
            )
    # 1 - sqrt(disc) rewritten as (1 - disc) / (1 + sqrt(disc)) to keep digits for large omega
    one_minus_sqrt = (1.0 - disc) / (1.0 + math.sqrt(disc))
    return one_minus_sqrt * (1.0 + h) * omega / (4.0 * ln)


def classify(params: SystemParams, h: float | None = None, exact: bool = True) -> StabilityReport:
    if h is None:
        h = attempt_probability(params, exact=exact)
    alpha = check_alpha(h)
    om0, om1 = critical_omegas(params, h)
    x0, x1, f0, f1 = critical_points(params, h)
    region = region_of(params.max_wait, om0, om1)
    threshold = strict_stability_threshold(params, h)
    lower, upper = _bounds(h)
    return StabilityReport(
        omega=params.max_wait,
        h=h,
        alpha=alpha,
        omega0=om0,
        omega_m1=om1,
        region=region,
        strictly_stable=region is Region.STABLE and om1 > threshold,
        roots=characteristic_roots(params, h),
        x0=x0,
        x1=x1,
        f_x0=f0,
        f_x1=f1,
        pi_r_lower=lower,
        pi_r_upper=upper,
        strict_threshold=threshold,
    )


def omega_m1_for_h(h: float, req_len: float, n_onus: int) -> float:
    """omega_{-1} as a function of a free attempt probability."""
    wm1 = lambert_wm1(check_alpha(h)).value
    return -2.0 * req_len * n_onus * wm1 / (1.0 - wm1) ** 2


def derive_req_len(params: SystemParams, omega_m1: float, h: float | None = None) -> float:
    """REQ length L that places omega_{-1} at the requested value.

    omega_{-1} is linear in L, so this is closed form.
    """
    if h is None:
        h = attempt_probability(params)
    return omega_m1 / omega_m1_for_h(h, 1.0, params.n_onus)
