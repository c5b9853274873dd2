"""Real Lambert W on the branches W0 and W-1, and a bracketed root finder.

Both branches start from a series or asymptotic guess and are polished with
Halley's iteration on ``w*exp(w) - z``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable

from .errors import BracketError, DomainError

# 1/e split into a double and its rounding error, so z + 1/e keeps its digits
# next to the branch point.
_INV_E_HI = 0.36787944117144233
_INV_E_LO = -1.2428753672788363e-17
INV_E = _INV_E_HI

BRANCH_POINT_TOL = 1e-12
_MAX_ITER = 50


class Branch(enum.Enum):
    PRINCIPAL = "W0"
    MINUS_ONE = "W-1"


@dataclass(frozen=True)
class BranchValue:
    value: float
    branch: Branch
    residual: float

    def __float__(self) -> float:
        return self.value


def _offset_from_branch_point(z: float) -> float:
    """Return z + 1/e computed without cancellation."""
    return (z + _INV_E_HI) + _INV_E_LO


def _halley(w: float, z: float) -> float:
    for _ in range(_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - z
        if f == 0.0:
            break
        wp1 = w + 1.0
        denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
        if denom == 0.0:
            break
        dw = f / denom
        w -= dw
        if abs(dw) <= 4e-16 * abs(w) or (abs(dw) <= 1e-300):
            break
    return w


def _branch_series(p: float) -> float:
    # expansion around z = -1/e in p = +-sqrt(2(ez + 1))
    return -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p**3 - 43.0 / 540.0 * p**4


def _result(w: float, z: float, branch: Branch) -> BranchValue:
    return BranchValue(w, branch, abs(w * math.exp(w) - z))


def lambert_w0(z: float) -> BranchValue:
    """Principal branch of the Lambert W function for real ``z >= -1/e``.

    Returns a :class:`BranchValue` with ``value`` in [-1, 0) for z < 0 and
    ``value >= 0`` for z >= 0.

    Raises
    ------
    DomainError
        If ``z < -1/e``.
    """
    z = float(z)
    if math.isnan(z):
        raise DomainError("lambert_w0 of NaN")
    delta = _offset_from_branch_point(z)
    if abs(delta) < BRANCH_POINT_TOL:
        return _result(-1.0, z, Branch.PRINCIPAL)
    if delta < 0.0:
        raise DomainError(f"lambert_w0 undefined for z={z!r} < -1/e")
    if z == 0.0:
        return BranchValue(0.0, Branch.PRINCIPAL, 0.0)
    if math.isinf(z):
        return BranchValue(math.inf, Branch.PRINCIPAL, 0.0)

    if z < -0.25:
        w = _branch_series(math.sqrt(2.0 * math.e * delta))
    elif z < 0.25:
        w = z - z * z + 1.5 * z**3
    elif z < 3.0:
        w = math.log1p(z) * 0.75
    else:
        lz = math.log(z)
        w = lz - math.log(lz) + math.log(lz) / lz
    w = _halley(w, z)
    return _result(max(w, -1.0), z, Branch.PRINCIPAL)


def lambert_wm1(z: float) -> BranchValue:
    """Lower real branch W-1 for ``-1/e <= z < 0``; value is <= -1."""
    z = float(z)
    if math.isnan(z):
        raise DomainError("lambert_wm1 of NaN")
    delta = _offset_from_branch_point(z)
    if abs(delta) < BRANCH_POINT_TOL:
        return _result(-1.0, z, Branch.MINUS_ONE)
    if delta < 0.0 or z >= 0.0:
        raise DomainError(f"lambert_wm1 undefined for z={z!r} outside [-1/e, 0)")

    if z < -0.25:
        w = _branch_series(-math.sqrt(2.0 * math.e * delta))
    else:
        l1 = math.log(-z)
        l2 = math.log(-l1)
        w = l1 - l2 + l2 / l1
    w = _halley(w, z)
    return _result(min(w, -1.0), z, Branch.MINUS_ONE)


def find_root_bracketed(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
) -> float:
    """Bisection on [lo, hi]; returns the midpoint of a final bracket of width <= tol.

    Deterministic for a given ``f``. A zero at either endpoint is returned as is.
    """
    if lo > hi:
        lo, hi = hi, lo
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo > 0.0) == (fhi > 0.0):
        raise BracketError(
            f"no sign change on [{lo!r}, {hi!r}]: f(lo)={flo!r}, f(hi)={fhi!r}"
        )
    lo_positive = flo > 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == lo_positive:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)
