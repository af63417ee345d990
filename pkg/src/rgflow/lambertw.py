"""Real branches of the Lambert W function and its origin series.

W solves ``W(z) exp(W(z)) = z``.  The principal branch covers W >= -1 on
z in [-1/e, inf); the minus-one branch covers W <= -1 on z in [-1/e, 0).
Evaluation follows the usual recipe: a regime-dependent starting guess
(origin series, log-log asymptotics, or the square-root expansion at the
branch point) refined by Halley iteration; see Corless, Gonnet, Hare,
Jeffrey & Knuth, Adv. Comput. Math. 5 (1996) 329.
"""

from __future__ import annotations

import enum
import math
from fractions import Fraction

from .errors import DomainError

#: branch point location, -1/e
BRANCH_POINT = -math.exp(-1.0)

_HALLEY_MAX_ITER = 50
#: inside this distance of the branch point the sqrt expansion is returned
#: (Halley flattens out there while the expansion error is ~p**5)
_BRANCH_POINT_PAD = 1e-8


class BranchId(enum.Enum):
    principal = 0
    minus_one = -1


PRINCIPAL = BranchId.principal
MINUS_ONE = BranchId.minus_one


def w_series_coefficient(n: int) -> float:
    """Coefficient of z**n in the origin series W(z) = -sum (-n z)**n / (n! n).

    Computed in exact integer arithmetic, so the value is -(-n)**n / (n! n)
    to the nearest double.

    Raises
    ------
    OverflowError
        for n > 170, past double-precision factorial representability.
    """
    if n < 1:
        raise ValueError("series index must be >= 1")
    if n > 170:
        raise OverflowError("factorial beyond double precision for n > 170")
    return float(Fraction(-((-n) ** n), math.factorial(n) * n))


def w_series_sum(z: float, terms: int = 30) -> float:
    """Partial sum of the origin series with the given number of terms."""
    return sum(w_series_coefficient(n) * z**n for n in range(1, terms + 1))


def _branch_point_expansion(z: float, branch: BranchId) -> float:
    # series in p = +/- sqrt(2(e z + 1)) around W = -1
    p2 = 2.0 * (math.e * z + 1.0)
    p = math.sqrt(p2) if p2 > 0 else 0.0
    if branch is MINUS_ONE:
        p = -p
    return -1.0 + p - p2 / 3.0 + 11.0 * p * p2 / 72.0 - 43.0 * p2 * p2 / 540.0


def _initial_guess(z: float, branch: BranchId) -> float:
    if branch is PRINCIPAL:
        if z < -0.25:
            return _branch_point_expansion(z, branch)
        if z < 3.0:
            return math.log1p(z)
        lz = math.log(z)
        llz = math.log(lz)
        return lz - llz + llz / lz
    # minus-one branch, z in [-1/e, 0)
    if z < -0.25:
        return _branch_point_expansion(z, branch)
    lz = math.log(-z)
    llz = math.log(-lz)
    return lz - llz + llz / lz


def lambert_w(z: float, branch: BranchId = PRINCIPAL) -> float:
    """Evaluate W(z) on a real branch to near machine precision.

    Parameters
    ----------
    z : float
        Argument; must lie in [-1/e, inf) for the principal branch and in
        [-1/e, 0) for the minus-one branch.
    branch : BranchId
        Which real branch to evaluate.

    Raises
    ------
    DomainError
        outside the branch domain, which in flow terms means the scale has
        crossed to the non-perturbative side of the branch point.
    """
    if math.isnan(z):
        raise DomainError("W argument is NaN")
    if z < BRANCH_POINT:
        if z > BRANCH_POINT * (1.0 + 1e-15):
            z = BRANCH_POINT
        else:
            raise DomainError(f"z={z!r} below the branch point -1/e")
    if branch is MINUS_ONE and z >= 0:
        raise DomainError("minus-one branch needs z < 0")

    if z - BRANCH_POINT < _BRANCH_POINT_PAD:
        # Halley degenerates where W' blows up; the expansion is accurate here
        return _branch_point_expansion(z, branch)
    if branch is PRINCIPAL and z == 0.0:
        return 0.0

    w = _initial_guess(z, branch)
    for _ in range(_HALLEY_MAX_ITER):
        ew = math.exp(w)
        f = w * ew - z
        if f == 0.0:
            break
        w1 = w + 1.0
        denom = ew * w1 - (w + 2.0) * f / (2.0 * w1)
        if denom == 0.0:
            denom = ew * w1 if w1 != 0.0 else ew
        dw = f / denom
        w -= dw
        if abs(dw) <= 0.7e-16 * (2.0 + abs(w)):
            break
    # clamp tiny overshoot across the branch boundary at W = -1
    if branch is PRINCIPAL and -1.0 - 1e-12 < w < -1.0:
        w = -1.0
    if branch is MINUS_ONE and -1.0 < w < -1.0 + 1e-12:
        w = -1.0
    return w


def residual(w: float, z: float) -> float:
    """Defining-identity residual |w e**w - z|."""
    return abs(w * math.exp(w) - z)
