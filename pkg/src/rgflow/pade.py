"""Pade approximants of truncated power series.

The [N/M] approximant of ``1 + c1 x + ... + c_{N+M} x**{N+M}`` is the unique
rational function (a0 = b0 = 1 normalization) whose Taylor expansion matches
the series through order N+M.  Denominator coefficients come from the
Hankel-type linear system

    sum_{k=0..M} c_{n-k} b_k = 0,   n = N+1 .. N+M,

numerator coefficients from the forward convolution.  Closed forms are kept
for the [1/1] and [1/2] cases used by the three- and four-loop reductions.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularPade

#: condition-number bound beyond which the linear system counts as singular
KAPPA_MAX = 1e12
#: absolute re-expansion residual accepted from a constructed approximant
EPS_PADE = 1e-10


@dataclass(frozen=True)
class PadeApproximant:
    """[N/M] rational approximant with unit constant terms."""

    num_coeffs: tuple  # (1, a1, ..., aN)
    den_coeffs: tuple  # (1, b1, ..., bM)

    @property
    def order_n(self) -> int:
        return len(self.num_coeffs) - 1

    @property
    def order_m(self) -> int:
        return len(self.den_coeffs) - 1

    def __call__(self, x):
        num = 0.0
        for a in reversed(self.num_coeffs):
            num = num * x + a
        den = 0.0
        for b in reversed(self.den_coeffs):
            den = den * x + b
        return num / den

    def taylor(self, order: int) -> list:
        """Taylor coefficients of num/den through the given order."""
        num = list(self.num_coeffs) + [0.0] * (order + 1 - len(self.num_coeffs))
        den = list(self.den_coeffs) + [0.0] * (order + 1 - len(self.den_coeffs))
        out = []
        for j in range(order + 1):
            acc = num[j]
            for k in range(1, j + 1):
                acc -= den[k] * out[j - k]
            out.append(acc)
        return out


def _pade_closed_11(series) -> PadeApproximant:
    c1, c2 = series[1], series[2]
    if c2 == 0:
        # b1 = 0 solves the order-x^2 relation for any c1
        return PadeApproximant((1.0, c1), (1.0, 0.0))
    if c1 == 0:
        raise SingularPade("[1/1] closed form needs c1 != 0 when c2 != 0")
    return PadeApproximant((1.0, c1 - c2 / c1), (1.0, -c2 / c1))


def _pade_closed_12(series) -> PadeApproximant:
    # order-x^3 matching gives b1 (c2 - c1^2) = c1 c2 - c3; the denominator
    # vanishing means the [1/2] entry of the table does not exist
    c1, c2, c3 = series[1], series[2], series[3]
    denom = c2 - c1 * c1
    if denom == 0:
        raise SingularPade("[1/2] closed form needs c2 != c1**2")
    b1 = (c1 * c2 - c3) / denom
    b2 = -c2 - c1 * b1
    return PadeApproximant((1.0, c1 + b1), (1.0, b1, b2))


def _pade_solve(series, n: int, m: int) -> PadeApproximant:
    c = list(series)
    if m > 0:
        rows = []
        rhs = []
        for i in range(n + 1, n + m + 1):
            rows.append([c[i - k] if 0 <= i - k < len(c) else 0.0 for k in range(1, m + 1)])
            rhs.append(-c[i])
        mat = np.array(rows, dtype=float)
        vec = np.array(rhs, dtype=float)
        try:
            cond = np.linalg.cond(mat)
        except np.linalg.LinAlgError:  # pragma: no cover
            raise SingularPade("condition estimate failed")
        if not np.isfinite(cond) or cond > KAPPA_MAX:
            raise SingularPade(f"denominator system condition {cond:.3e} > {KAPPA_MAX:.0e}")
        b = np.linalg.solve(mat, vec)
        den = (1.0,) + tuple(float(x) for x in b)
    else:
        den = (1.0,)
    num = []
    for i in range(n + 1):
        acc = c[i]
        for k in range(1, min(i, m) + 1):
            acc += den[k] * c[i - k]
        num.append(float(acc))
    return PadeApproximant(tuple(num), den)


def pade(series, n: int, m: int, method: str = "auto") -> PadeApproximant:
    """Construct the [n/m] Pade approximant of a series with c0 = 1.

    Parameters
    ----------
    series : sequence of floats
        Taylor coefficients c0 .. c_{n+m} (at least); series[0] must be 1.
    n, m : int
        Numerator and denominator orders.
    method : {"auto", "solve", "closed"}
        "auto" uses the closed forms for [1/1] and [1/2], the linear solve
        otherwise; "closed" is only available for those two shapes.

    Raises
    ------
    SingularPade
        if the linear system is singular within the condition bound, or the
        constructed approximant fails to re-expand to the input series.
    """
    if n < 0 or m < 0:
        raise ValueError("orders must be non-negative")
    if len(series) < n + m + 1:
        raise ValueError(f"need {n + m + 1} series coefficients, got {len(series)}")
    if series[0] != 1:
        raise ValueError("series must be normalized with c0 = 1")

    if method == "closed" or (method == "auto" and (n, m) in ((1, 1), (1, 2))):
        if (n, m) == (1, 1):
            approx = _pade_closed_11(series)
        elif (n, m) == (1, 2):
            approx = _pade_closed_12(series)
        else:
            raise ValueError(f"no closed form for [{n}/{m}]")
    elif method in ("auto", "solve"):
        approx = _pade_solve(series, n, m)
    else:
        raise ValueError(f"unknown method {method!r}")

    back = approx.taylor(n + m)
    err = max(abs(back[j] - series[j]) for j in range(n + m + 1))
    if err > EPS_PADE * max(1.0, max(abs(s) for s in series[: n + m + 1])):
        raise SingularPade(f"re-expansion residual {err:.3e}; defective table")
    return approx


def pade_for_loop_order(beta) -> PadeApproximant:
    """The (nearly) diagonal approximant reducing a flow's series factor.

    For the degree-N polynomial ``1 + sum c_k x**k`` this is [n/n] when
    N = 2n and [m/m+1] when N = 2m+1 (N >= 2); the two-loop case N = 1 needs
    no reduction and is reported as the identity [1/0].
    """
    c = list(beta.c)
    big_n = len(c) - 1
    if big_n < 1:
        raise ValueError("need at least one coefficient beyond c0")
    if big_n == 1:
        return PadeApproximant((1.0, c[1]), (1.0,))
    if big_n % 2 == 0:
        half = big_n // 2
        return pade(c, half, half)
    half = big_n // 2
    return pade(c, half, half + 1)
