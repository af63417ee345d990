"""Running-coupling solvers for the flow dx/dt = -beta0 x**2 sum c_n x**n.

Every loop order reduces, after a (nearly) diagonal Pade approximation of
the series factor, to a logarithmic representation

    u  =  F(y)  =  y + sum_k w_k ln(y + r_k),        y = 1/x,

with u = beta0 ln(mu**2 / Lambda**2).  Orders one to three invert F through
the Lambert W function; order four and beyond go through the offset-Lambert
and multinomial power series of :mod:`rgflow.inversion`, with a safeguarded
root-solve fallback when the series leaves its convergence region.

The Lambda convention is operational: ``lambda_from_reference`` fixes
Lambda so the chosen order's solution passes through a reference point
(mu0**2, x0); no constants are hidden inside Lambda beyond that fit.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

from . import oracle
from .errors import (
    DomainError,
    FallbackWarning,
    LandauPole,
    NegativeBase,
    NoConvergence,
    NoSolution,
    RepeatedRoots,
    RgflowError,
)
from .inversion import (
    K_MAX_DEFAULT,
    TAU_TERM,
    GeneralizedLambertEquation,
    four_loop_series,
    generic_series,
)
from .lambertw import MINUS_ONE, PRINCIPAL, BranchId, lambert_w
from .pade import pade, pade_for_loop_order
from .polyalg import PartialFractionForm, Polynomial, RationalFunction, antiderivative_logform

#: log-magnitude beyond which W arguments are handled in log space
_LOG_GUARD = 500.0
#: relative mismatch accepted when verifying a reference-point fit
_FIT_TOL = 1e-9

METHOD_ONE = "oneLoop"
METHOD_TWO = "twoLoopW"
METHOD_THREE = "threeLoopW"
METHOD_FOUR = "fourLoopSeries"
METHOD_GENERIC = "genericSeries"
METHOD_ODE = "odeOracle"
METHOD_ROOT = "rootOracle"

CLOSED_FORM_METHODS = (METHOD_ONE, METHOD_TWO, METHOD_THREE, METHOD_FOUR,
                       METHOD_GENERIC)


def iterative_method(order: int) -> str:
    return f"iterative({order})"


@dataclass(frozen=True)
class BetaFunction:
    """Flow model: beta0 and the series coefficients c = (1, c1, ..., cN).

    The convention is dx/dt = -beta0 x**2 sum_n c_n x**n with t = ln mu**2;
    theories written with the opposite overall sign flip beta0.
    """

    beta0: float
    c: tuple

    def __post_init__(self):
        object.__setattr__(self, "c", tuple(float(v) for v in self.c))
        if not self.c or self.c[0] != 1.0:
            raise ValueError("coefficient list must start with c0 = 1")
        if self.beta0 == 0:
            raise ValueError("beta0 must be nonzero")

    @property
    def loops(self) -> int:
        """(N+1)-loop order: c0..cN present means len(c) loops."""
        return len(self.c)

    def coefficient(self, n: int) -> float:
        return self.c[n] if n < len(self.c) else 0.0

    def truncated(self, loop_order: int) -> "BetaFunction":
        if loop_order < 1:
            raise ValueError("loop order must be >= 1")
        return BetaFunction(self.beta0, self.c[:loop_order])

    def series_factor(self, x: float) -> float:
        acc = 0.0
        for cn in reversed(self.c):
            acc = acc * x + cn
        return acc


@dataclass(frozen=True)
class PadeReducedBeta:
    """Flow model whose series factor is a Pade-reduced rational function."""

    beta0: float
    approximant: object  # PadeApproximant

    def series_factor(self, x: float) -> float:
        return self.approximant(x)


@dataclass(frozen=True)
class ScaleSpec:
    """Scales of a flow query: Lambda**2, mu**2 and u = beta0 ln(mu2/L2)."""

    lambda_sq: float
    mu_sq: float
    u: float
    omega: float | None = None

    @classmethod
    def make(cls, beta: BetaFunction, lambda_sq: float, mu_sq: float) -> "ScaleSpec":
        if lambda_sq <= 0 or mu_sq <= 0:
            raise ValueError("scales must be positive")
        u = beta.beta0 * math.log(mu_sq / lambda_sq)
        return cls(lambda_sq, mu_sq, u)

    @classmethod
    def from_u(cls, beta: BetaFunction, u: float, lambda_sq: float = 1.0) -> "ScaleSpec":
        """ScaleSpec at the mu**2 realizing the given u (must fit in a float)."""
        arg = u / beta.beta0 + math.log(lambda_sq)
        if arg > 709.0:
            raise OverflowError(f"mu**2 = exp({arg:.3g}) not representable")
        return cls(lambda_sq, lambda_sq * math.exp(u / beta.beta0), u)

    def with_omega(self, omega: float) -> "ScaleSpec":
        return ScaleSpec(self.lambda_sq, self.mu_sq, self.u, omega)


@dataclass(frozen=True)
class Diagnostics:
    kmax: int | None = None
    residual: float | None = None
    branch: str | None = None
    warnings: tuple = ()


@dataclass(frozen=True)
class RunResult:
    mu_sq: float
    method: str
    x: float
    diagnostics: Diagnostics = field(default_factory=Diagnostics)


# ---------------------------------------------------------------------------
# log-form construction


def _pad(coeffs, length):
    return list(coeffs) + [0.0] * (length - len(coeffs))


def _y_integrand(approx):
    """Rewrite a Pade-reduced series factor as a rational integrand in y=1/x.

    Returns (num_y, den_y, pole_at_zero_order) with
    integrand = num_y / (y**j * den_y); the x-space denominator lands in the
    y-space numerator and vice versa.
    """
    n, m = approx.order_n, approx.order_m
    big = max(n, m)
    num_y = Polynomial(tuple(reversed(_pad(approx.den_coeffs, big + 1))))
    if m > n:
        den_y = Polynomial(tuple(reversed(_pad(approx.num_coeffs, n + 1))))
        j = m - n
    else:
        den_y = Polynomial(tuple(reversed(_pad(approx.num_coeffs, big + 1))))
        j = 0
    return num_y, den_y, j


def flow_logform(beta: BetaFunction, loop_order: int | None = None) -> PartialFractionForm:
    """Log-form antiderivative F with F(1/x) = u for the given loop order.

    Order one is F(y) = y; higher orders Pade-reduce the series factor and
    integrate the resulting rational function of the inverse coupling.
    """
    order = beta.loops if loop_order is None else int(loop_order)
    if order < 1:
        raise ValueError("loop order must be >= 1")
    if order == 1:
        return PartialFractionForm(Polynomial((1.0,)), (), ())
    approx = pade_for_loop_order(beta.truncated(order))
    num_y, den_y, j = _y_integrand(approx)
    return antiderivative_logform(RationalFunction(num_y, den_y), j)


# ---------------------------------------------------------------------------
# guarded Lambert evaluation and branch selection


def _w_of_sign_log(sign: float, log_abs: float, branch: BranchId) -> float:
    """W(sign * exp(log_abs)) robust to argument under/overflow."""
    if abs(log_abs) <= _LOG_GUARD:
        return lambert_w(sign * math.exp(log_abs), branch)
    if log_abs > _LOG_GUARD:
        if sign < 0:
            raise DomainError("huge negative W argument: below the branch point")
        if branch is MINUS_ONE:
            raise DomainError("minus-one branch needs z < 0")
        w = log_abs - math.log(log_abs)
        for _ in range(100):
            step = log_abs - math.log(w)
            if abs(step - w) <= 1e-16 * abs(step):
                return step
            w = step
        return w
    # tiny |z|
    if branch is PRINCIPAL:
        return sign * math.exp(log_abs)  # W0(z) ~ z; underflow to +-0 is fine
    if sign >= 0:
        raise DomainError("minus-one branch needs z < 0")
    w = log_abs - math.log(-log_abs)
    for _ in range(100):
        step = log_abs - math.log(-w)
        if abs(step - w) <= 1e-16 * abs(step):
            return step
        w = step
    return w


def _two_loop_core(beta: BetaFunction, u: float, branch: BranchId) -> float:
    c1 = beta.coefficient(1)
    if c1 == 0.0:
        if u <= 0:
            raise LandauPole("u <= 0 at one-loop reduction")
        return 1.0 / u
    # W argument -Omega with Omega = exp(-u/c1 - 1)/c1
    sign = -1.0 if c1 > 0 else 1.0
    log_abs = -u / c1 - 1.0 - math.log(abs(c1))
    w = _w_of_sign_log(sign, log_abs, branch)
    denom = 1.0 + w
    if denom == 0.0:
        raise DomainError("at the W branch point: coupling diverges")
    return -1.0 / (c1 * denom)


def _three_loop_core(beta: BetaFunction, u: float, branch: BranchId) -> float:
    coeffs = beta.truncated(3).c
    approx = pade(list(coeffs) + [0.0] * (3 - len(coeffs)), 1, 1)
    a1 = approx.num_coeffs[1]
    a2 = approx.den_coeffs[1]
    diff = a2 - a1
    if diff == 0.0:
        # a1 == a2 collapses the log terms: back to the one-loop form
        if u <= 0:
            raise LandauPole("u <= 0 at one-loop reduction")
        return 1.0 / u
    # Omega = exp(u/diff + a1/diff)/diff
    sign = 1.0 if diff > 0 else -1.0
    log_abs = u / diff + a1 / diff - math.log(abs(diff))
    w = _w_of_sign_log(sign, log_abs, branch)
    y = -(a1 - diff * w)
    if y == 0.0:
        raise DomainError("inverse coupling vanished: coupling diverges")
    return 1.0 / y


@lru_cache(maxsize=256)
def _select_branch(beta: BetaFunction, loop_order: int) -> BranchId:
    """The W branch reproducing asymptotic freedom, x -> 1/u as u -> inf."""
    core = _two_loop_core if loop_order == 2 else _three_loop_core
    u_test = 1e6
    for branch in (MINUS_ONE, PRINCIPAL):
        try:
            x = core(beta, u_test, branch)
        except (DomainError, ValueError, OverflowError):
            continue
        if x > 0 and abs(x * u_test - 1.0) < 0.01:
            return branch
    raise RgflowError(
        "no W branch matches the asymptotically free limit for this flow"
    )


# ---------------------------------------------------------------------------
# closed-form solvers


def solve_one_loop(beta: BetaFunction, scale: ScaleSpec) -> float:
    """x = 1/u; the textbook leading-order running."""
    if scale.u <= 0:
        raise LandauPole(f"u = {scale.u:.6g} <= 0: at or below the pole")
    return 1.0 / scale.u


def solve_two_loop(beta: BetaFunction, scale: ScaleSpec,
                   branch: BranchId | None = None) -> float:
    """Exact two-loop coupling, 1/x = -c1 [1 + W(-Omega)].

    The branch defaults to the one matching asymptotic freedom; pass one of
    PRINCIPAL / MINUS_ONE to override.  DomainError signals the scale has
    crossed the branch point into the non-perturbative region.
    """
    if branch is None:
        branch = _select_branch(beta, 2)
    return _two_loop_core(beta, scale.u, branch)


def solve_three_loop(beta: BetaFunction, scale: ScaleSpec,
                     branch: BranchId | None = None) -> float:
    """Three-loop coupling through the [1/1]-reduced flow and W.

    Exact for the Pade-reduced flow; an O(x**5) approximation of the full
    three-loop one.  Degenerate a1 == a2 falls back to the one-loop form.
    """
    if branch is None:
        branch = _select_branch(beta, 3)
    return _three_loop_core(beta, scale.u, branch)


def _four_loop_params(beta: BetaFunction):
    approx = pade(beta.truncated(4).c, 1, 2)
    a1 = approx.num_coeffs[1]
    a2, a3 = approx.den_coeffs[1], approx.den_coeffs[2]
    if a1 == 0.0:
        raise RgflowError("[1/2] reduction needs a nonzero numerator root")
    big_a = a2 - a1 - a3 / a1
    if big_a == 0.0:
        raise RgflowError("degenerate [1/2] reduction: scale factor A vanished")
    return approx, a1, big_a, a3 / (big_a * a1), a1 / big_a


def solve_four_loop(beta: BetaFunction, scale: ScaleSpec,
                    k_max: int = K_MAX_DEFAULT, tau: float = TAU_TERM,
                    fallback: bool = True):
    """Four-loop coupling via the [1/2] reduction and the offset-Lambert series.

    Tries the preferred representation (expansion around z = -C), then the
    alternate one (around the origin pole), then the complex continuation,
    and finally the safeguarded root solve on the log form when ``fallback``
    is enabled; each step downgrades with a FallbackWarning.
    """
    x, _diag = _solve_four_loop_detailed(beta, scale, k_max, tau, fallback)
    return x


def _solve_four_loop_detailed(beta, scale, k_max, tau, fallback):
    _approx, a1, big_a, big_b, big_c = _four_loop_params(beta)
    u = scale.u
    attempts = []

    def _finish(x, diag):
        if x <= 0 and u > 2.0 and fallback:
            warnings.warn(
                "series landed on a non-positive coupling in the weak "
                "regime; deferring to the root oracle", FallbackWarning)
            return _oracle_fallback(beta, scale, 4, diag_extra=attempts)
        return x, diag

    # preferred representation: expansion around z = -C (needs A > 0 real)
    if big_a > 0:
        log_omega = u / big_a - (1.0 + big_b) * math.log(big_a)
        if abs(log_omega) <= 700.0:
            try:
                sol = four_loop_series(big_a, big_b, big_c,
                                       math.exp(log_omega),
                                       k_max=k_max, tau=tau)
                y = big_a * sol.value
                if y != 0:
                    return _finish(1.0 / y, Diagnostics(
                        sol.k_max, sol.residual, "series:primary"))
                attempts.append("primary: inverse coupling vanished")
            except (NegativeBase, NoConvergence) as exc:
                attempts.append(f"primary: {exc}")
        else:
            attempts.append(f"primary: log omega {log_omega:.3g} out of range")
    else:
        attempts.append("primary: A <= 0 needs complex powers")

    # alternate representation: expansion around the origin root,
    # A' = a3/a1 = B A, B' = A/A', C' = a1/A'
    big_a2 = big_b * big_a
    if big_a2 > 0:
        big_b2 = big_a / big_a2
        big_c2 = a1 / big_a2
        log_c = u / big_a2 - (1.0 + big_b2) * math.log(big_a2)
        if abs(log_c) <= 700.0:
            try:
                eq = GeneralizedLambertEquation(
                    a=0.0, c=math.exp(log_c), roots=(big_c2,),
                    exponents=(big_b2,))
                sol = generic_series(eq, k_max=k_max, tau=tau)
                y = big_a2 * sol.value
                if y != 0:
                    warnings.warn(
                        "using the alternate four-loop representation",
                        FallbackWarning)
                    return _finish(1.0 / y, Diagnostics(
                        sol.k_max, sol.residual, "series:alternate"))
                attempts.append("alternate: inverse coupling vanished")
            except (NegativeBase, NoConvergence, ValueError) as exc:
                attempts.append(f"alternate: {exc}")
        else:
            attempts.append("alternate: log omega out of range")
    else:
        attempts.append("alternate: A' <= 0 needs complex powers")

    # complex continuation of the preferred representation
    log_omega_c = u / big_a
    if abs(log_omega_c) <= 700.0:
        try:
            omega = math.exp(log_omega_c) * complex(big_a) ** complex(
                -(1.0 + big_b))
            sol = four_loop_series(big_a, big_b, big_c, omega, k_max=k_max,
                                   tau=tau, complex_mode=True)
            y = complex(big_a) * complex(sol.value)
            if abs(y.imag) <= 1e-10 * max(1.0, abs(y)) and y.real != 0:
                warnings.warn("complex-mode four-loop series realified",
                              FallbackWarning)
                return _finish(1.0 / y.real, Diagnostics(
                    sol.k_max, sol.residual, "series:complex"))
            attempts.append("complex: imaginary leakage")
        except (NegativeBase, NoConvergence, ValueError, OverflowError) as exc:
            attempts.append(f"complex: {exc}")
    else:
        attempts.append("complex: omega out of float range")

    if not fallback:
        raise NoConvergence("four-loop series failed: " + "; ".join(attempts))
    warnings.warn("four-loop series unavailable (%s); using root oracle"
                  % "; ".join(attempts), FallbackWarning)
    return _oracle_fallback(beta, scale, 4, diag_extra=attempts)


def _physical_bracket(beta: BetaFunction, logform: PartialFractionForm, u: float):
    c1 = beta.coefficient(1)
    y_est = max(u, 2.0)
    if u > 1.0:
        cand = u + c1 * math.log(u)
        if cand > 0.1 * u:
            y_est = max(cand, 2.0)
    pole_max = 0.0 if any(abs(r) < 1e-300 for r, _w in logform.log_terms) else -math.inf
    for r, _w in logform.log_terms:
        if abs(r.imag) <= 1e-9 * max(1.0, abs(r)):
            pole_max = max(pole_max, -r.real)
    lo = 0.25 * y_est
    hi = 4.0 * y_est
    if math.isfinite(pole_max):
        floor = pole_max + max(1e-9, 1e-9 * abs(pole_max))
        lo = max(lo, floor)
        hi = max(hi, lo * 2.0)
    return lo, hi


def _oracle_fallback(beta, scale, loop_order, diag_extra=()):
    logform = flow_logform(beta, loop_order)
    lo, hi = _physical_bracket(beta, logform, scale.u)
    y = oracle.root_solve(logform, scale.u, (lo, hi))
    if y == 0:
        raise DomainError("root oracle landed on a vanishing inverse coupling")
    res = abs(logform.antiderivative(y).real - scale.u) / max(1.0, abs(scale.u))
    diag = Diagnostics(None, res, "oracle-fallback",
                       tuple(str(a) for a in diag_extra))
    return 1.0 / y, diag


def solve_generic(beta: BetaFunction, scale: ScaleSpec,
                  loop_order: int | None = None,
                  k_max: int = K_MAX_DEFAULT, tau: float = TAU_TERM,
                  fallback: bool = True) -> float:
    """Coupling at loop order >= 5 via the multinomial generalized-Lambert
    series (the machinery also accepts orders 3 and 4 for cross-checks).

    The log-form antiderivative is assembled from the (nearly) diagonal
    Pade reduction; a base root is chosen to maximize the distance of the
    expansion point from the remaining singularities, and the series is
    attempted in real then complex mode, before the root-oracle fallback.
    """
    x, _diag = _solve_generic_detailed(beta, scale, loop_order, k_max, tau,
                                       fallback)
    return x


def _solve_generic_detailed(beta, scale, loop_order, k_max, tau, fallback):
    order = beta.loops if loop_order is None else int(loop_order)
    if order < 3:
        raise ValueError("generic series solver needs loop order >= 3")
    u = scale.u
    logform = flow_logform(beta, order)
    if tuple(logform.poly_part.coeffs) != (1.0,) or logform.pole_terms:
        raise RgflowError("flow integrand did not reduce to quotient one")
    terms = list(logform.log_terms)
    attempts = []

    def _real_or_raise(z):
        z = complex(z)
        if abs(z.imag) > 1e-12 * max(1.0, abs(z)):
            raise NegativeBase("complex log-form data needs complex mode")
        return z.real

    def _try_base(idx, complex_mode):
        r_m, w_m = terms[idx]
        others = [terms[i] for i in range(len(terms)) if i != idx]
        if not complex_mode:
            r_m, w_m = _real_or_raise(r_m), _real_or_raise(w_m)
            others = [(_real_or_raise(r), _real_or_raise(w)) for r, w in others]
            if w_m <= 0:
                raise NegativeBase("base weight w_m <= 0 needs complex powers")
        a = -r_m / w_m
        roots = tuple(r / w_m for r, _ in others)
        expos = tuple(w / w_m for _, w in others)
        s_exp = sum(expos)
        if complex_mode:
            log_c = u / complex(w_m) - (1.0 + s_exp) * cmath.log(complex(w_m))
            if abs(log_c.real) > 700.0:
                raise NoConvergence("series driving constant out of range")
            c_par = cmath.exp(log_c)
        else:
            log_c = u / w_m - (1.0 + s_exp) * math.log(w_m)
            if abs(log_c) > 700.0:
                raise NoConvergence("series driving constant out of range")
            c_par = math.exp(log_c)
        eq = GeneralizedLambertEquation(a=a, c=c_par, roots=roots,
                                        exponents=expos)
        sol = generic_series(eq, k_max=k_max, tau=tau,
                             complex_mode=complex_mode)
        y = w_m * sol.value
        if complex_mode:
            y = complex(y)
            if abs(y.imag) > 1e-10 * max(1.0, abs(y)):
                raise NegativeBase("imaginary leakage in the complex-mode sum")
            y = y.real
        if y == 0:
            raise DomainError("inverse coupling vanished")
        label = "series:base%d%s" % (idx, ":complex" if complex_mode else "")
        return 1.0 / y, Diagnostics(sol.k_max, sol.residual, label)

    def _score(idx):
        r_m, w_m = terms[idx]
        if w_m == 0:
            return -math.inf
        a = -r_m / w_m
        dists = [abs(a + r / w_m) for i, (r, _) in enumerate(terms) if i != idx]
        return min(dists) if dists else abs(a)

    ranked = sorted(range(len(terms)), key=_score, reverse=True)
    for complex_mode in (False, True):
        for idx in ranked:
            try:
                x, diag = _try_base(idx, complex_mode)
            except (NegativeBase, NoConvergence, DomainError, ValueError) as exc:
                attempts.append(f"base{idx}{':cx' if complex_mode else ''}: {exc}")
                continue
            if x <= 0 and u > 2.0 and fallback:
                attempts.append(f"base{idx}: non-positive coupling")
                continue
            if complex_mode:
                warnings.warn("complex-mode series realified", FallbackWarning)
            return x, diag

    if not fallback:
        raise NoConvergence("generic series failed: " + "; ".join(attempts))
    warnings.warn("generic series unavailable (%s); using root oracle"
                  % "; ".join(attempts), FallbackWarning)
    return _oracle_fallback(beta, scale, order, diag_extra=attempts)


# ---------------------------------------------------------------------------
# iterative solutions


def iterative_solution(beta: BetaFunction, u: float, order: int) -> float:
    """The substitution iterates x_1 .. x_4 of the transcendental equation.

    x1 = 1/u;  1/x2 = u + c1 ln u;
    1/x3 = u + c1 ln(u + c1 ln u) + (c1**2 - c2)/(u + c1 ln u);
    1/x4 = u - c1 ln x3 + (c1**2 - c2) x3 - (c3 - 2 c1 c2 + c1**3)/2 x3**2.

    Asymptotic, not exact: the order-3 iterate deviates from the exact
    solution at O(ln u / u**2) in the inverse coupling.
    """
    if order < 1 or order > 4:
        raise ValueError("iterative order must be 1..4")
    if order > beta.loops:
        raise ValueError(f"order {order} needs {order} coefficients, "
                         f"flow has {beta.loops}")
    c1, c2, c3 = (beta.coefficient(k) for k in (1, 2, 3))
    if order == 1:
        if u == 0:
            raise DomainError("u = 0")
        return 1.0 / u
    if u <= 0:
        raise DomainError(f"u = {u:.6g} <= 0: iterative logs undefined")
    inv_x2 = u + c1 * math.log(u)
    if order == 2:
        if inv_x2 == 0:
            raise DomainError("two-loop iterate diverged")
        return 1.0 / inv_x2
    if inv_x2 <= 0:
        raise DomainError("intermediate two-loop iterate non-positive")
    inv_x3 = u + c1 * math.log(inv_x2) + (c1 * c1 - c2) / inv_x2
    if order == 3:
        if inv_x3 == 0:
            raise DomainError("three-loop iterate diverged")
        return 1.0 / inv_x3
    if inv_x3 <= 0:
        raise DomainError("intermediate three-loop iterate non-positive")
    x3 = 1.0 / inv_x3
    inv_x4 = (u - c1 * math.log(x3) + (c1 * c1 - c2) * x3
              - 0.5 * (c3 - 2.0 * c1 * c2 + c1**3) * x3 * x3)
    if inv_x4 == 0:
        raise DomainError("four-loop iterate diverged")
    return 1.0 / inv_x4


# ---------------------------------------------------------------------------
# Lambda fits


def _solve_closed(beta: BetaFunction, scale: ScaleSpec, loop_order: int,
                  fallback: bool = True) -> float:
    if loop_order == 1:
        return solve_one_loop(beta, scale)
    if loop_order == 2:
        return solve_two_loop(beta, scale)
    if loop_order == 3:
        return solve_three_loop(beta, scale)
    if loop_order == 4:
        return solve_four_loop(beta, scale, fallback=fallback)
    return solve_generic(beta, scale, loop_order, fallback=fallback)


def lambda_from_reference(beta: BetaFunction, mu0_sq: float, x0: float,
                          loop_order: int | None = None,
                          method: str = "closed") -> float:
    """Lambda**2 making the loop-order solution pass through (mu0**2, x0).

    For the closed forms the fit is the exact log-form relation
    ln Lambda**2 = ln mu0**2 - F(1/x0)/beta0, verified by a round trip
    through the actual solver; for the iterative method the defining
    equation 1/x_it(u0) = 1/x0 is root-solved for u0.

    Raises
    ------
    NoSolution
        if the reference point is not on the branch the solver produces.
    """
    if x0 <= 0 or mu0_sq <= 0:
        raise ValueError("reference point must be positive")
    order = beta.loops if loop_order is None else int(loop_order)

    if method == "closed":
        logform = flow_logform(beta, order)
        try:
            u0 = logform.antiderivative(1.0 / x0).real
        except ValueError as exc:
            raise NoSolution(f"log form not real at the reference: {exc}")
        lam_sq = mu0_sq * math.exp(-u0 / beta.beta0)
        try:
            back = _solve_closed(beta, ScaleSpec.make(beta, lam_sq, mu0_sq),
                                 order)
        except RgflowError as exc:
            raise NoSolution(f"solver cannot reach the reference point: {exc}")
        if abs(back - x0) > _FIT_TOL * abs(x0):
            raise NoSolution(
                f"reference x0={x0:.6g} lies off the solver branch "
                f"(round trip gave {back:.6g})"
            )
        return lam_sq

    if method == "iterative":
        from scipy.optimize import brentq

        def h(u):
            return 1.0 / iterative_solution(beta, u, order) - 1.0 / x0

        y0 = 1.0 / x0
        # 1/x_it(u) grows with u; walk the lower edge out of the log domain
        u_lo = max(0.3 * y0, 1.05)
        h_lo = None
        for _ in range(100):
            try:
                h_lo = h(u_lo)
                break
            except (DomainError, ValueError):
                u_lo *= 1.3
        if h_lo is None:
            raise NoSolution("iterative formula undefined near the reference")
        u_hi = max(2.0 * u_lo, 3.0 * y0)
        for _ in range(100):
            if h_lo * h(u_hi) <= 0:
                break
            u_hi *= 1.6
            if u_hi > 1e12:
                raise NoSolution("no bracketing u for the iterative fit")
        u0 = brentq(h, u_lo, u_hi, xtol=1e-14, rtol=8.9e-16)
        return mu0_sq * math.exp(-u0 / beta.beta0)

    raise ValueError(f"unknown fit method {method!r}")


# ---------------------------------------------------------------------------
# method dispatch with diagnostics (CLI back end)


def omega_for_representation(beta: BetaFunction, u: float, loop_order: int) -> float:
    """The scale parameter Omega of the loop order's paper-style form."""
    if loop_order == 2:
        return math.exp(-u / beta.coefficient(1))
    if loop_order == 3:
        approx = pade(beta.truncated(3).c, 1, 1)
        diff = approx.den_coeffs[1] - approx.num_coeffs[1]
        return math.exp(u / diff)
    if loop_order == 4:
        _ap, _a1, big_a, _b, _c = _four_loop_params(beta)
        return math.exp(u / big_a)
    raise ValueError("omega representation defined for loop orders 2-4")


def available_methods(beta: BetaFunction) -> list:
    out = [METHOD_ONE]
    if beta.loops >= 2:
        out.append(METHOD_TWO)
    if beta.loops >= 3:
        out.append(METHOD_THREE)
    if beta.loops >= 4:
        out.append(METHOD_FOUR)
    if beta.loops >= 5:
        out.append(METHOD_GENERIC)
    for k in range(2, min(beta.loops, 4) + 1):
        out.append(iterative_method(k))
    out.extend([METHOD_ODE, METHOD_ROOT])
    return out


def _method_loop_order(beta: BetaFunction, method: str) -> int:
    if method == METHOD_ONE:
        return 1
    if method == METHOD_TWO:
        return 2
    if method == METHOD_THREE:
        return 3
    if method == METHOD_FOUR:
        return 4
    if method in (METHOD_GENERIC, METHOD_ODE, METHOD_ROOT):
        return beta.loops
    if method.startswith("iterative(") and method.endswith(")"):
        return int(method[10:-1])
    raise ValueError(f"unknown method {method!r}")


def solve_with_diagnostics(beta: BetaFunction, scale: ScaleSpec, method: str,
                           reference: tuple | None = None,
                           k_max: int = K_MAX_DEFAULT,
                           tau: float = TAU_TERM) -> RunResult:
    """Evaluate one method at one scale, capturing fallback provenance.

    ``reference`` (mu0_sq, x0) seeds the ODE oracle; other methods run off
    the ScaleSpec alone.
    """
    order = _method_loop_order(beta, method)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        diag = Diagnostics()
        if method == METHOD_ONE:
            x = solve_one_loop(beta, scale)
            diag = Diagnostics(branch=None)
        elif method == METHOD_TWO:
            branch = _select_branch(beta, 2)
            x = solve_two_loop(beta, scale, branch)
            diag = Diagnostics(branch=branch.name)
        elif method == METHOD_THREE:
            branch = _select_branch(beta, 3)
            x = solve_three_loop(beta, scale, branch)
            diag = Diagnostics(branch=branch.name)
        elif method == METHOD_FOUR:
            x, diag = _solve_four_loop_detailed(beta, scale, k_max, tau, True)
        elif method == METHOD_GENERIC:
            x, diag = _solve_generic_detailed(beta, scale, None, k_max, tau,
                                              True)
        elif method.startswith("iterative"):
            x = iterative_solution(beta, scale.u, order)
        elif method == METHOD_ODE:
            if reference is None:
                raise ValueError("ODE oracle needs a reference point")
            x = oracle.ode_run(beta, reference[0], reference[1],
                               [scale.mu_sq])[0]
        elif method == METHOD_ROOT:
            x, diag = _oracle_fallback(beta, scale, beta.loops)
            diag = Diagnostics(diag.kmax, diag.residual, "root-solve")
        else:
            raise ValueError(f"unknown method {method!r}")

    # uniform residual: the method's own-order log form
    res = None
    if not math.isnan(scale.u):
        logform = flow_logform(beta, order)
        try:
            res = abs(logform.antiderivative(1.0 / x).real - scale.u) \
                / max(1.0, abs(scale.u))
        except (ValueError, ZeroDivisionError):
            res = math.nan
    warn_names = tuple(str(w.message) for w in caught)
    if x <= 0:
        warn_names = warn_names + ("non-positive coupling",)
    diag = Diagnostics(diag.kmax, res if diag.residual is None else
                       diag.residual, diag.branch, warn_names)
    return RunResult(scale.mu_sq, method, x, diag)
