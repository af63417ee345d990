"""Independent ground-truth engines.

``ode_run`` integrates the flow equation dx/dt = -beta0 x**2 f(x) in
t = ln mu**2 with an adaptive embedded Runge-Kutta pair (scipy's DOP853)
and a tightened-tolerance self-check.  ``root_solve`` inverts a log-form
antiderivative with a safeguarded Newton/bisection hybrid.

Neither routine touches the Lambert-W or series machinery, so both can
serve as non-circular references for the closed-form solvers.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

from scipy.integrate import solve_ivp

from .errors import (
    MultiRootWarning,
    NoBracket,
    PoleEncountered,
    StiffnessBudget,
)

#: coupling magnitude treated as a pole during integration
POLE_CAP = 1e8
#: geometric growth limit of the bracket hint
BRACKET_GROWTH_MAX = 1e3


@dataclass(frozen=True)
class OdeSettings:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-14
    max_steps: int = 10**6

    def __post_init__(self):
        if self.rel_tol <= 0 or self.abs_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_steps < 1:
            raise ValueError("max_steps must be >= 1")


def _integrate(rhs, t0, x0, t_targets, settings):
    """Integrate to sorted targets on one side of t0; returns {t: x}."""
    out = {}
    pending = [t for t in t_targets if t != t0]
    for t in t_targets:
        if t == t0:
            out[t] = x0
    if not pending:
        return out

    def pole_event(_t, x):
        return abs(x[0]) - POLE_CAP

    pole_event.terminal = True

    t_end = pending[-1]
    sol = solve_ivp(
        rhs,
        (t0, t_end),
        [x0],
        method="DOP853",
        t_eval=pending,
        rtol=settings.rel_tol,
        atol=settings.abs_tol,
        events=pole_event,
        dense_output=False,
    )
    if sol.status == 1:
        raise PoleEncountered(
            f"coupling exceeded {POLE_CAP:g} at t={sol.t_events[0][0]:.6g}"
        )
    if sol.status != 0:
        raise StiffnessBudget(f"integrator failed: {sol.message}")
    for t, x in zip(sol.t, sol.y[0]):
        out[t] = float(x)
    return out


def ode_run(beta, mu0_sq: float, x0: float, mu_sq_targets, settings: OdeSettings | None = None,
            self_check: bool = True) -> list:
    """Integrate the flow from (mu0_sq, x0) and report x at each target scale.

    Parameters
    ----------
    beta : object with ``beta0`` and ``series_factor(x)``
        The flow model; ``series_factor`` returns the bracket multiplying
        -beta0 x**2 (a polynomial for a truncated flow, a rational function
        for a Pade-reduced one).
    mu0_sq, x0 : float
        Reference scale (squared) and coupling there; both positive.
    mu_sq_targets : sequence of float
        Scales (squared) at which to report the coupling, any order.
    settings : OdeSettings, optional
    self_check : bool
        Re-integrate at a ten-fold tighter tolerance and require agreement
        within rel_tol (the step-halving self-check).

    Raises
    ------
    PoleEncountered
        if the coupling diverges between the reference and a target.
    StiffnessBudget
        if the integrator or its self-check fails the accuracy budget.
    """
    if x0 <= 0 or mu0_sq <= 0:
        raise ValueError("reference point must have positive mu0_sq and x0")
    if any(m <= 0 for m in mu_sq_targets):
        raise ValueError("all target scales must be positive")
    settings = settings or OdeSettings()

    beta0 = beta.beta0

    def rhs(_t, x):
        v = x[0]
        return [-beta0 * v * v * beta.series_factor(v)]

    t0 = math.log(mu0_sq)
    targets = [math.log(m) for m in mu_sq_targets]
    below = sorted({t for t in targets if t < t0}, reverse=True)
    above = sorted({t for t in targets if t > t0})

    # integrate well below the requested tolerance so the returned values
    # meet rel_tol globally, with the self-check run tighter still
    inner = OdeSettings(max(settings.rel_tol / 100.0, 2.5e-14),
                        max(settings.abs_tol / 100.0, 1e-280),
                        settings.max_steps)
    values = {t0: x0}
    values.update(_integrate(rhs, t0, x0, below, inner))
    values.update(_integrate(rhs, t0, x0, above, inner))

    if self_check:
        tight = OdeSettings(max(inner.rel_tol / 5.0, 2.5e-14),
                            max(inner.abs_tol / 5.0, 1e-280),
                            settings.max_steps)
        check = {t0: x0}
        check.update(_integrate(rhs, t0, x0, below, tight))
        check.update(_integrate(rhs, t0, x0, above, tight))
        for t in set(below) | set(above):
            err = abs(values[t] - check[t]) / max(abs(check[t]), 1e-300)
            if err > settings.rel_tol:
                raise StiffnessBudget(
                    f"self-check deviation {err:.3e} exceeds rel_tol at t={t:.6g}"
                )
            values[t] = check[t]

    return [values[math.log(m)] for m in mu_sq_targets]


def _interior_bracket(g, lo, hi, glo, n: int = 33):
    """First sign-change subinterval on a uniform scan, or None."""
    prev_y, prev_g = lo, glo
    for i in range(1, n):
        y = lo + (hi - lo) * i / (n - 1)
        gy = g(y)
        if prev_g * gy <= 0:
            return prev_y, y, prev_g, gy
        prev_y, prev_g = y, gy
    return None


def _expand_bracket(g, lo, hi):
    """Bracket a sign change: scan the hint interior first (the endpoints of
    a non-monotone form may agree in sign), then grow geometrically."""
    width0 = hi - lo
    if width0 <= 0:
        raise ValueError("bracket hint must have positive width")
    glo, ghi = g(lo), g(hi)
    while glo * ghi > 0:
        found = _interior_bracket(g, lo, hi, glo)
        if found is not None:
            return found
        if (hi - lo) > BRACKET_GROWTH_MAX * width0:
            raise NoBracket(
                f"no sign change within {BRACKET_GROWTH_MAX:g}x of the hint "
                f"[{lo:.6g}, {hi:.6g}]"
            )
        grow = 0.5 * (hi - lo)
        lo, hi = lo - grow, hi + grow
        glo, ghi = g(lo), g(hi)
    return lo, hi, glo, ghi


def _bisect_newton(g, dg, lo, hi, glo, ghi, tol):
    """Safeguarded Newton: bisection step whenever Newton leaves [lo, hi]."""
    y = 0.5 * (lo + hi)
    for _ in range(200):
        gy = g(y)
        if abs(gy) <= tol:
            return y
        if glo * gy < 0:
            hi, ghi = y, gy
        else:
            lo, glo = y, gy
        d = dg(y)
        if d != 0:
            step = y - gy / d
            if lo < step < hi:
                y = step
                continue
        y = 0.5 * (lo + hi)
        if hi - lo <= 1e-16 * max(1.0, abs(y)):
            return y
    return y


def root_solve(logform, target_ln_omega: float, bracket_hint, tol_scale: float = 1e-12) -> float:
    """Solve ``logform.antiderivative(y) = target`` on the real axis.

    Parameters
    ----------
    logform : PartialFractionForm
        The log-form antiderivative data (poles should stay outside the
        working interval).
    target_ln_omega : float
        Right-hand side of the logarithmic representation.
    bracket_hint : (float, float)
        Interval expected to contain the root; it is expanded geometrically
        (up to 1000x) if the sign change lies outside.

    Raises
    ------
    NoBracket
        if no sign change is found within the expanded hint.

    Warns
    -----
    MultiRootWarning
        if the derivative changes sign inside the bracket; all roots found
        on a scan of the hint are attached to the warning.
    """
    target = float(target_ln_omega)

    def g(y):
        return logform.antiderivative(y).real - target

    def dg(y):
        return logform.derivative_real(y)

    lo, hi = float(bracket_hint[0]), float(bracket_hint[1])
    lo, hi, glo, ghi = _expand_bracket(g, lo, hi)

    # monotonicity probe: derivative sign on a uniform sample
    n_probe = 33
    signs = set()
    for i in range(n_probe):
        y = lo + (hi - lo) * i / (n_probe - 1)
        d = dg(y)
        if d != 0 and math.isfinite(d):
            signs.add(d > 0)
    tol = tol_scale * max(1.0, abs(target))
    if len(signs) > 1:
        roots = _scan_roots(g, lo, hi, tol)
        warnings.warn(
            MultiRootWarning(
                f"derivative changes sign in [{lo:.6g}, {hi:.6g}]; "
                f"roots found: {roots}",
                roots=roots,
            )
        )

    return _bisect_newton(g, dg, lo, hi, glo, ghi, tol)


def _scan_roots(g, lo, hi, tol, n: int = 257):
    ys = [lo + (hi - lo) * i / (n - 1) for i in range(n)]
    vals = [g(y) for y in ys]
    roots = []
    for i in range(n - 1):
        if vals[i] == 0:
            roots.append(ys[i])
        elif vals[i] * vals[i + 1] < 0:
            a, b, ga, gb = ys[i], ys[i + 1], vals[i], vals[i + 1]
            for _ in range(80):
                m = 0.5 * (a + b)
                gm = g(m)
                if abs(gm) <= tol:
                    break
                if ga * gm < 0:
                    b, gb = m, gm
                else:
                    a, ga = m, gm
            roots.append(0.5 * (a + b))
    return tuple(roots)
