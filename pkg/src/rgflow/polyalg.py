"""Numerical polynomial and rational-function algebra.

Everything needed to reduce a rational flow integrand to its log-form
antiderivative: evaluation, long division, complex root finding, simple-pole
partial fractions with an explicit pole at the origin, and the realized
antiderivative ``e0*y + sum w_k ln(y + root_k) + sum c_j / y**j``.

All routines carry roots and residues in complex arithmetic internally;
results are realified only when evaluated on the real axis.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

from .errors import CancellationWarning, IllConditioned, RepeatedRoots

#: relative tolerance below which two denominator roots count as equal
RHO_SEP = 1e-8
#: relative tolerance below which a shared num/den root is cancelled
RHO_GCD = 1e-10
#: relative residual bound accepted from the root finder
RHO_ROOT = 1e-10

_DK_MAX_ITER = 200


def _trim(coeffs):
    """Drop trailing (near-)zero leading coefficients, keep at least one."""
    c = list(coeffs)
    scale = max((abs(x) for x in c), default=0.0)
    while len(c) > 1 and abs(c[-1]) <= 1e-300 * max(1.0, scale):
        c.pop()
    return c


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial with coefficients in ascending degree.

    ``coeffs[k]`` multiplies ``y**k``; the leading coefficient is nonzero
    unless the polynomial is identically zero.
    """

    coeffs: tuple = field(default_factory=lambda: (0.0,))

    def __post_init__(self):
        object.__setattr__(self, "coeffs", tuple(_trim(self.coeffs)))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def __call__(self, y):
        # Horner; works for real or complex y
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * y + c
        return acc

    def derivative(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial((0.0,))
        return Polynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def integral(self) -> "Polynomial":
        """Antiderivative with zero constant term."""
        return Polynomial((0.0,) + tuple(c / (k + 1) for k, c in enumerate(self.coeffs)))

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out = [0.0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0.0] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0.0] * (n - len(other.coeffs))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + Polynomial(tuple(-c for c in other.coeffs))

    def scaled(self, s) -> "Polynomial":
        return Polynomial(tuple(s * c for c in self.coeffs))

    def shifted_up(self, j: int) -> "Polynomial":
        """Multiply by y**j."""
        if self.is_zero:
            return self
        return Polynomial((0.0,) * j + self.coeffs)


@dataclass(frozen=True)
class RationalFunction:
    """Ratio of two polynomials; the denominator must not vanish identically."""

    num: Polynomial
    den: Polynomial

    def __post_init__(self):
        if self.den.is_zero:
            raise ValueError("denominator is identically zero")

    def __call__(self, y):
        return self.num(y) / self.den(y)


@dataclass(frozen=True)
class RootSet:
    """Roots with multiplicities, sorted by (real, imag)."""

    roots: tuple
    multiplicities: tuple

    def distinct(self) -> bool:
        return all(m == 1 for m in self.multiplicities)


@dataclass(frozen=True)
class PartialFractionForm:
    """Decomposition data shared by the rational and antiderivative views.

    poly_part   quotient polynomial of num/den (pre-integration)
    log_terms   (root, weight) pairs: weight/(y+root) in the function,
                weight*ln(y+root) in its antiderivative
    pole_terms  (order j, coeff) pairs: coeff/y**j in the antiderivative,
                i.e. -j*coeff/y**(j+1) in the function itself
    """

    poly_part: Polynomial
    log_terms: tuple
    pole_terms: tuple

    def recombined(self, y):
        """Value of the original rational function at y (complex-safe)."""
        acc = complex(self.poly_part(y))
        for root, w in self.log_terms:
            acc += w / (y + root)
        for j, c in self.pole_terms:
            acc += -j * c / y ** (j + 1)
        return acc

    def antiderivative(self, y):
        """Antiderivative at y; real part is the value on the real axis.

        The integration constant is omitted throughout (it is absorbed into
        the lambda parameter by the flow layer).
        """
        acc = complex(self.poly_part.integral()(y))
        for root, w in self.log_terms:
            acc += w * cmath.log(y + root)
        for j, c in self.pole_terms:
            acc += c / y**j
        return acc

    def antiderivative_real(self, y: float) -> float:
        val = self.antiderivative(y)
        if abs(val.imag) > 1e-10 * max(1.0, abs(val)):
            raise ValueError(
                f"antiderivative not real at y={y}: imaginary part {val.imag:g}"
            )
        return val.real

    def derivative_real(self, y: float) -> float:
        """d/dy of the antiderivative, evaluated on the real axis."""
        val = self.recombined(y)
        return val.real


def poly_divide(num: Polynomial, den: Polynomial):
    """Long division: ``num = quotient*den + remainder``, deg(rem) < deg(den)."""
    if den.is_zero:
        raise ValueError("division by the zero polynomial")
    rem = list(num.coeffs)
    dn = den.degree
    lead = den.coeffs[-1]
    if len(rem) - 1 < dn:
        return Polynomial((0.0,)), Polynomial(tuple(rem))
    quot = [0.0] * (len(rem) - dn)
    for k in range(len(rem) - 1, dn - 1, -1):
        q = rem[k] / lead
        quot[k - dn] = q
        for i in range(dn + 1):
            rem[k - dn + i] -= q * den.coeffs[i]
    return Polynomial(tuple(quot)), Polynomial(tuple(rem[:dn]))


def _residual_scale(p: Polynomial, r: complex) -> float:
    m = max(1.0, abs(r))
    return sum(abs(c) * m**k for k, c in enumerate(p.coeffs))


def _newton_polish(p: Polynomial, dp: Polynomial, r: complex, steps: int = 2) -> complex:
    for _ in range(steps):
        d = dp(r)
        if d == 0:
            break
        r = r - p(r) / d
    return r


def _durand_kerner(coeffs) -> list:
    """Simultaneous root iteration for a monic polynomial (ascending coeffs)."""
    n = len(coeffs) - 1
    # Cauchy-style radius bound keeps the starting circle around all roots
    radius = 1.0 + max(abs(c) for c in coeffs[:-1])
    roots = [
        radius * cmath.exp(2j * math.pi * k / n + 0.4j) for k in range(n)
    ]
    for _ in range(_DK_MAX_ITER):
        shift = 0.0
        new = list(roots)
        for i in range(n):
            num = 0.0
            acc = 1.0
            for c in reversed(coeffs):
                num = num * roots[i] + c
            for j in range(n):
                if j != i:
                    acc *= roots[i] - roots[j]
            if acc == 0:
                # coincident iterates: nudge apart and continue
                new[i] = roots[i] * (1 + 1e-8) + 1e-8
                shift = math.inf
                continue
            step = num / acc
            new[i] = roots[i] - step
            shift = max(shift, abs(step))
        roots = new
        if shift <= 1e-15 * (1.0 + max(abs(r) for r in roots)):
            break
    return roots


def poly_roots(p: Polynomial, rho_root: float = RHO_ROOT) -> RootSet:
    """All complex roots of p, closed forms up to degree 2, then Durand-Kerner.

    Roots are Newton-polished, residual-checked against
    ``|p(r)| <= rho_root * sum |c_k| max(1,|r|)**k`` and returned sorted by
    (real, imag).  Near-coincident roots are merged into multiplicities.

    Raises
    ------
    IllConditioned
        if any root fails the residual bound after polishing.
    """
    if p.degree < 1:
        raise ValueError("root finding needs degree >= 1")
    c = p.coeffs
    if p.degree == 1:
        roots = [complex(-c[0] / c[1])]
    elif p.degree == 2:
        a2, a1, a0 = c[2], c[1], c[0]
        disc = cmath.sqrt(a1 * a1 - 4 * a2 * a0)
        # pair the sign with a1 to avoid cancellation in the stable form
        if a1.real * disc.real + a1.imag * disc.imag >= 0:
            q = -(a1 + disc) / 2
        else:
            q = -(a1 - disc) / 2
        if q != 0:
            roots = [q / a2, a0 / q]
        else:
            roots = [complex(0), -a1 / a2]
    else:
        monic = [x / c[-1] for x in c]
        roots = _durand_kerner(monic)
        dp = p.derivative()
        roots = [_newton_polish(p, dp, r) for r in roots]

    for r in roots:
        if abs(p(r)) > rho_root * _residual_scale(p, r):
            raise IllConditioned(
                f"root residual {abs(p(r)):.3e} exceeds bound at r={r}"
            )
    # realify roots whose imaginary part is numerical noise
    cleaned = []
    for r in roots:
        if abs(r.imag) <= 1e-12 * max(1.0, abs(r)):
            r = complex(r.real, 0.0)
        cleaned.append(r)
    cleaned.sort(key=lambda z: (z.real, z.imag))

    merged, mult = [], []
    for r in cleaned:
        if merged and abs(r - merged[-1]) <= RHO_SEP * max(1.0, abs(r)):
            mult[-1] += 1
        else:
            merged.append(r)
            mult.append(1)
    return RootSet(tuple(merged), tuple(mult))


def _cancel_common_roots(num: Polynomial, den: Polynomial):
    """Deflate near-common num/den roots (within RHO_GCD) out of both."""
    if num.is_zero or den.degree < 1:
        return num, den
    den_roots = poly_roots(den)
    for r, m in zip(den_roots.roots, den_roots.multiplicities):
        for _ in range(m):
            if num.degree < 1:
                break
            if abs(num(r)) <= RHO_GCD * _residual_scale(num, r):
                warnings.warn(
                    f"cancelling common factor near root {r}", CancellationWarning
                )
                num = _deflate(num, r)
                den = _deflate(den, r)
    return num, den


def _deflate(p: Polynomial, r: complex) -> Polynomial:
    """Synthetic division of p by (y - r); remainder discarded."""
    out = [0.0] * p.degree
    acc = 0.0
    for k in range(p.degree, 0, -1):
        acc = p.coeffs[k] + acc * r
        out[k - 1] = acc
    cleaned = [x.real if abs(x.imag) <= 1e-12 * max(1.0, abs(x)) else x for x in out]
    return Polynomial(tuple(cleaned))


def partial_fractions(
    r: RationalFunction, pole_at_zero_order: int = 0
) -> PartialFractionForm:
    """Decompose ``num / (y**j * den)`` into quotient + simple poles.

    ``r.den`` excludes the origin pole; ``pole_at_zero_order`` supplies the
    power ``j`` of the explicit ``y**j`` factor.  The denominator roots must
    be pairwise distinct within RHO_SEP and away from the origin.

    Returns the shared form: residues as ``log_terms`` and the origin-pole
    Laurent data folded into ``log_terms`` (first order) and ``pole_terms``
    (antiderivative coefficients, higher orders).

    Raises
    ------
    RepeatedRoots
        if denominator roots collide or the origin pole is double-counted.
    """
    j = int(pole_at_zero_order)
    if j < 0:
        raise ValueError("pole_at_zero_order must be >= 0")
    num, den = _cancel_common_roots(r.num, r.den)

    if j > 0 and abs(den(0.0)) <= RHO_SEP * _residual_scale(den, 0.0):
        raise RepeatedRoots(
            "denominator vanishes at the origin while an explicit origin pole "
            "was declared"
        )

    den_full = den.shifted_up(j)
    quotient, remainder = poly_divide(num, den_full)

    log_terms = []
    if den.degree >= 1:
        rs = poly_roots(den)
        if not rs.distinct():
            raise RepeatedRoots(f"repeated denominator roots: {rs.roots}")
        dden = den.derivative()
        for rho in rs.roots:
            w = remainder(rho) / (rho**j * dden(rho)) if j else remainder(rho) / dden(rho)
            log_terms.append((-rho, w))

    pole_terms = []
    if j > 0:
        # Laurent coefficients of remainder/den at the origin
        series = _series_quotient_at_zero(remainder, den, j)
        d1 = series[j - 1] if j >= 1 else 0.0
        if d1 != 0:
            log_terms.append((complex(0.0), complex(d1)))
        for order in range(2, j + 1):
            d = series[j - order]
            if d != 0:
                pole_terms.append((order - 1, -d / (order - 1)))

    log_terms.sort(key=lambda t: (t[0].real, t[0].imag))
    return PartialFractionForm(quotient, tuple(log_terms), tuple(pole_terms))


def _series_quotient_at_zero(num: Polynomial, den: Polynomial, n_terms: int):
    """First n_terms Taylor coefficients of num/den around y = 0."""
    d0 = den.coeffs[0]
    out = []
    for i in range(n_terms):
        acc = num.coeffs[i] if i < len(num.coeffs) else 0.0
        for k in range(1, i + 1):
            dk = den.coeffs[k] if k < len(den.coeffs) else 0.0
            acc -= dk * out[i - k]
        out.append(acc / d0)
    return out


def antiderivative_logform(
    r: RationalFunction, pole_at_zero_order: int = 0
) -> PartialFractionForm:
    """Antiderivative data of ``num / (y**j * den)`` in log form.

    Same decomposition as :func:`partial_fractions`; evaluate it through
    :meth:`PartialFractionForm.antiderivative`, which integrates the
    quotient on the fly, so that

        d/dy antiderivative(y) == r(y) / y**j.
    """
    return partial_fractions(r, pole_at_zero_order)
