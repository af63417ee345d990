"""Lagrange-Buermann inversion engines.

Three layers of the same idea:

* :func:`lagrange_invert` -- generic inversion coefficients r_n of z = f(r)
  around a point with f'(a) != 0, via numerical Taylor coefficients.
* :func:`solve_offset_lambert` -- power-series solution of
  ``v = a + c exp(-v)/v**b`` with the closed inner j-sum.
* :func:`generic_series` -- the multinomial series for
  ``v = a + c exp(-v) / prod_l (v + a_l)**c_l``, which covers the
  transcendental equations produced by (nearly) diagonal Pade reduction of
  a flow integrand at any loop order.

Series terms decrease geometrically when |c f(a)| is small against |a|;
outside that region NoConvergence is raised rather than returning a
truncated guess.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DerivativeVanishes, NegativeBase, NoConvergence

#: default relative size at which the series is considered converged
TAU_TERM = 1e-14
#: default term budget
K_MAX_DEFAULT = 64


def pochhammer(x, m: int):
    """Rising factorial (x)_m = x (x+1) ... (x+m-1); (x)_0 = 1.

    A direct product: exact for the small orders used here and safe at the
    gamma poles (non-positive integer x simply yields zero factors).
    """
    if m < 0:
        raise ValueError("order must be >= 0")
    acc = complex(1.0) if isinstance(x, complex) else 1.0
    for i in range(m):
        acc *= x + i
    return acc


@dataclass(frozen=True)
class GeneralizedLambertEquation:
    """Parameters of ``v = a + c exp(-v) / prod_l (v + roots[l])**exponents[l]``.

    An empty root list is the pure offset-Lambert equation
    ``v = a + c exp(-v)``.
    """

    a: complex
    c: complex
    roots: tuple = ()
    exponents: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "roots", tuple(self.roots))
        object.__setattr__(self, "exponents", tuple(self.exponents))
        if len(self.roots) != len(self.exponents):
            raise ValueError("roots and exponents must have equal length")

    def f(self, v):
        """The forcing function f(v) = exp(-v)/prod (v+a_l)**c_l."""
        acc = cmath.exp(-complex(v))
        for root, expo in zip(self.roots, self.exponents):
            acc *= complex(v + root) ** (-complex(expo))
        return acc

    def residual(self, v) -> float:
        """Relative residual of the defining equation at v."""
        rhs = self.a + self.c * self.f(v)
        return abs(v - rhs) / max(1.0, abs(v))


@dataclass(frozen=True)
class SeriesSolution:
    """Accumulated series solution; terms[k-1] is the whole k-th order."""

    base: complex
    terms: tuple
    k_max: int
    converged: bool
    residual: float

    @property
    def value(self):
        acc = self.base
        for t in self.terms:
            acc += t
        return acc

    def real_value(self, leak_tol: float = 1e-10) -> float:
        v = complex(self.value)
        if abs(v.imag) > leak_tol * max(1.0, abs(v)):
            raise NegativeBase(
                f"series sum has imaginary leakage {v.imag:.3e}; no real "
                "solution in this representation"
            )
        return v.real


def _sorted_sum(parts):
    """Accumulate in descending magnitude to limit alternating cancellation."""
    acc = complex(0.0) if any(isinstance(p, complex) for p in parts) else 0.0
    for p in sorted(parts, key=abs, reverse=True):
        acc += p
    return acc


def _isfinite(x) -> bool:
    if isinstance(x, complex):
        return math.isfinite(x.real) and math.isfinite(x.imag)
    return math.isfinite(x)


def _check_converged(terms, total, tau) -> bool:
    if len(terms) < 2:
        return False
    scale = max(1e-300, abs(total))
    return abs(terms[-1]) <= tau * scale and abs(terms[-2]) <= tau * scale


def solve_offset_lambert(
    eq: GeneralizedLambertEquation,
    k_max: int = K_MAX_DEFAULT,
    tau: float = TAU_TERM,
    complex_mode: bool = False,
) -> SeriesSolution:
    """Series solution of ``v = a + c exp(-v)/v**b`` around v = a.

    The k-th term carries the closed inner sum

        term_k = -(-rho)**k (a/k) sum_{j=0}^{k-1}
                 [(k a)**j / j!] [(k b)_{k-1-j} / (k-1-j)!]

    with rho = c exp(-a) a**-(b+1); the inner sum is accumulated in
    descending magnitude to limit alternating cancellation.

    Raises
    ------
    NegativeBase
        if a <= 0 with non-integer b in real mode.
    NoConvergence
        if terms fail the decrease test within the budget.
    """
    if len(eq.roots) not in (0, 1):
        raise ValueError("offset-Lambert form has at most one root (at zero)")
    if eq.roots and abs(eq.roots[0]) != 0:
        raise ValueError("offset-Lambert root must sit at zero")
    b = eq.exponents[0] if eq.exponents else 0.0
    a, c = eq.a, eq.c

    use_complex = complex_mode or any(isinstance(x, complex) for x in (a, c, b))
    if not use_complex and a <= 0 and b != round(b):
        raise NegativeBase(
            f"expansion point a={a} <= 0 with non-integer exponent b={b}; "
            "use complex_mode for the complex continuation"
        )
    if c == 0:
        return SeriesSolution(a, (), 0, True, 0.0)

    if use_complex:
        a, c, b = complex(a), complex(c), complex(b)
        rho = c * cmath.exp(-a) * a ** (-(b + 1))
    else:
        rho = c * math.exp(-a) * a ** (-(b + 1.0))

    one = complex(1.0) if use_complex else 1.0
    terms = []
    total = a
    converged = False
    for k in range(1, k_max + 1):
        ka = k * a
        kb = k * b
        u = [one]  # (k a)**j / j!
        for j in range(1, k):
            u.append(u[-1] * ka / j)
        p = [one]  # (k b)_m / m!
        for m in range(1, k):
            p.append(p[-1] * (kb + m - 1) / m)
        inner = _sorted_sum([u[j] * p[k - 1 - j] for j in range(k)])
        term = -((-rho) ** k) * (a / k) * inner
        if not _isfinite(term):
            raise NoConvergence(f"series term overflowed at k={k}")
        terms.append(term)
        total = total + term
        if _check_converged(terms, total, tau):
            converged = True
            break
    if not converged:
        raise NoConvergence(
            f"offset-Lambert series not converged within k_max={k_max}; "
            f"last |term| = {abs(terms[-1]):.3e}"
        )
    return SeriesSolution(eq.a, tuple(terms), len(terms), converged,
                          eq.residual(total))


def four_loop_series(
    big_a: float,
    big_b: float,
    big_c: float,
    omega: float,
    k_max: int = K_MAX_DEFAULT,
    tau: float = TAU_TERM,
    complex_mode: bool = False,
) -> SeriesSolution:
    """Series solution z of ``(C + z) z**B = Omega exp(-z)`` around z = -C.

    This is the offset-Lambert equation with a = -C, c = Omega, b = B; the
    preferred sign regime has C < 0 so the expansion point -C is positive.
    ``big_a`` is the upstream scale factor (inverse coupling y = A z) and
    does not enter the series itself.  The reported residual is that of the
    ``(C+z) z**B = Omega exp(-z)`` form at the summed z.

    Raises
    ------
    NegativeBase
        if -C <= 0 with non-integer B in real mode.
    NoConvergence
        as for :func:`solve_offset_lambert`.
    """
    del big_a  # only the caller's y = A z mapping uses it
    eq = GeneralizedLambertEquation(a=-big_c, c=omega, roots=(0.0,),
                                    exponents=(big_b,))
    sol = solve_offset_lambert(eq, k_max=k_max, tau=tau,
                               complex_mode=complex_mode)
    z = sol.value
    lhs = (big_c + z) * complex(z) ** complex(big_b)
    rhs = omega * cmath.exp(-complex(z))
    res = abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300)
    return SeriesSolution(sol.base, sol.terms, sol.k_max, sol.converged, res)


def _compositions(total: int, slots: int):
    """All tuples of non-negative ints of length ``slots`` summing to total."""
    if slots == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, slots - 1):
            yield (first,) + rest


def generic_series(
    eq: GeneralizedLambertEquation,
    k_max: int = K_MAX_DEFAULT,
    tau: float = TAU_TERM,
    complex_mode: bool = False,
) -> SeriesSolution:
    """Multinomial series for ``v = a + c exp(-v)/prod_l (v+a_l)**c_l``.

    The k-th term folds the composition sum

        term_k = -(-c f(a))**k / k * sum_{j_1+...+j_n = k-1}
                 [k**j_n / j_n!] prod_l [(k c_l)_{j_l} (a+a_l)**-j_l / j_l!]

    where the last slot belongs to the exponential; within each k the
    composition contributions are accumulated in descending magnitude.
    With no roots this reduces to the pure offset-Lambert series (b = 0).

    Raises
    ------
    NegativeBase
        if a real-mode power would need a negative base.
    NoConvergence
        if terms fail the decrease test within the budget.
    """
    a, c = eq.a, eq.c
    roots, expos = eq.roots, eq.exponents
    n_slots = len(roots) + 1

    use_complex = complex_mode or any(
        isinstance(x, complex) for x in (a, c) + roots + expos
    )
    offsets = []
    for root in roots:
        off = a + root
        if abs(off) < 1e-12 * max(1.0, abs(a)):
            raise ValueError(f"expansion point a={a} sits on the singularity "
                             f"at -{root}")
        offsets.append(off)
    if not use_complex:
        for off, expo in zip(offsets, expos):
            if off <= 0 and expo != round(expo):
                raise NegativeBase(
                    f"a + a_l = {off} <= 0 with non-integer exponent {expo}; "
                    "use complex_mode"
                )
    if c == 0:
        return SeriesSolution(a, (), 0, True, 0.0)

    one = complex(1.0) if use_complex else 1.0
    if use_complex:
        fa = cmath.exp(-complex(a))
        for off, expo in zip(offsets, expos):
            fa *= complex(off) ** (-complex(expo))
    else:
        fa = math.exp(-a)
        for off, expo in zip(offsets, expos):
            fa *= off ** (-expo)
    base_ratio = -c * fa  # the (-c f(a)) driving ratio

    terms = []
    total = a
    converged = False
    for k in range(1, k_max + 1):
        exp_slot = [one]  # k**m / m!
        for m in range(1, k):
            exp_slot.append(exp_slot[-1] * k / m)
        root_slots = []  # (k c_l)_m (a+a_l)**-m / m!
        for off, expo in zip(offsets, expos):
            tbl = [one]
            for m in range(1, k):
                tbl.append(tbl[-1] * (k * expo + m - 1) / (m * off))
            root_slots.append(tbl)

        parts = []
        for comp in _compositions(k - 1, n_slots):
            w = exp_slot[comp[-1]]
            for tbl, j in zip(root_slots, comp[:-1]):
                w = w * tbl[j]
            parts.append(w)
        term = -(base_ratio**k) / k * _sorted_sum(parts)
        if not _isfinite(term):
            raise NoConvergence(f"series term overflowed at k={k}")
        terms.append(term)
        total = total + term
        if _check_converged(terms, total, tau):
            converged = True
            break
    if not converged:
        raise NoConvergence(
            f"generic series not converged within k_max={k_max}; "
            f"last |term| = {abs(terms[-1]):.3e}"
        )
    return SeriesSolution(a, tuple(terms), len(terms), converged,
                          eq.residual(total))


def lagrange_invert(f_values, a, f_at_a, n: int, radius: float = 0.5) -> complex:
    """n-th inversion coefficient r_n of z = f(r) around r = a.

    With r(z) = a + sum_n r_n [z - f(a)]**n / n!, the coefficient equals the
    (n-1)-th derivative of ((r-a)/(f(r)-f(a)))**n at a.  Taylor coefficients
    of f come from trapezoid (Cauchy-integral) sampling on a circle of the
    given radius around a, so ``f_values`` must accept complex arguments and
    be analytic on that circle; the quotient series is then reciprocated and
    raised to the n-th power.

    Raises
    ------
    DerivativeVanishes
        if |f'(a)| is below 1e-12 of the sampled scale.
    """
    if n < 1:
        raise ValueError("coefficient index must be >= 1")
    m_samples = 1 << max(6, (4 * n - 1).bit_length())
    theta = 2.0 * math.pi * np.arange(m_samples) / m_samples
    ring = a + radius * np.exp(1j * theta)
    samples = np.array([complex(f_values(z)) for z in ring]) - complex(f_at_a)
    coeffs = np.fft.fft(samples) / m_samples

    scale = max(1.0, float(np.max(np.abs(samples))))
    # h-array: h_m * radius**(m+1) where h(z) = (f(a+z)-f(a))/z
    h = coeffs[1 : n + 1]
    if abs(h[0]) <= 1e-12 * scale:
        raise DerivativeVanishes(
            f"|f'(a)| ~ {abs(h[0]) / radius:.3e} too small at a={a}"
        )
    # reciprocal series in the scaled variable
    g = np.zeros(n, dtype=complex)
    g[0] = 1.0 / h[0]
    for m in range(1, n):
        acc = complex(0.0)
        for k in range(1, m + 1):
            hk = h[k] if k < len(h) else 0.0
            acc += hk * g[m - k]
        g[m] = -acc / h[0]
    # g**n truncated at order n-1
    power = np.zeros(n, dtype=complex)
    power[0] = 1.0
    for _ in range(n):
        nxt = np.zeros(n, dtype=complex)
        for i in range(n):
            if power[i] == 0:
                continue
            for j in range(n - i):
                nxt[i + j] += power[i] * g[j]
        power = nxt
    # scaled arrays satisfy power[n-1] = [z^{n-1}] g(z)**n / radius
    r_n = math.factorial(n - 1) * power[n - 1] * radius
    if abs(r_n.imag) <= 1e-8 * max(1.0, abs(r_n)):
        return complex(r_n.real, 0.0)
    return complex(r_n)
