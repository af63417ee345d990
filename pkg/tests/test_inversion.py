"""Series inversion engines against independent Newton oracles."""

import cmath
import math

import numpy as np
import pytest
from scipy.special import poch as scipy_poch

from rgflow.errors import DerivativeVanishes, NegativeBase, NoConvergence
from rgflow.inversion import (
    GeneralizedLambertEquation,
    _compositions,
    four_loop_series,
    generic_series,
    lagrange_invert,
    pochhammer,
    solve_offset_lambert,
)
from rgflow.lambertw import PRINCIPAL, lambert_w


def newton_solve(eq: GeneralizedLambertEquation, v0: float, tol=1e-14) -> float:
    """Damped Newton on g(v) = v - a - c f(v), seeded at the expansion point."""
    v = complex(v0)
    for _ in range(200):
        f = eq.f(v)
        g = v - eq.a - eq.c * f
        # f'(v) = -f(v) (1 + sum c_l/(v+a_l))
        fp = -f * (1.0 + sum(cl / (v + al)
                             for al, cl in zip(eq.roots, eq.exponents)))
        dg = 1.0 - eq.c * fp
        step = g / dg
        while abs(step) > 0.5 * max(1.0, abs(v)):
            step *= 0.5
        v = v - step
        if abs(step) <= tol * max(1.0, abs(v)):
            break
    assert eq.residual(v) < 1e-11, "newton oracle failed to converge"
    return v.real if abs(v.imag) < 1e-12 * max(1.0, abs(v)) else v


class TestPochhammer:
    def test_basic_values(self):
        assert pochhammer(3.0, 0) == 1.0
        assert pochhammer(3.0, 4) == pytest.approx(3 * 4 * 5 * 6)
        assert pochhammer(-3.0, 2) == pytest.approx((-3) * (-2))
        assert pochhammer(-3.0, 5) == 0.0  # hits zero factor

    def test_against_scipy(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            x = float(rng.uniform(-8, 8))
            m = int(rng.integers(0, 12))
            want = float(scipy_poch(x, m))
            assert pochhammer(x, m) == pytest.approx(want, rel=1e-12, abs=1e-12)


class TestLagrangeInvert:
    def test_identity(self):
        assert lagrange_invert(lambda r: r, 0.0, 0.0, 1) == pytest.approx(1.0)

    def test_quadratic_inverse(self):
        # z = r + r^2 inverts to r(z) = z - z^2 + 2 z^3 ... so r_2 = -2
        r2 = lagrange_invert(lambda r: r + r * r, 0.0, 0.0, 2)
        assert r2.real == pytest.approx(-2.0, abs=1e-12)
        r3 = lagrange_invert(lambda r: r + r * r, 0.0, 0.0, 3)
        assert r3.real == pytest.approx(12.0, abs=1e-10)  # 2 * 3!

    def test_lambert_coefficients(self):
        f = lambda w: w * cmath.exp(w)
        for n in range(1, 13):
            rn = lagrange_invert(f, 0.0, 0.0, n, radius=1.0)
            exact = float((-n) ** (n - 1))
            assert abs(rn.real - exact) <= 1e-9 * max(1.0, abs(exact))
            if n <= 8:
                assert round(rn.real) == exact

    def test_shifted_expansion_point(self):
        # z = exp(r) around a = 0.5 inverts to r = ln z; r_n = d^n/dz^n ln z
        f = cmath.exp
        fa = math.exp(0.5)
        for n in (1, 2, 3, 4):
            rn = lagrange_invert(f, 0.5, fa, n, radius=0.3)
            want = math.factorial(n - 1) * (-1) ** (n - 1) / fa**n
            assert rn.real == pytest.approx(want, rel=1e-9)

    def test_vanishing_derivative(self):
        with pytest.raises(DerivativeVanishes):
            lagrange_invert(lambda r: r * r, 0.0, 0.0, 2)

    def test_index_validation(self):
        with pytest.raises(ValueError):
            lagrange_invert(lambda r: r, 0.0, 0.0, 0)


class TestOffsetLambert:
    def test_zero_forcing(self):
        eq = GeneralizedLambertEquation(5.0, 0.0, (0.0,), (1.0,))
        sol = solve_offset_lambert(eq)
        assert sol.value == 5.0
        assert sol.converged and sol.terms == ()

    def test_pure_exponential_matches_w(self):
        # b = 0: v = a + c e^{-v} has v = a + W(c e^{-a})
        for a, c in [(3.0, 0.5), (5.0, 2.0), (2.0, -0.3), (8.0, 10.0)]:
            eq = GeneralizedLambertEquation(a, c, (0.0,), (0.0,))
            sol = solve_offset_lambert(eq)
            want = a + lambert_w(c * math.exp(-a), PRINCIPAL)
            assert abs(sol.value - want) <= 1e-10 * max(1.0, abs(want))

    def test_b_one_against_newton(self):
        eq = GeneralizedLambertEquation(5.0, 0.1, (0.0,), (1.0,))
        sol = solve_offset_lambert(eq)
        assert sol.residual <= 1e-12
        want = newton_solve(eq, 5.0)
        assert sol.value == pytest.approx(want, rel=1e-12)

    def test_no_convergence_outside_region(self):
        eq = GeneralizedLambertEquation(1.0, 200.0, (0.0,), (1.0,))
        with pytest.raises(NoConvergence):
            solve_offset_lambert(eq)

    def test_negative_base_real_mode(self):
        eq = GeneralizedLambertEquation(-2.0, 0.1, (0.0,), (0.5,))
        with pytest.raises(NegativeBase):
            solve_offset_lambert(eq)

    def test_negative_base_integer_exponent_ok(self):
        eq = GeneralizedLambertEquation(-4.0, 0.05, (0.0,), (2.0,))
        sol = solve_offset_lambert(eq)
        assert eq.residual(sol.value) <= 1e-12

    def test_complex_mode(self):
        eq = GeneralizedLambertEquation(5.0, 0.1, (0.0,), (0.7,))
        real = solve_offset_lambert(eq)
        cx = solve_offset_lambert(eq, complex_mode=True)
        assert cx.real_value() == pytest.approx(real.value, rel=1e-12)


class TestFourLoopSeries:
    def test_zero_omega(self):
        sol = four_loop_series(1.0, 0.7, -8.0, 0.0)
        assert sol.value == 8.0
        assert sol.residual == pytest.approx(0.0, abs=1e-300)

    def test_b_zero_reduces_to_w(self):
        big_c, omega = -6.0, 0.8
        sol = four_loop_series(2.0, 0.0, big_c, omega)
        want = -big_c + lambert_w(omega * math.exp(big_c), PRINCIPAL)
        assert abs(sol.value - want) <= 1e-10 * max(1.0, abs(want))

    def test_generic_parameters_residual(self):
        sol = four_loop_series(1.0, 0.7, -8.0, 0.5)
        assert sol.residual <= 1e-10
        eq = GeneralizedLambertEquation(8.0, 0.5, (0.0,), (0.7,))
        want = newton_solve(eq, 8.0)
        assert sol.value == pytest.approx(want, rel=1e-11)

    def test_terms_match_offset_lambert(self):
        sol_f = four_loop_series(3.0, 0.4, -7.0, 0.3)
        eq = GeneralizedLambertEquation(7.0, 0.3, (0.0,), (0.4,))
        sol_o = solve_offset_lambert(eq)
        for tf, to in zip(sol_f.terms[:10], sol_o.terms[:10]):
            assert tf == pytest.approx(to, rel=1e-13)

    def test_negative_expansion_point(self):
        with pytest.raises(NegativeBase):
            four_loop_series(1.0, 0.5, 2.0, 0.1)  # -C = -2 < 0, B non-integer


class TestGenericSeries:
    def test_no_roots_matches_pure_exponential(self):
        a, c = 4.0, 0.6
        plain = generic_series(GeneralizedLambertEquation(a, c))
        offset = solve_offset_lambert(
            GeneralizedLambertEquation(a, c, (0.0,), (0.0,)))
        assert abs(plain.value - offset.value) <= 1e-12 * max(1.0, abs(plain.value))

    def test_single_root_terms_match_offset(self):
        a, c, b = 6.0, 0.2, 0.8
        gen = generic_series(GeneralizedLambertEquation(a, c, (0.0,), (b,)))
        off = solve_offset_lambert(GeneralizedLambertEquation(a, c, (0.0,), (b,)))
        assert len(gen.terms) >= 10 or gen.converged
        for tg, to in zip(gen.terms[:10], off.terms[:10]):
            assert tg == pytest.approx(to, rel=1e-12)

    def test_two_roots_against_newton(self):
        eq = GeneralizedLambertEquation(10.0, 0.3, (1.0, 2.0), (0.5, 0.25))
        sol = generic_series(eq)
        assert sol.residual <= 1e-10
        want = newton_solve(eq, 10.0)
        assert sol.value == pytest.approx(want, rel=1e-11)

    def test_lambert_reduction_zero_exponents(self):
        eq = GeneralizedLambertEquation(5.0, 1.2, (1.0, 3.0), (0.0, 0.0))
        sol = generic_series(eq)
        want = 5.0 + lambert_w(1.2 * math.exp(-5.0), PRINCIPAL)
        assert abs(sol.value - want) <= 1e-10

    def test_oracle_equivalence_random(self):
        rng = np.random.default_rng(41)
        done = 0
        while done < 50:
            a = float(rng.uniform(4.0, 15.0))
            n_roots = int(rng.integers(0, 3))
            roots = tuple(float(r) for r in rng.uniform(0.0, 4.0, size=n_roots))
            expos = tuple(float(e) for e in rng.uniform(-1.0, 1.5, size=n_roots))
            eq0 = GeneralizedLambertEquation(a, 1.0, roots, expos)
            f_a = abs(eq0.f(a))
            c = float(rng.uniform(-0.1, 0.1)) * a / f_a
            eq = GeneralizedLambertEquation(a, c, roots, expos)
            try:
                sol = generic_series(eq)
            except NoConvergence:
                continue
            want = newton_solve(eq, a)
            assert abs(sol.value - want) <= 1e-9 * max(1.0, abs(want))
            done += 1

    def test_term_decrease_in_convergence_region(self):
        eq = GeneralizedLambertEquation(9.0, 0.5, (1.5,), (0.7,))
        sol = generic_series(eq)
        mags = [abs(t) for t in sol.terms]
        tail = mags[2:]
        assert all(b < a for a, b in zip(tail, tail[1:]))

    def test_multinomial_normalization(self):
        # sum over compositions of multinomial coefficients equals n**(k-1)
        for n in range(1, 5):
            for k in range(1, 9):
                total = 0
                for comp in _compositions(k - 1, n):
                    m = math.factorial(k - 1)
                    for j in comp:
                        m //= math.factorial(j)
                    total += m
                assert total == n ** (k - 1)

    def test_expansion_point_on_singularity(self):
        with pytest.raises(ValueError):
            generic_series(GeneralizedLambertEquation(2.0, 0.1, (-2.0,), (0.5,)))

    def test_negative_offset_real_mode(self):
        eq = GeneralizedLambertEquation(2.0, 0.1, (-5.0,), (0.5,))
        with pytest.raises(NegativeBase):
            generic_series(eq)

    def test_complex_mode_realifies(self):
        eq = GeneralizedLambertEquation(8.0, 0.4, (1.0,), (0.6,))
        real = generic_series(eq)
        cx = generic_series(eq, complex_mode=True)
        assert cx.real_value() == pytest.approx(real.value, rel=1e-11)
