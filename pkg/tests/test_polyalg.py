"""Polynomial algebra, root finding and partial fractions."""

import cmath
import math

import numpy as np
import pytest

from rgflow.errors import RepeatedRoots
from rgflow.polyalg import (
    PartialFractionForm,
    Polynomial,
    RationalFunction,
    antiderivative_logform,
    partial_fractions,
    poly_divide,
    poly_roots,
)


def _assert_poly_equal(p, coeffs, tol=1e-12):
    got = list(p.coeffs) + [0.0] * (len(coeffs) - len(p.coeffs))
    assert got == pytest.approx(list(coeffs), abs=tol)


class TestPolyDivide:
    def test_simple_quadratic(self):
        q, r = poly_divide(Polynomial((1.0, 0.0, 1.0)), Polynomial((1.0, 1.0)))
        _assert_poly_equal(q, (-1.0, 1.0))
        _assert_poly_equal(r, (2.0,))

    def test_self_division(self):
        p = Polynomial((3.0, -2.0, 1.0, 4.0))
        q, r = poly_divide(p, p)
        _assert_poly_equal(q, (1.0,))
        assert r.is_zero

    def test_cubic_by_quadratic_multiply_back(self):
        num = Polynomial((0.0, 2.0, 0.0, 1.0))
        den = Polynomial((1.0, 1.0, 1.0))
        q, r = poly_divide(num, den)
        _assert_poly_equal(q, (-1.0, 1.0))
        _assert_poly_equal(r, (1.0, 2.0))
        back = q * den + r
        _assert_poly_equal(back, num.coeffs)

    def test_random_multiply_back(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            num = Polynomial(tuple(rng.uniform(-3, 3, size=rng.integers(1, 7))))
            den = Polynomial(tuple(rng.uniform(-3, 3, size=rng.integers(1, 4))))
            if den.is_zero:
                continue
            q, r = poly_divide(num, den)
            back = q * den + r
            scale = max(1.0, max(abs(c) for c in num.coeffs))
            for a, b in zip(back.coeffs, list(num.coeffs) + [0.0] * 5):
                assert abs(a - b) <= 1e-12 * scale
            assert r.degree < den.degree or r.is_zero


class TestPolyRoots:
    def test_factored_quadratic(self):
        rs = poly_roots(Polynomial((2.0, 3.0, 1.0)))
        assert rs.roots == pytest.approx([-2.0, -1.0])
        assert rs.multiplicities == (1, 1)

    def test_quadratic_closed_form_pair(self):
        # roots of y**2 + a3 y + a4 are -(a3 +- sqrt(a3**2 - 4 a4))/2
        for a3, a4 in [(3.0, 1.0), (-2.0, -5.0), (1.0, 10.0)]:
            rs = poly_roots(Polynomial((a4, a3, 1.0)))
            disc = cmath.sqrt(a3 * a3 - 4.0 * a4)
            expect = sorted([(-a3 + disc) / 2, (-a3 - disc) / 2],
                            key=lambda z: (z.real, z.imag))
            for got, want in zip(rs.roots, expect):
                assert abs(got - want) < 1e-12 * max(1.0, abs(want))

    def test_cubic_by_substitution(self):
        p = Polynomial((-6.0, 11.0, -6.0, 1.0))
        rs = poly_roots(p)
        assert rs.roots == pytest.approx([1.0, 2.0, 3.0], abs=1e-9)
        for r in rs.roots:
            assert abs(p(r)) <= 1e-10 * sum(
                abs(c) * max(1.0, abs(r)) ** k for k, c in enumerate(p.coeffs))

    def test_double_root_multiplicity(self):
        rs = poly_roots(Polynomial((1.0, 2.0, 1.0)))
        assert sum(rs.multiplicities) == 2
        assert rs.roots[0] == pytest.approx(-1.0, abs=1e-6)

    def test_residual_property_random(self):
        rng = np.random.default_rng(11)
        for _ in range(60):
            deg = int(rng.integers(1, 7))
            coeffs = list(rng.uniform(-4, 4, size=deg + 1))
            if abs(coeffs[-1]) < 0.1:
                coeffs[-1] = 1.0
            p = Polynomial(tuple(coeffs))
            rs = poly_roots(p)
            assert sum(rs.multiplicities) == p.degree
            for r in rs.roots:
                bound = 1e-10 * sum(
                    abs(c) * max(1.0, abs(r)) ** k for k, c in enumerate(p.coeffs))
                assert abs(p(r)) <= bound

    def test_sorted_deterministic(self):
        p = Polynomial((-1.0, 0.0, 0.0, 0.0, 1.0))  # roots: 4th roots of unity
        rs = poly_roots(p)
        order = [(z.real, z.imag) for z in rs.roots]
        assert order == sorted(order)


def _grid_avoiding(points, poles, pad=0.3):
    out = []
    for y in points:
        if all(abs(y - p) > pad for p in poles):
            out.append(y)
    return out


class TestPartialFractions:
    def test_coverup_two_poles(self):
        r = RationalFunction(Polynomial((1.0,)), Polynomial((2.0, 3.0, 1.0)))
        form = partial_fractions(r)
        assert form.poly_part.is_zero
        terms = sorted(form.log_terms, key=lambda t: t[0].real)
        assert terms[0][0] == pytest.approx(1.0)
        assert terms[0][1] == pytest.approx(1.0)
        assert terms[1][0] == pytest.approx(2.0)
        assert terms[1][1] == pytest.approx(-1.0)
        assert form.pole_terms == ()

    def test_linear_over_linear(self):
        a1, a2 = 1.7, -0.4
        r = RationalFunction(Polynomial((a2, 1.0)), Polynomial((a1, 1.0)))
        form = partial_fractions(r)
        _assert_poly_equal(form.poly_part, (1.0,))
        ((root, w),) = form.log_terms
        assert root == pytest.approx(a1)
        assert w == pytest.approx(a2 - a1)

    def test_origin_pole_identity(self):
        # 1/(y (y+a)) = (1/a)(1/y - 1/(y+a))
        a = 2.5
        r = RationalFunction(Polynomial((1.0,)), Polynomial((a, 1.0)))
        form = partial_fractions(r, pole_at_zero_order=1)
        terms = {round(t[0].real, 9): t[1] for t in form.log_terms}
        assert terms[0.0] == pytest.approx(1.0 / a)
        assert terms[a] == pytest.approx(-1.0 / a)

    def test_repeated_roots_raise(self):
        r = RationalFunction(Polynomial((1.0,)), Polynomial((1.0, 2.0, 1.0)))
        with pytest.raises(RepeatedRoots):
            partial_fractions(r)

    def test_zero_declared_but_denominator_vanishes(self):
        r = RationalFunction(Polynomial((1.0,)), Polynomial((0.0, 1.0)))
        with pytest.raises(RepeatedRoots):
            partial_fractions(r, pole_at_zero_order=1)

    def test_reconstruction_random(self):
        rng = np.random.default_rng(23)
        done = 0
        while done < 100:
            n_roots = int(rng.integers(1, 6))
            roots = rng.uniform(-4, 4, size=n_roots)
            if n_roots > 1 and np.min(np.diff(np.sort(roots))) < 0.2:
                continue
            j = int(rng.integers(0, 3))
            if j and np.min(np.abs(roots)) < 0.2:
                continue
            den = Polynomial((1.0,))
            for rt in roots:
                den = den * Polynomial((-rt, 1.0))
            num = Polynomial(tuple(rng.uniform(-3, 3, size=int(rng.integers(1, n_roots + j + 2)))))
            if num.is_zero:
                continue
            r = RationalFunction(num, den)
            form = partial_fractions(r, pole_at_zero_order=j)
            ys = _grid_avoiding(np.linspace(-8, 8, 100), list(roots) + [0.0])
            for y in ys:
                want = num(y) / (y**j * den(y)) if j else r(y)
                got = form.recombined(y)
                assert abs(got - want) <= 1e-10 * max(1.0, abs(want)), (roots, j, y)
            done += 1


class TestAntiderivative:
    def test_constant(self):
        form = antiderivative_logform(
            RationalFunction(Polynomial((1.0,)), Polynomial((1.0,))))
        assert form.antiderivative(3.0) == pytest.approx(3.0)
        assert form.log_terms == () and form.pole_terms == ()

    def test_three_loop_integrand(self):
        # (y+a2)/(y+a1) integrates to y + (a2-a1) ln(y+a1)
        a1, a2 = 0.8, 2.1
        form = antiderivative_logform(
            RationalFunction(Polynomial((a2, 1.0)), Polynomial((a1, 1.0))))
        for y in (1.0, 3.0, 10.0):
            want = y + (a2 - a1) * math.log(y + a1)
            assert form.antiderivative_real(y) == pytest.approx(want, rel=1e-13)

    def test_four_loop_integrand(self):
        # (y^2+a2 y+a3)/(y (y+a1)) integrates to
        # y + (a2-a1-a3/a1) ln(y+a1) + (a3/a1) ln y
        a1, a2, a3 = 1.5, -0.7, 2.0
        num = Polynomial((a3, a2, 1.0))
        den = Polynomial((a1, 1.0))
        form = antiderivative_logform(RationalFunction(num, den), 1)
        for y in (0.5, 2.0, 7.0):
            want = (y + (a2 - a1 - a3 / a1) * math.log(y + a1)
                    + (a3 / a1) * math.log(y))
            assert form.antiderivative_real(y) == pytest.approx(want, rel=1e-13)

    def test_derivative_matches_integrand(self):
        rng = np.random.default_rng(31)
        done = 0
        while done < 40:
            n_roots = int(rng.integers(1, 5))
            roots = rng.uniform(-4, 4, size=n_roots)
            if n_roots > 1 and np.min(np.diff(np.sort(roots))) < 0.25:
                continue
            j = int(rng.integers(0, 3))
            if j and np.min(np.abs(roots)) < 0.25:
                continue
            den = Polynomial((1.0,))
            for rt in roots:
                den = den * Polynomial((-rt, 1.0))
            num = Polynomial(tuple(rng.uniform(-3, 3, size=int(rng.integers(1, n_roots + j + 2)))))
            if num.is_zero:
                continue
            form = antiderivative_logform(RationalFunction(num, den), j)
            ys = _grid_avoiding(np.linspace(-7.7, 7.9, 53), list(roots) + [0.0],
                                pad=0.4)[:50]
            for y in ys:
                h = 1e-6 * max(1.0, abs(y))
                d_num = (form.antiderivative(y + h).real
                         - form.antiderivative(y - h).real) / (2 * h)
                want = num(y) / (y**j * den(y)) if j else num(y) / den(y)
                # central difference carries O(h^2 f''') error; scale against
                # the integrand magnitude
                assert abs(d_num - want) <= 5e-8 * max(1.0, abs(want)) + 1e-6, (
                    roots, j, y)
            done += 1

    def test_conjugate_symmetry_real_axis(self):
        # irreducible quadratic denominator: complex-conjugate log terms
        den = Polynomial((5.0, 2.0, 1.0))  # roots -1 +- 2i
        num = Polynomial((1.0, 1.0))
        form = antiderivative_logform(RationalFunction(num, den))
        for y in np.linspace(-6, 6, 25):
            val = form.antiderivative(float(y))
            assert abs(val.imag) <= 1e-12 * max(1.0, abs(val))

    def test_complex_pair_derivative(self):
        den = Polynomial((13.0, 4.0, 1.0))  # roots -2 +- 3i
        num = Polynomial((0.0, 1.0))
        form = antiderivative_logform(RationalFunction(num, den))
        for y in (0.5, 1.0, 4.0):
            h = 1e-6
            d = (form.antiderivative(y + h).real
                 - form.antiderivative(y - h).real) / (2 * h)
            assert d == pytest.approx(num(y) / den(y), rel=1e-7, abs=1e-9)
