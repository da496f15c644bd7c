#!/usr/bin/env python3
"""
Tests for the hypergeometric series builders and their ep-expansion
"""
import sys
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest
import sympy

# Add src to path
sys.path.append(str(Path(__file__).parent.parent))

from src.kernel import Expr, GammaFactor, SumOp
from src.kernel.errors import SingularArgument, UnsupportedKind
from src.oracle import Assignment, eval_numeric
from src.services.hypergeometric_service import (
    HypergeometricService, HypergeomSpec, as_param, pole_depth,
)

x = sympy.Symbol('x')
VALUES = {'a': 1, 'b': 2, 'c': 1, 'x': Fraction(1, 2)}


@pytest.fixture
def service():
    return HypergeometricService()


def test_parameters():
    """Parameters are linear in ep and free of indices"""
    assert as_param('1-c*ep').offset == 1
    assert as_param(3).is_constant
    with pytest.raises(ValueError):
        as_param('j1+1')


def test_trivial_and_terminating_series(service):
    """2F1(0,b;c;x) = 1 and 2F1(-2,1;1;x) = (1-x)^2"""
    print("Testing terminating series...")
    trivial = service.expand_in_eps(HypergeomSpec.pfq(['0', 'b*ep'], ['1-c*ep'], x), 2)
    assert trivial.coefficient(0) == Expr.one()
    assert trivial.coefficient(1).is_zero()

    poly = service.expand_in_eps(HypergeomSpec.pfq(['-2', '1'], ['1'], x), 1)
    value = eval_numeric(poly.coefficient(0), Assignment(symbol_values={'x': Fraction(1, 3)}))
    assert value == Fraction(4, 9)
    print("✅ Terminating series are polynomials")


def test_2f1_expansion_coefficients(service):
    """2F1(a ep, b ep; 1 - c ep; x) = 1 + a b ep^2 Li2(x) + O(ep^3)"""
    print("Testing 2F1 expansion...")
    series = service.expand_in_eps(HypergeomSpec.pfq(['a*ep', 'b*ep'], ['1-c*ep'], x), 3)
    assert series.coefficient(0) == Expr.one()
    assert series.coefficient(1).is_zero()
    second = series.coefficient(2)
    assert not any(t.sum_ops() for t in second.terms)
    value = eval_numeric(second, Assignment(symbol_values=VALUES))
    with mpmath.workdps(40):
        expected = VALUES['a'] * VALUES['b'] * mpmath.polylog(2, mpmath.mpf(1) / 2)
        assert abs(value - expected) < mpmath.mpf('1e-20')
    print("✅ ep^2 coefficient is a*b*Li2(x)")


def test_2f1_matches_mpmath(service):
    """Truncated series agrees with hyp2f1 at small ep"""
    print("Testing 2F1 against mpmath...")
    series = service.expand_in_eps(HypergeomSpec.pfq(['a*ep', 'b*ep'], ['1-c*ep'], x), 4)
    eps = Fraction(1, 1000)
    value = eval_numeric(series.to_expr(), Assignment(symbol_values=VALUES, eps_value=eps))
    e = mpmath.mpf(1) / 1000
    expected = mpmath.hyp2f1(VALUES['a'] * e, VALUES['b'] * e, 1 - VALUES['c'] * e, mpmath.mpf(1) / 2)
    assert abs(value - expected) < mpmath.mpf('1e-8')
    print(f"  2F1 = {mpmath.nstr(expected, 20)}")
    print("✅ Series agrees with hyp2f1")


def test_appell_f2_leading_order(service):
    """F2 with ep-proportional numerator parameters starts at 1"""
    spec = HypergeomSpec.appell_f2('a*ep', 'b*ep', 'b*ep', 1, 1, x, sympy.Symbol('y'))
    assert spec.sum_spec.indices == ['j2', 'j1']
    built = service.build_series(spec)
    assert any(op.index == 'j2' for t in built.terms for op in t.sum_ops())
    series = service.expand_in_eps(spec, 1)
    assert series.coefficient(0) == Expr.one()


def test_triangle_series(service):
    """The triangle builds a Gamma-weighted single sum with a pole at ep = 0"""
    spec = HypergeomSpec.triangle(1, 1, 1, 1, x)
    assert spec.label == 'Tri(1,1,1,1)'
    built = service.build_series(spec)
    assert built.has_atom_type(GammaFactor)
    assert built.has_atom_type(SumOp)
    assert pole_depth(built) >= 1
    with pytest.raises(ValueError):
        HypergeomSpec.triangle(1, 0, 1, 1, x)


def test_invalid_specifications(service):
    with pytest.raises(UnsupportedKind):
        HypergeomSpec('Bessel')
    with pytest.raises(ValueError):
        HypergeomSpec('PFQ', args=())
    with pytest.raises(SingularArgument):
        service.build_series(HypergeomSpec.pfq(['a*ep'], ['-1'], x))
    with pytest.raises(ValueError):
        service.expand_in_eps(HypergeomSpec.pfq(['a*ep'], ['1'], x), 0)


def test_appell_f2_second_order(service):
    """F2(a ep; b ep, b ep; 1, 1; x, y) = 1 + a b ep^2 (Li2(x) + Li2(y)) + O(ep^3)"""
    print("Testing Appell F2 through ep^2...")
    y = sympy.Symbol('y')
    spec = HypergeomSpec.appell_f2('a*ep', 'b*ep', 'b*ep', 1, 1, x, y)
    series = service.expand_in_eps(spec, 3)
    assert series.coefficient(0) == Expr.one()
    assert series.coefficient(1).is_zero()
    values = {**VALUES, 'y': Fraction(1, 3)}
    value = eval_numeric(series.coefficient(2), Assignment(symbol_values=values))
    with mpmath.workdps(40):
        li2 = mpmath.polylog(2, mpmath.mpf(1) / 2) + mpmath.polylog(2, mpmath.mpf(1) / 3)
        expected = values['a'] * values['b'] * li2
        assert abs(value - expected) < mpmath.mpf('1e-20')
    print("✅ ep^2 coefficient is a*b*(Li2(x) + Li2(y))")


def triangle_direct(m, nus, x, e, terms=3000):
    """The triangle's two-bracket series summed term by term, MS-bar normalized"""
    nu1, nu2, nu3 = nus
    nu13, nu23, nu123 = nu1 + nu3, nu2 + nu3, nu1 + nu2 + nu3
    g, rg = mpmath.gamma, mpmath.rgamma
    prefactor = g(e - m + nu23) * g(1 - e + m - nu23) * g(m - e - nu13) \
        * rg(nu1) * rg(nu2) * rg(nu3) * rg(2 * m - 2 * e - nu123)
    total = mpmath.mpf(0)
    for i in range(terms):
        first = x ** (m - e - nu23) * g(i + nu1) * g(i - e + m - nu2) * rg(i + 1 + m - e - nu23)
        second = g(i + nu3) * g(i - m + e + nu123) * rg(i + 1 - m + e + nu23)
        total += x ** i / mpmath.factorial(i) * (first - second)
    # every Gamma(c + a ep) carries exp(euler a ep); the net a is +1 here
    return mpmath.exp(mpmath.euler * e) * prefactor * total


def test_triangle_matches_direct_series(service):
    """Tri(1,1,1,1; 1/3) through ep^0; the remainder shrinks linearly with ep"""
    print("Testing the triangle expansion numerically...")
    third = sympy.Rational(1, 3)
    series = service.expand_in_eps(HypergeomSpec.triangle(1, 1, 1, 1, third), 1)
    assert series.leading_order() == -2
    expanded = series.to_expr(marker=False)
    errors = []
    for eps in (Fraction(1, 100), Fraction(1, 1000)):
        value = eval_numeric(expanded, Assignment(eps_value=eps))
        with mpmath.workdps(40):
            if isinstance(value, Fraction):
                value = mpmath.mpf(value.numerator) / value.denominator
            e = mpmath.mpf(eps.numerator) / eps.denominator
            direct = triangle_direct(1, (1, 1, 1), mpmath.mpf(1) / 3, e)
            errors.append(abs(value - direct))
            print(f"  ep = {eps}: remainder {mpmath.nstr(errors[-1], 5)}")
    assert errors[1] < errors[0] / 5
    assert errors[1] < mpmath.mpf('0.1')
    print("✅ Triangle agrees with its series representation")
