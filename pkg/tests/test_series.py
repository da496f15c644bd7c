#!/usr/bin/env python3
"""
Tests for truncated ep-series and the expansion of Gamma, den and pow factors
"""
import sys
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest
import sympy

# Add src to path
sys.path.append(str(Path(__file__).parent.parent))

from src.kernel import EPS, Expr, FacFactor, GammaFactor, LinearArg, den, s_sum
from src.kernel.errors import InsufficientOrder, PoleAtZero
from src.kernel.linear import INF
from src.kernel.printer import format_expr
from src.oracle import Assignment, eval_numeric
from src.series import (
    EpsSeries, expand_den, expand_expr, expand_gamma_neg, expand_gamma_pos,
    expand_ms_bar_gamma, expand_pow_eps,
)
from src.summer import Summer
from src.utils.logging_utils import summation_logger

N = LinearArg.n()
J1 = LinearArg.index('j1')
ONE = Expr.one()


def as_mpf(value):
    if isinstance(value, Fraction):
        return mpmath.mpf(value.numerator) / value.denominator
    return value


def test_series_arithmetic():
    """Products respect the truncation of both factors"""
    print("Testing series arithmetic...")
    a = EpsSeries({0: ONE, 1: ONE}, trunc_order=3)
    square = a * a
    assert square.coefficient(0) == ONE
    assert square.coefficient(1) == Expr.scalar(2)
    assert square.coefficient(2) == ONE
    assert square.trunc_order == 3
    with pytest.raises(InsufficientOrder):
        square.coefficient(3)

    pole = EpsSeries({-1: ONE}, trunc_order=2)
    product = pole * a.truncate(2)
    assert product.trunc_order == 1
    assert product.coefficient(-1) == ONE
    assert product.coefficient(0) == ONE
    print("✅ Truncation propagates through products")


def test_reciprocal_and_exp():
    """1/(1+ep) and exp(ep) to a few orders"""
    print("Testing reciprocal and exp...")
    inverse = EpsSeries({0: ONE, 1: ONE}, trunc_order=4).reciprocal()
    assert [inverse.coefficient(k) for k in range(4)] == \
        [ONE, -ONE, ONE, -ONE]
    exponential = EpsSeries({1: ONE}, 1, 4).exp()
    assert exponential.coefficient(3) == Expr.scalar(sympy.Rational(1, 6))
    print("✅ reciprocal and exp correct")


def test_request_flags_lost_orders():
    """Asking for more orders than are known sets the lost flag"""
    series = EpsSeries({0: ONE}, trunc_order=2)
    assert series.request(3).lost
    assert not series.request(1).lost
    assert series.request(1).trunc_order == 1


def test_to_expr_carries_order_marker():
    series = EpsSeries({0: ONE, 1: Expr.scalar(3)}, trunc_order=2)
    expr = series.to_expr()
    assert expr.coefficient_of_eps(1) == Expr.scalar(3)
    assert 'order(2)' in str(expr)
    assert 'order' not in str(series.to_expr(marker=False))


def test_gamma_positive_argument():
    """Gamma(n+1+ep)/Gamma(1+ep) = n!(1 + ep S1 + ep^2 (S1^2 - S2)/2 + ...)"""
    print("Testing Gamma expansion at positive arguments...")
    series = expand_gamma_pos(N, 1, 3)
    fac = Expr.atom(FacFactor(N))
    s1 = s_sum(N, (1,), (1,))
    s2 = s_sum(N, (2,), (1,))
    assert series.coefficient(0) == fac
    assert series.coefficient(1) == fac * s1
    assert series.coefficient(2) == fac * (s1 * s1 - s2) * sympy.Rational(1, 2)
    print("✅ Gamma(n+1+ep) expanded")


def test_gamma_negative_argument():
    """Gamma(ep)/Gamma(1+ep) is exactly 1/ep"""
    print("Testing Gamma expansion at a pole...")
    series = expand_gamma_neg(LinearArg.const(1), 1, 2)
    assert series.leading_order() == -1
    assert series.coefficient(-1) == ONE
    assert series.coefficient(0).is_zero()
    assert series.coefficient(1).is_zero()
    print("✅ Gamma(ep) has a simple pole with residue 1")


def test_ms_bar_gamma():
    """Gamma(1+ep) without Euler's constant starts at ep^2 z2/2"""
    series = expand_ms_bar_gamma(1, 4)
    assert series.coefficient(0) == ONE
    assert series.coefficient(1).is_zero()
    assert series.coefficient(2) == s_sum(INF, (2,), (1,)) * sympy.Rational(1, 2)


def test_den_expansion():
    """1/(j1 + 2 ep) = den(j1) - 2 ep den(j1)^2 + 4 ep^2 den(j1)^3"""
    series = expand_den(J1 + LinearArg.eps(2), 3)
    assert series.coefficient(0) == den(J1)
    assert series.coefficient(1) == den(J1, 2) * -2
    assert series.coefficient(2) == den(J1, 3) * 4
    with pytest.raises(PoleAtZero):
        expand_den(LinearArg.eps(1), 2)


def test_expansion_matches_gamma_numerically():
    """Expanded Gamma(n+1+ep) agrees with the direct MS-bar value at small ep"""
    print("Testing Gamma expansion numerically...")
    gamma = Expr.atom(GammaFactor(N.shift(1) + LinearArg.eps(1)))
    expanded = expand_expr(gamma, 5).to_expr(marker=False)
    assert not expanded.has_atom_type(GammaFactor)
    assignment = Assignment(index_values={'n': 3}, eps_value=Fraction(1, 100))
    direct = eval_numeric(gamma, assignment)
    series = eval_numeric(expanded, assignment)
    assert abs(direct - as_mpf(series)) < mpmath.mpf('1e-7')
    print(f"  Gamma(4.01)*exp(0.01*euler) = {mpmath.nstr(direct, 15)}")
    print("✅ Series agrees with the direct value")


def test_eps_atom_is_kept_in_series():
    series = EpsSeries.exact(Expr.eps(2) * 5 + ONE)
    assert series.coefficient(2) == Expr.scalar(5)
    assert series.trunc_order is None
    assert EPS not in [a for c in series.coeffs.values() for t in c.terms for a, _ in t.atoms]


def _values(series: EpsSeries, orders, **indices):
    assignment = Assignment(index_values=indices)
    return [eval_numeric(series.coefficient(k), assignment) for k in orders]


def test_gamma_recurrence():
    """Gamma(n+2+ep) = (n+1+ep) Gamma(n+1+ep), order by order for n = 0..5"""
    print("Testing the Gamma recurrence...")
    for n in range(6):
        above = expand_gamma_pos(LinearArg.const(n + 1), 1, 6)
        below = expand_gamma_pos(LinearArg.const(n), 1, 6) * EpsSeries({0: Expr.scalar(n + 1), 1: ONE})
        assert below.trunc_order == 6
        assert _values(above, range(6)) == _values(below, range(6)), f"n={n}"
    print("✅ Recurrence holds through ep^5")


def test_gamma_at_negative_integers():
    """Gamma(1-n+ep)/Gamma(1+ep) = 1/(ep (ep-1) ... (ep-n+1))"""
    # n = 2: -1/ep * (1 + ep + ep^2 + ...)
    assert _values(expand_gamma_neg(LinearArg.const(2), 1, 2), (-1, 0, 1)) == [-1, -1, -1]
    # n = 3: 1/(2 ep) * 1/((1-ep)(1-ep/2))
    expected = [Fraction(1, 2), Fraction(3, 4), Fraction(7, 8)]
    assert _values(expand_gamma_neg(LinearArg.const(3), 1, 2), (-1, 0, 1)) == expected


def test_gamma_ratio_to_sixth_order():
    """Gamma(n+1+ep)/Gamma(1+ep) at ep = 1e-4 within 10 ep^6"""
    print("Testing Gamma ratios at small ep...")
    eps = Fraction(1, 10000)
    series = expand_gamma_pos(N, 1, 6).to_expr(marker=False)
    for n in (3, 8):
        value = eval_numeric(series, Assignment(index_values={'n': n}, eps_value=eps))
        with mpmath.workdps(40):
            e = mpmath.mpf(1) / 10000
            direct = mpmath.gamma(n + 1 + e) / mpmath.gamma(1 + e)
            assert abs(as_mpf(value) - direct) <= 10 * e ** 6 * abs(direct), f"n={n}"
    print("✅ Truncation error below 10 ep^6")


def test_pow_eps_expansion():
    """x^(a ep) = exp(-a ep S(inf;1;1-x)) agrees with mpmath"""
    assert expand_pow_eps(1, 3, 4) == EpsSeries.exact(1)
    series = expand_pow_eps(sympy.Rational(1, 2), 2, 5)
    assert series.trunc_order == 5
    value = eval_numeric(series.to_expr(marker=False), Assignment(eps_value=Fraction(1, 1000)))
    with mpmath.workdps(40):
        expected = mpmath.power(mpmath.mpf(1) / 2, mpmath.mpf(2) / 1000)
        assert abs(value - expected) < mpmath.mpf('1e-14')


def test_pole_prefactor_marks_lost_orders():
    """ep^-2 Gamma(1+ep) with max order 2 keeps only ep^-2 and ep^-1 and says so"""
    print("Testing truncation with a pole prefactor...")
    expr = Expr.eps(-2) * Expr.atom(GammaFactor(LinearArg.const(1) + LinearArg.eps(1)))
    with summation_logger.summation_run('expand', len(expr)) as log:
        result = Summer(order=2).expand_eps(expr)
    assert log.lost
    assert log.trunc_order == 2
    assert result.coefficient_of_eps(-2) == ONE
    text = format_expr(result, 'f')
    assert text.splitlines()[-1].strip() == '+ order(0)'
    assert 'ep^0' not in text.replace('order(0)', '')
    print(text)
    print("✅ Lost orders flagged")
