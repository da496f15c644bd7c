#!/usr/bin/env python3
"""
Tests for the numeric oracle
"""
import sys
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest
import sympy

# Add src to path
sys.path.append(str(Path(__file__).parent.parent))

from src.kernel import Expr, LinearArg, SumOp, ZSum, den, num, s_sum, theta
from src.kernel.errors import DivergentEvaluation, SingularArgument, UnassignedSymbol
from src.kernel.linear import INF
from src.oracle import Assignment, direct_sum, eval_numeric, eval_with_bound

N = LinearArg.n()
J1 = LinearArg.index('j1')


def test_exact_finite_values():
    """Finite sums with rational data stay exact"""
    print("Testing exact evaluation...")
    assert eval_numeric(s_sum(N, (1,), (1,)), Assignment(index_values={'n': 3})) == Fraction(11, 6)
    total = Expr.atom(SumOp('j1', LinearArg.const(1), N)) * num(J1)
    assert direct_sum(total, ['j1'], Assignment(index_values={'n': 4})) == 10
    assert eval_numeric(theta(N.shift(-1)), Assignment(index_values={'n': 0})) == 0
    alternating = s_sum(N, (1, 2), (-1, sympy.Rational(1, 2)))
    value = eval_numeric(alternating, Assignment(index_values={'n': 2}))
    # -1/1 * (1/2) + 1/2 * (1/2 + 1/16)
    assert value == Fraction(-7, 32)
    print("✅ Exact values")


def test_constants_and_infinite_sums():
    """z2 and polylogarithms come from mpmath"""
    print("Testing constants...")
    assignment = Assignment()
    z2 = eval_numeric(Expr.symbol('z2'), assignment)
    li2 = eval_numeric(s_sum(INF, (2,), (sympy.Rational(1, 2),)), assignment)
    double = eval_numeric(s_sum(INF, (2, 1), (1, 1)), assignment)
    with mpmath.workdps(40):
        assert abs(z2 - mpmath.pi ** 2 / 6) < mpmath.mpf('1e-28')
        assert abs(li2 - mpmath.polylog(2, mpmath.mpf(1) / 2)) < mpmath.mpf('1e-28')
        assert abs(double - 2 * mpmath.zeta(3)) < mpmath.mpf('1e-20')
    print("✅ Constants match mpmath")


def test_tail_bound_covers_truncation():
    """The reported bound is at least the true remainder"""
    print("Testing tail bounds...")
    x = sympy.Rational(1, 2)
    expr = s_sum(INF, (1, 1), (x, x))
    value, bound = eval_with_bound(expr, Assignment(truncation_terms=40))
    with mpmath.workdps(40):
        exact, inner = mpmath.mpf(0), mpmath.mpf(0)
        for i in range(1, 400):
            step = mpmath.mpf(1) / (2 ** i * i)
            inner += step
            exact += step * inner
    assert bound > 0
    assert abs(value - exact) <= bound
    print(f"  remainder bound {mpmath.nstr(bound, 5)}")
    print("✅ Tail bound holds")


def test_unit_leading_sums_at_infinity():
    """S(inf;2,1,1) = 3 zeta(4); leading argument 1 with inner sums keeps an honest bound"""
    print("Testing sums at infinity with leading argument 1...")
    one = sympy.Integer(1)
    harmonic = eval_numeric(s_sum(INF, (2, 1, 1), (1, 1, 1)), Assignment())
    with mpmath.workdps(40):
        assert abs(harmonic - 3 * mpmath.zeta(4)) < mpmath.mpf('1e-25')

    strict, bound = eval_with_bound(Expr.atom(ZSum(INF, (2, 1, 1), (one, one, one))),
                                    Assignment(truncation_terms=500))
    with mpmath.workdps(40):
        assert 0 < bound < mpmath.mpf('1e-1')
        assert abs(strict - mpmath.zeta(4)) <= bound

    half = sympy.Rational(1, 2)
    value, bound = eval_with_bound(s_sum(INF, (2, 1), (1, half)), Assignment(truncation_terms=40))
    with mpmath.workdps(40):
        # S(i;1;1/2) = log 2 - sum_{k>i} 2^-k/k, summed over i first
        exact = mpmath.log(2) * mpmath.zeta(2)
        inner = mpmath.mpf(0)
        for k in range(2, 200):
            inner += mpmath.mpf(1) / (k - 1) ** 2
            exact -= inner / (k * mpmath.mpf(2) ** k)
        assert abs(value - exact) <= bound + mpmath.mpf('1e-28')

    with pytest.raises(DivergentEvaluation):
        eval_numeric(s_sum(INF, (2, 1, 1), (1, 1, 2)), Assignment())
    print("✅ Unit-leading sums evaluated with a valid bound")


def test_ep_dependent_values():
    """ep enters through its assigned value"""
    expr = den(J1.shift(1)) * Expr.eps(1) + Expr.one()
    assignment = Assignment(index_values={'j1': 1}, eps_value=Fraction(1, 10))
    assert eval_numeric(expr, assignment) == Fraction(21, 20)


def test_errors():
    """Missing values, divergences and poles are reported"""
    print("Testing oracle errors...")
    with pytest.raises(UnassignedSymbol):
        eval_numeric(Expr.symbol('x1'), Assignment())
    with pytest.raises(UnassignedSymbol):
        eval_numeric(s_sum(N, (1,), (1,)), Assignment())
    with pytest.raises(DivergentEvaluation):
        eval_numeric(Expr.symbol('sinf'), Assignment())
    with pytest.raises(DivergentEvaluation):
        eval_numeric(s_sum(INF, (2,), (3,)), Assignment())
    with pytest.raises(SingularArgument):
        eval_numeric(den(J1), Assignment(index_values={'j1': 0}))
    with pytest.raises(ValueError):
        Assignment(precision=10)
    with pytest.raises(ValueError):
        direct_sum(den(N), ['j1'], Assignment(index_values={'n': 1}))
    print("✅ Errors raised")
