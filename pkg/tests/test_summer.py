#!/usr/bin/env python3
"""
Tests for the summation algorithms, checked against direct summation
"""
import sys
from fractions import Fraction
from pathlib import Path

import pytest
import sympy

# Add src to path
sys.path.append(str(Path(__file__).parent.parent))

from src.cli.check import run_check
from src.kernel import (
    Bino, Expr, LinFactor, LinearArg, Pow, SSum, SumOp, den, num, pow_,
)
from src.kernel.errors import InfiniteConjugation, InfiniteFlip, NegativePower
from src.kernel.linear import INF
from src.oracle import Assignment, direct_sum, eval_numeric
from src.summer import (
    SumSpec, alg_a, alg_b, alg_c, alg_d, do_sum, flip_index, power_sum, split_den, sum_pos_pow,
)

N = LinearArg.n()
J1 = LinearArg.index('j1')
ONE = LinearArg.const(1)
x1, x2, x3 = sympy.symbols('x1 x2 x3')
SYMBOLS = {'x1': Fraction(1, 2), 'x2': Fraction(1, 3), 'x3': Fraction(1, 5)}


def summed(*atoms, coeff=1, upper=N) -> Expr:
    return Expr.product(coeff, [(SumOp('j1', ONE, upper), 1)] + list(atoms))


def assert_closed_form(original: Expr, result: Expr, upto: int = 6, symbols=None):
    """No sums left and the same value as literal summation for n = 1..upto"""
    assert not any(t.sum_ops() for t in result.terms), str(result)
    for n in range(1, upto + 1):
        assignment = Assignment(index_values={'n': n}, symbol_values=symbols or {})
        expected = direct_sum(original, ['j1'], assignment)
        found = eval_numeric(result, assignment)
        assert found == expected, f"n={n}: expected {expected}, got {found}"


def test_split_den():
    """1/(j1 (j1+1)) = 1/j1 - 1/(j1+1)"""
    print("Testing partial fractions...")
    term = (den(J1) * den(J1.shift(1))).terms[0]
    assert split_den(term, 'j1') == den(J1) - den(J1.shift(1))

    squared = (den(J1, 2) * den(J1.shift(2))).terms[0]
    split = split_den(squared, 'j1')
    for j in range(1, 6):
        assignment = Assignment(index_values={'j1': j})
        assert eval_numeric(split, assignment) == Fraction(1, j * j * (j + 2))
    assert split_den(den(J1).terms[0], 'j1') is None
    print("✅ Partial fractions verified")


def test_power_sums():
    """Faulhaber and geometric closed forms"""
    print("Testing power sums...")
    squares = power_sum(2, 1, N)
    half = sympy.Rational(1, 2)
    weighted = power_sum(1, half, N)
    for n in range(0, 7):
        assignment = Assignment(index_values={'n': n})
        assert eval_numeric(squares, assignment) == sum(Fraction(i * i) for i in range(1, n + 1))
        assert eval_numeric(weighted, assignment) == \
            sum(Fraction(i, 2 ** i) for i in range(1, n + 1))
    assert power_sum(3, half, INF) == Expr.scalar(26)
    with pytest.raises(ValueError):
        power_sum(-1, 1, N)
    print("✅ Power sums verified")


def test_harmonic_number():
    """sum_{j=1}^n 1/j gives S(n;1;1), H_6 = 49/20"""
    print("Testing the harmonic sum...")
    result = do_sum(summed((LinFactor(J1), -1)), SumSpec(1))
    assert result.has_atom_type(SSum)
    assert eval_numeric(result, Assignment(index_values={'n': 6})) == Fraction(49, 20)
    print("✅ H_6 = 49/20")


def test_algorithm_a():
    """x^j/j * S(j;1;1) and a shifted S-sum argument"""
    print("Testing algorithm A...")
    half = sympy.Rational(1, 2)
    original = summed((Pow(half, J1), 1), (LinFactor(J1), -1), (SSum(J1, (1,), (1,)), 1))
    assert_closed_form(original, alg_a(original, 'j1'))

    shifted = summed((Pow(x1, J1), 1), (LinFactor(J1.shift(2)), -2),
                     (SSum(J1.shift(1), (1,), (x2,)), 1))
    assert_closed_form(shifted, do_sum(shifted, SumSpec(1)), symbols=SYMBOLS)
    print("✅ Algorithm A verified")


def test_algorithm_b():
    """Convolution 1/j * 1/(n-j+1) * S(n-j+1;2;1)"""
    print("Testing algorithm B...")
    original = summed((LinFactor(J1), -1), (LinFactor(N - J1 + 1), -1),
                      (SSum(N - J1 + 1, (2,), (1,)), 1))
    assert_closed_form(original, alg_b(original, 'j1'))
    print("✅ Algorithm B verified")


def test_algorithm_c():
    """sum_j bino(n,j) (-1)^j / j = -S(n;1;1)"""
    print("Testing algorithm C...")
    original = summed((Bino(N, J1), 1), (Pow(-1, J1), 1), (LinFactor(J1), -1))
    result = alg_c(original, 'j1')
    assert_closed_form(original, result)
    for n in range(1, 6):
        harmonic = sum(Fraction(1, k) for k in range(1, n + 1))
        assert eval_numeric(result, Assignment(index_values={'n': n})) == -harmonic
    print("✅ Algorithm C verified")


def test_algorithm_d():
    """Binomial convolution x^j y^(n-j) / (j (n-j))"""
    print("Testing algorithm D...")
    original = summed((Bino(N, J1), 1), (Pow(x1, J1), 1), (Pow(x2, N - J1), 1),
                      (LinFactor(J1), -1), (LinFactor(N - J1), -1), upper=N.shift(-1))
    assert_closed_form(original, alg_d(original, 'j1'), symbols=SYMBOLS)
    print("✅ Algorithm D verified")


def test_nested_demo_sum():
    """sum_j bino(n,j) (-x1)^j/(j+1) S(j+1;1,1;x2,x3)"""
    print("Testing the nested demo sum...")
    original = summed((Bino(N, J1), 1), (Pow(-x1, J1), 1), (LinFactor(J1.shift(1)), -1),
                      (SSum(J1.shift(1), (1, 1), (x2, x3)), 1))
    result = do_sum(original, SumSpec(1))
    assert_closed_form(original, result, symbols=SYMBOLS)
    print(f"  {len(result)} terms in the closed form")
    print("✅ Demo sum agrees with direct summation for n <= 6")


def test_double_sum():
    """sum_{j1=1}^n sum_{j2=1}^{j1} 1/(j1 j2) = S(n;1,1;1,1)"""
    j2 = LinearArg.index('j2')
    original = Expr.product(1, [(SumOp('j1', ONE, N), 1), (SumOp('j2', ONE, J1), 1),
                                (LinFactor(J1), -1), (LinFactor(j2), -1)])
    result = do_sum(original, SumSpec(2))
    assert not any(t.sum_ops() for t in result.terms)
    for n in range(1, 6):
        assignment = Assignment(index_values={'n': n})
        assert eval_numeric(result, assignment) == eval_numeric(original, assignment)


def test_positive_powers():
    """sum j^2 x^j closes; a denominator is refused"""
    print("Testing positive power sums...")
    original = summed((LinFactor(J1), 2), (Pow(x1, J1), 1))
    assert_closed_form(original, sum_pos_pow(original, 'j1'), symbols=SYMBOLS)
    with pytest.raises(NegativePower):
        sum_pos_pow(summed((LinFactor(J1), -1)), 'j1')
    print("✅ Positive powers summed")


def test_infinite_binomial_sum_is_rejected():
    original = Expr.product(1, [(SumOp('j1', ONE, INF), 1), (Bino(N, J1), 1),
                                (LinFactor(J1), -1)])
    with pytest.raises(InfiniteConjugation):
        do_sum(original, SumSpec(1))


def test_sum_spec_validation():
    assert SumSpec(2).indices == ['j2', 'j1']
    assert SumSpec(3, 2).indices == ['j3', 'j2']
    with pytest.raises(ValueError):
        SumSpec(1, 2)
    with pytest.raises(ValueError):
        SumSpec(0, 0)


def test_empty_sum_vanishes():
    """A sum with upper bound below the lower bound contributes nothing"""
    original = summed((LinFactor(J1), -1), upper=N.shift(-3))
    result = do_sum(original, SumSpec(1))
    assert eval_numeric(result, Assignment(index_values={'n': 2})) == 0
    assert eval_numeric(result, Assignment(index_values={'n': 4})) == 1


@pytest.mark.parametrize('kind', ['A', 'B', 'C', 'D'])
def test_seeded_check_runs(kind):
    """A few seeded random instances per algorithm type"""
    results, report = run_check(kind, count=5, seed=11, max_n=5)
    print(report)
    assert len(results) == 5
    assert all(r.status == 'exact' for r in results), report


def test_helpers_keep_terms_canonical():
    assert num(J1) * den(J1) == Expr.one()
    assert pow_(x1, J1) * pow_(1 / x1, J1) == Expr.one()


def test_flip_keeps_sum_value():
    """Reversing the summation direction leaves the value unchanged"""
    original = summed((LinFactor(J1), -1), (Pow(x1, J1), 1))
    term = original.terms[0]
    flipped = flip_index(term, term.sum_ops()[0])
    for n in range(1, 6):
        assignment = Assignment(index_values={'n': n}, symbol_values=SYMBOLS)
        assert eval_numeric(flipped, assignment) == eval_numeric(original, assignment)
    with pytest.raises(InfiniteFlip):
        infinite = summed((LinFactor(J1), -2), upper=INF).terms[0]
        flip_index(infinite, infinite.sum_ops()[0])


def test_two_sided_binomial_convolution():
    """S-sums on both sides: bino(n,j) x1^j x2^(n-j) S(j;1;1/2) S(n-j;1;1/3)/(n-j+1)"""
    print("Testing a two-sided binomial convolution...")
    half, third = sympy.Rational(1, 2), sympy.Rational(1, 3)
    original = summed((Bino(N, J1), 1), (Pow(x1, J1), 1), (Pow(x2, N - J1), 1),
                      (SSum(J1, (1,), (half,)), 1), (SSum(N - J1, (1,), (third,)), 1),
                      (LinFactor(N - J1 + 1), -1))
    assert_closed_form(original, do_sum(original, SumSpec(1)), symbols=SYMBOLS)
    print("✅ Two-sided convolution verified")


def test_binomial_with_lagging_sum():
    """S(j-1;...) next to bino(n,j) needs no sum below its boundary"""
    third = sympy.Rational(1, 3)
    original = summed((Bino(N, J1), 1), (Pow(x1, J1), 1), (LinFactor(J1), -1),
                      (SSum(J1.shift(-1), (1,), (third,)), 1))
    assert_closed_form(original, do_sum(original, SumSpec(1)), symbols=SYMBOLS)


def test_binomial_with_raised_lower_bound():
    """sum_{j=2}^n bino(n,j) x1^j/(j-1): the pole at j = 1 is never evaluated"""
    original = Expr.product(1, [(SumOp('j1', LinearArg.const(2), N), 1), (Bino(N, J1), 1),
                                (Pow(x1, J1), 1), (LinFactor(J1.shift(-1)), -1)])
    assert_closed_form(original, do_sum(original, SumSpec(1)), symbols=SYMBOLS)


def test_binomial_with_shifted_partner():
    """bino(n,j) x1^j x2^(n-j)/(n-j+2)"""
    original = summed((Bino(N, J1), 1), (Pow(x1, J1), 1), (Pow(x2, N - J1), 1),
                      (LinFactor(N - J1 + 2), -1))
    assert_closed_form(original, do_sum(original, SumSpec(1)), symbols=SYMBOLS)


@pytest.mark.parametrize('kind', ['A', 'B', 'C', 'D'])
def test_full_seeded_checks(kind):
    """50 seeded instances per algorithm type, n <= 8"""
    results, report = run_check(kind, count=50, seed=1, max_n=8)
    assert len(results) == 50
    assert all(r.status == 'exact' for r in results), report
