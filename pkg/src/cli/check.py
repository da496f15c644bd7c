"""
Seeded comparison of the summation algorithms against direct summation
"""
import logging
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple

import mpmath
import sympy
from tabulate import tabulate

from src.config import config
from src.kernel import Bino, Expr, LinFactor, LinearArg, Pow, SSum, SumOp
from src.kernel.errors import NestsumError
from src.kernel.linear import INF
from src.kernel.printer import format_expr
from src.oracle import Assignment, direct_sum, eval_numeric, eval_with_bound
from src.summer import SumSpec, do_sum

logger = logging.getLogger(__name__)

ARGUMENTS = [Fraction(1, 2), Fraction(-1, 2), Fraction(1, 3), Fraction(-1, 3),
             Fraction(2, 3), Fraction(-3, 4), Fraction(1, 5), Fraction(3, 5)]
J = LinearArg.index('j1')
N = LinearArg.n()


@dataclass
class CheckResult:
    number: int
    kind: str
    summand: str
    status: str
    detail: str = ''


def _x(rng: random.Random) -> sympy.Rational:
    value = rng.choice(ARGUMENTS)
    return sympy.Rational(value.numerator, value.denominator)


def _s_sum(rng: random.Random, upper: LinearArg, max_weight: int) -> List[Tuple[SSum, int]]:
    """An S-sum of depth <= 2 within the weight budget, or nothing"""
    depth = rng.randint(0, min(2, max_weight))
    if depth == 0:
        return []
    weights = [1] * depth
    for _ in range(max_weight - depth):
        if rng.random() < 0.4:
            weights[rng.randrange(depth)] += 1
    args = tuple(_x(rng) if rng.random() < 0.5 else sympy.Integer(1) for _ in range(depth))
    return [(SSum(upper, tuple(weights), args), 1)]


def _den(arg: LinearArg, power: int) -> List[Tuple[LinFactor, int]]:
    return [(LinFactor(arg), -power)] if power else []


def random_instance(kind: str, rng: random.Random) -> Expr:
    """
    A: sum_j x^j/(j+a)^m S(j+b;...), |a|, |b| <= 2, lower bound raised above
       the pole; one instance in four runs to infinity.
    B: adds den(n-j+c)^m2 S(n-j+d;...) with c in {1,2}, and S-sums on the j side.
    C: bino(n,j) x^j/(j+a)^m S(j+b;...) with |a|, |b| <= 2.
    D: bino(n,j) x^j y^(n-j)/((j+a)^m1 (n-j+c)^m2) with |a|, |c| <= 2 and
       S-sums on one side or on both.
    """
    x = _x(rng)
    if kind == 'A':
        m = rng.randint(0, 2)
        a = rng.randint(-2, 2)
        lower = max(1, 1 - a) if m else 1
        upper = INF if rng.random() < 0.25 else N
        atoms = [(SumOp('j1', LinearArg.const(lower), upper), 1), (Pow(x, J), 1)]
        atoms += _den(J.shift(a), m) + _s_sum(rng, J.shift(rng.randint(-2, 2)), 3 - m)
        return Expr.product(1, atoms)
    if kind == 'B':
        m1 = rng.randint(0, 1)
        m2 = rng.randint(1, 2)
        atoms = [(SumOp('j1', LinearArg.const(1), N), 1), (Pow(x, J), 1)]
        atoms += _den(J.shift(rng.randint(0, 2)), m1)
        atoms += _den(N - J + rng.randint(1, 2), m2)
        budget = 4 - m1 - m2
        if rng.random() < 0.5:
            atoms += _s_sum(rng, J.shift(rng.randint(-1, 1)), 1)
            budget -= 1
        atoms += _s_sum(rng, (N - J).shift(rng.randint(0, 2)), budget)
        return Expr.product(1, atoms)
    if kind == 'C':
        m = rng.randint(0, 2)
        a = rng.randint(-2, 2)
        lower = max(1, 1 - a) if m else 1
        atoms = [(SumOp('j1', LinearArg.const(lower), N), 1), (Bino(N, J), 1), (Pow(x, J), 1)]
        atoms += _den(J.shift(a), m) + _s_sum(rng, J.shift(rng.randint(-2, 2)), 3 - m)
        return Expr.product(1, atoms)
    if kind == 'D':
        y = _x(rng)
        a = rng.randint(-2, 2)
        c = rng.randint(-2, 2)
        m1 = rng.randint(0, 1)
        m2 = rng.randint(1, 2)
        lower = max(1, 1 - a) if m1 else 1
        # n - j + c >= 1 on the whole range
        upper = N.shift(min(0, c - 1))
        atoms = [(SumOp('j1', LinearArg.const(lower), upper), 1), (Bino(N, J), 1),
                 (Pow(x, J), 1), (Pow(y, N - J), 1)]
        atoms += _den(J.shift(a), m1) + _den(N - J + c, m2)
        budget = 4 - m1 - m2
        side = rng.choice(('j', 'n-j', 'both'))
        split = 1 if side == 'both' else budget
        if side != 'n-j':
            atoms += _s_sum(rng, J.shift(rng.randint(-2, 2)), split)
        if side != 'j':
            atoms += _s_sum(rng, N - J + rng.randint(0, 2), budget - split if side == 'both' else budget)
        return Expr.product(1, atoms)
    raise ValueError(f"unknown algorithm type {kind}")


def check_instance(expr: Expr, max_n: int, precision: int = 30) -> Optional[str]:
    """
    None when the closed form agrees with direct summation for n = 1..max_n,
    exactly for finite sums and to 12 digits for sums to infinity.
    """
    result = do_sum(expr, SumSpec(1))
    if _runs_to_infinity(expr):
        assignment = Assignment(precision=precision, truncation_terms=400)
        expected = direct_sum(expr, ['j1'], assignment)
        found, bound = eval_with_bound(result, assignment)
        if abs(found - expected) > mpmath.mpf(10) ** -12 * max(1, abs(expected)) + bound:
            return f"expected {mpmath.nstr(expected, 15)}, got {mpmath.nstr(found, 15)}"
        return None
    for n in range(1, max_n + 1):
        assignment = Assignment(index_values={'n': n})
        expected = direct_sum(expr, ['j1'], assignment)
        found = eval_numeric(result, assignment)
        if not isinstance(found, Fraction) or found != expected:
            return f"n={n}: expected {expected}, got {found}"
    return None


def _runs_to_infinity(expr: Expr) -> bool:
    return any(isinstance(a, SumOp) and a.upper is INF for t in expr.terms for a, _ in t.atoms)


def run_check(kind: str, count: Optional[int] = None, seed: Optional[int] = None,
              max_n: Optional[int] = None) -> Tuple[List[CheckResult], str]:
    """Run the seeded suite for one algorithm type; returns the results and a report"""
    count = count or config.CHECK_INSTANCES
    max_n = max_n or config.CHECK_MAX_N
    rng = random.Random(config.SEED if seed is None else seed)
    results: List[CheckResult] = []
    for number in range(1, count + 1):
        expr = random_instance(kind, rng)
        summand = format_expr(expr)
        try:
            problem = check_instance(expr, max_n)
            status = 'exact' if problem is None else 'mismatch'
            results.append(CheckResult(number, kind, summand, status, problem or ''))
        except NestsumError as e:
            logger.warning(f"Instance {number} ({kind}) failed: {e}")
            results.append(CheckResult(number, kind, summand, 'error', str(e)))

    failed = [r for r in results if r.status != 'exact']
    rows = [[r.number, r.kind, r.summand, r.status, r.detail] for r in failed]
    lines = []
    if rows:
        lines.append(tabulate(rows, headers=['#', 'Type', 'Summand', 'Status', 'Detail'],
                              tablefmt='grid', maxcolwidths=[4, 4, 60, 8, 40]))
    exact = len(results) - len(failed)
    lines.append(f"alg{kind}: {exact}/{len(results)} exact")
    logger.info(f"Check {kind}: {exact}/{len(results)} exact (seed {seed}, n <= {max_n})")
    return results, '\n'.join(lines)
