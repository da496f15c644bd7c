"""
Numeric evaluation of expressions: exact rationals when possible, mpmath otherwise
"""
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Union

import mpmath
import sympy
from mpmath import mp

from src.algebra.mzv import default_table
from src.config import config
from src.kernel import (
    Atom, Bino, Delta, DeltaP, Eps, Expr, FacFactor, GammaFactor, LinFactor,
    OrderMarker, Pow, SSum, SumOp, Term, Theta, ZSum,
)
from src.kernel.errors import (
    DivergentEvaluation, SingularArgument, UnassignedSymbol,
)
from src.kernel.linear import EPS_NAME, INF, N_NAME, LinearArg

logger = logging.getLogger(__name__)

Value = Union[Fraction, mpmath.mpf, mpmath.mpc]


class _Inexact(Exception):
    """Internal signal: the exact backend met something irrational"""
    pass


def as_fraction(value) -> Union[Fraction, float]:
    """Exact Fraction for ints, strings like '1/3' and sympy rationals"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    if isinstance(value, sympy.Basic) and value.is_Rational:
        return Fraction(int(value.p), int(value.q))
    return value


@dataclass
class Assignment:
    """Values for free indices, symbols and ep"""
    index_values: Dict[str, int] = field(default_factory=dict)
    symbol_values: Dict[str, object] = field(default_factory=dict)
    eps_value: Optional[object] = None
    precision: int = config.PRECISION
    truncation_terms: int = config.TRUNCATION_TERMS

    def __post_init__(self):
        if self.precision < 15:
            raise ValueError(f"precision must be at least 15 digits (got {self.precision})")
        self.index_values = {k: int(v) for k, v in self.index_values.items()}
        self.symbol_values = {k: as_fraction(v) for k, v in self.symbol_values.items()}
        if self.eps_value is not None:
            self.eps_value = as_fraction(self.eps_value)

    def with_indices(self, **values: int) -> 'Assignment':
        return Assignment({**self.index_values, **values}, dict(self.symbol_values),
                          self.eps_value, self.precision, self.truncation_terms)


class Evaluator:
    """
    Walks an Expr once per backend.

    The exact backend uses Fraction throughout and gives up (internally) on
    Gamma with ep, ep exponents, sums at infinity and zeta constants; the
    mpmath backend handles everything at the assignment's precision.
    tail_bound accumulates the error estimates of truncated infinite sums.
    """

    def __init__(self, assignment: Assignment, exact: bool):
        self.assignment = assignment
        self.exact = exact
        self.tail_bound = mp.mpf(0)
        self._lambdas: Dict[sympy.Expr, object] = {}

    # Scalars

    def number(self, value) -> Value:
        if isinstance(value, Fraction):
            return value if self.exact else mp.mpf(value.numerator) / value.denominator
        if isinstance(value, int):
            return Fraction(value) if self.exact else mp.mpf(value)
        if self.exact:
            raise _Inexact(f"inexact value {value}")
        return mp.mpmathify(value)

    def symbol(self, name: str) -> Value:
        if name == 'sinf':
            raise DivergentEvaluation("the regularized divergence sinf has no value")
        if len(name) == 2 and name[0] == 'z' and name[1] in '23456':
            if self.exact:
                raise _Inexact(name)
            return mp.zeta(int(name[1]))
        if name == EPS_NAME:
            if self.assignment.eps_value is None:
                raise UnassignedSymbol("ep has no value")
            return self.number(self.assignment.eps_value)
        if name in self.assignment.symbol_values:
            return self.number(self.assignment.symbol_values[name])
        if name in self.assignment.index_values:
            return self.number(self.assignment.index_values[name])
        raise UnassignedSymbol(f"symbol {name} has no value")

    def scalar(self, value: sympy.Expr) -> Value:
        value = sympy.sympify(value)
        if value.is_Rational:
            return self.number(Fraction(int(value.p), int(value.q)))
        symbols = sorted(value.free_symbols, key=lambda s: s.name)
        values = [self.symbol(s.name) for s in symbols]
        if self.exact:
            result = value.subs({s: sympy.Rational(v.numerator, v.denominator)
                                 for s, v in zip(symbols, values)})
            if not result.is_Rational:
                raise _Inexact(f"{value} is not rational")
            return Fraction(int(result.p), int(result.q))
        fn = self._lambdas.get(value)
        if fn is None:
            fn = sympy.lambdify(symbols, value, modules='mpmath')
            self._lambdas[value] = fn
        return mp.mpmathify(fn(*values))

    # Arguments

    def integer(self, arg: LinearArg, env: Mapping[str, int]) -> int:
        if arg.has_eps:
            raise ValueError(f"{arg} is not an integer")
        values = dict(env)
        if arg.n_coeff and N_NAME not in values:
            raise UnassignedSymbol("n has no value")
        for name, _ in arg.indices:
            if name not in values:
                raise UnassignedSymbol(f"index {name} has no value")
        return arg.evaluate(values)

    def linear(self, arg: LinearArg, env: Mapping[str, int]) -> Value:
        base = self.number(self.integer(arg.eps_free(), env))
        if not arg.has_eps:
            return base
        return base + self.scalar(arg.eps_coeff) * self.symbol(EPS_NAME)

    # Atoms

    def gamma(self, arg: LinearArg, power: int, env: Mapping[str, int]) -> Value:
        if not arg.has_eps:
            k = self.integer(arg, env)
            if k <= 0:
                if power > 0:
                    raise SingularArgument(f"Gamma({k})")
                return self.number(0)
            return self.number(int(sympy.factorial(k - 1))) ** power
        if self.exact:
            raise _Inexact("Gamma with ep")
        # MS-bar: every Gamma(x + a*ep) comes with exp(euler*a*ep)
        a_eps = self.scalar(arg.eps_coeff) * self.symbol(EPS_NAME)
        return (mp.gamma(self.linear(arg, env)) * mp.exp(mp.euler * a_eps)) ** power

    def atom(self, atom: Atom, power: int, env: Mapping[str, int]) -> Value:
        if isinstance(atom, Pow):
            base = self.scalar(atom.base)
            if atom.exponent.has_eps:
                if self.exact:
                    raise _Inexact("ep in an exponent")
                return mp.power(base, self.linear(atom.exponent, env)) ** power
            e = self.integer(atom.exponent, env)
            if base == 0 and e < 0:
                raise SingularArgument(f"pow(0, {e})")
            return (base ** e) ** power
        if isinstance(atom, LinFactor):
            value = self.linear(atom.arg, env)
            if value == 0:
                if power < 0:
                    raise SingularArgument(f"den({atom.arg}) at zero")
                return self.number(0)
            return value ** power
        if isinstance(atom, FacFactor):
            if atom.arg.has_eps:
                return self.gamma(atom.arg.shift(1), power, env)
            k = self.integer(atom.arg, env)
            if k < 0:
                if power > 0:
                    raise SingularArgument(f"fac({k})")
                return self.number(0)
            return self.number(int(sympy.factorial(k))) ** power
        if isinstance(atom, GammaFactor):
            return self.gamma(atom.arg, power, env)
        if isinstance(atom, Bino):
            top = self.integer(atom.top, env)
            bottom = self.integer(atom.bottom, env)
            value = 0 if bottom < 0 else int(sympy.binomial(top, bottom))
            return self.number(value) ** power
        if isinstance(atom, SSum):
            return self.nested(atom, env) ** power
        if isinstance(atom, Theta):
            return self.number(1 if self.integer(atom.arg, env) >= 0 else 0)
        if isinstance(atom, Delta):
            return self.number(1 if self.integer(atom.arg, env) == 0 else 0)
        if isinstance(atom, DeltaP):
            return self.number(0 if self.integer(atom.arg, env) == 0 else 1)
        if isinstance(atom, Eps):
            return self.symbol(EPS_NAME) ** power
        if isinstance(atom, OrderMarker):
            return self.number(0)
        raise TypeError(f"cannot evaluate {atom!r}")

    # Nested sums

    def nested(self, s: SSum, env: Mapping[str, int]) -> Value:
        strict = isinstance(s, ZSum)
        args = [self.scalar(x) for x in s.args]
        if s.upper is INF:
            if self.exact:
                raise _Inexact("sum at infinity")
            return self.at_infinity(s.weights, args, strict)
        return self.finite_levels(self.integer(s.upper, env), s.weights, args, strict)[0][-1]

    def finite_levels(self, upper: int, weights: Sequence[int], args: Sequence[Value],
                      strict: bool) -> List[List[Value]]:
        """levels[d][i] = value of the sums from depth d inward at boundary i"""
        zero, one = self.number(0), self.number(1)
        upper = max(upper, 0)
        inner = [one] * (upper + 1)
        levels: List[List[Value]] = []
        for m, x in zip(reversed(weights), reversed(args)):
            level = [zero] * (upper + 1)
            running = zero
            power = one
            for i in range(1, upper + 1):
                power = power * x
                below = inner[i - 1] if strict else inner[i]
                running = running + power * below / self.number(i) ** m
                level[i] = running
            inner = level
            levels.insert(0, level)
        if not levels:
            lowest = 0 if strict else 1
            levels = [[self.number(1 if i >= lowest else 0) for i in range(upper + 1)]]
        return levels

    def at_infinity(self, weights: Sequence[int], args: Sequence[Value], strict: bool) -> Value:
        if not weights:
            return mp.mpf(1)
        magnitude = mp.mpf(1)
        for x in args:
            magnitude *= abs(x)
            if magnitude > 1:
                raise DivergentEvaluation(f"S-sum at infinity with |x| product {magnitude} > 1")
        x1 = args[0]
        if weights[0] == 1 and x1 == 1:
            raise DivergentEvaluation("leading weight 1 with argument 1 diverges")
        if len(weights) == 1:
            return mp.polylog(weights[0], x1)
        if len(weights) == 2 and x1 == 1 and args[1] == 1:
            return self._double_zeta(weights[0], weights[1], strict)

        tolerance = mp.mpf(10) ** (-self.assignment.precision)
        terms = self.assignment.truncation_terms
        if abs(x1) < 1:
            # stop once the geometric tail is below the target precision
            needed = int(mp.ceil(mp.log(tolerance * (1 - abs(x1))) / mp.log(abs(x1)))) + 2
            terms = min(terms, max(needed, 10))
        if x1 == 1:
            if not strict and all(x == 1 for x in args):
                found = default_table().lookup(tuple(weights))
                if found is not None:
                    return self.scalar(found)
            return self._unit_leading(weights, args, strict)
        levels = self.finite_levels(terms, weights, args, strict)
        partial = levels[0][terms]
        inner_at_end = abs(levels[1][terms]) if len(levels) > 1 else mp.mpf(1)
        if abs(x1) < 1:
            bound = inner_at_end * abs(x1) ** (terms + 1) / (1 - abs(x1))
            self.tail_bound += bound
            return partial
        # |x1| = 1, x1 != 1: the next term bounds an alternating tail
        bound = inner_at_end * mp.mpf(terms + 1) ** (-weights[0])
        self.tail_bound += bound
        return partial

    def _unit_leading(self, weights: Sequence[int], args: Sequence[Value], strict: bool) -> Value:
        """
        sum_i i^-m1 S(i;R) with R = (m2,R'; x2,X'), truncated after N terms:

        tail = S(N;R) zeta(m1,N+1) + sum_{k>N} x2^k k^-m2 S(k;R') zeta(m1,k)

        The second part is bounded with |S(k;R')| <= (1 + log k)^depth(R')
        and zeta(m1,k) <= m1/(m1-1) k^(1-m1).
        """
        if any(abs(x) > 1 for x in args[1:]):
            raise DivergentEvaluation(f"no tail bound for S(inf;{tuple(weights)}) with inner |x| > 1")
        terms = self.assignment.truncation_terms
        levels = self.finite_levels(terms, weights, args, strict)
        m1, m2, x2 = weights[0], weights[1], abs(args[1])
        depth = len(weights) - 2
        s = m1 + m2 - 1
        scale = mp.mpf(m1) / (m1 - 1)
        if x2 < 1:
            tail = (1 + mp.log(terms + 1)) ** depth * mp.mpf(terms + 1) ** (-s)
            bound = scale * tail * x2 ** (terms + 1) / (1 - x2)
        else:
            start = (s - 1) * (1 + mp.log(terms))
            bound = scale * mp.e ** (s - 1) * mp.mpf(s - 1) ** (-(depth + 1)) * mp.gammainc(depth + 1, start)
        self.tail_bound += bound
        return levels[0][terms] + levels[1][terms] * mp.zeta(m1, terms + 1)

    def _double_zeta(self, m1: int, m2: int, strict: bool) -> Value:
        """sum_i i^-m1 S(i;m2) with the inner sum continued analytically in i"""
        shift = 0 if strict else 1

        def inner(i):
            if m2 == 1:
                return mp.digamma(i + shift) + mp.euler
            return mp.zeta(m2) - mp.zeta(m2, i + shift)

        return mp.nsum(lambda i: inner(i) / i ** m1, [1, mp.inf], method='euler-maclaurin')

    # Terms

    def term(self, term: Term, env: Dict[str, int]) -> Value:
        ops = [a for a, _ in term.atoms if isinstance(a, SumOp)]
        if ops:
            bound = {op.index for op in ops}
            for op in ops:
                depends = set(op.lower.index_names()) | (
                    set() if op.upper is INF else set(op.upper.index_names()))
                if not depends & bound:
                    return self.iterate(term, op, env)
            raise ValueError("sum boundaries depend on each other cyclically")
        value = self.scalar(term.coeff)
        # a term switched off by its guards is zero even where other factors are singular
        ordered = sorted(term.atoms, key=lambda ap: not isinstance(ap[0], (Theta, Delta, DeltaP)))
        for atom, power in ordered:
            value = value * self.atom(atom, power, env)
            if value == 0:
                return value
        return value

    def iterate(self, term: Term, op: SumOp, env: Dict[str, int]) -> Value:
        lower = self.integer(op.lower, env)
        if op.upper is INF:
            if self.exact:
                raise _Inexact("sum to infinity")
            upper = lower + self.assignment.truncation_terms - 1
            logger.debug(f"Truncating sum over {op.index} after {self.assignment.truncation_terms} terms")
        else:
            upper = self.integer(op.upper, env)
        rest = Term(term.coeff, tuple((a, p) for a, p in term.atoms if a != op))
        total = self.number(0)
        for k in range(lower, upper + 1):
            env[op.index] = k
            total = total + self.term(rest, env)
        env.pop(op.index, None)
        return total

    def evaluate(self, expr: Expr) -> Value:
        env = dict(self.assignment.index_values)
        total = self.number(0)
        for term in expr.terms:
            total = total + self.term(term, env)
        return total


def eval_numeric(expr: Expr, assignment: Assignment) -> Value:
    """
    Value of expr. All-rational inputs and finite sums give an exact
    Fraction; anything else falls back to mpmath at assignment.precision.
    """
    try:
        return Evaluator(assignment, exact=True).evaluate(expr)
    except _Inexact as reason:
        logger.debug(f"Exact evaluation not possible ({reason}); using mpmath")
    with mp.workdps(assignment.precision + 10):
        evaluator = Evaluator(assignment, exact=False)
        value = evaluator.evaluate(expr)
        if evaluator.tail_bound:
            logger.debug(f"Truncation tail bound {mpmath.nstr(evaluator.tail_bound, 5)}")
        return +value


def eval_with_bound(expr: Expr, assignment: Assignment):
    """(value, tail bound) from the mpmath backend"""
    with mp.workdps(assignment.precision + 10):
        evaluator = Evaluator(assignment, exact=False)
        value = evaluator.evaluate(expr)
        return +value, +evaluator.tail_bound


def direct_sum(expr: Expr, indices: Sequence[str], assignment: Assignment) -> Value:
    """
    Literal iteration of the nested sums over `indices`; every one of them
    must appear as a sum in expr.
    """
    present = {a.index for t in expr.terms for a, _ in t.atoms if isinstance(a, SumOp)}
    missing = [i for i in indices if i not in present]
    if missing:
        raise ValueError(f"no sum over {', '.join(missing)} in the expression")
    return eval_numeric(expr, assignment)
