"""
Hypergeometric builders: pFq, Appell F2 and the two-mass one-loop triangle
as nested sums, expanded in ep through the summation pipeline
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import sympy

from ..algebra.mzv import MZVTable
from ..kernel import (
    EPS, Bino, Expr, FacFactor, GammaFactor, LinearArg, Pow, SumOp, canon,
)
from ..kernel.atoms import Atom
from ..kernel.errors import SingularArgument, UnsupportedKind
from ..kernel.linear import INF
from ..series import EpsSeries, expand_expr, peel_for_expansion
from ..summer import SumSpec, Summer
from ..utils.logging_utils import summation_logger

logger = logging.getLogger(__name__)

PFQ = 'PFQ'
APPELL_F2 = 'AppellF2'
TRIANGLE = 'TriangleTwoMass'
KINDS = (PFQ, APPELL_F2, TRIANGLE)

Param = Union[LinearArg, str, int, sympy.Expr]
Factors = List[Tuple[Atom, int]]


def as_param(value: Param) -> LinearArg:
    """Parameter linear in ep with an integer offset, e.g. 'a*ep' or '1-c*ep'"""
    if isinstance(value, LinearArg):
        if value.indices or value.n_coeff:
            raise ValueError(f"parameter {value} must not depend on an index")
        return value
    arg = LinearArg.from_sympy(sympy.sympify(value))
    if arg.indices or arg.n_coeff:
        raise ValueError(f"parameter {value} must not depend on an index")
    return arg


@dataclass(frozen=True)
class HypergeomSpec:
    """
    One function to expand.

    PFQ: numerator a_1..a_p, denominator b_1..b_q, args (x,).
    AppellF2: numerator (a, b1, b2), denominator (c1, c2), args (x, y).
    TriangleTwoMass: m and nus = (nu1, nu2, nu3), args (x,).
    """
    kind: str
    numerator: Tuple[LinearArg, ...] = ()
    denominator: Tuple[LinearArg, ...] = ()
    args: Tuple[sympy.Expr, ...] = ()
    m: int = 0
    nus: Tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedKind(f"unknown hypergeometric kind '{self.kind}'")
        if self.kind == APPELL_F2 and (len(self.numerator), len(self.denominator), len(self.args)) != (3, 2, 2):
            raise ValueError("AppellF2 takes (a, b1, b2; c1, c2; x, y)")
        if self.kind == PFQ and len(self.args) != 1:
            raise ValueError("pFq takes exactly one argument")
        if self.kind == TRIANGLE:
            if len(self.nus) != 3 or any(int(nu) != nu or nu < 1 for nu in self.nus):
                raise ValueError(f"triangle powers must be three positive integers (got {self.nus})")
            if len(self.args) != 1:
                raise ValueError("the triangle takes exactly one argument")

    @classmethod
    def pfq(cls, numerator: Sequence[Param], denominator: Sequence[Param], x) -> 'HypergeomSpec':
        return cls(PFQ, tuple(as_param(a) for a in numerator),
                   tuple(as_param(b) for b in denominator), (canon(x),))

    @classmethod
    def appell_f2(cls, a: Param, b1: Param, b2: Param, c1: Param, c2: Param, x, y) -> 'HypergeomSpec':
        return cls(APPELL_F2, (as_param(a), as_param(b1), as_param(b2)),
                   (as_param(c1), as_param(c2)), (canon(x), canon(y)))

    @classmethod
    def triangle(cls, m: int, nu1: int, nu2: int, nu3: int, x) -> 'HypergeomSpec':
        return cls(TRIANGLE, m=int(m), nus=(int(nu1), int(nu2), int(nu3)), args=(canon(x),))

    @property
    def label(self) -> str:
        if self.kind == PFQ:
            return f"{len(self.numerator)}F{len(self.denominator)}"
        if self.kind == TRIANGLE:
            return f"Tri({self.m},{','.join(map(str, self.nus))})"
        return 'F2'

    @property
    def sum_spec(self) -> SumSpec:
        return SumSpec(inner=2 if self.kind == APPELL_F2 else 1)


def _pochhammer(at: LinearArg, param: LinearArg) -> Factors:
    """(param)_at = Gamma(at+param)/Gamma(param)"""
    return [(GammaFactor(at + param), 1), (GammaFactor(param), -1)]


def _inv_pochhammer(at: LinearArg, param: LinearArg) -> Factors:
    return [(GammaFactor(param), 1), (GammaFactor(at + param), -1)]


def _terminating(param: LinearArg) -> Optional[int]:
    """n for a parameter equal to -n, n >= 0; those series are polynomials"""
    if param.is_constant and param.offset <= 0:
        return -param.offset
    return None


def _first_and_rest(summand: Callable[[LinearArg], Expr], index: str, upper=INF) -> Expr:
    """summand(0) + sum(index, 1, upper) summand(index)"""
    first = summand(LinearArg.const(0))
    if upper is not INF and upper.is_constant and upper.offset < 1:
        return first
    rest = summand(LinearArg.index(index)) * Expr.atom(SumOp(index, LinearArg.const(1), upper))
    return first + rest


def build_pfq(spec: HypergeomSpec) -> Expr:
    """sum_j prod (a)_j / prod (b)_j x^j / j!"""
    x = spec.args[0]
    for b in spec.denominator:
        if _terminating(b) is not None:
            raise SingularArgument(f"denominator parameter {b} is a non-positive integer")
    cut = [n for n in (_terminating(a) for a in spec.numerator) if n is not None]
    upper = LinearArg.const(min(cut)) if cut else INF

    def summand(j: LinearArg) -> Expr:
        factors: Factors = [(FacFactor(j), -1), (Pow(x, j), 1)]
        coeff = sympy.Integer(1)
        for a in spec.numerator:
            n = _terminating(a)
            if n is None:
                factors += _pochhammer(j, a)
            else:
                # (-n)_j = (-1)^j n!/(n-j)!
                factors += [(Pow(sympy.Integer(-1), j), 1), (FacFactor(LinearArg.const(n) - j), -1)]
                coeff *= sympy.factorial(n)
        for b in spec.denominator:
            factors += _inv_pochhammer(j, b)
        return Expr.product(coeff, factors)

    return _first_and_rest(summand, 'j1', upper)


def build_appell_f2(spec: HypergeomSpec) -> Expr:
    """
    F2(a; b1, b2; c1, c2; x, y) as a binomial convolution over s = i + j:
    sum_s (a)_s/s! sum_{i=0}^{s} bino(s,i) (b1)_i (b2)_(s-i)/((c1)_i (c2)_(s-i)) x^i y^(s-i).
    The i = 0 and i = s ends are split off so the inner sum runs over 1..s-1.
    """
    a, b1, b2 = spec.numerator
    c1, c2 = spec.denominator
    x, y = spec.args
    s = LinearArg.index('j1')
    i = LinearArg.index('j2')
    outer: Factors = _pochhammer(s, a) + [(FacFactor(s), -1)]

    def side(at: LinearArg, b: LinearArg, c: LinearArg, base) -> Factors:
        return _pochhammer(at, b) + _inv_pochhammer(at, c) + [(Pow(base, at), 1)]

    ends = Expr.product(1, outer + side(s, b2, c2, y)) + Expr.product(1, outer + side(s, b1, c1, x))
    middle = Expr.product(1, outer + [(Bino(s, i), 1)] + side(i, b1, c1, x) + side(s - i, b2, c2, y)
                          + [(SumOp('j2', LinearArg.const(1), s.shift(-1)), 1)])
    return Expr.one() + (ends + middle) * Expr.atom(SumOp('j1', LinearArg.const(1), INF))


def build_triangle(spec: HypergeomSpec) -> Expr:
    """One-loop triangle with two off-shell legs in the dimensionless normalization"""
    m = spec.m
    nu1, nu2, nu3 = spec.nus
    nu13, nu23, nu123 = nu1 + nu3, nu2 + nu3, nu1 + nu2 + nu3
    x = spec.args[0]

    def g(offset: int, eps: int, at: Optional[LinearArg] = None) -> LinearArg:
        arg = LinearArg.eps(eps, offset)
        return arg if at is None else arg + at

    prefactor: Factors = [
        (GammaFactor(g(nu23 - m, 1)), 1),
        (GammaFactor(g(1 + m - nu23, -1)), 1),
        (GammaFactor(g(m - nu13, -1)), 1),
        (GammaFactor(LinearArg.const(nu1)), -1),
        (GammaFactor(LinearArg.const(nu2)), -1),
        (GammaFactor(LinearArg.const(nu3)), -1),
        (GammaFactor(g(2 * m - nu123, -2)), -1),
    ]

    def summand(i: LinearArg) -> Expr:
        common: Factors = [(Pow(x, i), 1), (FacFactor(i), -1)]
        first = Expr.product(x ** (m - nu23), common + [
            (Pow(x, LinearArg.eps(-1)), 1),
            (GammaFactor(i.shift(nu1)), 1),
            (GammaFactor(g(m - nu2, -1, i)), 1),
            (GammaFactor(g(1 + m - nu23, -1, i)), -1),
        ])
        second = Expr.product(1, common + [
            (GammaFactor(i.shift(nu3)), 1),
            (GammaFactor(g(nu123 - m, 1, i)), 1),
            (GammaFactor(g(1 + nu23 - m, 1, i)), -1),
        ])
        return first - second

    return Expr.product(1, prefactor) * _first_and_rest(summand, 'j1')


def pole_depth(expr: Expr) -> int:
    """Largest net number of ep poles (Gamma poles and explicit ep^-k) in any term"""
    depth = 0
    for term in expr.terms:
        found = 0
        for atom, power in term.atoms:
            if isinstance(atom, (GammaFactor, FacFactor)) and atom.arg.has_eps:
                base = atom.arg.eps_free()
                # fac(x) = Gamma(x+1)
                limit = 0 if isinstance(atom, GammaFactor) else -1
                if base.is_constant and base.offset <= limit:
                    found += power
            elif atom == EPS and power < 0:
                found -= power
        depth = max(depth, found)
    return depth


BUILDERS = {
    PFQ: build_pfq,
    APPELL_F2: build_appell_f2,
    TRIANGLE: build_triangle,
}


class HypergeometricService:
    """Builds series representations and expands them in ep"""

    def __init__(self, table: Optional[MZVTable] = None):
        self.table = table
        self.expanded = 0

    def build_series(self, spec: HypergeomSpec) -> Expr:
        builder = BUILDERS.get(spec.kind)
        if builder is None:
            raise UnsupportedKind(f"no series builder for '{spec.kind}'")
        expr = builder(spec)
        logger.debug(f"Built {spec.label}: {len(expr)} terms")
        return expr

    def expand_in_eps(self, spec: HypergeomSpec, order: int) -> EpsSeries:
        """
        Laurent coefficients below ep^order. Each coefficient is summed
        separately and must come out finite.
        """
        if order < 1:
            raise ValueError(f"order must be at least 1 (got {order})")
        try:
            expr = peel_for_expansion(self.build_series(spec))
            working = order + pole_depth(expr)
            summer = Summer(order=working, table=self.table)
            with summation_logger.summation_run('expand-hyp', len(expr)) as log:
                series = expand_expr(expr, working)
                result = series.map_coeffs(
                    lambda c: summer.run(c, spec.sum_spec, require_finite=True)).request(order)
                summation_logger.record_truncation(order, result.lost)
                log.output_terms = sum(len(c) for c in result.coeffs.values())
            self.expanded += 1
            logger.info(f"Expanded {spec.label} below ep^{order}: orders {list(result.orders())}")
            return result
        except Exception as e:
            logger.error(f"Error expanding {spec.label}: {e}")
            raise


# Global service instance
hypergeometric_service = HypergeometricService()
