"""
Closed forms of sum_{i=1}^M i^p x^i

x = 1 gives the Faulhaber polynomials. For x != 1 the geometric sum
(t - t^(M+1))/(1 - t) is differentiated with (t d/dt)^p, keeping a
placeholder W for t^M so that the result stays polynomial in M and W.
"""
import logging
from functools import lru_cache
from typing import Tuple

import sympy

from src.kernel import Expr, LinFactor, Pow, Theta, canon
from src.kernel.errors import UnsupportedShape
from src.kernel.linear import INF, Boundary, LinearArg

logger = logging.getLogger(__name__)

_T = sympy.Dummy('t')
_M = sympy.Dummy('M')
_W = sympy.Dummy('W')


@lru_cache(maxsize=None)
def faulhaber(p: int) -> Tuple[Tuple[int, sympy.Expr], ...]:
    """(power of M, coefficient) of sum_{i=1}^M i^p"""
    i = sympy.Dummy('i', integer=True, positive=True)
    total = sympy.expand(sympy.summation(i ** p, (i, 1, _M)))
    poly = sympy.Poly(total, _M)
    return tuple((r, c) for (r,), c in poly.terms())


@lru_cache(maxsize=None)
def geometric(p: int) -> Tuple[Tuple[int, int, sympy.Expr], ...]:
    """(power of M, power of W, coefficient in t) of sum_{i=1}^M i^p t^i, W = t^M"""
    f = (_T - _T * _W) / (1 - _T)
    for _ in range(p):
        f = _T * sympy.diff(f, _T) + _M * _W * sympy.diff(f, _W)
    numer, denom = sympy.fraction(sympy.together(f))
    poly = sympy.Poly(sympy.expand(numer), _M, _W)
    table = []
    for (r, w), c in poly.terms():
        table.append((r, w, sympy.factor(c / denom)))
    logger.debug(f"Geometric power sum table for p={p}: {len(table)} entries")
    return tuple(table)


def _linear(arg: LinearArg) -> Expr:
    if arg.is_constant:
        return Expr.scalar(arg.offset)
    return Expr.atom(LinFactor(arg))


def power_sum(p: int, x, upper: Boundary, guard: bool = True) -> Expr:
    """
    sum_{i=1}^{upper} i^p x^i as an expression in num(upper) and pow(x, upper).

    With guard the result carries theta(upper), so it vanishes for an empty
    range; at upper = inf it needs |x| < 1.
    """
    if p < 0:
        raise ValueError(f"power sums need p >= 0 (got {p})")
    x = canon(x)
    if upper is INF:
        if x == 1:
            raise UnsupportedShape(f"sum_{{i>=1}} i^{p} diverges")
        return Expr.sum(Expr.scalar(canon(c.subs(_T, x))) for r, w, c in geometric(p) if w == 0)

    if upper.is_constant:
        total = sum((sympy.Integer(i) ** p * x ** i for i in range(1, upper.offset + 1)),
                    sympy.Integer(0))
        return Expr.scalar(total)

    m = _linear(upper)
    if x == 1:
        pieces = [m ** r * c for r, c in faulhaber(p)]
    else:
        pieces = []
        for r, w, c in geometric(p):
            piece = m ** r * canon(c.subs(_T, x))
            if w:
                piece = piece * Expr.atom(Pow(x, upper))
            pieces.append(piece)
    result = Expr.sum(pieces)
    if guard:
        result = result * Expr.atom(Theta(upper))
    return result
