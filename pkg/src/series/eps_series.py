"""
Truncated Laurent series in ep with Expr coefficients
"""
import logging
from typing import Dict, Iterable, Optional

import sympy

from src.kernel import EPS, Expr, OrderMarker
from src.kernel.errors import InsufficientOrder

logger = logging.getLogger(__name__)


def _tmin(*orders: Optional[int]) -> Optional[int]:
    """Minimum where None stands for 'exact, no truncation'"""
    finite = [o for o in orders if o is not None]
    return min(finite) if finite else None


def _tadd(order: Optional[int], shift: int) -> Optional[int]:
    return None if order is None else order + shift


class EpsSeries:
    """
    sum_k coeffs[k] * ep^k for min_order <= k < trunc_order.

    trunc_order None means the series is exact. lost records that somewhere
    in its computation fewer orders were known than had been requested, so
    that a pole pushed content past the truncation.
    """

    __slots__ = ('coeffs', 'min_order', 'trunc_order', 'lost')

    def __init__(self, coeffs: Optional[Dict[int, Expr]] = None, min_order: Optional[int] = None,
                 trunc_order: Optional[int] = None, lost: bool = False):
        kept = {k: c for k, c in (coeffs or {}).items()
                if not c.is_zero() and (trunc_order is None or k < trunc_order)}
        self.coeffs: Dict[int, Expr] = dict(sorted(kept.items()))
        if min_order is None:
            min_order = min(kept, default=trunc_order if trunc_order is not None else 0)
        self.min_order = min(min_order, min(kept, default=min_order))
        self.trunc_order = trunc_order
        self.lost = lost

    # Construction

    @classmethod
    def from_expr(cls, expr: Expr, trunc_order: Optional[int] = None) -> 'EpsSeries':
        """Group the terms of expr by their ep power; content at or beyond trunc_order is dropped"""
        coeffs: Dict[int, Expr] = {}
        for order in expr.eps_orders():
            if trunc_order is None or order < trunc_order:
                coeffs[order] = expr.coefficient_of_eps(order)
        return cls(coeffs, trunc_order=trunc_order)

    @classmethod
    def exact(cls, expr) -> 'EpsSeries':
        return cls.from_expr(Expr.lift(expr))

    @classmethod
    def zero(cls, trunc_order: Optional[int] = None) -> 'EpsSeries':
        return cls({}, trunc_order=trunc_order)

    # Access

    def coefficient(self, order: int) -> Expr:
        if self.trunc_order is not None and order >= self.trunc_order:
            raise InsufficientOrder(
                f"coefficient of ep^{order} requested, series known below ep^{self.trunc_order}")
        return self.coeffs.get(order, Expr.zero())

    def orders(self) -> Iterable[int]:
        return self.coeffs.keys()

    def is_zero(self) -> bool:
        return not self.coeffs

    def leading_order(self) -> Optional[int]:
        return next(iter(self.coeffs), None)

    # Arithmetic

    def __add__(self, other) -> 'EpsSeries':
        other = _lift(other)
        trunc = _tmin(self.trunc_order, other.trunc_order)
        coeffs = dict(self.coeffs)
        for k, c in other.coeffs.items():
            coeffs[k] = coeffs[k] + c if k in coeffs else c
        return EpsSeries(coeffs, min(self.min_order, other.min_order), trunc,
                         self.lost or other.lost)

    __radd__ = __add__

    def __neg__(self) -> 'EpsSeries':
        return EpsSeries({k: -c for k, c in self.coeffs.items()}, self.min_order,
                         self.trunc_order, self.lost)

    def __sub__(self, other) -> 'EpsSeries':
        return self + (-_lift(other))

    def __mul__(self, other) -> 'EpsSeries':
        if not isinstance(other, EpsSeries):
            if isinstance(other, Expr) and other.has_atom_type(type(EPS)):
                other = EpsSeries.exact(other)
            else:
                return self.scale(other)
        trunc = _tmin(_tadd(self.trunc_order, other.min_order),
                      _tadd(other.trunc_order, self.min_order))
        coeffs: Dict[int, Expr] = {}
        for i, a in self.coeffs.items():
            for j, b in other.coeffs.items():
                k = i + j
                if trunc is not None and k >= trunc:
                    continue
                product = a * b
                coeffs[k] = coeffs[k] + product if k in coeffs else product
        return EpsSeries(coeffs, self.min_order + other.min_order, trunc,
                         self.lost or other.lost)

    __rmul__ = __mul__

    def scale(self, factor) -> 'EpsSeries':
        """Multiply every coefficient by an ep-free Expr or scalar"""
        factor = Expr.lift(factor)
        return EpsSeries({k: c * factor for k, c in self.coeffs.items()}, self.min_order,
                         self.trunc_order, self.lost)

    def shift(self, k: int) -> 'EpsSeries':
        """Multiply by ep^k"""
        return EpsSeries({o + k: c for o, c in self.coeffs.items()}, self.min_order + k,
                         _tadd(self.trunc_order, k), self.lost)

    def map_coeffs(self, fn) -> 'EpsSeries':
        return EpsSeries({k: fn(c) for k, c in self.coeffs.items()}, self.min_order,
                         self.trunc_order, self.lost)

    def truncate(self, order: int) -> 'EpsSeries':
        """Keep orders below `order`"""
        return EpsSeries(self.coeffs, self.min_order, _tmin(self.trunc_order, order), self.lost)

    def request(self, order: int) -> 'EpsSeries':
        """Truncate at `order`, flagging lost if fewer orders are known"""
        result = self.truncate(order)
        if self.trunc_order is not None and self.trunc_order < order:
            result.lost = True
        return result

    def exp(self) -> 'EpsSeries':
        """exp of a series with no content below ep^1"""
        if any(k < 1 for k in self.coeffs):
            raise ValueError("exp needs a series starting at ep^1 or later")
        if self.trunc_order is None:
            if self.coeffs:
                raise ValueError("exp of an exact non-zero series needs a truncation order")
            return EpsSeries.exact(1)
        result = EpsSeries({0: Expr.one()}, 0, self.trunc_order, self.lost)
        power = EpsSeries({0: Expr.one()}, 0, self.trunc_order)
        k = 1
        while True:
            power = power * self
            if power.is_zero() or power.leading_order() >= self.trunc_order:
                break
            result = result + power.scale(sympy.Rational(1, sympy.factorial(k)))
            k += 1
        return result

    def reciprocal(self) -> 'EpsSeries':
        """1/series when the leading coefficient is a nonzero scalar"""
        lead = self.leading_order()
        if lead is None:
            raise ZeroDivisionError("reciprocal of a zero series")
        c0 = self.coeffs[lead]
        if not c0.is_scalar():
            raise ValueError("reciprocal needs a scalar leading coefficient")
        inv = 1 / c0.scalar_value()
        rest = self.shift(-lead).scale(inv) - EpsSeries.exact(1)
        trunc = rest.trunc_order
        if trunc is None and not rest.is_zero():
            raise ValueError("reciprocal of an exact non-monomial series needs a truncation order")
        result = EpsSeries({0: Expr.one()}, 0, trunc, self.lost)
        power = EpsSeries({0: Expr.one()}, 0, trunc)
        while True:
            power = power * (-rest)
            if power.is_zero() or power.leading_order() >= trunc:
                break
            result = result + power
        return result.scale(inv).shift(-lead)

    # Output

    def to_expr(self, marker: bool = True) -> Expr:
        """ep^k coefficients as one Expr; an order(P) term records the truncation"""
        pieces = [c * Expr.eps(k) if k else c for k, c in self.coeffs.items()]
        if marker and self.trunc_order is not None:
            pieces.append(Expr.atom(OrderMarker(self.trunc_order)))
        return Expr.sum(pieces)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EpsSeries):
            return NotImplemented
        return (self.coeffs == other.coeffs and self.trunc_order == other.trunc_order
                and self.lost == other.lost)

    def __repr__(self) -> str:
        body = ', '.join(f"ep^{k}: {c}" for k, c in self.coeffs.items())
        return f"EpsSeries({{{body}}}, trunc={self.trunc_order}, lost={self.lost})"


def _lift(value) -> EpsSeries:
    if isinstance(value, EpsSeries):
        return value
    return EpsSeries.exact(value)

