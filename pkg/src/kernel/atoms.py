"""
Atoms of the expression kernel

A term is a coefficient times a sorted tuple of (atom, power) pairs. Mutually
inverse keywords share one atom with a signed power: num/den, fac/invfac and
Gamma/InvGamma cancel as soon as they meet on the same argument.
"""
from dataclasses import dataclass
from typing import Tuple

import sympy

from .linear import INF, Boundary, LinearArg, boundary_key


def sympy_key(value: sympy.Expr):
    return sympy.default_sort_key(value)


@dataclass(frozen=True)
class Atom:
    """Base class; subclasses define TAG (the fixed variant order) and args_key"""
    TAG = 99

    def args_key(self):
        raise NotImplementedError

    def sort_key(self):
        return (self.TAG, self.args_key())

    def indices(self) -> Tuple[str, ...]:
        return ()


@dataclass(frozen=True)
class Pow(Atom):
    """pow(base, exponent); exponent is a single variable j, n or a*ep after normalization"""
    base: sympy.Expr
    exponent: LinearArg
    TAG = 0

    def args_key(self):
        return (self.exponent.sort_key(), sympy_key(self.base))

    def indices(self):
        return self.exponent.index_names()


@dataclass(frozen=True)
class LinFactor(Atom):
    """num(arg) for positive powers, den(arg) for negative powers"""
    arg: LinearArg
    TAG = 1

    def args_key(self):
        return self.arg.sort_key()

    def indices(self):
        return self.arg.index_names()


@dataclass(frozen=True)
class FacFactor(Atom):
    """fac(arg) for positive powers, invfac(arg) for negative powers"""
    arg: LinearArg
    TAG = 3

    def args_key(self):
        return self.arg.sort_key()

    def indices(self):
        return self.arg.index_names()


@dataclass(frozen=True)
class Bino(Atom):
    top: LinearArg
    bottom: LinearArg
    TAG = 5

    def args_key(self):
        return (self.top.sort_key(), self.bottom.sort_key())

    def indices(self):
        return self.top.index_names() + self.bottom.index_names()


@dataclass(frozen=True)
class GammaFactor(Atom):
    """Gamma(arg) for positive powers, InvGamma(arg) for negative powers"""
    arg: LinearArg
    TAG = 6

    def args_key(self):
        return self.arg.sort_key()

    def indices(self):
        return self.arg.index_names()


@dataclass(frozen=True)
class SSum(Atom):
    """S(upper; weights; args) with S(n;m1,...;x1,...) = sum_{i=1}^n x1^i/i^m1 S(i;...)"""
    upper: Boundary
    weights: Tuple[int, ...]
    args: Tuple[sympy.Expr, ...]
    TAG = 8

    @property
    def depth(self) -> int:
        return len(self.weights)

    @property
    def weight(self) -> int:
        return sum(self.weights)

    def args_key(self):
        return (boundary_key(self.upper), self.weights, tuple(sympy_key(a) for a in self.args))

    def indices(self):
        return () if self.upper is INF else self.upper.index_names()

    def with_upper(self, upper: Boundary) -> 'SSum':
        return type(self)(upper, self.weights, self.args)


@dataclass(frozen=True)
class ZSum(SSum):
    """Z-sum: as SSum with strict nesting of the inner indices"""
    TAG = 9


@dataclass(frozen=True)
class SumOp(Atom):
    """sum(index, lower, upper) acting on the rest of its term"""
    index: str
    lower: LinearArg
    upper: Boundary
    TAG = 10

    def args_key(self):
        from .linear import index_key
        return (index_key(self.index), self.lower.sort_key(), boundary_key(self.upper))

    def indices(self):
        upper = () if self.upper is INF else self.upper.index_names()
        return self.lower.index_names() + upper


@dataclass(frozen=True)
class Theta(Atom):
    """theta(x) = 1 for x >= 0, 0 otherwise"""
    arg: LinearArg
    TAG = 11

    def args_key(self):
        return self.arg.sort_key()

    def indices(self):
        return self.arg.index_names()


@dataclass(frozen=True)
class Delta(Atom):
    """Kronecker delta(x)"""
    arg: LinearArg
    TAG = 12

    def args_key(self):
        return self.arg.sort_key()

    def indices(self):
        return self.arg.index_names()


@dataclass(frozen=True)
class DeltaP(Atom):
    """deltap(x) = 1 - delta(x); expanded away by normalization"""
    arg: LinearArg
    TAG = 13

    def args_key(self):
        return self.arg.sort_key()


@dataclass(frozen=True)
class Eps(Atom):
    """The expansion parameter; its power is the ep order (epow)"""
    TAG = 15

    def args_key(self):
        return ()


@dataclass(frozen=True)
class OrderMarker(Atom):
    """order(P): content at ep^P and beyond was not computed"""
    order: int
    TAG = 16

    def args_key(self):
        return (self.order,)


EPS = Eps()
