"""
Expression kernel: integer-linear arguments, atoms, canonical expressions
"""
from .atoms import (
    EPS, Atom, Bino, Delta, DeltaP, Eps, FacFactor, GammaFactor, LinFactor,
    OrderMarker, Pow, SSum, SumOp, Theta, ZSum,
)
from .errors import NestsumError
from .expr import Expr, Term, canon, normalize_term
from .linear import INF, Boundary, LinearArg, boundary_difference
from .rewrite import shift_index, simplify_theta_delta, substitute, transform_atom


def normalize(expr: Expr) -> Expr:
    """Re-normalize every term; idempotent on canonical input"""
    return Expr.from_terms((t.coeff, t.atoms) for t in expr.terms)


def den(arg: LinearArg, power: int = 1) -> Expr:
    return Expr.atom(LinFactor(arg), -power)


def num(arg: LinearArg, power: int = 1) -> Expr:
    return Expr.atom(LinFactor(arg), power)


def pow_(base, exponent: LinearArg) -> Expr:
    return Expr.atom(Pow(canon(base), exponent))


def s_sum(upper: Boundary, weights, args) -> Expr:
    return Expr.atom(SSum(upper, tuple(weights), tuple(canon(x) for x in args)))


def z_sum(upper: Boundary, weights, args) -> Expr:
    return Expr.atom(ZSum(upper, tuple(weights), tuple(canon(x) for x in args)))


def sum_op(index: str, lower, upper) -> Expr:
    if isinstance(lower, int):
        lower = LinearArg.const(lower)
    if isinstance(upper, int):
        upper = LinearArg.const(upper)
    return Expr.atom(SumOp(index, lower, upper))


def theta(arg: LinearArg) -> Expr:
    return Expr.atom(Theta(arg))


def delta(arg: LinearArg) -> Expr:
    return Expr.atom(Delta(arg))
