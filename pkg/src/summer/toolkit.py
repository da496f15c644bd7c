"""
Rewrites shared by the summation algorithms.

All helpers work on one term and one sum(i,L,U) of it and return an Expr
that is fed back to the driver. None of them closes a sum by itself.
"""
import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import sympy

from src.kernel import (
    Atom, Bino, Expr, FacFactor, LinFactor, Pow, SSum, SumOp, Term, Theta, canon,
    substitute,
)
from src.kernel.errors import InfiniteFlip, SymbolicOffset, UnsupportedShape
from src.kernel.linear import INF, LinearArg, boundary_difference
from src.kernel.rewrite import transform_term

logger = logging.getLogger(__name__)


def linear_in(arg: LinearArg, index: str) -> Tuple[int, LinearArg]:
    """(s, A) with arg = s*(index + A), s = +-1"""
    s = arg.coeff(index)
    if abs(s) != 1:
        raise UnsupportedShape(f"argument {arg} has coefficient {s} at {index}")
    return s, arg.without(index).scale(s)


def linear_expr(arg: LinearArg) -> Expr:
    """num(arg), or the number itself for a constant"""
    if arg.is_constant:
        return Expr.scalar(arg.offset)
    return Expr.atom(LinFactor(arg))


def inverse_power(arg: LinearArg, power: int) -> Expr:
    if arg.is_constant:
        if arg.offset == 0:
            raise UnsupportedShape("partial fractions of coinciding denominators")
        return Expr.scalar(sympy.Rational(1, arg.offset ** power))
    return Expr.atom(LinFactor(arg), -power)


def term_without(term: Term, *atoms: Atom) -> Expr:
    return Expr.from_terms([(term.coeff, term.without(*atoms).atoms)])


def replace_op(term: Term, op: SumOp, new_op: Optional[SumOp]) -> Expr:
    atoms = [(a, p) for a, p in term.atoms if a is not op]
    if new_op is not None:
        atoms.append((new_op, 1))
    return Expr.from_terms([(term.coeff, atoms)])


@dataclass
class Sides:
    """
    Factors of a summand sorted by how they depend on the summation index i.

    i-side factors have arguments i + const; (N-i)-side factors have
    arguments -i + P with a symbolic partner P.
    """
    index: str
    pow_base: sympy.Expr = sympy.Integer(1)
    bino: Optional[Bino] = None
    i_dens: List[Tuple[LinFactor, int]] = field(default_factory=list)
    i_nums: List[Tuple[LinFactor, int]] = field(default_factory=list)
    ni_dens: List[Tuple[LinFactor, int]] = field(default_factory=list)
    ni_nums: List[Tuple[LinFactor, int]] = field(default_factory=list)
    i_sums: List[Tuple[SSum, int]] = field(default_factory=list)
    ni_sums: List[Tuple[SSum, int]] = field(default_factory=list)
    pows: List[Pow] = field(default_factory=list)
    unsupported: List[Atom] = field(default_factory=list)

    @property
    def has_ni(self) -> bool:
        return bool(self.ni_dens or self.ni_nums or self.ni_sums)

    def partners(self) -> List[LinearArg]:
        """P for every (N-i)-side factor"""
        found = []
        for atom, _ in self.ni_dens + self.ni_nums:
            _, a = linear_in(atom.arg, self.index)
            found.append(-a)
        for atom, _ in self.ni_sums:
            found.append(atom.upper.without(self.index))
        return found


def classify(term: Term, op: SumOp) -> Sides:
    index = op.index
    sides = Sides(index)
    for atom, power in term.atoms:
        if atom is op or index not in atom.indices():
            continue
        if isinstance(atom, Pow):
            if atom.exponent != LinearArg.index(index):
                sides.unsupported.append(atom)
                continue
            sides.pow_base = sides.pow_base * atom.base ** power
            sides.pows.append(atom)
        elif isinstance(atom, LinFactor):
            if abs(atom.arg.coeff(index)) != 1 or atom.arg.has_eps:
                sides.unsupported.append(atom)
                continue
            _, a = linear_in(atom.arg, index)
            if a.is_constant:
                (sides.i_nums if power > 0 else sides.i_dens).append((atom, power))
            else:
                (sides.ni_nums if power > 0 else sides.ni_dens).append((atom, power))
        elif type(atom) is SSum:
            c = atom.upper.coeff(index)
            rest = atom.upper.without(index)
            if c == 1 and rest.is_constant:
                sides.i_sums.append((atom, power))
            elif c == -1 and not rest.is_constant:
                sides.ni_sums.append((atom, power))
            else:
                sides.unsupported.append(atom)
        elif isinstance(atom, Bino) and power == 1 and not atom.top.has(index) \
                and abs(atom.bottom.coeff(index)) == 1 and sides.bino is None:
            sides.bino = atom
        else:
            sides.unsupported.append(atom)
    return sides


def split_den(term: Term, index: str) -> Optional[Expr]:
    """
    Partial fractions of the first two denominators in index:

    1/((i+A)^p (i+B)^q) = sum_{k<p} C(q+k-1,k) (-1)^k (B-A)^-(q+k) (i+A)^-(p-k)
                        + sum_{k<q} C(p+k-1,k) (-1)^k (A-B)^-(p+k) (i+B)^-(q-k)
    """
    dens = [(a, -p) for a, p in term.atoms
            if isinstance(a, LinFactor) and p < 0 and a.arg.has(index)]
    if len(dens) < 2:
        return None
    (d1, p), (d2, q) = dens[0], dens[1]
    s1, a = linear_in(d1.arg, index)
    s2, b = linear_in(d2.arg, index)
    i_arg = LinearArg.index(index)
    pieces = []
    for k in range(p):
        c = sympy.binomial(q + k - 1, k) * (-1) ** k
        pieces.append(inverse_power(b - a, q + k) * Expr.atom(LinFactor(i_arg + a), -(p - k)) * c)
    for k in range(q):
        c = sympy.binomial(p + k - 1, k) * (-1) ** k
        pieces.append(inverse_power(a - b, p + k) * Expr.atom(LinFactor(i_arg + b), -(q - k)) * c)
    return term_without(term, d1, d2) * Expr.sum(pieces) * (s1 ** p * s2 ** q)


def reduce_nums(term: Term, index: str) -> Optional[Expr]:
    """
    Rewrite num(i+C)^p as (num(i+A) + (C-A))^p around the first denominator
    den(i+A), or around i when there is none, so that powers cancel.
    """
    dens = [a for a, p in term.atoms if isinstance(a, LinFactor) and p < 0 and a.arg.has(index)]
    a = linear_in(dens[0].arg, index)[1] if dens else LinearArg.const(0)
    base = Expr.atom(LinFactor(LinearArg.index(index) + a))
    targets = []
    for atom, power in term.atoms:
        if isinstance(atom, LinFactor) and power > 0 and atom.arg.has(index):
            s, c = linear_in(atom.arg, index)
            if c != a:
                targets.append((atom, power, s, c))
    if not targets:
        return None
    result = term_without(term, *[t[0] for t in targets])
    for _, power, s, c in targets:
        result = result * ((base + linear_expr(c - a)) * s) ** power
    return result


def flip_index(term: Term, op: SumOp) -> Expr:
    """i -> L + U - i on the summand; the sum keeps its bounds"""
    if op.upper is INF:
        raise InfiniteFlip(f"cannot flip sum({op.index},{op.lower},inf)", term)
    mirror = op.lower + op.upper - LinearArg.index(op.index)
    found = transform_term(term, lambda arg: arg.substitute(op.index, mirror), keep=op)
    return Expr.from_terms((t.coeff, t.atoms) for t in found)


def point(term: Term, op: SumOp, value: LinearArg) -> Expr:
    """The summand at index = value"""
    return substitute(term_without(term, op), op.index, value)


def move_lower(term: Term, op: SumOp, lower: int) -> Expr:
    """Same sum written with lower bound `lower` plus explicit guarded terms"""
    if not op.lower.is_constant:
        raise SymbolicOffset(f"symbolic lower bound {op.lower}", term)
    old = op.lower.offset
    moved = replace_op(term, op, SumOp(op.index, LinearArg.const(lower), op.upper))
    if lower < old:
        span, sign = range(lower, old), -1
    else:
        span, sign = range(old, lower), 1
    pieces = [moved]
    for k in span:
        piece = point(term, op, LinearArg.const(k)) * sign
        if op.upper is not INF:
            piece = piece * Expr.atom(Theta(op.upper.shift(-k)))
        pieces.append(piece)
    return Expr.sum(pieces)


def move_upper(term: Term, op: SumOp, upper: LinearArg) -> Expr:
    """Same sum written with upper bound `upper` plus explicit guarded terms"""
    d = boundary_difference(upper, op.upper)
    moved = replace_op(term, op, SumOp(op.index, op.lower, upper))
    if d > 0:
        points, sign = [op.upper.shift(r) for r in range(1, d + 1)], -1
    else:
        points, sign = [op.upper.shift(-r) for r in range(0, -d)], 1
    pieces = [moved]
    for at in points:
        pieces.append(point(term, op, at) * Expr.atom(Theta(at - op.lower)) * sign)
    return Expr.sum(pieces)


def split_symbolic_lower(term: Term, op: SumOp) -> Expr:
    """sum(i,L,U) = theta(U-L+1) * (sum(i,1,U) - sum(i,1,L-1)) for symbolic L"""
    one = LinearArg.const(1)
    guard = Expr.atom(Theta(op.upper - op.lower + 1)) if op.upper is not INF else Expr.one()
    full = replace_op(term, op, SumOp(op.index, one, op.upper))
    head = replace_op(term, op, SumOp(op.index, one, op.lower.shift(-1)))
    return (full - head) * guard


def expand_explicit(term: Term, op: SumOp, limit: int = 1000) -> Expr:
    """Sum with two numeric bounds as its explicit terms"""
    lo, hi = op.lower.offset, op.upper.offset
    if hi - lo >= limit:
        raise UnsupportedShape(f"explicit sum over {hi - lo + 1} terms", term)
    return Expr.sum(point(term, op, LinearArg.const(k)) for k in range(lo, hi + 1))


def _fac_groups(term: Term, index: str):
    groups = {}
    for atom, power in term.atoms:
        if isinstance(atom, FacFactor) and atom.arg.has(index):
            groups.setdefault(atom.arg.variable_part(), []).append((atom, power))
    return groups


def simplify_fac_gam(term: Term, index: str) -> Optional[Expr]:
    """
    fac(v+c1)^p fac(v+c2)^q -> fac(v+c)^(p+q) times num/den products, and
    fac(T) invfac(B) invfac(T-B) -> bino(T, B).
    """
    for atoms in _fac_groups(term, index).values():
        if len(atoms) < 2:
            continue
        low = min(a.arg.offset for a, _ in atoms)
        var = atoms[0][0].arg.variable_part()
        result = term_without(term, *[a for a, _ in atoms])
        total = 0
        for atom, power in atoms:
            total += power
            for t in range(low + 1, atom.arg.offset + 1):
                result = result * Expr.atom(LinFactor(var.shift(t)), power)
        return result * Expr.atom(FacFactor(var.shift(low)), total)

    tops = [a for a, p in term.atoms if isinstance(a, FacFactor) and p == 1 and not a.arg.has(index)]
    inv = [a for a, p in term.atoms if isinstance(a, FacFactor) and p == -1 and a.arg.has(index)]
    for b in inv:
        if b.arg.coeff(index) != 1:
            continue
        for top in tops:
            rest = top.arg - b.arg
            partner = FacFactor(rest)
            if partner in inv and partner != b:
                return term_without(term, top, b, partner) * Expr.atom(Bino(top.arg, b.arg))
    return None


def mirror_bino(term: Term, index: str) -> Optional[Expr]:
    """bino(T, P-i) -> bino(T, T-P+i)"""
    for atom, power in term.atoms:
        if isinstance(atom, Bino) and atom.bottom.coeff(index) == -1 and not atom.top.has(index):
            return term_without(term, atom) * Expr.atom(Bino(atom.top, atom.top - atom.bottom), power)
    return None


def fresh_sum(index: str, lower, upper) -> Expr:
    if isinstance(lower, int):
        lower = LinearArg.const(lower)
    return Expr.atom(SumOp(index, lower, upper))


# Hook applied to every S-sum argument of a final result
_argument_simplifier: Callable[[sympy.Expr], sympy.Expr] = lambda x: x


def set_argument_simplifier(fn: Optional[Callable[[sympy.Expr], sympy.Expr]]) -> None:
    """Install a rewrite for S-sum arguments; None restores the identity"""
    global _argument_simplifier
    _argument_simplifier = fn if fn is not None else (lambda x: x)


def simplify_sum_args(expr: Expr) -> Expr:
    raw = []
    for term in expr.terms:
        atoms = []
        for atom, power in term.atoms:
            if isinstance(atom, SSum):
                args = tuple(canon(_argument_simplifier(x)) for x in atom.args)
                atom = type(atom)(atom.upper, atom.weights, args)
            atoms.append((atom, power))
        raw.append((term.coeff, atoms))
    return Expr.from_terms(raw)

