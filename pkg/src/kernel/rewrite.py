"""
Index substitution and theta/delta simplification
"""
import logging
from typing import Callable, List, Optional, Tuple

from .atoms import (
    Atom, Bino, Delta, DeltaP, FacFactor, GammaFactor, LinFactor, Pow, SSum,
    SumOp, Theta,
)
from .errors import SubstituteIntoBoundIndex, SymbolicOffset
from .expr import Expr, Term, normalize_term
from .linear import INF, LinearArg, boundary_difference

logger = logging.getLogger(__name__)

ArgMap = Callable[[LinearArg], LinearArg]


def transform_atom(atom: Atom, fn: ArgMap) -> Atom:
    """Apply fn to every integer-linear argument of the atom"""
    if isinstance(atom, Pow):
        return Pow(atom.base, fn(atom.exponent))
    if isinstance(atom, (LinFactor, FacFactor, GammaFactor, Theta, Delta, DeltaP)):
        return type(atom)(fn(atom.arg))
    if isinstance(atom, Bino):
        return Bino(fn(atom.top), fn(atom.bottom))
    if isinstance(atom, SSum):
        return atom if atom.upper is INF else atom.with_upper(fn(atom.upper))
    if isinstance(atom, SumOp):
        upper = atom.upper if atom.upper is INF else fn(atom.upper)
        return SumOp(atom.index, fn(atom.lower), upper)
    return atom


def transform_term(term: Term, fn: ArgMap, keep: Optional[Atom] = None) -> List[Term]:
    atoms = [(a if a is keep else transform_atom(a, fn), p) for a, p in term.atoms]
    return normalize_term(term.coeff, atoms)


def substitute(expr: Expr, index: str, value: LinearArg) -> Expr:
    """
    Replace index by value everywhere, then normalize.

    A bound index may only be shifted; the bounds of its sum move with it so
    that the value of the sum is unchanged.
    """
    def replace(arg: LinearArg) -> LinearArg:
        return arg.substitute(index, value)

    raw: List[Term] = []
    for term in expr.terms:
        bound = [op for op in term.sum_ops() if op.index == index]
        if not bound:
            raw.extend(transform_term(term, replace))
            continue
        shift = value - LinearArg.index(index)
        if not shift.is_constant:
            raise SubstituteIntoBoundIndex(
                f"cannot substitute {index} -> {value} inside sum({index},...)", term)
        op = bound[0]
        c = shift.offset
        moved = SumOp(index, op.lower.shift(-c), op.upper if op.upper is INF else op.upper.shift(-c))
        atoms = [(moved if a is op else transform_atom(a, replace), p) for a, p in term.atoms]
        raw.extend(normalize_term(term.coeff, atoms))
    return Expr.from_terms((t.coeff, t.atoms) for t in raw)


def shift_index(expr: Expr, index: str, c: int) -> Expr:
    """index -> index + c"""
    return substitute(expr, index, LinearArg.index(index, c))


def simplify_theta_delta(expr: Expr, index: Optional[str] = None) -> Expr:
    """
    Collapse sums against deltas, fold thetas into sum bounds and drop
    thetas implied by S-sums or deltas in the same term.
    """
    pieces = []
    for term in expr.terms:
        pieces.append(_simplify_term(term, index))
    return Expr.sum(pieces)


def _simplify_term(term: Term, index: Optional[str]) -> Expr:
    for op in term.sum_ops():
        if index is not None and op.index != index:
            continue
        for atom, _ in term.atoms:
            if isinstance(atom, Delta) and abs(atom.arg.coeff(op.index)) == 1:
                return _collapse_sum(term, op, atom)
    for op in term.sum_ops():
        if index is not None and op.index != index:
            continue
        narrowed = _narrow_bounds(term, op)
        if narrowed is not None:
            return _simplify_term(narrowed, index)

    atoms = list(term.atoms)
    deltas = [a for a, _ in atoms if isinstance(a, Delta)]
    kept: List[Tuple[Atom, int]] = []
    for atom, power in atoms:
        if isinstance(atom, Theta):
            verdict = _theta_verdict(atom, deltas, atoms)
            if verdict is False:
                return Expr.zero()
            if verdict is True:
                continue
        kept.append((atom, power))
    return Expr.from_terms([(term.coeff, kept)])


def _collapse_sum(term: Term, op: SumOp, delta: Delta) -> Expr:
    """sum(j,L,U)*delta(j-c)*f(j) -> theta(c-L)*theta(U-c)*f(c)"""
    c_j = delta.arg.coeff(op.index)
    # delta(c_j*j + rest) forces j = -rest/c_j
    value = -(delta.arg.without(op.index)).scale(c_j)
    rest = term.without(op, delta)
    guards: List[Tuple[Atom, int]] = [(Theta(value - op.lower), 1)]
    if op.upper is not INF:
        guards.append((Theta(op.upper - value), 1))
    # a point outside the range contributes nothing, even where f is singular
    if not normalize_term(1, guards):
        return Expr.zero()
    return substitute(Expr.from_terms([(rest.coeff, rest.atoms + tuple(guards))]),
                      op.index, value)


def _narrow_bounds(term: Term, op: SumOp) -> Optional[Term]:
    """Fold theta(j + c) and theta(U' - j) into the bounds of sum(j,...)"""
    for atom, _ in term.atoms:
        if not isinstance(atom, Theta):
            continue
        c_j = atom.arg.coeff(op.index)
        if abs(c_j) != 1:
            continue
        limit = atom.arg.without(op.index).scale(-c_j)
        try:
            if c_j > 0:
                # j >= limit
                diff = boundary_difference(limit, op.lower)
                new_op = SumOp(op.index, limit if diff > 0 else op.lower, op.upper)
            else:
                # j <= limit
                top = limit
                diff = boundary_difference(op.upper, top)
                new_op = SumOp(op.index, op.lower, top if diff > 0 else op.upper)
        except SymbolicOffset:
            continue
        atoms = tuple((new_op if a is op else a, p) for a, p in term.atoms if a is not atom)
        found = normalize_term(term.coeff, atoms)
        return found[0] if found else Term(0, ())
    return None


def _theta_verdict(theta: Theta, deltas: List[Delta], atoms) -> Optional[bool]:
    """True: theta is 1 in this term; False: the term vanishes; None: keep"""
    var = theta.arg.variable_part()
    for delta in deltas:
        # delta fixes its variable part to -delta.offset
        if delta.arg.variable_part() == var:
            return theta.arg.offset - delta.arg.offset >= 0
        if delta.arg.variable_part() == -var:
            return theta.arg.offset + delta.arg.offset >= 0
    for atom, _ in atoms:
        if isinstance(atom, SSum) and atom.depth >= 1 and atom.upper is not INF:
            if atom.upper.variable_part() == var:
                c = -theta.arg.offset
                d = atom.upper.offset
                if c + d <= 1:
                    return True
    return None
