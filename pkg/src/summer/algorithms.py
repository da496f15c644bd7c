"""
Single steps of the summation algorithms for one sum(i,L,U).

Type A: only factors in i + const and pow(x,i), S(i+b;...)
Type B: factors in i and in P - i (convolutions), no binomial
Type C: bino(N,i) with factors in i only (conjugations)
Type D: bino(N,i) with factors in i and N - i (binomial convolutions)

A step returns (kind, expr). The expression either has no sum over i left
or holds terms that are closer to a closed form; the driver feeds them
back until every sum is gone.
"""
import logging
from typing import Callable, Optional, Tuple

import sympy

from src.algebra import basis_s, synchronize_offset
from src.kernel import (
    Bino, Expr, LinFactor, Pow, SSum, SumOp, Term, Theta, canon, shift_index,
)
from src.kernel.errors import (
    InfiniteConjugation, NegativePower, SingularArgument, SymbolicOffset, UnsupportedShape,
)
from src.kernel.linear import INF, LinearArg, boundary_difference

from .polysums import power_sum
from .toolkit import (
    Sides, flip_index, fresh_sum, linear_expr, linear_in, move_lower, move_upper,
    reduce_nums, replace_op, split_den, split_symbolic_lower, term_without,
)

logger = logging.getLogger(__name__)

Step = Tuple[str, Expr]
Fresh = Callable[[], str]


def _s(upper, weights, args) -> Expr:
    if not weights:
        return Expr.one()
    return Expr.atom(SSum(upper, tuple(weights), tuple(canon(x) for x in args)))


def _pow(base, exponent: LinearArg) -> Expr:
    return Expr.atom(Pow(canon(base), exponent))


def _den(arg: LinearArg, power: int = 1) -> Expr:
    return Expr.atom(LinFactor(arg), -power)


def _outside(term: Term, index: str) -> Expr:
    """The factors of term that do not depend on index"""
    return term_without(term, *[a for a, _ in term.atoms if index in a.indices()
                                or isinstance(a, SumOp) and a.index == index])


def _sync_sums(term: Term, sums, target: LinearArg) -> Expr:
    result = term_without(term, *[s for s, _ in sums])
    for s, power in sums:
        result = result * synchronize_offset(s, target) ** power
    return result


def _prepare_i_sums(term: Term, op: SumOp, sides: Sides) -> Optional[Expr]:
    """
    Bring every S(i+b;...) to S(i;...) and products to single sums.
    Returns a step expression when something changed, None when the sums
    are already in place.
    """
    if not sides.i_sums:
        return None
    target = LinearArg.index(op.index)
    if any(s.upper != target for s, _ in sides.i_sums):
        return _sync_sums(term, sides.i_sums, target)
    if len(sides.i_sums) > 1 or sides.i_sums[0][1] > 1:
        return basis_s(Expr((term,)))
    return None


def step_a(term: Term, op: SumOp, sides: Sides, fresh: Fresh) -> Step:
    """sum_i x^i/(i+a)^m S(i+b;R)"""
    i = op.index
    found = split_den(term, i)
    if found is not None:
        return 'A', found
    if sides.i_dens:
        atom, _ = sides.i_dens[0]
        a = linear_in(atom.arg, i)[1].offset
        if a:
            return 'A', shift_index(Expr((term,)), i, -a)
    found = reduce_nums(term, i)
    if found is not None:
        return 'A', found
    if not op.lower.is_constant:
        return 'A', split_symbolic_lower(term, op)
    found = _prepare_i_sums(term, op, sides)
    if found is not None:
        return 'A', found
    if op.lower.offset != 1:
        return 'A', move_lower(term, op, 1)

    m = -term.power(LinFactor(LinearArg.index(i)))
    s = sides.i_sums[0][0] if sides.i_sums else None
    rest = _outside(term, i)
    x, upper = sides.pow_base, op.upper
    if m >= 1:
        weights = (m,) + (s.weights if s else ())
        args = (x,) + (s.args if s else ())
        return 'A', rest * _s(upper, weights, args)
    return 'posPow', rest * _pos_pow(-m, x, s, upper, fresh)


def _pos_pow(p: int, x, s, upper, fresh: Fresh) -> Expr:
    """
    sum_{i=1}^U i^p x^i S(i;R). With R = (m1,R'; x1,X') the order of
    summation is swapped:
    P(U) S(U;R) - sum_{k=1}^U x1^k/k^m1 S(k;R') P(k-1)
    """
    if s is None:
        return power_sum(p, x, upper)
    k = fresh()
    kk = LinearArg.index(k)
    m1, x1 = s.weights[0], s.args[0]
    head = power_sum(p, x, upper, guard=False) * Expr.atom(s.with_upper(upper))
    swapped = (fresh_sum(k, 1, upper) * _pow(x1, kk) * _den(kk, m1)
               * _s(kk, s.weights[1:], s.args[1:]) * power_sum(p, x, kk.shift(-1), guard=False))
    return head - swapped


def close_pos_pow(term: Term, op: SumOp, sides: Sides, fresh: Fresh) -> Expr:
    """i^k, i^k x^i or i^k S(i;...) summed over 1..U"""
    i = op.index
    if sides.i_dens or sides.has_ni or sides.bino is not None:
        raise NegativePower(f"summand is not a positive power of {i}", term)
    if op.lower != LinearArg.const(1) or len(sides.i_sums) > 1:
        raise UnsupportedShape(f"sum over {i} needs lower bound 1 and one S-sum", term)
    p = term.power(LinFactor(LinearArg.index(i)))
    s = sides.i_sums[0][0] if sides.i_sums else None
    if s is not None and s.upper != LinearArg.index(i):
        raise UnsupportedShape(f"S-sum at {s.upper} is not synchronized to {i}", term)
    return _outside(term, i) * _pos_pow(p, sides.pow_base, s, op.upper, fresh)


def step_b(term: Term, op: SumOp, sides: Sides, fresh: Fresh) -> Step:
    """Convolutions sum_i f(i) g(P-i) with finite upper bound"""
    i = op.index
    if op.upper is INF:
        raise UnsupportedShape(f"factors in -{i} inside an infinite sum", term)
    for partner in sides.partners():
        try:
            boundary_difference(partner, op.upper)
        except SymbolicOffset:
            raise UnsupportedShape(f"factor in {partner} - {i} does not match the bound {op.upper}", term)
    if not op.lower.is_constant:
        return 'B', split_symbolic_lower(term, op)
    if op.lower.offset != 1:
        return 'B', shift_index(Expr((term,)), i, op.lower.offset - 1)
    kind = 'B' if sides.i_dens or sides.ni_dens else 'B0'
    found = split_den(term, i)
    if found is not None:
        return kind, found
    found = reduce_nums(term, i)
    if found is not None:
        return kind, found
    if sides.ni_dens:
        return kind, flip_index(term, op)

    # only S-sums are left on the (P-i) side
    top = op.upper.shift(1)
    offsets = [boundary_difference(s.upper.without(i), top) for s, _ in sides.ni_sums]
    lowest = min([0] + offsets)
    if lowest < 0:
        return kind, move_upper(term, op, op.upper.shift(lowest))
    target = top - LinearArg.index(i)
    if any(offsets):
        return kind, _sync_sums(term, sides.ni_sums, target)
    if len(sides.ni_sums) > 1 or sides.ni_sums[0][1] > 1:
        return kind, basis_s(Expr((term,)))

    # S(N-i;m1,R';y1,Y') = sum_{l=i+1}^N y1^(l-i)/(l-i)^m1 S(l-i;R')
    s = sides.ni_sums[0][0]
    l = fresh()
    ll = LinearArg.index(l)
    gap = ll - LinearArg.index(i)
    atoms = [(a, p) for a, p in term.atoms if a is not op and a is not s]
    atoms += [(SumOp(i, LinearArg.const(1), ll.shift(-1)), 1),
              (SumOp(l, LinearArg.const(2), top), 1),
              (Pow(s.args[0], gap), 1), (LinFactor(gap), -s.weights[0])]
    if s.depth > 1:
        atoms.append((SSum(gap, s.weights[1:], s.args[1:]), 1))
    return kind, Expr.from_terms([(term.coeff, atoms)])


def step_binomial(term: Term, op: SumOp, sides: Sides, fresh: Fresh) -> Step:
    """
    Common normalization for sums with bino(N,i), then type C or D.

    Bounds are brought to 1..N (C) or 1..N-1 (D) and (N-i)-side factors to
    den(N-i) and S(N-i;...). Where a boundary point of the summand is
    singular the binomial absorbs the shift instead of evaluating it.
    """
    i = op.index
    bino = sides.bino
    has_ni = sides.has_ni
    kind = ('D' if has_ni else 'C') + ('' if sides.i_dens or sides.ni_dens else '0')
    if op.upper is INF:
        raise InfiniteConjugation(f"bino({bino.top},{bino.bottom}) in a sum up to infinity", term)
    shift = bino.bottom.without(i)
    if not shift.is_constant:
        raise UnsupportedShape(f"binomial bottom {bino.bottom} is not {i} + const", term)
    if shift.offset:
        return kind, shift_index(Expr((term,)), i, -shift.offset)
    if not op.lower.is_constant:
        return kind, split_symbolic_lower(term, op)
    if op.lower.offset > 1:
        return kind, _absorb_lower(term, op, bino)
    if op.lower.offset < 1:
        return kind, move_lower(term, op, 1)

    found = split_den(term, i)
    if found is not None:
        return kind, found
    found = reduce_nums(term, i)
    if found is not None:
        return kind, found
    if has_ni:
        found = _match_partners(term, op, sides)
        if found is not None:
            return kind, found
    if term.power(LinFactor(LinearArg.index(i))) > 0 and (sides.i_sums or sides.ni_sums):
        return kind, _absorb_num(term, op, bino)

    top = bino.top
    target = top.shift(-1) if has_ni else top
    d = boundary_difference(op.upper, target)
    if d > 0 and not has_ni:
        # bino(N,i) vanishes above N
        return kind, replace_op(term, op, SumOp(i, op.lower, top))
    if d:
        return kind, move_upper(term, op, target)
    if has_ni:
        return kind, _step_d(term, op, sides, fresh)
    return kind, _step_c(term, op, sides, fresh)


def _absorb_lower(term: Term, op: SumOp, bino: Bino) -> Expr:
    """
    sum_{i=c+1}^U bino(N,i) f(i) as a sum from 1:
    bino(N,i+c) = prod_{t=0}^{c-1} (N-t) / prod_{t=1}^c (i+t) * bino(N-c,i)
    """
    i = op.index
    c = op.lower.offset - 1
    top = bino.top
    ii = LinearArg.index(i)
    factor = Expr.atom(Bino(top.shift(-c), ii))
    for t in range(c):
        factor = factor * linear_expr(top.shift(-t))
    for t in range(1, c + 1):
        factor = factor * _den(ii.shift(t))
    return shift_index(term_without(term, bino), i, c) * factor


def _absorb_num(term: Term, op: SumOp, bino: Bino) -> Expr:
    """i bino(N,i) = N bino(N-1,i-1)"""
    ii = LinearArg.index(op.index)
    return (term_without(term, bino) * _den(ii) * linear_expr(bino.top)
            * Expr.atom(Bino(bino.top.shift(-1), ii.shift(-1))))


def _partner_offset(partner: LinearArg, top: LinearArg, term: Term) -> int:
    try:
        return boundary_difference(partner, top)
    except SymbolicOffset:
        raise UnsupportedShape(f"factor in {partner} - i does not match bino({top},i)", term)


def _match_partners(term: Term, op: SumOp, sides: Sides) -> Optional[Expr]:
    """
    den(N+d-i) with d != 0 moves the binomial top towards N+d:
    bino(N,i) = bino(N+1,i) (N+1-i)/(N+1) and bino(N,i) = N/(N-i) bino(N-1,i).
    S(N+e-i;...) is synchronized to S(N-i;...).
    """
    i = op.index
    top = sides.bino.top
    ii = LinearArg.index(i)
    rest = term_without(term, sides.bino)
    for atom, _ in sides.ni_dens:
        d = _partner_offset(-linear_in(atom.arg, i)[1], top, term)
        if d > 0:
            up = top.shift(1)
            return rest * Expr.atom(Bino(up, ii)) * linear_expr(up - ii) * _den(up)
        if d < 0:
            return rest * Expr.atom(Bino(top.shift(-1), ii)) * linear_expr(top) * _den(top - ii)
    target = top - ii
    if any(_partner_offset(s.upper.without(i), top, term) for s, _ in sides.ni_sums):
        return _sync_sums(term, sides.ni_sums, target)
    return None


def _step_c(term: Term, op: SumOp, sides: Sides, fresh: Fresh) -> Expr:
    """
    F(N) = sum_{i=1}^N bino(N,i) y^i/(i+a)^m S(i;R), reduced through

    m >= 1: C(N,i)/(i+a) = prod_{t=1}^a den(N+t) sum_{k=i}^N prod_{t=1}^{a-1} (k+t) C(k,i)
    m = 0:  H(N) = (1+y) H(N-1) + den(N) sum_i C(N,i) (y x1)^i i^(1-m1) S(i;R')
    """
    i = op.index
    top = sides.bino.top
    y = canon(sides.pow_base)
    a, m = 0, 0
    if sides.i_dens:
        atom, power = sides.i_dens[0]
        a, m = linear_in(atom.arg, i)[1].offset, -power
        if a < 0:
            raise SingularArgument(f"den({atom.arg}) vanishes inside the binomial range", term)
    else:
        m = -term.power(LinFactor(LinearArg.index(i)))
    found = _prepare_i_sums(term, op, sides)
    if found is not None:
        return found

    s = sides.i_sums[0][0] if sides.i_sums else None
    rest = _outside(term, i)
    ii = LinearArg.index(i)
    weights = s.weights if s else ()
    args = s.args if s else ()

    if m >= 1:
        k = fresh()
        kk = LinearArg.index(k)
        inner = (fresh_sum(i, 1, kk) * Expr.atom(Bino(kk, ii)) * _pow(y, ii)
                 * _den(ii.shift(a), m - 1) * _s(ii, weights, args))
        outer = fresh_sum(k, 1, top)
        if a == 0:
            return rest * outer * _den(kk) * inner
        prefactor = Expr.one()
        for t in range(1, a + 1):
            prefactor = prefactor * _den(top.shift(t))
        weight = Expr.one()
        for t in range(1, a):
            weight = weight * linear_expr(kk.shift(t))
        return rest * prefactor * outer * weight * inner

    p = -m
    one_plus_y = canon(1 + y)
    if p > 0:
        pieces = []
        for r in range(1, p + 1):
            falling = Expr.one()
            for t in range(r):
                falling = falling * linear_expr(top.shift(-t))
            pieces.append(falling * _pow(one_plus_y, top.shift(-r))
                          * (sympy.functions.combinatorial.numbers.stirling(p, r) * y ** r))
        return rest * Expr.sum(pieces)
    if s is None:
        return rest * (_pow(one_plus_y, top) - 1)

    m1, x1 = weights[0], args[0]
    if one_plus_y == 0:
        return rest * _den(top) * (fresh_sum(i, 1, top) * Expr.atom(Bino(top, ii))
                                   * _pow(y * x1, ii) * _den(ii, m1 - 1) * _s(ii, weights[1:], args[1:]))
    k = fresh()
    kk = LinearArg.index(k)
    inner = (fresh_sum(i, 1, kk) * Expr.atom(Bino(kk, ii)) * _pow(y * x1, ii)
             * _den(ii, m1 - 1) * _s(ii, weights[1:], args[1:]))
    return (rest * _pow(one_plus_y, top) * fresh_sum(k, 1, top)
            * _pow(1 / one_plus_y, kk) * _den(kk) * inner)


def _step_d(term: Term, op: SumOp, sides: Sides, fresh: Fresh) -> Expr:
    """
    Binomial convolutions with upper bound N-1 and den(N-i), S(N-i;...)
    in place. One denominator is left after partial fractions; it ends up
    on the (N-i) side.
    """
    if sides.ni_sums and (len(sides.ni_sums) > 1 or sides.ni_sums[0][1] > 1):
        return basis_s(Expr((term,)))
    found = _prepare_i_sums(term, op, sides)
    if found is not None:
        return found
    if sides.i_dens or not sides.i_sums:
        return flip_index(term, op)
    if sides.ni_dens:
        return _binomial_convolution(term, op, sides, fresh)
    return _two_sided_convolution(term, op, sides, fresh)


def _binomial_convolution(term: Term, op: SumOp, sides: Sides, fresh: Fresh) -> Expr:
    """
    E_q(N) = sum_{i=1}^{N-1} bino(N,i) y^i/(N-i)^q S(i;R) S(N-i;Q) satisfies
    E_q(N) = y E_q(N-1) + den(N) E_(q-1)(N) + y T(N-1) with
    T(M) = sum_{i=0}^{M-1} bino(M,i) y^i x1^(i+1)/((M-i)^q (i+1)^m1) S(i+1;R') S(M-i;Q).
    Q may be empty.
    """
    i = op.index
    top = sides.bino.top
    y = canon(sides.pow_base)
    atom, power = sides.ni_dens[0]
    sign, _ = linear_in(atom.arg, i)
    q = -power
    s = sides.i_sums[0][0]
    m1, x1 = s.weights[0], s.args[0]
    tail_w, tail_x = s.weights[1:], s.args[1:]
    other = sides.ni_sums[0][0] if sides.ni_sums else None

    def partner(at: LinearArg) -> Expr:
        return Expr.atom(other.with_upper(at)) if other is not None else Expr.one()

    k = fresh()
    kk = LinearArg.index(k)
    ii = LinearArg.index(i)
    lower_q = (fresh_sum(i, 1, kk.shift(-1)) * Expr.atom(Bino(kk, ii)) * _pow(y, ii)
               * _den(kk - ii, q - 1) * Expr.atom(s) * partner(kk - ii))
    first = (Expr.atom(Theta(kk.shift(-2))) * _den(kk.shift(-1), q)
             * _s(LinearArg.const(1), tail_w, tail_x) * partner(kk.shift(-1)) * x1)
    rest_sum = (fresh_sum(i, 1, kk.shift(-2)) * Expr.atom(Bino(kk.shift(-1), ii))
                * _pow(y * x1, ii) * _den(kk.shift(-1) - ii, q) * _den(ii.shift(1), m1)
                * _s(ii.shift(1), tail_w, tail_x) * partner(kk.shift(-1) - ii) * x1)
    step = _den(kk) * lower_q + (first + rest_sum) * y
    # den(s*(i-N))^q = (-s)^q den(N-i)^q
    factor = (-sign) ** q
    return (_outside(term, i) * factor * _pow(y, top) * fresh_sum(k, 1, top)
            * _pow(1 / y, kk) * step)


def _two_sided_convolution(term: Term, op: SumOp, sides: Sides, fresh: Fresh) -> Expr:
    """
    F(N) = sum_{i=1}^{N-1} bino(N,i) y^i S(i;R) S(N-i;Q) with R = (m1,R'; x1,X')
    and Q = (q1,Q'; z1,Z'). Pascal's rule and the first terms of both sums give
    F(N) = (1+y) F(N-1) + G(N),
    G(N) = den(N) sum_{i=1}^{N-1} bino(N,i) y^i z1^(N-i)/(N-i)^(q1-1) S(i;R) S(N-i;Q')
         + y sum_{i=0}^{N-2} bino(N-1,i) y^i x1^(i+1)/(i+1)^m1 S(i+1;R') S(N-1-i;Q)
    """
    i = op.index
    top = sides.bino.top
    y = canon(sides.pow_base)
    s, other = sides.i_sums[0][0], sides.ni_sums[0][0]
    m1, x1 = s.weights[0], s.args[0]
    q1, z1 = other.weights[0], other.args[0]
    ii = LinearArg.index(i)

    def g(kk: LinearArg) -> Expr:
        left = (fresh_sum(i, 1, kk.shift(-1)) * Expr.atom(Bino(kk, ii)) * _pow(y, ii)
                * _pow(z1, kk - ii) * _den(kk - ii, q1 - 1) * Expr.atom(s)
                * _s(kk - ii, other.weights[1:], other.args[1:]))
        right = (fresh_sum(i, 0, kk.shift(-2)) * Expr.atom(Bino(kk.shift(-1), ii))
                 * _pow(y * x1, ii) * _den(ii.shift(1), m1) * _s(ii.shift(1), s.weights[1:], s.args[1:])
                 * Expr.atom(other.with_upper(kk.shift(-1) - ii)) * (y * x1))
        return _den(kk) * left + right

    rest = _outside(term, i)
    one_plus_y = canon(1 + y)
    if one_plus_y == 0:
        return rest * g(top)
    k = fresh()
    kk = LinearArg.index(k)
    return (rest * _pow(one_plus_y, top) * fresh_sum(k, 1, top)
            * _pow(1 / one_plus_y, kk) * g(kk))
