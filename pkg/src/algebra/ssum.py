"""
S-sum and Z-sum algebra

Products of S-sums with a common boundary are rewritten into single S-sums
with the quasi-shuffle rule, S- and Z-sums convert into each other by adding
or removing diagonal terms, and S(i+c;...) is synchronized to S(i;...) by
unrolling the defining recursion c times.
"""
import itertools
import logging
from collections import defaultdict
from functools import lru_cache
from typing import Dict, List, Tuple

import sympy

from src.kernel import Expr, SSum, ZSum, canon
from src.kernel.atoms import LinFactor, Pow, Theta
from src.kernel.errors import BoundaryMismatch
from src.kernel.linear import INF, Boundary, boundary_difference
from src.kernel.values import nested_sum_value

logger = logging.getLogger(__name__)

Letter = Tuple[int, sympy.Expr]
Word = Tuple[Letter, ...]


def word_of(s: SSum) -> Word:
    return tuple(zip(s.weights, s.args))


def from_word(upper: Boundary, word: Word, cls=SSum) -> SSum:
    return cls(upper, tuple(m for m, _ in word), tuple(canon(x) for _, x in word))


@lru_cache(maxsize=None)
def _stuffle(u: Word, v: Word) -> Tuple[Tuple[Word, int], ...]:
    """u*v = a(u'*v) + b(u*v') - (a.b)(u'*v') for u = a u', v = b v'"""
    if not u:
        return ((v, 1),)
    if not v:
        return ((u, 1),)
    (ma, xa), rest_u = u[0], u[1:]
    (mb, xb), rest_v = v[0], v[1:]
    merged = (ma + mb, canon(xa * xb))
    out: Dict[Word, int] = defaultdict(int)
    for w, c in _stuffle(rest_u, v):
        out[(u[0],) + w] += c
    for w, c in _stuffle(u, rest_v):
        out[(v[0],) + w] += c
    for w, c in _stuffle(rest_u, rest_v):
        out[(merged,) + w] -= c
    return tuple((w, c) for w, c in out.items() if c)


def shuffle_product(a: SSum, b: SSum) -> Expr:
    """Product of two S-sums with the same upper boundary as a sum of single S-sums"""
    if a.upper != b.upper:
        raise BoundaryMismatch(f"cannot multiply S-sums at {a.upper} and {b.upper}")
    if a.depth == 0:
        return Expr.atom(b)
    if b.depth == 0:
        return Expr.atom(a)
    pieces = [Expr.atom(from_word(a.upper, w), coeff=c) for w, c in _stuffle(word_of(a), word_of(b))]
    return Expr.sum(pieces)


def basis_s(expr: Expr) -> Expr:
    """Rewrite every product of S-sums sharing an upper boundary into single S-sums"""
    def one_term(term) -> Expr:
        groups: Dict[object, List[SSum]] = defaultdict(list)
        others = []
        for atom, power in term.atoms:
            if type(atom) is SSum:
                groups[atom.upper].extend([atom] * power)
            else:
                others.append((atom, power))
        if all(len(g) <= 1 for g in groups.values()):
            return Expr((term,))
        result = Expr.product(term.coeff, others)
        for sums in groups.values():
            product = Expr.atom(sums[0])
            for s in sums[1:]:
                product = product.map_terms(lambda t, s=s: _times_sum(t, s))
            result = result * product
        return result
    return expr.map_terms(one_term)


def _times_sum(term, s: SSum) -> Expr:
    """term * s where term holds exactly one S-sum at the same boundary"""
    for atom, _ in term.atoms:
        if type(atom) is SSum and atom.upper == s.upper:
            return Expr.product(term.coeff, term.without(atom).atoms) * shuffle_product(atom, s)
    return Expr((term,)) * Expr.atom(s)


def conv_s_to_z(s: SSum) -> Expr:
    """S-sum as a combination of Z-sums (every choice of merged neighbours)"""
    return Expr.sum(Expr.atom(from_word(s.upper, w, ZSum), coeff=sign)
                    for w, sign in _merges(word_of(s), alternate=False))


def conv_z_to_s(z: ZSum) -> Expr:
    """Z-sum as a combination of S-sums; merged neighbours carry a sign each"""
    return Expr.sum(Expr.atom(from_word(z.upper, w, SSum), coeff=sign)
                    for w, sign in _merges(word_of(z), alternate=True))


def _merges(word: Word, alternate: bool):
    k = len(word)
    if k == 0:
        yield (), 1
        return
    for cuts in itertools.product((False, True), repeat=k - 1):
        blocks: List[Letter] = [word[0]]
        merged = 0
        for join, letter in zip(cuts, word[1:]):
            if join:
                m, x = blocks[-1]
                blocks[-1] = (m + letter[0], x * letter[1])
                merged += 1
            else:
                blocks.append(letter)
        yield tuple(blocks), (-1) ** merged if alternate else 1


def convert_sums(expr: Expr, to_z: bool) -> Expr:
    """Apply conv_s_to_z (or conv_z_to_s) to every S-sum (Z-sum) in the expression"""
    source = SSum if to_z else ZSum
    convert = conv_s_to_z if to_z else conv_z_to_s

    def one_term(term) -> Expr:
        result = Expr.product(term.coeff, [(a, p) for a, p in term.atoms if type(a) is not source])
        for atom, power in term.atoms:
            if type(atom) is source:
                result = result * convert(atom) ** power
        return result
    return expr.map_terms(one_term)


def synchronize_offset(s: SSum, target: Boundary) -> Expr:
    """
    S(t+c;m1,R;x1,X) in terms of S(t;...) and boundary terms.

    c > 0: add x1^(t+k)/(t+k)^m1 * S(t+k;R) for k = 1..c
    c < 0: remove theta(t-k-1) * x1^(t-k)/(t-k)^m1 * S(t-k;R) for k = 0..|c|-1,
           (no guard at k = 0)
    The inner S(t+k;R) are synchronized to t in turn.
    """
    c = boundary_difference(s.upper, target)
    if c == 0 or s.depth == 0:
        return Expr.atom(s)
    (m1, x1), rest = word_of(s)[0], word_of(s)[1:]
    result = Expr.atom(s.with_upper(target))
    if c > 0:
        steps = [(k, 1) for k in range(1, c + 1)]
    else:
        steps = [(-k, -1) for k in range(0, -c)]
    for k, sign in steps:
        at = target.shift(k)
        atoms = [(Pow(x1, at), 1), (LinFactor(at), -m1)]
        if k < 0:
            atoms.append((Theta(at.shift(-1)), 1))
        boundary = Expr.product(sign, atoms)
        if rest:
            boundary = boundary * synchronize_offset(from_word(at, rest), target)
        result = result + boundary
    return result


def evaluate_at_integer(s: SSum) -> Expr:
    """Exact value of an S- or Z-sum whose upper boundary is a known integer"""
    if s.upper is INF or not s.upper.is_constant:
        raise ValueError(f"upper boundary {s.upper} is not a known integer")
    value = nested_sum_value(s.upper.offset, s.weights, s.args, strict=isinstance(s, ZSum))
    return Expr.scalar(value)
