"""
Summation driver: eliminates sum(j_inner) ... sum(j_outer), innermost first
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Set, Tuple

from src.algebra import basis_s, reduce_infinity
from src.algebra.mzv import MZVTable
from src.config import config
from src.kernel import Expr, SumOp, Term, Theta, simplify_theta_delta
from src.kernel.errors import UnsupportedShape
from src.kernel.linear import INF
from src.kernel.printer import format_term
from src.series import expand_expr, has_eps_content, peel_for_expansion
from src.utils.logging_utils import summation_logger

from .algorithms import close_pos_pow, step_a, step_b, step_binomial
from .toolkit import (
    classify, expand_explicit, mirror_bino, simplify_fac_gam, simplify_sum_args,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SumSpec:
    """Sums over j_inner down to j_outer; the outermost sum runs over j1"""
    inner: int
    outer: int = 1

    def __post_init__(self):
        if self.outer < 1 or self.inner < self.outer:
            raise ValueError(f"need 1 <= outer <= inner (got inner={self.inner}, outer={self.outer})")

    @property
    def indices(self) -> List[str]:
        return [f"j{k}" for k in range(self.inner, self.outer - 1, -1)]


class Summer:
    """
    Applies algorithm steps until the requested sums are gone.

    New sums created on the way run over fresh indices s1, s2, ...; they
    are eliminated together with the index that produced them.
    """

    def __init__(self, max_recursion: Optional[int] = None, order: Optional[int] = None,
                 table: Optional[MZVTable] = None):
        self.max_recursion = max_recursion or config.MAX_RECURSION
        self.order = order if order is not None else config.MAX_EPS
        self.table = table
        self._counter = 0
        self._fresh: Set[str] = set()
        self._taken: Set[str] = set()

    def fresh(self) -> str:
        while True:
            self._counter += 1
            name = f"s{self._counter}"
            if name not in self._taken:
                self._fresh.add(name)
                return name

    def _reserve(self, expr: Expr):
        for term in expr.terms:
            for atom, _ in term.atoms:
                self._taken.update(atom.indices())
                if isinstance(atom, SumOp):
                    self._taken.add(atom.index)

    def _target(self, term: Term, index: str) -> Optional[SumOp]:
        ops = term.sum_ops()
        mentioned = {name: set() for name in (op.index for op in ops)}
        for op in ops:
            for other in ops:
                if other is not op and op.index in other.indices():
                    mentioned[op.index].add(other.index)
        own = [op for op in ops if op.index == index]
        if own:
            if mentioned[index]:
                raise UnsupportedShape(f"sum over {index} is not the innermost one", term)
            return own[0]
        fresh = [op for op in ops if op.index in self._fresh and not mentioned[op.index]]
        if not fresh:
            return None
        return max(fresh, key=lambda op: int(op.index[1:]))

    def step(self, term: Term, op: SumOp) -> Tuple[Optional[str], Expr]:
        """One rewriting step for sum(op) in term; kind None for normalizations"""
        i = op.index
        if op.lower.is_constant and op.upper is not INF and op.upper.is_constant:
            return None, expand_explicit(term, op)
        single = Expr((term,))
        simplified = simplify_theta_delta(single, i)
        if simplified != single:
            return None, simplified
        for rewrite in (simplify_fac_gam, mirror_bino):
            found = rewrite(term, i)
            if found is not None:
                return None, found
        sides = classify(term, op)
        if sides.unsupported:
            names = ', '.join(type(a).__name__ for a in sides.unsupported)
            raise UnsupportedShape(f"no algorithm sums {names} over {i}: {format_term(term)}", term)
        if sides.bino is not None:
            return step_binomial(term, op, sides, self.fresh)
        if sides.has_ni:
            return step_b(term, op, sides, self.fresh)
        return step_a(term, op, sides, self.fresh)

    def _drive(self, terms: List[Term], index: str) -> Expr:
        done: List[Term] = []
        work: List[Tuple[Term, int]] = [(t, 0) for t in terms]
        while work:
            term, depth = work.pop()
            op = self._target(term, index)
            if op is None:
                done.append(term)
                continue
            if depth > self.max_recursion:
                raise UnsupportedShape(
                    f"sum over {op.index} not closed within {self.max_recursion} steps: "
                    f"{format_term(term)}", term)
            kind, result = self.step(term, op)
            if kind is not None:
                summation_logger.record_dispatch(kind, op.index, depth)
            work.extend((t, depth + 1) for t in result.terms)
        return Expr.sum(Expr((t,)) for t in done)

    def eliminate(self, expr: Expr, index: str) -> Expr:
        """
        Remove every sum over index. A top-level sum(index,L,U) with finite U
        leaves theta(U-L) on its result, so the result vanishes where the
        sum was empty.
        """
        self._reserve(expr)
        pieces = []
        for term in expr.terms:
            own = [op for op in term.sum_ops() if op.index == index]
            result = self._drive([term], index)
            if own and own[0].upper is not INF and own[0].lower.is_constant:
                result = result * Expr.atom(Theta(own[0].upper - own[0].lower))
            pieces.append(result)
        logger.debug(f"Eliminated {index}: {len(expr)} terms in, {sum(len(p) for p in pieces)} out")
        return simplify_theta_delta(Expr.sum(pieces))

    def expand_eps(self, expr: Expr) -> Expr:
        """Laurent expansion of ep-dependent factors before summation"""
        if not any(has_eps_content(t) for t in expr.terms):
            return expr
        series = expand_expr(peel_for_expansion(expr), self.order).request(self.order)
        summation_logger.record_truncation(self.order, series.lost)
        return series.to_expr()

    def finish(self, expr: Expr, require_finite: bool = False) -> Expr:
        expr = basis_s(expr)
        expr = reduce_infinity(expr, self.table, require_finite=require_finite)
        return simplify_sum_args(expr)

    def run(self, expr: Expr, spec: SumSpec, require_finite: bool = False) -> Expr:
        expr = self.expand_eps(expr)
        for index in spec.indices:
            if not any(op.index == index for t in expr.terms for op in t.sum_ops()):
                logger.debug(f"No sum over {index} left")
                continue
            expr = self.eliminate(expr, index)
        return self.finish(expr, require_finite)


def do_sum(expr: Expr, spec: SumSpec, order: Optional[int] = None,
           table: Optional[MZVTable] = None, require_finite: bool = False) -> Expr:
    """Eliminate the sums named by spec; the result holds S-sums, pow and theta atoms"""
    summer = Summer(order=order, table=table)
    with summation_logger.summation_run('dosum', len(expr)) as log:
        result = summer.run(expr, spec, require_finite)
        log.output_terms = len(result)
    return result


def _single(expr: Expr, index: str, allowed: Tuple[str, ...], name: str) -> Expr:
    summer = Summer()
    for term in expr.terms:
        op = summer._target(term, index)
        if op is None:
            continue
        sides = classify(term, op)
        if sides.bino is not None:
            kind = 'D' if sides.has_ni else 'C'
        else:
            kind = 'B' if sides.has_ni else 'A'
        if kind not in allowed:
            raise UnsupportedShape(f"{name} does not apply to {format_term(term)} (type {kind})", term)
    with summation_logger.summation_run(name, len(expr)) as log:
        result = summer.finish(summer.eliminate(expr, index))
        log.output_terms = len(result)
    return result


def alg_a(expr: Expr, index: str) -> Expr:
    """sum_i x^i/(i+a)^m S(i+b;...) for every term of expr"""
    return _single(expr, index, ('A',), 'algA')


def alg_b(expr: Expr, index: str) -> Expr:
    """Convolutions f(i) g(N-i)"""
    return _single(expr, index, ('A', 'B'), 'algB')


def alg_c(expr: Expr, index: str) -> Expr:
    """Conjugations with bino(N,i)"""
    return _single(expr, index, ('C',), 'algC')


def alg_d(expr: Expr, index: str) -> Expr:
    """Binomial convolutions"""
    return _single(expr, index, ('C', 'D'), 'algD')


def sum_pos_pow(expr: Expr, index: str) -> Expr:
    """
    Close sums of i^k, i^k x^i and i^k S(i;...) directly. Negative powers
    of i raise NegativePower; those belong to algorithm A.
    """
    summer = Summer()
    summer._reserve(expr)
    pieces = []
    for term in expr.terms:
        op = summer._target(term, index)
        if op is None:
            pieces.append(Expr((term,)))
            continue
        closed = close_pos_pow(term, op, classify(term, op), summer.fresh)
        summation_logger.record_dispatch('posPow', index, 0)
        pieces.append(summer._drive(list(closed.terms), index))
    return summer.finish(Expr.sum(pieces))
