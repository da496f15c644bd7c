"""
ep-expansion of Gamma functions, factorials, denominators and powers

Every Gamma(A + a*ep) is written as a ratio to Gamma(1 + a*ep) times the
MS-bar factor Gamma(1 + a*ep) = exp(sum_{k>=2} (-a*ep)^k zeta(k)/k), with
zeta(k) kept as S(inf;k;1). A term's logarithmic contributions are gathered
into one exponent and exponentiated once.
"""
import logging
from collections import defaultdict
from typing import Dict, List, Tuple

import sympy

from src.kernel import EPS, Expr, FacFactor, GammaFactor, LinFactor, Pow, SumOp, Term
from src.kernel.atoms import Atom
from src.kernel.errors import PoleAtZero
from src.kernel.linear import INF, LinearArg
from src.kernel.rewrite import substitute

from .eps_series import EpsSeries

logger = logging.getLogger(__name__)


def _harmonic(upper, k: int) -> Expr:
    from src.kernel import s_sum
    return s_sum(upper, (k,), (1,))


def _gamma_pos_log(n_arg: LinearArg, a, trunc: int) -> Dict[int, Expr]:
    """log of Gamma(n+1+a*ep)/(n! Gamma(1+a*ep)) by powers of ep"""
    a = sympy.sympify(a)
    return {k: _harmonic(n_arg, k) * (sympy.Integer(-1) ** (k + 1) * a ** k / k)
            for k in range(1, trunc)}


def _gamma_neg_log(n_arg: LinearArg, a, trunc: int) -> Dict[int, Expr]:
    """log of the exponential part of Gamma(-n+1+a*ep)/Gamma(1+a*ep)"""
    a = sympy.sympify(a)
    below = n_arg.shift(-1)
    return {k: _harmonic(below, k) * (a ** k / k) for k in range(1, trunc)}


def _ms_bar_log(a, trunc: int) -> Dict[int, Expr]:
    a = sympy.sympify(a)
    return {k: _harmonic(INF, k) * ((-a) ** k / k) for k in range(2, trunc)}


def _neg_prefactor(n_arg: LinearArg, a) -> Expr:
    """(1/a) * sign(n-1) * invfac(n-1), the ep^-1 factor kept apart"""
    below = n_arg.shift(-1)
    return Expr.product(1 / sympy.sympify(a), [(Pow(sympy.Integer(-1), below), 1),
                                               (FacFactor(below), -1)])


def expand_gamma_pos(n_arg: LinearArg, a, order: int) -> EpsSeries:
    """Gamma(n+1+a*ep)/Gamma(1+a*ep) = n! exp(sum_k (-1)^(k+1) (a*ep)^k S(n;k;1)/k), orders < order"""
    log = EpsSeries(_gamma_pos_log(n_arg, a, order), 1, order)
    return log.exp().scale(Expr.atom(FacFactor(n_arg)))


def expand_gamma_neg(n_arg: LinearArg, a, order: int) -> EpsSeries:
    """Gamma(-n+1+a*ep)/Gamma(1+a*ep), starting at ep^-1, orders < order"""
    log = EpsSeries(_gamma_neg_log(n_arg, a, order + 1), 1, order + 1)
    return log.exp().scale(_neg_prefactor(n_arg, a)).shift(-1)


def expand_ms_bar_gamma(a, order: int) -> EpsSeries:
    """Gamma(1+a*ep) with the Euler-gamma term dropped"""
    return EpsSeries(_ms_bar_log(a, order), 1, order).exp()


def expand_den(arg: LinearArg, order: int, symbolic: bool = True) -> EpsSeries:
    """1/(A + b*ep) = sum_m (-b)^m ep^m den(A)^(m+1), orders < order"""
    base = arg.eps_free()
    b = arg.eps_coeff
    if base.is_zero():
        raise PoleAtZero(f"den({arg}) has a pole at ep = 0; extract it first")
    if not symbolic and not base.is_constant:
        raise ValueError(f"den({arg}) has a symbolic ep-free part; pass symbolic=True")
    coeffs = {m: Expr.atom(LinFactor(base), -(m + 1), coeff=(-b) ** m) for m in range(order)}
    return EpsSeries(coeffs, 0, order)


def expand_pow_eps(base, a, order: int) -> EpsSeries:
    """x^(a*ep) = exp(-a*ep*S(inf;1;1-x))"""
    base = sympy.sympify(base)
    if base == 1:
        return EpsSeries.exact(1)
    from src.kernel import s_sum
    log = {1: s_sum(INF, (1,), (1 - base,)) * (-sympy.sympify(a))}
    return EpsSeries(log, 1, order).exp()


def normalize_gamma(term: Term) -> Term:
    """
    Gamma(j+c+a*ep) -> Gamma(j+1+a*ep) times num/den factors, fac(x) with ep
    rewritten as Gamma(x+1) first, so that expansions produce S(j;...) sums.
    """
    atoms: List[Tuple[Atom, int]] = []
    for atom, power in term.atoms:
        if isinstance(atom, FacFactor) and atom.arg.has_eps:
            atom = GammaFactor(atom.arg.shift(1))
        if isinstance(atom, GammaFactor) and atom.arg.has_eps and len(atom.arg.indices) == 1 \
                and atom.arg.indices[0][1] == 1 and not atom.arg.n_coeff:
            c = atom.arg.offset
            base = atom.arg.shift(1 - c)
            atoms.append((GammaFactor(base), power))
            if c > 1:
                for r in range(1, c):
                    atoms.append((LinFactor(base.shift(r - 1)), power))
            elif c < 1:
                for r in range(c, 1):
                    atoms.append((LinFactor(base.shift(r - 1)), -power))
            continue
        atoms.append((atom, power))
    found = Expr.product(term.coeff, atoms).terms
    return found[0] if found else Term(sympy.Integer(0), ())


def _is_eps_atom(atom: Atom) -> bool:
    if isinstance(atom, (GammaFactor, FacFactor, LinFactor)):
        return atom.arg.has_eps
    if isinstance(atom, Pow):
        return atom.exponent.has_eps
    return False


def has_eps_content(term: Term) -> bool:
    return any(_is_eps_atom(a) or a == EPS for a, _ in term.atoms)


def expand_term(term: Term, order: int) -> EpsSeries:
    """
    Laurent expansion of one term. Every factor is cut after ep^(order-1),
    so a pole prefactor ep^-p leaves the term exact only through
    ep^(order-p-1); its trunc_order says so.
    """
    term = normalize_gamma(term)
    if not term.atoms and term.coeff == 0:
        return EpsSeries.zero(order)
    plain: List[Tuple[Atom, int]] = []
    prefactor = Expr.scalar(term.coeff)
    # (kind, payload, power) collected before the log truncation is known
    logs: List[Tuple[str, object, int]] = []
    for atom, power in term.atoms:
        if isinstance(atom, FacFactor) and atom.arg.has_eps:
            atom = GammaFactor(atom.arg.shift(1))
        if isinstance(atom, GammaFactor) and atom.arg.has_eps:
            base = atom.arg.eps_free()
            a = atom.arg.eps_coeff
            if base.is_constant and base.offset <= 0:
                n_arg = LinearArg.const(1 - base.offset)
                # constant n: the ep^-1 prefactor is a scalar
                scalar = _neg_prefactor(n_arg, a).scalar_value()
                prefactor = prefactor * Expr.scalar(scalar ** power) * Expr.eps(-power)
                logs.append(('neg', (n_arg, a), power))
            else:
                n_arg = base.shift(-1)
                prefactor = prefactor * Expr.atom(FacFactor(n_arg), power)
                logs.append(('pos', (n_arg, a), power))
            logs.append(('msbar', a, power))
            continue
        if isinstance(atom, LinFactor) and atom.arg.has_eps:
            base = atom.arg.eps_free()
            b = atom.arg.eps_coeff
            if power > 0:
                linear = Expr.atom(LinFactor(base)) + Expr.eps(1) * b
                prefactor = prefactor * linear ** power
            else:
                prefactor = prefactor * Expr.atom(LinFactor(base), power)
                logs.append(('den', (base, b), -power))
            continue
        if isinstance(atom, Pow) and atom.exponent.has_eps:
            logs.append(('pow', (atom.base, atom.exponent.eps_coeff), power))
            continue
        if atom == EPS:
            prefactor = prefactor * Expr.eps(power)
            continue
        plain.append((atom, power))
    prefactor = prefactor * Expr.product(1, plain)
    if prefactor.is_zero():
        return EpsSeries.zero(order)
    pre = EpsSeries.exact(prefactor)
    if not logs:
        return EpsSeries(pre.coeffs, pre.min_order, order)

    trunc = order
    total: Dict[int, Expr] = defaultdict(Expr.zero)
    for kind, payload, power in logs:
        if kind == 'pos':
            part = _gamma_pos_log(payload[0], payload[1], trunc)
        elif kind == 'neg':
            part = _gamma_neg_log(payload[0], payload[1], trunc)
        elif kind == 'msbar':
            part = _ms_bar_log(payload, trunc)
        elif kind == 'den':
            base, b = payload
            part = {k: Expr.atom(LinFactor(base), -k, coeff=sympy.Integer(-1) ** k * b ** k / k)
                    for k in range(1, trunc)}
        else:
            base, a = payload
            from src.kernel import s_sum
            part = {1: s_sum(INF, (1,), (1 - base,)) * (-a)} if trunc > 1 else {}
        for k, c in part.items():
            total[k] = total[k] + c * power
    exponent = EpsSeries(dict(total), 1, trunc)
    return pre * exponent.exp()


def expand_expr(expr: Expr, order: int) -> EpsSeries:
    """Sum of per-term expansions; the lowest per-term truncation wins"""
    result = EpsSeries.zero(order)
    for term in expr.terms:
        result = result + expand_term(term, order)
    return result


def _lower_value(arg: LinearArg, bounds: Dict[str, int]):
    """Value of arg with every index at its lower bound; None when unknown"""
    if arg.n_coeff:
        return None
    total = arg.offset
    for name, c in arg.indices:
        if name not in bounds or c < 0:
            return None
        total += c * bounds[name]
    return total


def peel_for_expansion(expr: Expr, max_steps: int = 400) -> Expr:
    """
    Split off the first terms of sums until every Gamma, fac and den argument
    that carries ep is at least 1 over the whole summation range.
    """
    pending = list(expr.terms)
    done: List[Term] = []
    steps = 0
    while pending:
        term = pending.pop()
        target = _peel_target(term)
        if target is None:
            done.append(term)
            continue
        steps += 1
        if steps > max_steps:
            raise RecursionError("peeling of sum boundaries did not terminate")
        op = target
        lower = op.lower.offset
        first = Expr((term.without(op),))
        first = substitute(first, op.index, LinearArg.const(lower))
        if op.upper is not INF:
            from src.kernel import theta
            first = first * theta(op.upper - LinearArg.const(lower))
        rest = Expr.product(term.coeff, [(SumOp(op.index, op.lower.shift(1), op.upper) if a == op else a, p)
                                         for a, p in term.atoms])
        pending.extend(first.terms)
        pending.extend(rest.terms)
    return Expr.sum(Expr((t,)) for t in done)


def _peel_target(term: Term):
    ops = {op.index: op for op in term.sum_ops() if op.lower.is_constant}
    bounds = {name: op.lower.offset for name, op in ops.items()}
    for atom, _ in term.atoms:
        if not _is_eps_atom(atom) or isinstance(atom, Pow):
            continue
        base = atom.arg.eps_free()
        if isinstance(atom, FacFactor):
            base = base.shift(1)
        if base.is_constant or not base.indices:
            continue
        value = _lower_value(base, bounds)
        if value is not None and value < 1:
            inner = [name for name, _ in base.indices if name in ops]
            return ops[inner[-1]]
    return None
