"""
Deterministic text form of expressions in the input notation
"""
from typing import List, Optional

import sympy

from .atoms import (
    Atom, Bino, Delta, Eps, FacFactor, GammaFactor, LinFactor, OrderMarker,
    Pow, SSum, SumOp, Theta, ZSum,
)
from .linear import EPS_NAME


def format_scalar(value: sympy.Expr) -> str:
    """Coefficient or S-sum argument, with ^ for powers and no spaces"""
    text = sympy.sstr(sympy.sympify(value))
    return ''.join(text.replace('**', '^').split())


def _bracketed(value: sympy.Expr) -> str:
    text = format_scalar(value)
    if value.is_Add:
        return f"({text})"
    return text


def _power(text: str, p: int) -> str:
    return text if p == 1 else f"{text}^{p}"


def format_atom(atom: Atom, power: int) -> str:
    if isinstance(atom, Pow):
        if atom.base == -1:
            return f"sign({atom.exponent})"
        return f"pow({format_scalar(atom.base)},{atom.exponent})"
    if isinstance(atom, LinFactor):
        return _power(f"num({atom.arg})", power) if power > 0 \
            else _power(f"den({atom.arg})", -power)
    if isinstance(atom, FacFactor):
        return _power(f"fac({atom.arg})", power) if power > 0 \
            else _power(f"invfac({atom.arg})", -power)
    if isinstance(atom, GammaFactor):
        return _power(f"Gamma({atom.arg})", power) if power > 0 \
            else _power(f"InvGamma({atom.arg})", -power)
    if isinstance(atom, Bino):
        return _power(f"bino({atom.top},{atom.bottom})", power)
    if isinstance(atom, SSum):
        name = 'Z' if isinstance(atom, ZSum) else 'S'
        weights = ','.join(str(m) for m in atom.weights)
        args = ','.join(format_scalar(x) for x in atom.args)
        return _power(f"{name}(R({weights}),X({args}),{atom.upper})", power)
    if isinstance(atom, SumOp):
        return f"sum({atom.index},{atom.lower},{atom.upper})"
    if isinstance(atom, Theta):
        return f"theta({atom.arg})"
    if isinstance(atom, Delta):
        return f"delta({atom.arg})"
    if isinstance(atom, Eps):
        return EPS_NAME if power == 1 else f"{EPS_NAME}^{power}"
    if isinstance(atom, OrderMarker):
        return f"order({atom.order})"
    raise TypeError(f"cannot print {atom!r}")


def format_term(term, leading: bool = True) -> str:
    """'+ coeff*atom*...' or '- coeff*atom*...'"""
    coeff = term.coeff
    sign = '+'
    if coeff.could_extract_minus_sign():
        sign, coeff = '-', -coeff
    factors: List[str] = [format_atom(a, p) for a, p in term.atoms]
    if coeff != 1 or not factors:
        factors.insert(0, _bracketed(coeff))
    return f"{sign} {'*'.join(factors)}"


def format_expr(expr, name: Optional[str] = None, indent: str = '    ') -> str:
    """
    One term per line, grouped by ep order; an order(P) marker closes the block.

    With a name the block reads 'name =' followed by indented terms, which
    the script parser accepts back as a definition.
    """
    lines: List[str] = []
    current = None
    terms = [t for t in expr.terms if not _is_marker(t)]
    markers = [t for t in expr.terms if _is_marker(t)]
    grouped = len({t.eps_power for t in terms}) > 1
    for term in terms:
        order = term.eps_power
        if grouped and order != current:
            lines.append(f"{indent}# {EPS_NAME}^{order}")
            current = order
        lines.append(indent + format_term(term))
    lines.extend(indent + format_term(term) for term in markers)
    if not lines:
        lines.append(indent + '0')
    if name is None:
        return '\n'.join(line[len(indent):] if line.startswith(indent) else line for line in lines)
    return '\n'.join([f"{name} ="] + lines)


def _is_marker(term) -> bool:
    return any(isinstance(a, OrderMarker) for a, _ in term.atoms)
