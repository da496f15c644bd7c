"""
Canonical symbolic expressions: sums of coefficient * atom-product terms
"""
import logging
from collections import defaultdict
from typing import Callable, Dict, Iterable, List, NamedTuple, Tuple, Type

import sympy

from .atoms import (
    EPS, Atom, Bino, Delta, DeltaP, Eps, FacFactor, GammaFactor, LinFactor,
    OrderMarker, Pow, SSum, SumOp, Theta, ZSum,
)
from .errors import SingularArgument
from .linear import INF, LinearArg
from .values import nested_sum_value

logger = logging.getLogger(__name__)

Atoms = Tuple[Tuple[Atom, int], ...]


def canon(value) -> sympy.Expr:
    """Canonical form of a coefficient or S-sum argument"""
    value = sympy.sympify(value)
    if value.is_Rational:
        return value
    return sympy.cancel(value)


class Term(NamedTuple):
    coeff: sympy.Expr
    atoms: Atoms

    def power(self, atom: Atom) -> int:
        for a, p in self.atoms:
            if a == atom:
                return p
        return 0

    def of_type(self, cls: Type[Atom]) -> List[Tuple[Atom, int]]:
        return [(a, p) for a, p in self.atoms if isinstance(a, cls)]

    def without(self, *atoms: Atom) -> 'Term':
        drop = set(atoms)
        return Term(self.coeff, tuple((a, p) for a, p in self.atoms if a not in drop))

    @property
    def eps_power(self) -> int:
        return self.power(EPS)

    def sum_ops(self) -> List[SumOp]:
        return [a for a, _ in self.atoms if isinstance(a, SumOp)]

    def sort_key(self):
        return (self.eps_power, tuple((a.sort_key(), p) for a, p in self.atoms),
                sympy.default_sort_key(self.coeff))


def normalize_term(coeff, atoms: Iterable[Tuple[Atom, int]]) -> List[Term]:
    """Bring one product into canonical form; may vanish or split (deltap)"""
    coeff = sympy.sympify(coeff)
    if coeff == 0:
        return []
    items = [(a, p) for a, p in atoms if p != 0]
    if any(_kills(a) for a, _ in items):
        return []
    items = [_rewrite_plain(a, p) for a, p in items]

    for k, (atom, power) in enumerate(items):
        if isinstance(atom, DeltaP):
            rest = items[:k] + items[k + 1:]
            kept = normalize_term(coeff, rest)
            removed = normalize_term(-coeff, rest + [(Delta(atom.arg), 1)])
            return kept + removed

    powers: Dict[Atom, int] = defaultdict(int)
    pow_bases: Dict[LinearArg, sympy.Expr] = {}
    thetas: Dict[LinearArg, int] = {}
    markers: List[int] = []

    for atom, power in items:
        if isinstance(atom, Pow):
            coeff = _absorb_pow(atom, power, coeff, pow_bases)
            continue

        if isinstance(atom, LinFactor):
            arg = atom.arg
            if arg.is_constant:
                if arg.offset == 0:
                    if power < 0:
                        raise SingularArgument(f"den(0) in term with coefficient {coeff}")
                    return []
                coeff *= sympy.Integer(arg.offset) ** power
                continue
            if arg.has_eps and not arg.indices and not arg.n_coeff and arg.offset == 0:
                coeff *= arg.eps_coeff ** power
                powers[EPS] += power
                continue
            g = arg.content()
            if g > 1:
                arg = arg.divide(g)
                coeff *= sympy.Integer(g) ** power
            if arg.leading_sign() < 0:
                arg = -arg
                coeff *= sympy.Integer(-1) ** power
            powers[LinFactor(arg)] += power
            continue

        if isinstance(atom, FacFactor):
            arg = atom.arg
            if arg.is_constant:
                if arg.offset < 0:
                    if power > 0:
                        raise SingularArgument(f"fac({arg.offset})")
                    return []
                coeff *= sympy.factorial(arg.offset) ** power
                continue
            powers[FacFactor(arg)] += power
            continue

        if isinstance(atom, GammaFactor):
            arg = atom.arg
            if arg.is_constant:
                if arg.offset <= 0:
                    if power > 0:
                        raise SingularArgument(f"Gamma({arg.offset})")
                    return []
                coeff *= sympy.factorial(arg.offset - 1) ** power
                continue
            powers[GammaFactor(arg)] += power
            continue

        if isinstance(atom, Bino):
            top, bottom = atom.top, atom.bottom
            if top.is_constant and bottom.is_constant:
                value = 0 if bottom.offset < 0 else sympy.binomial(top.offset, bottom.offset)
                if value == 0:
                    return []
                coeff *= sympy.Integer(value) ** power
                continue
            if bottom.is_constant and bottom.offset < 0:
                return []
            rest = top - bottom
            if rest.is_constant and rest.offset < 0:
                return []
            if bottom.is_zero() or rest.is_zero():
                continue
            if bottom.leading_sign() < 0 < rest.leading_sign():
                bottom = rest
            powers[Bino(top, bottom)] += power
            continue

        if isinstance(atom, SSum):
            args = tuple(canon(x) for x in atom.args)
            upper = atom.upper
            strict = isinstance(atom, ZSum)
            if upper is not INF and upper.is_constant:
                value = nested_sum_value(upper.offset, atom.weights, args, strict=strict)
                if value == 0:
                    return []
                coeff *= value ** power
                continue
            if not atom.weights:
                if upper is not INF:
                    guard = upper if strict else upper.shift(-1)
                    thetas[guard.variable_part()] = min(
                        thetas.get(guard.variable_part(), guard.offset), guard.offset)
                continue
            powers[type(atom)(upper, tuple(atom.weights), args)] += power
            continue

        if isinstance(atom, SumOp):
            key = SumOp(atom.index, atom.lower, atom.upper)
            if any(isinstance(a, SumOp) and a.index == atom.index for a in powers):
                raise ValueError(f"two sums over {atom.index} in one term")
            powers[key] = 1
            continue

        if isinstance(atom, Theta):
            arg = atom.arg
            if arg.is_constant:
                if arg.offset < 0:
                    return []
                continue
            g = arg.content()
            if g > 1:
                # theta(g*v + c) = theta(v + floor(c/g)) on integers
                arg = LinearArg.make(arg.offset // g, {k: c // g for k, c in arg.indices},
                                     arg.n_coeff // g)
            var = arg.variable_part()
            thetas[var] = min(thetas.get(var, arg.offset), arg.offset)
            continue

        if isinstance(atom, Delta):
            arg = atom.arg
            if arg.is_constant:
                if arg.offset != 0:
                    return []
                continue
            if arg.leading_sign() < 0:
                arg = -arg
            g = arg.content()
            if g > 1:
                if arg.offset % g:
                    return []
                arg = arg.divide(g)
            powers[Delta(arg)] = 1
            continue

        if isinstance(atom, Eps):
            powers[EPS] += power
            continue

        if isinstance(atom, OrderMarker):
            markers.append(atom.order)
            continue

        raise TypeError(f"unknown atom {atom!r}")

    for exponent, base in pow_bases.items():
        base = canon(base)
        if base == 1:
            continue
        if base == 0:
            if exponent.has_eps:
                raise SingularArgument(f"pow(0, {exponent})")
            delta = normalize_term(1, [(Delta(exponent), 1)])
            if not delta:
                return []
            for a, p in delta[0].atoms:
                powers[a] = 1
            continue
        powers[Pow(base, exponent)] = 1

    for var, offset in thetas.items():
        powers[Theta(var.shift(offset))] = 1
    if markers:
        powers[OrderMarker(min(markers))] = 1

    coeff = canon(coeff)
    if coeff == 0:
        return []
    ordered = tuple(sorted(((a, p) for a, p in powers.items() if p != 0),
                           key=lambda ap: (ap[0].sort_key(), ap[1])))
    return [Term(coeff, ordered)]


def _rewrite_plain(atom: Atom, power: int) -> Tuple[Atom, int]:
    """pow(0, e) -> delta(e); Gamma of an ep-free symbolic argument -> fac"""
    if isinstance(atom, Pow) and canon(atom.base) == 0:
        if power < 0 or atom.exponent.has_eps:
            raise SingularArgument(f"pow(0, {atom.exponent}) to power {power}")
        return Delta(atom.exponent), 1
    if isinstance(atom, GammaFactor) and not atom.arg.has_eps and not atom.arg.is_constant:
        return FacFactor(atom.arg.shift(-1)), power
    return atom, power


def _kills(atom: Atom) -> bool:
    """Constant theta, delta or binomial factors that make a term vanish"""
    if isinstance(atom, Theta):
        return atom.arg.is_constant and atom.arg.offset < 0
    if isinstance(atom, Delta):
        return atom.arg.is_constant and atom.arg.offset != 0
    if isinstance(atom, Bino):
        if atom.bottom.is_constant and atom.bottom.offset < 0:
            return True
        rest = atom.top - atom.bottom
        return rest.is_constant and rest.offset < 0 and not (atom.top.is_constant and atom.top.offset < 0)
    return False


def _absorb_pow(atom: Pow, power: int, coeff, pow_bases: Dict[LinearArg, sympy.Expr]):
    """Split pow(base, e) into single-variable powers; offsets go to the coefficient"""
    base = canon(atom.base) ** power
    exponent = atom.exponent
    if exponent.offset:
        coeff = coeff * base ** exponent.offset
        exponent = exponent.shift(-exponent.offset)
    if exponent.is_zero():
        return coeff
    parts = [(LinearArg.index(name), c) for name, c in exponent.indices]
    if exponent.n_coeff:
        parts.append((LinearArg.n(), exponent.n_coeff))
    for var, c in parts:
        pow_bases[var] = pow_bases.get(var, sympy.Integer(1)) * base ** c
    if exponent.has_eps:
        var = LinearArg.eps(exponent.eps_coeff)
        pow_bases[var] = pow_bases.get(var, sympy.Integer(1)) * base
    return coeff


def _merge(terms: Iterable[Term]) -> Tuple[Term, ...]:
    collected: Dict[Atoms, sympy.Expr] = {}
    for term in terms:
        if term.atoms in collected:
            collected[term.atoms] = collected[term.atoms] + term.coeff
        else:
            collected[term.atoms] = term.coeff
    merged = []
    for atoms, coeff in collected.items():
        coeff = canon(coeff)
        if coeff != 0:
            merged.append(Term(coeff, atoms))
    merged.sort(key=Term.sort_key)
    return tuple(merged)


class Expr:
    """
    Immutable canonical expression.

    Build through the class methods or arithmetic; the constructor trusts
    that the given terms are already canonical and merged.
    """

    __slots__ = ('terms', '_hash')

    def __init__(self, terms: Tuple[Term, ...] = ()):
        self.terms = tuple(terms)
        self._hash = None

    # Construction

    @classmethod
    def from_terms(cls, raw: Iterable[Tuple[object, Iterable[Tuple[Atom, int]]]]) -> 'Expr':
        normalized: List[Term] = []
        for coeff, atoms in raw:
            normalized.extend(normalize_term(coeff, atoms))
        return cls(_merge(normalized))

    @classmethod
    def zero(cls) -> 'Expr':
        return cls(())

    @classmethod
    def scalar(cls, value) -> 'Expr':
        return cls.from_terms([(value, ())])

    @classmethod
    def one(cls) -> 'Expr':
        return cls.scalar(1)

    @classmethod
    def symbol(cls, name: str) -> 'Expr':
        return cls.scalar(sympy.Symbol(name))

    @classmethod
    def atom(cls, atom: Atom, power: int = 1, coeff=1) -> 'Expr':
        return cls.from_terms([(coeff, [(atom, power)])])

    @classmethod
    def product(cls, coeff, atoms: Iterable[Tuple[Atom, int]]) -> 'Expr':
        return cls.from_terms([(coeff, list(atoms))])

    @classmethod
    def eps(cls, power: int = 1) -> 'Expr':
        return cls.atom(EPS, power)

    # Arithmetic

    @staticmethod
    def lift(value) -> 'Expr':
        if isinstance(value, Expr):
            return value
        return Expr.scalar(value)

    def __add__(self, other) -> 'Expr':
        other = Expr.lift(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        return Expr(_merge(self.terms + other.terms))

    __radd__ = __add__

    def __neg__(self) -> 'Expr':
        return Expr(tuple(Term(-t.coeff, t.atoms) for t in self.terms))

    def __sub__(self, other) -> 'Expr':
        return self + (-Expr.lift(other))

    def __rsub__(self, other) -> 'Expr':
        return Expr.lift(other) - self

    def __mul__(self, other) -> 'Expr':
        if not isinstance(other, Expr):
            value = canon(other)
            if value == 0:
                return Expr.zero()
            if value == 1:
                return self
            return Expr(_merge(Term(t.coeff * value, t.atoms) for t in self.terms))
        raw = []
        for a in self.terms:
            for b in other.terms:
                raw.extend(normalize_term(a.coeff * b.coeff, a.atoms + b.atoms))
        return Expr(_merge(raw))

    __rmul__ = __mul__

    def __pow__(self, k: int) -> 'Expr':
        if k < 0:
            raise ValueError("negative powers of expressions are not defined")
        result = Expr.one()
        for _ in range(k):
            result = result * self
        return result

    # Queries

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Expr):
            if not isinstance(other, (int, sympy.Basic)):
                return NotImplemented
            other = Expr.lift(other)
        return self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(self.terms)
        return self._hash

    def is_scalar(self) -> bool:
        return all(not t.atoms for t in self.terms)

    def scalar_value(self) -> sympy.Expr:
        if not self.is_scalar():
            raise ValueError("expression is not a scalar")
        return self.terms[0].coeff if self.terms else sympy.Integer(0)

    def free_indices(self) -> Tuple[str, ...]:
        found = set()
        for term in self.terms:
            for atom, _ in term.atoms:
                found.update(atom.indices())
        from .linear import index_key
        return tuple(sorted(found, key=index_key))

    def has_index(self, name: str) -> bool:
        return name in self.free_indices()

    def has_atom_type(self, cls: Type[Atom]) -> bool:
        return any(isinstance(a, cls) for t in self.terms for a, _ in t.atoms)

    def map_terms(self, fn: Callable[[Term], 'Expr']) -> 'Expr':
        pieces = [fn(term) for term in self.terms]
        return Expr.sum(pieces)

    @staticmethod
    def sum(pieces: Iterable['Expr']) -> 'Expr':
        collected: List[Term] = []
        for piece in pieces:
            collected.extend(Expr.lift(piece).terms)
        return Expr(_merge(collected))

    def eps_orders(self) -> Tuple[int, ...]:
        return tuple(sorted({t.eps_power for t in self.terms}))

    def coefficient_of_eps(self, order: int) -> 'Expr':
        """ep-free coefficient of ep^order"""
        return Expr(tuple(t.without(EPS) if t.eps_power else t
                          for t in self.terms if t.eps_power == order))

    def free_symbols(self) -> set:
        found = set()
        for term in self.terms:
            found |= term.coeff.free_symbols
            for atom, _ in term.atoms:
                if isinstance(atom, Pow):
                    found |= atom.base.free_symbols
                elif isinstance(atom, SSum):
                    for x in atom.args:
                        found |= x.free_symbols
        return found

    def __str__(self) -> str:
        from .printer import format_expr
        return format_expr(self)

    def __repr__(self) -> str:
        return f"Expr({self})"


def term_expr(term: Term) -> Expr:
    return Expr((term,))
