"""
Integer-linear arguments of den, fac, Gamma, theta and S-sum boundaries
"""
import re
from dataclasses import dataclass, field
from typing import Dict, Iterable, Mapping, Optional, Tuple, Union

import sympy

from .errors import SymbolicOffset

EPS_NAME = 'ep'
N_NAME = 'n'

_INDEX_RE = re.compile(r'^([A-Za-z_]+?)(\d*)$')


def index_key(name: str) -> Tuple[int, str, int]:
    """Sort key for summation indices: j1 < j2 < ... < any other name"""
    match = _INDEX_RE.match(name)
    prefix, number = (match.group(1), match.group(2)) if match else (name, '')
    return (0 if prefix == 'j' else 1, prefix, int(number) if number else 0)


def is_index_name(name: str) -> bool:
    return bool(re.match(r'^(j|s)\d+$', name))


class _Infinity:
    """Upper summation limit infinity"""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return 'inf'

    __str__ = __repr__

    def __hash__(self) -> int:
        return hash('inf')

    def __eq__(self, other) -> bool:
        return other is self

    def sort_key(self):
        return (1,)

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


def _eps_value(value) -> sympy.Expr:
    value = sympy.sympify(value)
    if value.is_Rational:
        return value
    return sympy.cancel(value)


@dataclass(frozen=True)
class LinearArg:
    """
    c_1*j_1 + ... + c_k*j_k + c_n*n + a*ep + offset

    Index and n coefficients and the offset are integers; the ep coefficient
    may be any ep-free sympy expression (a rational or a parameter such as a).
    """
    offset: int = 0
    indices: Tuple[Tuple[str, int], ...] = ()
    n_coeff: int = 0
    eps_coeff: sympy.Expr = field(default=sympy.Integer(0))

    @classmethod
    def make(cls, offset: int = 0, indices: Optional[Mapping[str, int]] = None,
             n_coeff: int = 0, eps_coeff=0) -> 'LinearArg':
        items = tuple(sorted(((k, int(v)) for k, v in (indices or {}).items() if v != 0),
                             key=lambda kv: index_key(kv[0])))
        return cls(int(offset), items, int(n_coeff), _eps_value(eps_coeff))

    @classmethod
    def const(cls, value: int) -> 'LinearArg':
        return cls.make(offset=value)

    @classmethod
    def index(cls, name: str, offset: int = 0, coeff: int = 1) -> 'LinearArg':
        return cls.make(offset=offset, indices={name: coeff})

    @classmethod
    def n(cls, offset: int = 0) -> 'LinearArg':
        return cls.make(offset=offset, n_coeff=1)

    @classmethod
    def eps(cls, coeff=1, offset: int = 0) -> 'LinearArg':
        return cls.make(offset=offset, eps_coeff=coeff)

    # Structure

    def index_map(self) -> Dict[str, int]:
        return dict(self.indices)

    def coeff(self, name: str) -> int:
        if name == N_NAME:
            return self.n_coeff
        return self.index_map().get(name, 0)

    def has(self, name: str) -> bool:
        return self.coeff(name) != 0

    def index_names(self) -> Tuple[str, ...]:
        return tuple(k for k, _ in self.indices)

    @property
    def has_eps(self) -> bool:
        return self.eps_coeff != 0

    @property
    def is_constant(self) -> bool:
        return not self.indices and self.n_coeff == 0 and not self.has_eps

    def is_zero(self) -> bool:
        return self.is_constant and self.offset == 0

    def eps_free(self) -> 'LinearArg':
        return LinearArg(self.offset, self.indices, self.n_coeff, sympy.Integer(0))

    def variable_part(self) -> 'LinearArg':
        return LinearArg(0, self.indices, self.n_coeff, self.eps_coeff)

    def without(self, name: str) -> 'LinearArg':
        return self - LinearArg.index(name, coeff=self.coeff(name))

    def shift(self, c: int) -> 'LinearArg':
        return LinearArg(self.offset + int(c), self.indices, self.n_coeff, self.eps_coeff)

    def leading_sign(self) -> int:
        """Sign of the first nonzero entry in j1, j2, ..., n, ep, offset order"""
        for _, c in self.indices:
            return 1 if c > 0 else -1
        if self.n_coeff:
            return 1 if self.n_coeff > 0 else -1
        if self.has_eps:
            if self.eps_coeff.is_number:
                return 1 if self.eps_coeff > 0 else -1
            return -1 if self.eps_coeff.could_extract_minus_sign() else 1
        if self.offset:
            return 1 if self.offset > 0 else -1
        return 0

    def content(self) -> int:
        """gcd of the integer coefficients, 0 when ep is present"""
        if self.has_eps:
            return 1
        g = 0
        for _, c in self.indices:
            g = sympy.igcd(g, c)
        g = sympy.igcd(g, self.n_coeff)
        g = sympy.igcd(g, self.offset)
        return int(g) if g else 1

    def divide(self, g: int) -> 'LinearArg':
        return LinearArg.make(self.offset // g, {k: c // g for k, c in self.indices},
                              self.n_coeff // g, self.eps_coeff / g)

    # Arithmetic

    def __add__(self, other: Union['LinearArg', int]) -> 'LinearArg':
        if isinstance(other, int):
            return self.shift(other)
        merged = self.index_map()
        for k, c in other.indices:
            merged[k] = merged.get(k, 0) + c
        return LinearArg.make(self.offset + other.offset, merged,
                              self.n_coeff + other.n_coeff,
                              self.eps_coeff + other.eps_coeff)

    __radd__ = __add__

    def __neg__(self) -> 'LinearArg':
        return self.scale(-1)

    def __sub__(self, other: Union['LinearArg', int]) -> 'LinearArg':
        if isinstance(other, int):
            return self.shift(-other)
        return self + (-other)

    def __rsub__(self, other: int) -> 'LinearArg':
        return (-self).shift(other)

    def scale(self, k: int) -> 'LinearArg':
        return LinearArg.make(self.offset * k, {n: c * k for n, c in self.indices},
                              self.n_coeff * k, self.eps_coeff * k)

    def substitute(self, name: str, value: 'LinearArg') -> 'LinearArg':
        c = self.coeff(name)
        if not c:
            return self
        if name == N_NAME:
            return LinearArg(self.offset, self.indices, 0, self.eps_coeff) + value.scale(c)
        return self.without(name) + value.scale(c)

    # Ordering and conversion

    def sort_key(self):
        return (0, tuple((index_key(k), c) for k, c in self.indices), self.n_coeff,
                sympy.default_sort_key(self.eps_coeff), self.offset)

    def to_sympy(self) -> sympy.Expr:
        total = sympy.Integer(self.offset) + self.n_coeff * sympy.Symbol(N_NAME)
        for k, c in self.indices:
            total += c * sympy.Symbol(k)
        return total + self.eps_coeff * sympy.Symbol(EPS_NAME)

    def evaluate(self, values: Mapping[str, int]) -> int:
        """Integer value with every index (and n) assigned; ep must be absent"""
        total = self.offset + self.n_coeff * values[N_NAME] if self.n_coeff else self.offset
        for k, c in self.indices:
            total += c * values[k]
        return total

    @classmethod
    def from_sympy(cls, expr: sympy.Expr, index_names: Iterable[str] = ()) -> 'LinearArg':
        """Decompose an expression linear in indices, n and ep; raises ValueError otherwise"""
        expr = sympy.expand(sympy.sympify(expr))
        eps = sympy.Symbol(EPS_NAME)
        n = sympy.Symbol(N_NAME)
        names = set(index_names)
        for s in expr.free_symbols:
            if s.name not in (EPS_NAME, N_NAME) and (is_index_name(s.name) or s.name in names):
                names.add(s.name)
        indices = {}
        rest = expr
        for name in names:
            sym = sympy.Symbol(name)
            c = rest.coeff(sym)
            if c.free_symbols or not c.is_Integer:
                raise ValueError(f"index {name} must enter with an integer coefficient in {expr}")
            indices[name] = int(c)
            rest = sympy.expand(rest - c * sym)
        n_c = rest.coeff(n)
        if n_c.free_symbols or not n_c.is_Integer:
            raise ValueError(f"n must enter with an integer coefficient in {expr}")
        rest = sympy.expand(rest - n_c * n)
        e_c = rest.coeff(eps)
        rest = sympy.expand(rest - e_c * eps)
        if eps in e_c.free_symbols or not rest.is_Integer:
            raise ValueError(f"not an integer-linear argument: {expr}")
        return cls.make(int(rest), indices, int(n_c), e_c)

    def __str__(self) -> str:
        parts = []
        for k, c in self.indices:
            parts.append(_coeff_str(c, k))
        if self.n_coeff:
            parts.append(_coeff_str(self.n_coeff, N_NAME))
        if self.has_eps:
            coeff = self.eps_coeff
            if coeff == 1:
                parts.append(EPS_NAME)
            elif coeff == -1:
                parts.append('-' + EPS_NAME)
            elif coeff.is_Integer:
                parts.append(f"{coeff}*{EPS_NAME}")
            elif coeff.is_Rational:
                parts.append(f"{coeff}*{EPS_NAME}" if coeff > 0 else f"-{-coeff}*{EPS_NAME}")
            else:
                text = sympy.sstr(coeff)
                if coeff.could_extract_minus_sign():
                    parts.append(f"-({sympy.sstr(-coeff)})*{EPS_NAME}" if coeff.is_Add
                                 else f"-{sympy.sstr(-coeff)}*{EPS_NAME}")
                else:
                    parts.append(f"({text})*{EPS_NAME}" if coeff.is_Add else f"{text}*{EPS_NAME}")
        if self.offset or not parts:
            parts.append(str(self.offset))
        out = parts[0]
        for p in parts[1:]:
            out += p if p.startswith('-') else '+' + p
        return out

    def __repr__(self) -> str:
        return f"LinearArg({self})"


def _coeff_str(c: int, name: str) -> str:
    if c == 1:
        return name
    if c == -1:
        return '-' + name
    return f"{c}*{name}"


Boundary = Union[LinearArg, _Infinity]


def boundary_difference(a: Boundary, b: Boundary) -> int:
    """a - b as a known integer; raises SymbolicOffset otherwise"""
    if a is INF and b is INF:
        return 0
    if a is INF or b is INF:
        raise SymbolicOffset(f"cannot compare boundaries {a} and {b}")
    diff = a - b
    if not diff.is_constant:
        raise SymbolicOffset(f"boundaries {a} and {b} differ by {diff}")
    return diff.offset


def boundary_key(b: Boundary):
    return b.sort_key()


def shift_boundary(b: Boundary, c: int) -> Boundary:
    return b if b is INF else b.shift(c)
