"""
Harmonic sums at infinity and the multiple zeta value table
"""
import logging
import re
from pathlib import Path
from typing import Dict, Optional, Tuple

import sympy

from src.kernel import Expr, SSum, ZSum
from src.kernel.errors import ResidualDivergence, TableFormatError
from src.kernel.linear import INF

from .ssum import conv_z_to_s

logger = logging.getLogger(__name__)

DEFAULT_TABLE = Path(__file__).parent / 'data' / 'mzv_weight4.txt'
SINF = sympy.Symbol('sinf')
TABLE_SYMBOLS = {f"z{k}": sympy.Symbol(f"z{k}") for k in range(2, 7)}
TABLE_SYMBOLS['sinf'] = SINF

_LINE_RE = re.compile(r'^S\s+inf\s+([-\d,\s]+?)\s*=\s*(.+)$')


class MZVTable:
    """Values of S(inf; m1,...,mk; 1,...,1) as polynomials in z2..z6 and sinf"""

    def __init__(self, entries: Optional[Dict[Tuple[int, ...], sympy.Expr]] = None,
                 source: str = '<memory>'):
        self.entries: Dict[Tuple[int, ...], sympy.Expr] = dict(entries or {})
        self.source = source

    @classmethod
    def load(cls, path=None) -> 'MZVTable':
        path = Path(path) if path else DEFAULT_TABLE
        table = cls(source=str(path))
        text = path.read_text(encoding='utf-8')
        for number, line in enumerate(text.splitlines(), 1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            match = _LINE_RE.match(line)
            if not match:
                raise TableFormatError(f"{path}:{number}: expected 'S inf m1,...,mk = expr'")
            try:
                weights = tuple(int(w) for w in match.group(1).replace(' ', '').split(','))
                value = sympy.sympify(match.group(2).replace('^', '**'), locals=TABLE_SYMBOLS)
            except (ValueError, sympy.SympifyError) as e:
                raise TableFormatError(f"{path}:{number}: {e}")
            unknown = {s.name for s in value.free_symbols} - set(TABLE_SYMBOLS)
            if unknown:
                raise TableFormatError(f"{path}:{number}: unknown symbols {sorted(unknown)}")
            if weights in table.entries:
                logger.warning(f"{path}:{number}: duplicate entry for {weights}, keeping the last")
            table.entries[weights] = sympy.expand(value)
        logger.debug(f"Loaded {len(table.entries)} MZV entries from {path}")
        return table

    @property
    def max_weight(self) -> int:
        return max((sum(w) for w in self.entries), default=0)

    def lookup(self, weights: Tuple[int, ...]) -> Optional[sympy.Expr]:
        if weights in self.entries:
            return self.entries[weights]
        if len(weights) == 1 and weights[0] >= 2:
            return sympy.Symbol(f"z{weights[0]}")
        return None

    def __len__(self) -> int:
        return len(self.entries)


_default_table: Optional[MZVTable] = None


def default_table() -> MZVTable:
    global _default_table
    if _default_table is None:
        from src.config import config
        _default_table = MZVTable.load(config.MZV_TABLE or None)
    return _default_table


def _is_harmonic_at_infinity(atom) -> bool:
    return isinstance(atom, SSum) and atom.upper is INF and all(x == 1 for x in atom.args)


def reduce_infinity(expr: Expr, table: Optional[MZVTable] = None,
                    require_finite: bool = False) -> Expr:
    """
    Replace harmonic sums at infinity by table values.

    Sums with other arguments stay as multiple polylogarithms. With
    require_finite a surviving sinf raises ResidualDivergence.
    """
    table = table or default_table()

    def one_term(term) -> Expr:
        if not any(_is_harmonic_at_infinity(a) for a, _ in term.atoms):
            return Expr((term,))
        result = Expr.product(term.coeff, [(a, p) for a, p in term.atoms
                                           if not _is_harmonic_at_infinity(a)])
        for atom, power in term.atoms:
            if not _is_harmonic_at_infinity(atom):
                continue
            if isinstance(atom, ZSum):
                value = reduce_infinity(conv_z_to_s(atom), table)
            else:
                found = table.lookup(atom.weights)
                if found is None:
                    logger.debug(f"No table entry for S(inf;{atom.weights}), kept as is")
                    value = Expr.atom(atom)
                else:
                    value = Expr.scalar(found)
            result = result * value ** power
        return result

    reduced = expr.map_terms(one_term)
    if require_finite and SINF in reduced.free_symbols():
        raise ResidualDivergence(f"sinf survives in a result expected finite: {reduced}")
    return reduced
