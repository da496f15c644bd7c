"""
Script execution: applies commands to named expressions and prints the results
"""
import logging
from fractions import Fraction
from typing import Dict, List, Optional

import mpmath
import sympy

from src.algebra import basis_s, convert_sums, reduce_infinity
from src.algebra.mzv import MZVTable, default_table
from src.config import config
from src.kernel import Expr
from src.kernel.errors import UnsupportedKind
from src.kernel.linear import N_NAME, is_index_name
from src.kernel.printer import format_expr
from src.oracle import Assignment, eval_numeric
from src.services.hypergeometric_service import HypergeometricService, HypergeomSpec
from src.summer import SumSpec, Summer, do_sum

from .check import run_check
from .parser import Command, Definition, Script, build_expr

logger = logging.getLogger(__name__)


def hyp_spec(kind: str, groups: List[List[sympy.Expr]]) -> HypergeomSpec:
    """
    2F1(a1,a2; b1; x), pFq likewise, F2(a,b1,b2; c1,c2; x,y) and
    Tri(m,nu1,nu2,nu3; x)
    """
    if kind[0].isdigit() and 'F' in kind:
        p, q = (int(part) for part in kind.split('F', 1))
        if len(groups) != 3 or len(groups[0]) != p or len(groups[1]) != q:
            raise ValueError(f"{kind} takes ({p} parameters; {q} parameters; x)")
        return HypergeomSpec.pfq(groups[0], groups[1], groups[2][0])
    if kind in ('F2', 'AppellF2'):
        if [len(g) for g in groups] != [3, 2, 2]:
            raise ValueError("F2 takes (a, b1, b2; c1, c2; x, y)")
        (a, b1, b2), (c1, c2), (x, y) = groups
        return HypergeomSpec.appell_f2(a, b1, b2, c1, c2, x, y)
    if kind in ('Tri', 'TriangleTwoMass'):
        if [len(g) for g in groups] != [4, 1]:
            raise ValueError("Tri takes (m, nu1, nu2, nu3; x)")
        m, nu1, nu2, nu3 = (int(v) for v in groups[0])
        return HypergeomSpec.triangle(m, nu1, nu2, nu3, groups[1][0])
    raise UnsupportedKind(f"unknown hypergeometric kind '{kind}'")


def format_value(value, digits: int = config.PRECISION) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return mpmath.nstr(value, digits)


class ScriptRunner:
    """Holds the named expressions of one script run"""

    def __init__(self, script: Script, max_eps: Optional[int] = None,
                 mzv_table: Optional[str] = None, precision: Optional[int] = None,
                 seed: Optional[int] = None):
        self.script = script
        self.max_eps = max_eps or script.max_eps or config.MAX_EPS
        path = mzv_table or script.mzv_table or config.MZV_TABLE
        self.table = MZVTable.load(path) if path else default_table()
        self.precision = precision or config.PRECISION
        self.seed = config.SEED if seed is None else seed
        self.env: Dict[str, Expr] = {}
        self.output: List[str] = []
        self.failed_checks = 0
        self.hypergeometric = HypergeometricService(self.table)

    def emit(self, name: str):
        self.output.append(format_expr(self.env[name], name) + '\n;')

    def run(self) -> str:
        for statement in self.script.statements:
            if isinstance(statement, Definition):
                self.env[statement.name] = build_expr(statement.tree, self.env, self.script.symbols) \
                    if statement.tree is not None else statement.expr
                continue
            self.execute(statement)
        return '\n'.join(self.output) + '\n' if self.output else ''

    def execute(self, command: Command):
        verb, args = command.verb, command.args
        logger.debug(f"Line {command.line}: {verb} {args}")
        if verb == 'dosum':
            name, inner, outer = args
            self.env[name] = do_sum(self.env[name], SumSpec(inner, outer), order=self.max_eps,
                                    table=self.table)
            self.emit(name)
        elif verb == 'shuffle':
            self.env[args[0]] = basis_s(self.env[args[0]])
            self.emit(args[0])
        elif verb in ('stoz', 'ztos'):
            self.env[args[0]] = convert_sums(self.env[args[0]], to_z=verb == 'stoz')
            self.emit(args[0])
        elif verb == 'reduce':
            self.env[args[0]] = reduce_infinity(self.env[args[0]], self.table)
            self.emit(args[0])
        elif verb == 'expand':
            self.env[args[0]] = Summer(order=self.max_eps, table=self.table).expand_eps(self.env[args[0]])
            self.emit(args[0])
        elif verb == 'expand-hyp':
            name, kind, groups, order = args
            series = self.hypergeometric.expand_in_eps(hyp_spec(kind, groups), order)
            self.env[name] = series.to_expr()
            self.emit(name)
        elif verb == 'check':
            kind, count = args
            results, report = run_check(kind, count, self.seed)
            self.failed_checks += sum(1 for r in results if r.status != 'exact')
            self.output.append(report)
        elif verb == 'eval':
            name, values = args
            indices = {k: int(v) for k, v in values.items() if k == N_NAME or is_index_name(k)}
            symbols = {k: Fraction(int(v.p), int(v.q)) for k, v in values.items() if k not in indices}
            eps = symbols.pop('ep', None)
            assignment = Assignment(indices, symbols, eps, precision=self.precision)
            value = eval_numeric(self.env[name], assignment)
            shown = ', '.join(f"{k}={v}" for k, v in values.items())
            self.output.append(f"{name}({shown}) = {format_value(value, self.precision)}")
        elif verb == 'print':
            self.emit(args[0])
        else:
            raise ValueError(f"unknown command {verb}")


def run_script(script: Script, **options) -> str:
    runner = ScriptRunner(script, **options)
    return runner.run()
