"""
Script parser: recursive descent over the summation notation

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := unary ['^' ['-'] integer]
    unary  := '-' unary | atom
    atom   := integer | symbol | keyword '(' args ')' | '(' expr ')'

Statements end with ';'. A script holds declarations, definitions
`name = expr;` and commands such as `dosum name 1 1;`.
"""
import logging
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

import sympy

from src.kernel import (
    Bino, Delta, DeltaP, Expr, FacFactor, GammaFactor, LinFactor, OrderMarker,
    Pow, SSum, SumOp, Theta, ZSum, canon,
)
from src.kernel.errors import ArityError, DSLSyntaxError, UnknownKeyword
from src.kernel.linear import EPS_NAME, INF, N_NAME, LinearArg, is_index_name

logger = logging.getLogger(__name__)

RESERVED = {EPS_NAME, 'inf', N_NAME, 'sinf', 'z2', 'z3', 'z4', 'z5', 'z6'}

# keyword -> number of arguments
KEYWORDS = {
    'sum': 3, 'bino': 2, 'pow': 2, 'den': 1, 'num': 1, 'fac': 1, 'invfac': 1,
    'Gamma': 1, 'InvGamma': 1, 'theta': 1, 'delta': 1, 'deltap': 1, 'sign': 1,
    'epow': 1, 'S': 3, 'Z': 3, 'acc': 1, 'order': 1,
}
COMMANDS = ('symbols', 'maxeps', 'mzvtable', 'dosum', 'shuffle', 'stoz', 'ztos',
            'reduce', 'expand', 'expand-hyp', 'check', 'eval', 'print')

_TOKEN_RE = re.compile(r'''
    (?P<space>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<number>\d+)
  | (?P<name>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<op>[-+*/^(),;=])
''', re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    tokens: List[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        if kind == 'newline':
            line += 1
            line_start = match.end()
        elif kind not in ('space', 'comment'):
            tokens.append(Token(kind, match.group(), line, match.start() - line_start + 1))
        pos = match.end()
    tokens.append(Token('end', '', line, pos - line_start + 1))
    return tokens


# Syntax tree; positions are kept for error messages

@dataclass
class Node:
    line: int
    column: int


@dataclass
class Number(Node):
    value: int


@dataclass
class Name(Node):
    name: str


@dataclass
class Call(Node):
    name: str
    args: List[Node]


@dataclass
class Binary(Node):
    op: str
    left: Node
    right: Node


@dataclass
class Negate(Node):
    operand: Node


@dataclass
class Power(Node):
    base: Node
    exponent: int


@dataclass
class Definition:
    name: str
    expr: Expr
    line: int
    tree: Optional[Node] = None


@dataclass
class Command:
    verb: str
    args: List[object]
    line: int


@dataclass
class Script:
    symbols: List[str] = field(default_factory=list)
    max_eps: Optional[int] = None
    mzv_table: Optional[str] = None
    statements: List[object] = field(default_factory=list)

    @property
    def definitions(self) -> Dict[str, Expr]:
        return {s.name: s.expr for s in self.statements if isinstance(s, Definition)}


class Parser:
    """One pass over the token list; definitions are converted to Expr as they are read"""

    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0
        self.script = Script()
        self.defined: Dict[str, Expr] = {}

    # Token helpers

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, offset: int = 1) -> Token:
        return self.tokens[min(self.pos + offset, len(self.tokens) - 1)]

    def advance(self) -> Token:
        token = self.current
        if token.kind != 'end':
            self.pos += 1
        return token

    def error(self, message: str, token: Optional[Token] = None) -> DSLSyntaxError:
        token = token or self.current
        return DSLSyntaxError(message, token.line, token.column)

    def expect(self, text: str) -> Token:
        if self.current.kind != 'op' or self.current.text != text:
            found = self.current.text or 'end of input'
            raise self.error(f"expected '{text}', found '{found}'")
        return self.advance()

    def expect_kind(self, kind: str) -> Token:
        if self.current.kind != kind:
            found = self.current.text or 'end of input'
            raise self.error(f"expected {kind}, found '{found}'")
        return self.advance()

    def integer(self) -> int:
        sign = 1
        if self.current.text == '-':
            self.advance()
            sign = -1
        return sign * int(self.expect_kind('number').text)

    # Statements

    def parse(self) -> Script:
        while self.current.kind != 'end':
            self.statement()
        return self.script

    def statement(self):
        token = self.current
        if token.kind != 'name':
            raise self.error(f"statement must start with a name, found '{token.text}'")
        if self.peek().text == '=':
            self.definition()
            return
        verb = token.text
        if verb == 'expand' and self.peek().text == '-' and self.peek(2).text == 'hyp':
            self.advance()
            self.advance()
            verb = 'expand-hyp'
        if verb not in COMMANDS:
            raise UnknownKeyword(f"unknown command '{verb}'", token.line, token.column)
        self.advance()
        getattr(self, f"cmd_{verb.replace('-', '_')}")(token)
        self.expect(';')

    def definition(self):
        name_token = self.advance()
        name = name_token.text
        if name in RESERVED or name in KEYWORDS or is_index_name(name):
            raise self.error(f"'{name}' cannot be used as an expression name", name_token)
        self.expect('=')
        tree = self.expr()
        self.expect(';')
        expr = self.to_expr(tree)
        self.defined[name] = expr
        self.script.statements.append(Definition(name, expr, name_token.line, tree))
        logger.debug(f"Parsed {name}: {len(expr)} terms")

    def defined_name(self) -> str:
        token = self.expect_kind('name')
        if token.text not in self.defined:
            raise self.error(f"'{token.text}' is not defined", token)
        return token.text

    def command(self, verb: str, token: Token, *args):
        self.script.statements.append(Command(verb, list(args), token.line))

    def cmd_symbols(self, token: Token):
        names = [self.expect_kind('name').text]
        while self.current.text == ',':
            self.advance()
            names.append(self.expect_kind('name').text)
        for name in names:
            if name in RESERVED or name in KEYWORDS or is_index_name(name):
                raise self.error(f"'{name}' is reserved and cannot be declared", token)
        self.script.symbols.extend(names)

    def cmd_maxeps(self, token: Token):
        value = self.integer()
        if value < 1:
            raise self.error(f"maxeps must be at least 1 (got {value})", token)
        self.script.max_eps = value

    def cmd_mzvtable(self, token: Token):
        self.script.mzv_table = self.expect_kind('string').text.strip('"')

    def cmd_dosum(self, token: Token):
        name = self.defined_name()
        inner = self.integer()
        outer = self.integer()
        self.command('dosum', token, name, inner, outer)

    def _single(self, verb: str, token: Token):
        self.command(verb, token, self.defined_name())

    def cmd_shuffle(self, token: Token):
        self._single('shuffle', token)

    def cmd_stoz(self, token: Token):
        self._single('stoz', token)

    def cmd_ztos(self, token: Token):
        self._single('ztos', token)

    def cmd_reduce(self, token: Token):
        self._single('reduce', token)

    def cmd_expand(self, token: Token):
        self._single('expand', token)

    def cmd_print(self, token: Token):
        self._single('print', token)

    def cmd_expand_hyp(self, token: Token):
        """expand-hyp NAME KIND(group; group; ...) ORDER"""
        target = self.expect_kind('name')
        if target.text in RESERVED or is_index_name(target.text):
            raise self.error(f"'{target.text}' cannot be used as an expression name", target)
        kind = ''
        while self.current.kind in ('name', 'number'):
            kind += self.advance().text
        if not kind:
            raise self.error("expected a hypergeometric kind such as 2F1, F2 or Tri")
        self.expect('(')
        groups: List[List[sympy.Expr]] = [[]]
        while True:
            groups[-1].append(self.to_scalar(self.expr()))
            if self.current.text == ',':
                self.advance()
            elif self.current.text == ';':
                self.advance()
                groups.append([])
            else:
                break
        self.expect(')')
        order = self.integer()
        self.defined[target.text] = Expr.zero()
        self.command('expand-hyp', token, target.text, kind, groups, order)

    def cmd_check(self, token: Token):
        kind = self.expect_kind('name').text
        if kind not in ('A', 'B', 'C', 'D'):
            raise self.error(f"check takes A, B, C or D (got {kind})")
        count = self.integer() if self.current.kind == 'number' else None
        self.command('check', token, kind, count)

    def cmd_eval(self, token: Token):
        name = self.defined_name()
        values: Dict[str, sympy.Expr] = {}
        while self.current.kind == 'name':
            key = self.advance().text
            self.expect('=')
            value = self.to_scalar(self.unary())
            if self.current.text == '/':
                self.advance()
                value = value / self.to_scalar(self.unary())
            if not value.is_Rational:
                raise self.error(f"value of {key} must be a rational number")
            values[key] = value
        self.command('eval', token, name, values)

    # Expressions

    def expr(self) -> Node:
        node = self.term()
        while self.current.text in ('+', '-') and self.current.kind == 'op':
            op = self.advance()
            node = Binary(op.line, op.column, op.text, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.current.text in ('*', '/') and self.current.kind == 'op':
            op = self.advance()
            node = Binary(op.line, op.column, op.text, node, self.factor())
        return node

    def factor(self) -> Node:
        node = self.unary()
        if self.current.text == '^':
            op = self.advance()
            if self.current.text == '(':
                self.advance()
                exponent = self.integer()
                self.expect(')')
            else:
                exponent = self.integer()
            node = Power(op.line, op.column, node, exponent)
        return node

    def unary(self) -> Node:
        if self.current.text == '-' and self.current.kind == 'op':
            op = self.advance()
            return Negate(op.line, op.column, self.unary())
        if self.current.text == '+' and self.current.kind == 'op':
            self.advance()
            return self.unary()
        return self.atom()

    def atom(self) -> Node:
        token = self.current
        if token.kind == 'number':
            self.advance()
            return Number(token.line, token.column, int(token.text))
        if token.kind == 'name':
            self.advance()
            if self.current.text != '(':
                return Name(token.line, token.column, token.text)
            self.advance()
            args: List[Node] = []
            if self.current.text != ')':
                args.append(self.expr())
                while self.current.text == ',':
                    self.advance()
                    args.append(self.expr())
            self.expect(')')
            return Call(token.line, token.column, token.text, args)
        if token.text == '(':
            self.advance()
            node = self.expr()
            self.expect(')')
            return node
        raise self.error(f"unexpected '{token.text or 'end of input'}'")

    # Conversion to the kernel

    def check_name(self, node: Name):
        name = node.name
        if name in RESERVED or is_index_name(name) or name in self.defined:
            return
        if self.script.symbols and name not in self.script.symbols:
            raise DSLSyntaxError(f"undeclared symbol '{name}'", node.line, node.column)

    def to_scalar(self, node: Node) -> sympy.Expr:
        """Plain sympy value; den and num read as 1/x and x"""
        if isinstance(node, Number):
            return sympy.Integer(node.value)
        if isinstance(node, Name):
            if node.name == 'inf':
                raise DSLSyntaxError("inf is only allowed as an upper limit", node.line, node.column)
            self.check_name(node)
            return sympy.Symbol(node.name)
        if isinstance(node, Negate):
            return -self.to_scalar(node.operand)
        if isinstance(node, Power):
            return self.to_scalar(node.base) ** node.exponent
        if isinstance(node, Binary):
            left, right = self.to_scalar(node.left), self.to_scalar(node.right)
            if node.op == '+':
                return left + right
            if node.op == '-':
                return left - right
            if node.op == '*':
                return left * right
            if right == 0:
                raise DSLSyntaxError("division by zero", node.line, node.column)
            return left / right
        if isinstance(node, Call):
            self.check_arity(node)
            arg = self.to_scalar(node.args[0]) if node.args else None
            if node.name in ('acc', 'num'):
                return arg
            if node.name == 'den':
                if arg == 0:
                    raise DSLSyntaxError("den(0)", node.line, node.column)
                return 1 / arg
            if node.name == 'sign':
                return sympy.Integer(-1) ** arg
            if node.name in KEYWORDS:
                raise DSLSyntaxError(f"{node.name}(...) is not allowed inside a scalar argument",
                                     node.line, node.column)
            raise UnknownKeyword(f"unknown function '{node.name}'", node.line, node.column)
        raise TypeError(f"unexpected node {node!r}")

    def to_linear(self, node: Node) -> LinearArg:
        value = self.to_scalar(node)
        try:
            return LinearArg.from_sympy(value)
        except ValueError as e:
            raise DSLSyntaxError(str(e), node.line, node.column)

    def to_boundary(self, node: Node):
        if isinstance(node, Name) and node.name == 'inf':
            return INF
        return self.to_linear(node)

    def has_variables(self, value: sympy.Expr) -> bool:
        return any(s.name in (EPS_NAME, N_NAME) or is_index_name(s.name) for s in value.free_symbols)

    def check_arity(self, node: Call):
        expected = KEYWORDS.get(node.name)
        if expected is None:
            raise UnknownKeyword(f"unknown function '{node.name}'", node.line, node.column)
        if len(node.args) != expected:
            raise ArityError(f"{node.name} takes {expected} argument(s), got {len(node.args)}",
                             node.line, node.column)

    def to_expr(self, node: Node) -> Expr:
        if isinstance(node, Number):
            return Expr.scalar(node.value)
        if isinstance(node, Name):
            if node.name in self.defined:
                return self.defined[node.name]
            if node.name == EPS_NAME:
                return Expr.eps()
            if node.name == N_NAME or is_index_name(node.name):
                return Expr.atom(LinFactor(LinearArg.from_sympy(sympy.Symbol(node.name))))
            return Expr.scalar(self.to_scalar(node))
        if isinstance(node, Negate):
            return -self.to_expr(node.operand)
        if isinstance(node, Power):
            return self.power(node)
        if isinstance(node, Binary):
            if node.op == '/':
                return self.divide(node)
            left, right = self.to_expr(node.left), self.to_expr(node.right)
            if node.op == '+':
                return left + right
            if node.op == '-':
                return left - right
            return left * right
        if isinstance(node, Call):
            return self.call(node)
        raise TypeError(f"unexpected node {node!r}")

    def power(self, node: Power) -> Expr:
        base = self.to_expr(node.base)
        if node.exponent >= 0:
            return base ** node.exponent
        if len(base) != 1:
            raise DSLSyntaxError("negative powers need a single product as base", node.line, node.column)
        term = base.terms[0]
        if term.sum_ops():
            raise DSLSyntaxError("a sum cannot be raised to a negative power", node.line, node.column)
        return Expr.product(term.coeff ** node.exponent,
                            [(a, p * node.exponent) for a, p in term.atoms])

    def divide(self, node: Binary) -> Expr:
        left = self.to_expr(node.left)
        value = self.to_scalar(node.right)
        if value == 0:
            raise DSLSyntaxError("division by zero", node.line, node.column)
        if self.has_variables(value):
            return left * Expr.atom(LinFactor(self.to_linear(node.right)), -1)
        return left * (1 / value)

    def call(self, node: Call) -> Expr:
        self.check_arity(node)
        name, args = node.name, node.args
        if name == 'acc':
            return self.to_expr(args[0])
        if name == 'sum':
            index = args[0]
            if not isinstance(index, Name) or not is_index_name(index.name):
                raise DSLSyntaxError("sum needs an index j1, j2, ... as first argument",
                                     node.line, node.column)
            return Expr.atom(SumOp(index.name, self.to_linear(args[1]), self.to_boundary(args[2])))
        if name == 'bino':
            return Expr.atom(Bino(self.to_linear(args[0]), self.to_linear(args[1])))
        if name == 'pow':
            base = self.to_scalar(args[0])
            if self.has_variables(base):
                raise DSLSyntaxError("the base of pow must not contain indices or ep",
                                     node.line, node.column)
            return Expr.atom(Pow(canon(base), self.to_linear(args[1])))
        if name == 'sign':
            return Expr.atom(Pow(sympy.Integer(-1), self.to_linear(args[0])))
        if name in ('den', 'num'):
            value = self.to_scalar(args[0])
            power = 1 if name == 'num' else -1
            if self.has_variables(value):
                return Expr.atom(LinFactor(self.to_linear(args[0])), power)
            if value == 0 and power < 0:
                raise DSLSyntaxError("den(0)", node.line, node.column)
            return Expr.scalar(value ** power)
        if name in ('fac', 'invfac'):
            return Expr.atom(FacFactor(self.to_linear(args[0])), 1 if name == 'fac' else -1)
        if name in ('Gamma', 'InvGamma'):
            return Expr.atom(GammaFactor(self.to_linear(args[0])), 1 if name == 'Gamma' else -1)
        if name == 'theta':
            return Expr.atom(Theta(self.to_linear(args[0])))
        if name == 'delta':
            return Expr.atom(Delta(self.to_linear(args[0])))
        if name == 'deltap':
            return Expr.atom(DeltaP(self.to_linear(args[0])))
        if name == 'epow':
            k = self.to_scalar(args[0])
            if not k.is_Integer:
                raise DSLSyntaxError("epow takes an integer", node.line, node.column)
            return Expr.eps(int(k))
        if name == 'order':
            k = self.to_scalar(args[0])
            if not k.is_Integer:
                raise DSLSyntaxError("order takes an integer", node.line, node.column)
            return Expr.atom(OrderMarker(int(k)))
        if name in ('S', 'Z'):
            return Expr.atom(self.nested_sum(node))
        raise UnknownKeyword(f"unknown function '{name}'", node.line, node.column)

    def nested_sum(self, node: Call) -> SSum:
        r, x, arg = node.args
        for part, label in ((r, 'R'), (x, 'X')):
            if not isinstance(part, Call) or part.name != label:
                raise DSLSyntaxError(f"{node.name} expects {label}(...) here", part.line, part.column)
        weights = []
        for w in r.args:
            value = self.to_scalar(w)
            if not value.is_Integer or value < 1:
                raise DSLSyntaxError("S-sum weights are positive integers", w.line, w.column)
            weights.append(int(value))
        if len(weights) != len(x.args):
            raise ArityError(f"R has {len(weights)} entries but X has {len(x.args)}",
                             node.line, node.column)
        args = tuple(canon(self.to_scalar(a)) for a in x.args)
        cls = ZSum if node.name == 'Z' else SSum
        return cls(self.to_boundary(arg), tuple(weights), args)


def parse(text: str) -> Script:
    return Parser(text).parse()


def parse_expr(text: str, symbols: Sequence[str] = ()) -> Expr:
    """A single expression without the trailing ';'"""
    parser = Parser(text)
    parser.script.symbols.extend(symbols)
    tree = parser.expr()
    if parser.current.kind != 'end':
        raise parser.error(f"unexpected '{parser.current.text}' after the expression")
    return parser.to_expr(tree)



def build_expr(tree: Node, defined: Dict[str, Expr], symbols: Sequence[str] = ()) -> Expr:
    """Convert a parsed definition again, with names bound to their current values"""
    parser = Parser('')
    parser.defined = dict(defined)
    parser.script.symbols.extend(symbols)
    return parser.to_expr(tree)
