#!/usr/bin/env python3
"""
Tests for the script language, the runner and the command-line entry point
"""
import sys
from fractions import Fraction
from pathlib import Path

import pytest
import sympy

# Add src to path
sys.path.append(str(Path(__file__).parent.parent))

from src.cli import ScriptRunner, hyp_spec, parse, parse_expr
from src.cli.parser import Command, Definition
from src.kernel import LinearArg, den, pow_, s_sum, theta
from src.kernel.errors import ArityError, DSLSyntaxError, ParseError, UnknownKeyword, UnsupportedKind
from src.kernel.printer import format_expr
from src.main import main
from src.oracle import Assignment, direct_sum, eval_numeric

GOLDEN = Path(__file__).parent / 'golden'
J1 = LinearArg.index('j1')
N = LinearArg.n()
x1 = sympy.Symbol('x1')


def test_parse_script():
    """Declarations, definitions and commands"""
    print("Testing script parsing...")
    script = parse("symbols x1;\nmaxeps 3;\nf = sum(j1,1,n)*pow(x1,j1)*den(j1);\ndosum f 1 1;\n")
    assert script.symbols == ['x1']
    assert script.max_eps == 3
    definition, command = script.statements
    assert isinstance(definition, Definition) and definition.name == 'f'
    assert isinstance(command, Command)
    assert (command.verb, command.args) == ('dosum', ['f', 1, 1])
    print("✅ Script parsed")


def test_expression_forms():
    """Keyword calls become canonical atoms"""
    assert parse_expr('den(2*j1+2)') == den(J1.shift(1)) * sympy.Rational(1, 2)
    assert parse_expr('1/(j1+1)') == den(J1.shift(1))
    assert parse_expr('deltap(n)') == 1 - parse_expr('delta(n)')
    assert parse_expr('pow(x1,j1+1)') == pow_(x1, J1) * x1
    assert parse_expr('S(R(1),X(1),3)').scalar_value() == sympy.Rational(11, 6)
    assert parse_expr('acc(den(j1))') == den(J1)
    assert parse_expr('ep^2').coefficient_of_eps(2).scalar_value() == 1


def test_parse_errors():
    """Unknown keywords, wrong arity and malformed text"""
    print("Testing parse errors...")
    with pytest.raises(ArityError):
        parse_expr('S(R(1,2),X(x1),n)')
    with pytest.raises(ArityError):
        parse_expr('den(j1,2)')
    with pytest.raises(UnknownKeyword):
        parse_expr('foo(j1)')
    with pytest.raises(UnknownKeyword):
        parse("f = den(j1);\nfrobnicate f;")
    with pytest.raises(DSLSyntaxError):
        parse("symbols x1;\nf = y*den(j1);")
    with pytest.raises(DSLSyntaxError):
        parse("f = den(j1)")
    with pytest.raises(DSLSyntaxError):
        parse("n = den(j1);")
    with pytest.raises(ParseError) as info:
        parse("f = den(j1);\ng = den(;")
    assert info.value.line == 2
    print("✅ Parse errors reported with positions")


def test_printed_expressions_parse_back():
    """format_expr output is valid input"""
    print("Testing print/parse round trip...")
    expr = parse_expr('sign(j1)*den(j1+1)^2*S(R(1,2),X(x1,1),n) - 1/2*pow(x1,n)*theta(n-1) + Z(R(3),X(-1/2),inf)')
    assert parse_expr(format_expr(expr)) == expr
    named = parse(format_expr(expr, 'f') + '\n;')
    assert named.definitions['f'] == expr
    assert parse_expr('theta(n-1)') == theta(N.shift(-1))
    print("✅ Printed form parses back")


def test_runner_uses_current_definitions():
    """A definition that refers to an earlier name sees its value at that point"""
    script = parse("f = sum(j1,1,n)*den(j1);\ndosum f 1 1;\ng = 2*f;\nprint g;\n")
    runner = ScriptRunner(script)
    output = runner.run()
    assert runner.env['g'] == runner.env['f'] * 2
    assert 'S(R(1),X(1),n)' in output
    assert 'sum(' not in output.split('g =')[1]


def test_eval_and_check_commands():
    """eval prints a value; check reports the exact count"""
    print("Testing eval and check commands...")
    script = parse("f = S(R(1),X(1),n);\neval f n=6;\ncheck A 3;\n")
    runner = ScriptRunner(script, seed=5)
    output = runner.run()
    assert 'f(n=6) = 49/20' in output
    assert 'algA: 3/3 exact' in output
    assert runner.failed_checks == 0
    print("✅ eval and check commands work")


def test_hyp_spec_kinds():
    spec = hyp_spec('2F1', [[sympy.Symbol('ep'), sympy.Symbol('ep')], [1 - sympy.Symbol('ep')], [x1]])
    assert spec.label == '2F1'
    assert hyp_spec('Tri', [[1, 1, 1, 1], [x1]]).label == 'Tri(1,1,1,1)'
    with pytest.raises(ValueError):
        hyp_spec('3F2', [[1], [1], [x1]])
    with pytest.raises(UnsupportedKind):
        hyp_spec('Bessel', [[1], [x1]])


def run_golden(name: str, tmp_path, capsys) -> str:
    """Run GOLDEN/<name>.ns and compare with the committed GOLDEN/<name>.out"""
    capsys.readouterr()
    out_file = tmp_path / f'{name}.out'
    assert main(['run', str(GOLDEN / f'{name}.ns'), '--golden', str(out_file)]) == 0
    output = out_file.read_text(encoding='utf-8')
    assert capsys.readouterr().out == output

    golden = GOLDEN / f'{name}.out'
    if not golden.exists():
        pytest.fail(f"{golden} is missing; review the output and commit it with "
                    f"'nestsum run {GOLDEN / (name + '.ns')} --golden {golden}'")
    assert output == golden.read_text(encoding='utf-8')
    return output


def test_golden_basic(tmp_path, capsys):
    """Shuffle and S-to-Z output, locked line by line"""
    print("Testing the basic golden script...")
    output = run_golden('basic', tmp_path, capsys)
    assert output.startswith('a =\n    + 2*S(R(1,1),X(1,1),n)\n')
    print("✅ Basic golden output matches")


def test_golden_demo(tmp_path, capsys):
    """The demo script runs, matches its golden output and agrees with direct summation"""
    print("Testing the golden demo script...")
    output = run_golden('demo', tmp_path, capsys)

    closed = parse("symbols x1, x2, x3;\n" + output).definitions['demo']
    original = parse(GOLDEN.joinpath('demo.ns').read_text(encoding='utf-8')).definitions['demo']
    symbols = {'x1': Fraction(1, 2), 'x2': Fraction(1, 3), 'x3': Fraction(1, 5)}
    for n in range(1, 6):
        assignment = Assignment(index_values={'n': n}, symbol_values=symbols)
        assert eval_numeric(closed, assignment) == direct_sum(original, ['j1'], assignment)
    print("✅ Golden demo verified")


def test_golden_expand(tmp_path, capsys):
    """The expansion script matches its golden output"""
    print("Testing the golden expansion script...")
    output = run_golden('expand', tmp_path, capsys)
    assert 'fac(n)' in output
    assert 'f(ep=1/100) = ' in output
    print("✅ Golden expansion verified")


def test_order_marker_closes_the_block():
    """A truncated expansion prints order(P) after every ep group"""
    expr = parse_expr('1 + ep*S(R(1),X(1),n) + order(2)')
    lines = format_expr(expr, 'f').splitlines()
    assert lines[-1].strip() == '+ order(2)'
    assert lines[1].strip() == '# ep^0'


def test_exit_codes(tmp_path, capsys):
    """0 on success, 1 on engine errors, 2 on parse errors"""
    print("Testing exit codes...")
    good = tmp_path / 'good.ns'
    good.write_text("f = S(R(2),X(1),n);\nprint f;\n", encoding='utf-8')
    assert main(['run', str(good)]) == 0

    broken = tmp_path / 'broken.ns'
    broken.write_text("f = den(j1;\n", encoding='utf-8')
    assert main(['run', str(broken)]) == 2

    failing = tmp_path / 'failing.ns'
    failing.write_text("f = sum(j1,1,inf)*bino(n,j1)*den(j1);\ndosum f 1 1;\n", encoding='utf-8')
    assert main(['run', str(failing)]) == 1

    assert main(['run', str(tmp_path / 'missing.ns')]) == 1
    errors = capsys.readouterr().err
    assert 'Parse error' in errors
    assert 'Error:' in errors
    print("✅ Exit codes correct")


def test_s_sum_keyword_matches_kernel():
    assert parse_expr('S(R(1,1),X(x1,1),n)') == s_sum(N, (1, 1), (x1, 1))
