#!/usr/bin/env python3
"""
Main entry point for the nested-sum engine
"""
import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

from src.config import config
from src.kernel.errors import NestsumError, ParseError
from src.kernel.printer import format_term

logger = logging.getLogger(__name__)


def configure_logging():
    """Diagnostics go to stderr; stdout carries only results"""
    logging.basicConfig(
        level=getattr(logging, config.LOG_LEVEL.upper(), logging.WARNING),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        stream=sys.stderr,
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='nestsum', description='Nested sums and epsilon expansions')
    commands = parser.add_subparsers(dest='command', required=True)
    run = commands.add_parser('run', help='Run a script')
    run.add_argument('script', type=Path, help='Script file')
    run.add_argument('--max-eps', type=int, help='Truncation order of ep expansions')
    run.add_argument('--mzv-table', help='Multiple zeta value table file')
    run.add_argument('--precision', type=int, help='Decimal digits for numeric evaluation')
    run.add_argument('--seed', type=int, help='Seed for check runs')
    run.add_argument('--golden', type=Path, help='Also write the output to this file')
    return parser


def apply_overrides(args: argparse.Namespace):
    """CLI flags win over the environment for this invocation"""
    if args.max_eps is not None:
        config.MAX_EPS = args.max_eps
    if args.mzv_table is not None:
        config.MZV_TABLE = args.mzv_table
    if args.precision is not None:
        config.PRECISION = args.precision
    if args.seed is not None:
        config.SEED = args.seed


def report_error(e: NestsumError):
    print(f"Error: {e}", file=sys.stderr)
    term = getattr(e, 'term', None)
    if term is not None and hasattr(term, 'atoms'):
        print(f"  in term: {format_term(term)}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point; 0 on success, 1 on engine errors, 2 on parse errors"""
    args = build_parser().parse_args(argv)
    configure_logging()
    apply_overrides(args)
    if not config.validate():
        return 1

    from src.cli import ScriptRunner, parse

    try:
        text = args.script.read_text(encoding='utf-8')
    except OSError as e:
        print(f"Error: cannot read {args.script}: {e}", file=sys.stderr)
        return 1

    try:
        script = parse(text)
    except ParseError as e:
        print(f"Parse error in {args.script}: {e}", file=sys.stderr)
        return 2

    runner = ScriptRunner(script, max_eps=args.max_eps, mzv_table=args.mzv_table,
                          precision=args.precision, seed=args.seed)
    try:
        output = runner.run()
    except NestsumError as e:
        logger.error(f"Engine error: {e}")
        report_error(e)
        return 1
    except ValueError as e:
        logger.error(f"Invalid input: {e}")
        print(f"Error: {e}", file=sys.stderr)
        return 1

    sys.stdout.write(output)
    if args.golden is not None:
        args.golden.write_text(output, encoding='utf-8')
        logger.info(f"Output written to {args.golden}")
    return 1 if runner.failed_checks else 0


if __name__ == "__main__":
    sys.exit(main())
