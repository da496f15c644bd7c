#!/usr/bin/env python3
"""
Configuration test for the nested-sum engine
"""
import sys
from pathlib import Path

# Add src to path
sys.path.append(str(Path(__file__).parent.parent))

from src.config import Config, config


def test_config_import():
    """Test that config can be imported and has sane defaults"""
    print("Testing configuration import...")
    assert hasattr(config, 'MAX_EPS')
    assert hasattr(config, 'PRECISION')
    assert hasattr(config, 'SEED')
    print("✅ Config attributes exist")

    assert config.MAX_EPS >= 1
    assert config.PRECISION >= 15
    assert config.TRUNCATION_TERMS > 0
    print("✅ Config has reasonable values")

    print(f"  - Max ep order: {config.MAX_EPS}")
    print(f"  - Precision: {config.PRECISION} digits")
    print(f"  - Seed: {config.SEED}")


def test_problems_are_reported():
    """Invalid settings show up in problems() and fail validate()"""
    print("Testing configuration validation...")
    settings = Config()
    assert settings.problems() == []
    assert settings.validate()

    settings.PRECISION = 10
    settings.MAX_EPS = 0
    settings.MZV_TABLE = '/nonexistent/mzv.txt'
    found = settings.problems()
    assert len(found) == 3
    assert any('NESTSUM_PRECISION' in p for p in found)
    assert any('NESTSUM_MZV_TABLE' in p for p in found)
    assert not settings.validate()
    print("✅ Invalid settings rejected")


def test_required_packages():
    """Test that required packages can be imported"""
    print("Testing required packages...")
    import dotenv  # noqa: F401
    import mpmath  # noqa: F401
    import sympy  # noqa: F401
    import tabulate  # noqa: F401
    print("✅ All required packages available")


def test_validate_logs_problems(caplog, capsys):
    """validate() reports through the log, not on stdout"""
    settings = Config()
    settings.HISTORY_SIZE = 0
    with caplog.at_level('ERROR', logger='src.config'):
        assert not settings.validate()
    assert 'NESTSUM_HISTORY_SIZE' in caplog.text
    assert capsys.readouterr().out == ''
