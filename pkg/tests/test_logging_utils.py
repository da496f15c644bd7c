#!/usr/bin/env python3
"""
Tests for structured summation run logging
"""
import json
import sys
from pathlib import Path

import pytest

# Add src to path
sys.path.append(str(Path(__file__).parent.parent))

from src.config import config
from src.utils.logging_utils import SummationLogger


def test_run_log_records_dispatches():
    """Dispatches and truncation are counted in every open run"""
    print("Testing run logs...")
    runs = SummationLogger(enabled=False)
    with runs.summation_run('outer', input_terms=3) as outer:
        runs.record_dispatch('A', 'j1', depth=2)
        with runs.summation_run('inner') as inner:
            runs.record_dispatch('C', 'j1', depth=5)
            runs.record_truncation(4, lost=True)
        outer.output_terms = 7

    assert outer.status == 'completed'
    assert outer.dispatches == {'A': 1, 'C': 1}
    assert outer.eliminated == {'j1': 2}
    assert outer.max_depth == 5
    assert inner.dispatches == {'C': 1}
    assert outer.lost and outer.trunc_order == 4
    assert runs.get_stats()['completed'] == 2
    print("✅ Run logs collected")


def test_failed_run_is_recorded():
    runs = SummationLogger(enabled=False)
    with pytest.raises(RuntimeError):
        with runs.summation_run('dosum'):
            raise RuntimeError("boom")
    failed = runs.history[-1]
    assert failed.status == 'error'
    assert failed.error_message == 'boom'
    assert runs.stats['errors'] == 1


def test_json_run_log_is_written(tmp_path):
    """With logging enabled each finished run becomes one JSON line"""
    runs = SummationLogger(log_dir=tmp_path, enabled=True)
    with runs.summation_run('expand', input_terms=1) as log:
        log.output_terms = 2
    handler_dir = Path(runs._json_logger.handlers[0].baseFilename).parent
    lines = (handler_dir / 'runs.json').read_text(encoding='utf-8').strip().splitlines()
    entry = json.loads(lines[-1])
    assert entry['event'] == 'run_complete'
    assert entry['command'] == 'expand'
    assert entry['output_terms'] == 2


def test_history_keeps_the_latest_runs(monkeypatch):
    """Only HISTORY_SIZE run logs stay in memory; the counters see every run"""
    monkeypatch.setattr(config, 'HISTORY_SIZE', 3)
    runs = SummationLogger(enabled=False)
    for k in range(5):
        with runs.summation_run(f'run{k}'):
            pass
    assert [log.command for log in runs.history] == ['run2', 'run3', 'run4']
    assert runs.get_stats()['completed'] == 5
