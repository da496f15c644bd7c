"""
Structured logging for summation runs
"""
import json
import logging
import logging.handlers
from collections import deque
from contextlib import contextmanager
from dataclasses import asdict, dataclass
from datetime import datetime
from pathlib import Path
from typing import Any, Deque, Dict, List, Optional

from src.config import config


@dataclass
class SummationRunLog:
    """Structured log entry for one engine command"""
    command: str
    run_start: datetime
    run_end: Optional[datetime] = None
    input_terms: int = 0
    output_terms: int = 0
    eliminated: Dict[str, int] = None
    dispatches: Dict[str, int] = None
    max_depth: int = 0
    trunc_order: Optional[int] = None
    lost: bool = False
    status: str = "running"
    error_message: Optional[str] = None

    def __post_init__(self):
        if self.eliminated is None:
            self.eliminated = {}
        if self.dispatches is None:
            self.dispatches = {}

    def to_dict(self) -> Dict[str, Any]:
        """Convert to dictionary for JSON serialization"""
        data = asdict(self)
        data['run_start'] = self.run_start.isoformat()
        if self.run_end:
            data['run_end'] = self.run_end.isoformat()
        return data


class SummationLogger:
    """Collects run logs; writes JSON and human-readable files when enabled"""

    def __init__(self, log_dir: Optional[Path] = None, enabled: Optional[bool] = None):
        self.log_dir = Path(log_dir or config.LOG_DIR)
        self.enabled = config.JSON_LOGS if enabled is None else enabled
        self._active: List[SummationRunLog] = []
        self.history: Deque[SummationRunLog] = deque(maxlen=config.HISTORY_SIZE)
        self._json_logger: Optional[logging.Logger] = None
        self._human_logger: Optional[logging.Logger] = None

        # Run statistics
        self.stats = {
            'total_runs': 0,
            'completed': 0,
            'errors': 0,
            'dispatches': {},
            'start_time': datetime.utcnow()
        }

    def _setup_json_logger(self) -> logging.Logger:
        """JSON structured logger with rotation"""
        logger = logging.getLogger('nestsum_runs_json')
        logger.setLevel(logging.INFO)

        # Prevent duplicate handlers
        if logger.handlers:
            return logger

        self.log_dir.mkdir(parents=True, exist_ok=True)
        json_handler = logging.handlers.RotatingFileHandler(
            self.log_dir / "runs.json",
            maxBytes=10*1024*1024,  # 10MB
            backupCount=5
        )
        json_handler.setLevel(logging.INFO)

        class JSONFormatter(logging.Formatter):
            def format(self, record):
                if hasattr(record, 'run_data'):
                    return json.dumps(record.run_data, default=str)
                return json.dumps({
                    'timestamp': datetime.utcnow().isoformat(),
                    'level': record.levelname,
                    'message': record.getMessage(),
                    'module': record.module,
                })

        json_handler.setFormatter(JSONFormatter())
        logger.addHandler(json_handler)
        logger.propagate = False
        return logger

    def _setup_human_logger(self) -> logging.Logger:
        """Human-readable run logger"""
        logger = logging.getLogger('nestsum_runs_human')
        logger.setLevel(logging.INFO)

        if logger.handlers:
            return logger

        self.log_dir.mkdir(parents=True, exist_ok=True)
        human_handler = logging.FileHandler(self.log_dir / "runs.log")
        human_handler.setLevel(logging.INFO)
        formatter = logging.Formatter(
            '%(asctime)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )
        human_handler.setFormatter(formatter)
        logger.addHandler(human_handler)
        logger.propagate = False
        return logger

    @property
    def current(self) -> Optional[SummationRunLog]:
        return self._active[-1] if self._active else None

    @contextmanager
    def summation_run(self, command: str, input_terms: int = 0):
        """Open a run log for one command; nested runs are tracked separately"""
        log = SummationRunLog(command=command, run_start=datetime.utcnow(),
                              input_terms=input_terms)
        self._active.append(log)
        try:
            yield log
            log.status = 'completed'
        except Exception as e:
            log.status = 'error'
            log.error_message = str(e)
            raise
        finally:
            log.run_end = datetime.utcnow()
            self._active.pop()
            self.history.append(log)
            self._update_stats(log)
            self._write(log)

    def record_dispatch(self, kind: str, index: Optional[str] = None, depth: int = 0):
        """Count one algorithm dispatch in every open run"""
        for log in self._active:
            log.dispatches[kind] = log.dispatches.get(kind, 0) + 1
            log.max_depth = max(log.max_depth, depth)
            if index is not None:
                log.eliminated[index] = log.eliminated.get(index, 0) + 1

    def record_truncation(self, trunc_order: int, lost: bool):
        for log in self._active:
            log.trunc_order = trunc_order if log.trunc_order is None else min(log.trunc_order, trunc_order)
            log.lost = log.lost or lost

    def _write(self, log: SummationRunLog):
        if not self.enabled:
            return
        if self._json_logger is None:
            self._json_logger = self._setup_json_logger()
            self._human_logger = self._setup_human_logger()
        self._json_logger.info("", extra={'run_data': {'event': 'run_complete', **log.to_dict()}})
        lines = [
            "-" * 60,
            f"RUN {log.command}: {log.status}",
            f"Terms: {log.input_terms} in, {log.output_terms} out",
            f"Dispatches: {log.dispatches}" if log.dispatches else "Dispatches: none",
        ]
        if log.trunc_order is not None:
            lines.append(f"Truncated at ep^{log.trunc_order}{' (content lost)' if log.lost else ''}")
        if log.error_message:
            lines.append(f"Error: {log.error_message}")
        for line in lines:
            self._human_logger.info(line)

    def _update_stats(self, log: SummationRunLog):
        self.stats['total_runs'] += 1
        if log.status == 'completed':
            self.stats['completed'] += 1
        elif log.status == 'error':
            self.stats['errors'] += 1
        for kind, count in log.dispatches.items():
            self.stats['dispatches'][kind] = self.stats['dispatches'].get(kind, 0) + count

    def get_stats(self) -> Dict[str, Any]:
        """Current run statistics"""
        duration = datetime.utcnow() - self.stats['start_time']
        return {
            **self.stats,
            'duration_seconds': duration.total_seconds(),
        }


# Global logger instance
summation_logger = SummationLogger()
