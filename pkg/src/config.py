"""
Configuration management for the nested-sum engine
"""
import logging
import os
from typing import List

from dotenv import load_dotenv

# Load environment variables
load_dotenv()

logger = logging.getLogger(__name__)


class Config:
    """Main configuration class"""

    # Logging Configuration
    LOG_LEVEL: str = os.getenv('NESTSUM_LOG_LEVEL', 'WARNING')
    LOG_DIR: str = os.getenv('NESTSUM_LOG_DIR', './logs')
    JSON_LOGS: bool = os.getenv('NESTSUM_JSON_LOGS', 'false').lower() == 'true'
    HISTORY_SIZE: int = int(os.getenv('NESTSUM_HISTORY_SIZE', '200'))  # run logs kept in memory

    # Expansion Settings
    MAX_EPS: int = int(os.getenv('NESTSUM_MAX_EPS', '4'))  # truncation order, first order not kept
    MZV_TABLE: str = os.getenv('NESTSUM_MZV_TABLE', '')    # empty means the shipped table
    MAX_RECURSION: int = int(os.getenv('NESTSUM_MAX_RECURSION', '400'))

    # Oracle Settings
    PRECISION: int = int(os.getenv('NESTSUM_PRECISION', '30'))
    TRUNCATION_TERMS: int = int(os.getenv('NESTSUM_TRUNCATION_TERMS', '3000'))

    # Check Runs
    SEED: int = int(os.getenv('NESTSUM_SEED', '1'))
    CHECK_INSTANCES: int = int(os.getenv('NESTSUM_CHECK_INSTANCES', '50'))
    CHECK_MAX_N: int = int(os.getenv('NESTSUM_CHECK_MAX_N', '8'))

    def problems(self) -> List[str]:
        """Human-readable list of invalid settings"""
        found = []
        if self.PRECISION < 15:
            found.append(f"NESTSUM_PRECISION must be at least 15 (got {self.PRECISION})")
        if self.MAX_EPS < 1:
            found.append(f"NESTSUM_MAX_EPS must be at least 1 (got {self.MAX_EPS})")
        for name in ('TRUNCATION_TERMS', 'MAX_RECURSION', 'CHECK_INSTANCES', 'CHECK_MAX_N',
                     'HISTORY_SIZE'):
            if getattr(self, name) <= 0:
                found.append(f"NESTSUM_{name} must be positive (got {getattr(self, name)})")
        if self.MZV_TABLE and not os.path.exists(self.MZV_TABLE):
            found.append(f"NESTSUM_MZV_TABLE points to a missing file: {self.MZV_TABLE}")
        return found

    def validate(self) -> bool:
        """Validate configuration values; problems go to the log"""
        problems = self.problems()
        if problems:
            logger.error(f"Invalid configuration: {'; '.join(problems)}")
            return False
        return True


# Global config instance
config = Config()
