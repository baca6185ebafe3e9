# nr_simulator/utils/__init__.py
"""Simulator Utilities"""

from .validators import validate_parent_array, validate_canonical_string, validate_output_path
from .logger import setup_logging, log_run_event, get_recent_logs
from .seeding import splitmix64, derive_seed

__all__ = [
    'validate_parent_array',
    'validate_canonical_string',
    'validate_output_path',
    'setup_logging',
    'log_run_event',
    'get_recent_logs',
    'splitmix64',
    'derive_seed'
]
