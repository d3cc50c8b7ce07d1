"""
Utility modules.
"""

from .logging import setup_logging, get_logger
from .helpers import (
    format_ground_atom,
    format_symbols,
    gray_code_subsets,
    interpretation_atoms,
    interpretation_key,
    is_variable_name,
    sorted_symbols,
    symbol_key,
)

__all__ = [
    "setup_logging",
    "get_logger",
    "format_ground_atom",
    "format_symbols",
    "gray_code_subsets",
    "interpretation_atoms",
    "interpretation_key",
    "is_variable_name",
    "sorted_symbols",
    "symbol_key",
]
