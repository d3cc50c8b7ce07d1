"""
Command-line interface.
"""

from .commands import CommandConfig, Subcommand, build_parser, command_config, run

__all__ = [
    "CommandConfig",
    "Subcommand",
    "build_parser",
    "command_config",
    "run",
]
