"""
Process entry point for the masp command.
"""

import logging
import sys
from typing import List, Optional

from .cli import build_parser, command_config, run
from .config import Config, set_config
from .exceptions import MaspError
from .utils.logging import setup_logging

logger = logging.getLogger(__name__)

_LEVELS = {0: None, 1: "INFO"}


def main(argv: Optional[List[str]] = None) -> int:
    """
    Parse arguments, run one subcommand and return its exit code.

    Errors are reported on stderr with exit code 2; stdout only receives
    the command's output, written once at the end.
    """
    args = build_parser().parse_args(argv)
    try:
        if args.config:
            set_config(Config.from_yaml(args.config))
        setup_logging(_LEVELS.get(args.verbose, "DEBUG"))
        cfg = command_config(args)
        code, text = run(cfg)
    except MaspError as e:
        for diagnostic in e.diagnostics:
            print(str(diagnostic), file=sys.stderr)
        if not e.diagnostics or str(e.diagnostics[0]) != e.detail:
            print(f"error: {e.detail}", file=sys.stderr)
        logger.debug(f"{type(e).__name__} raised", exc_info=True)
        return e.exit_code
    except (OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    if text:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
