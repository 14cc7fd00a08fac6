"""Shared utilities for chebylab."""

from __future__ import annotations

import logging
import os

from rich.console import Console
from rich.logging import RichHandler

from chebylab.config import ENV_LOG_LEVEL

# Shared console instance for consistent output
console = Console()

# Diagnostics go to stderr so tables on stdout stay machine-readable.
err_console = Console(stderr=True)


def configure_logging(verbose: bool = False) -> None:
    """Attach a rich handler to the package logger.

    Level precedence: --verbose (DEBUG), then CHEBYLAB_LOG_LEVEL, then WARNING.

    Args:
        verbose: Force DEBUG output.
    """
    if verbose:
        level = logging.DEBUG
    else:
        name = os.environ.get(ENV_LOG_LEVEL, "WARNING").strip().upper()
        level = logging.getLevelName(name)
        if not isinstance(level, int):
            level = logging.WARNING

    logger = logging.getLogger("chebylab")
    logger.setLevel(level)
    if not any(isinstance(handler, RichHandler) for handler in logger.handlers):
        logger.addHandler(
            RichHandler(console=err_console, show_path=False, rich_tracebacks=False)
        )
    logger.propagate = False
