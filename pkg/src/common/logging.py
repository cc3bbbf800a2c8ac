"""Process-wide logging setup for the command line."""

from __future__ import annotations

import logging
import os
import sys

LOG_FORMAT = "%(levelname)s %(name)s: %(message)s"
LEVEL_ENV = "COMPACT_LOG_LEVEL"


def configure_logging(level: int | str | None = None) -> None:
    """Install one stderr handler on the root logger.

    Without ``level`` the value of COMPACT_LOG_LEVEL is used, falling back to WARNING.
    """
    if level is None:
        level = os.environ.get(LEVEL_ENV, "WARNING")
    if isinstance(level, str):
        level = logging.getLevelName(level.upper())
        if not isinstance(level, int):
            level = logging.WARNING

    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter(LOG_FORMAT))
    root.addHandler(handler)
    root.setLevel(level)
