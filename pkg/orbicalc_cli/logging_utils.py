"""Logging setup for the orbicalc CLI.

Env vars:
- ORBICALC_LOG_LEVEL: root level (default WARNING, so reports on stdout stay clean)
- ORBICALC_LOG_FILE: if set, also log to this file path
- ORBICALC_LOG_FILE_MODE: "a" (append, default) or "w" (overwrite)
"""

from __future__ import annotations

import logging
import os
from pathlib import Path


def setup_logging(level: str | None = None) -> None:
    """Configure logging to stderr and (optionally) a file.

    Library modules only call `logging.info` / `logging.warning`; handlers are set
    here, once, by the CLI entrypoint.
    """
    level_name = (level or os.environ.get("ORBICALC_LOG_LEVEL") or "WARNING").strip().upper()
    log_level = logging.getLevelName(level_name)
    if not isinstance(log_level, int):
        log_level = logging.WARNING

    log_file = os.environ.get("ORBICALC_LOG_FILE")
    mode = (os.environ.get("ORBICALC_LOG_FILE_MODE") or "a").strip().lower()
    if mode not in {"a", "w"}:
        mode = "a"

    handlers: list[logging.Handler] = [logging.StreamHandler()]

    if log_file:
        path = Path(log_file.strip())
        path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(path, mode=mode, encoding="utf-8"))

    logging.basicConfig(
        level=log_level,
        format="%(asctime)s - %(levelname)s - %(message)s",
        handlers=handlers,
        force=True,
    )
