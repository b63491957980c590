"""Optional dotenv loading for local runs.

Not run at import time; `orbicalc.py` calls `load_env()` before reading any
settings so a local `.env` can set the ORBICALC_* variables. ORBICALC_ENV_FILE
points at a specific file instead of searching upwards from the cwd.
"""

from __future__ import annotations

import os
from contextlib import suppress
from pathlib import Path

from dotenv import find_dotenv, load_dotenv


def load_env() -> Path | None:
    """Load the dotenv file, never overriding variables already set; returns its path."""
    explicit = os.environ.get("ORBICALC_ENV_FILE")
    dotenv_path = explicit.strip() if explicit else find_dotenv(usecwd=True)
    if not dotenv_path:
        return None
    with suppress(PermissionError, OSError):
        if load_dotenv(dotenv_path, override=False):
            return Path(dotenv_path)
    return None
