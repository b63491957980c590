"""
orbicalc (script entrypoint).

The implementation lives in `orbicalc_math/` (the exact invariant calculus) and
`orbicalc_cli/` (scenario runner and reports); this file only wires them up.

Run:
  python orbicalc.py list
  python orbicalc.py run thm-3.2 --params b=3 p=5
  python orbicalc.py search-prop54 --bound 100 --nbound 100

Logging to a file (also logs to stderr):
  ORBICALC_LOG_LEVEL=INFO ORBICALC_LOG_FILE=logs/orbicalc.log python orbicalc.py run null-b2
"""

from __future__ import annotations

from orbicalc_cli import env
from orbicalc_cli.logging_utils import setup_logging
from orbicalc_cli.main import main

if __name__ == "__main__":
    env.load_env()
    setup_logging()
    raise SystemExit(main())
