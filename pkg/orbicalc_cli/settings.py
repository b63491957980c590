"""CLI configuration (reads from environment variables)."""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from pathlib import Path


def _env_int(name: str, default: int) -> int:
    v = os.environ.get(name)
    return int(v.strip()) if v else default


def _env_str(name: str, default: str) -> str:
    v = os.environ.get(name)
    return v.strip() if v else default


def _env_paths(name: str) -> tuple[Path, ...]:
    """Read an os.pathsep separated list of directories; empty entries are skipped."""
    v = os.environ.get(name)
    if not v:
        return ()
    return tuple(Path(p.strip()) for p in v.split(os.pathsep) if p.strip())


@dataclass(frozen=True)
class Settings:
    # Scenario discovery
    scenario_path: tuple[Path, ...] = field(
        default_factory=lambda: _env_paths("ORBICALC_SCENARIO_PATH")
    )

    # Reports
    report_format: str = field(
        default_factory=lambda: _env_str("ORBICALC_FORMAT", "text").lower()
    )

    # Batch runs + search
    workers: int = field(default_factory=lambda: _env_int("ORBICALC_WORKERS", 1))
    search_bound: int = field(
        default_factory=lambda: _env_int("ORBICALC_SEARCH_BOUND", 100)
    )
    search_nbound: int = field(
        default_factory=lambda: _env_int("ORBICALC_SEARCH_NBOUND", 100)
    )

    def __post_init__(self) -> None:
        if self.report_format not in {"text", "record"}:
            raise ValueError(
                f"ORBICALC_FORMAT must be 'text' or 'record', got {self.report_format!r}"
            )
        if self.workers < 1:
            raise ValueError(f"ORBICALC_WORKERS must be >= 1, got {self.workers}")
