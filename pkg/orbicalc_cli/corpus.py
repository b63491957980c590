"""Scenario discovery: the bundled corpus plus ORBICALC_SCENARIO_PATH directories."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from pathlib import Path

from orbicalc_cli.settings import Settings

BUNDLED_DIR = Path(__file__).resolve().parent / "scenarios"
SCENARIO_SUFFIX = ".scn"

_HEADER_ENTRY = re.compile(r"\s*(name|description)\s*=\s*(.*)")


@dataclass(frozen=True)
class CorpusEntry:
    name: str
    description: str
    path: Path
    origin: str


def _read_header(path: Path) -> tuple[str, str]:
    """name and description from the [scenario] section, without parsing the rest."""
    name, description = path.stem, ""
    in_header = False
    for line in path.read_text(encoding="utf-8").splitlines():
        stripped = line.strip()
        if stripped.startswith("["):
            in_header = stripped.replace(" ", "") == "[scenario]"
            continue
        match = _HEADER_ENTRY.fullmatch(line) if in_header else None
        if match is None:
            continue
        if match.group(1) == "name":
            name = match.group(2).strip()
        else:
            description = match.group(2).strip()
    return name, description


def scenario_dirs(settings: Settings) -> list[tuple[Path, str]]:
    return [(BUNDLED_DIR, "bundled"), *((p, "user") for p in settings.scenario_path)]


def list_scenarios(settings: Settings | None = None) -> list[CorpusEntry]:
    """Bundled scenarios first, then each user directory in order; sorted by name inside a directory."""
    settings = settings or Settings()
    out: list[CorpusEntry] = []
    for directory, origin in scenario_dirs(settings):
        if not directory.is_dir():
            logging.warning(f"Scenario directory {directory} does not exist; skipping")
            continue
        entries = []
        for path in directory.glob(f"*{SCENARIO_SUFFIX}"):
            name, description = _read_header(path)
            entries.append(CorpusEntry(name, description, path, origin))
        out.extend(sorted(entries, key=lambda e: (e.name, str(e.path))))
    return out


def resolve(target: str, settings: Settings | None = None) -> Path:
    """A scenario file path, or the first corpus scenario with that name."""
    path = Path(target)
    if path.is_file():
        return path
    for entry in list_scenarios(settings):
        if target in (entry.name, entry.path.stem):
            return entry.path
    raise FileNotFoundError(f"no scenario file or corpus entry named {target!r}")
