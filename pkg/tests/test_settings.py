"""
Unit tests for the ambient CLI plumbing: `settings`, `env` and `logging_utils`.
"""

from __future__ import annotations

import logging
import os
from pathlib import Path

import pytest

from orbicalc_cli import env
from orbicalc_cli.logging_utils import setup_logging
from orbicalc_cli.settings import Settings

_VARS = (
    "ORBICALC_SCENARIO_PATH",
    "ORBICALC_FORMAT",
    "ORBICALC_WORKERS",
    "ORBICALC_SEARCH_BOUND",
    "ORBICALC_SEARCH_NBOUND",
    "ORBICALC_ENV_FILE",
    "ORBICALC_LOG_LEVEL",
    "ORBICALC_LOG_FILE",
    "ORBICALC_LOG_FILE_MODE",
)


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in _VARS:
        monkeypatch.delenv(name, raising=False)


class TestSettings:
    def test_defaults(self) -> None:
        s = Settings()
        assert s.scenario_path == ()
        assert s.report_format == "text"
        assert s.workers == 1
        assert s.search_bound == 100
        assert s.search_nbound == 100

    def test_reads_environment(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("ORBICALC_SCENARIO_PATH", f"{tmp_path / 'a'}{os.pathsep}{os.pathsep}{tmp_path / 'b'}")
        monkeypatch.setenv("ORBICALC_FORMAT", " RECORD ")
        monkeypatch.setenv("ORBICALC_WORKERS", "4")
        monkeypatch.setenv("ORBICALC_SEARCH_BOUND", "12")
        s = Settings()
        # Empty path entries are skipped.
        assert s.scenario_path == (tmp_path / "a", tmp_path / "b")
        assert s.report_format == "record"
        assert s.workers == 4
        assert s.search_bound == 12

    @pytest.mark.parametrize(
        "name, value",
        [("ORBICALC_FORMAT", "html"), ("ORBICALC_WORKERS", "0"), ("ORBICALC_WORKERS", "many")],
    )
    def test_invalid_values(self, monkeypatch: pytest.MonkeyPatch, name: str, value: str) -> None:
        monkeypatch.setenv(name, value)
        with pytest.raises(ValueError):
            Settings()


class TestLoadEnv:
    def test_explicit_file(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        dotenv = tmp_path / "local.env"
        dotenv.write_text("ORBICALC_SEARCH_BOUND=7\nORBICALC_FORMAT=record\n", encoding="utf-8")
        monkeypatch.setenv("ORBICALC_ENV_FILE", str(dotenv))
        monkeypatch.setenv("ORBICALC_FORMAT", "text")
        assert env.load_env() == dotenv
        # Already-set variables win over the file.
        assert os.environ["ORBICALC_FORMAT"] == "text"
        try:
            assert Settings().search_bound == 7
        finally:
            os.environ.pop("ORBICALC_SEARCH_BOUND", None)

    def test_missing_file(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("ORBICALC_ENV_FILE", str(tmp_path / "absent.env"))
        assert env.load_env() is None

    def test_nothing_to_find(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.chdir(tmp_path)
        monkeypatch.setattr(env, "find_dotenv", lambda usecwd=True: "")
        assert env.load_env() is None


class TestSetupLogging:
    def test_file_handler(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        log_file = tmp_path / "logs" / "orbicalc.log"
        monkeypatch.setenv("ORBICALC_LOG_FILE", str(log_file))
        monkeypatch.setenv("ORBICALC_LOG_FILE_MODE", "w")
        setup_logging("info")
        logging.info("contracted a chain")
        for h in logging.getLogger().handlers:
            h.flush()
        text = log_file.read_text(encoding="utf-8")
        assert " - INFO - contracted a chain" in text
        for h in list(logging.getLogger().handlers):
            if isinstance(h, logging.FileHandler):
                h.close()
                logging.getLogger().removeHandler(h)

    def test_level_from_environment(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("ORBICALC_LOG_LEVEL", "debug")
        setup_logging()
        assert logging.getLogger().level == logging.DEBUG

    def test_unknown_level_falls_back(self) -> None:
        setup_logging("chatty")
        assert logging.getLogger().level == logging.WARNING
