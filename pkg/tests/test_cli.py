"""
Unit tests for the CLI (`orbicalc_cli.main`), the corpus and the report renderers.

We validate:
- Exit codes: 0 when every expectation holds, 1 on a mismatch, 2 on input errors.
- `list` shows bundled and ORBICALC_SCENARIO_PATH scenarios.
- `run` honours --params and --format, and reports are deterministic.
- `search-prop54` prints the survivor count and the audit table.
"""

from __future__ import annotations

import json
from pathlib import Path

import pytest

from orbicalc_cli import corpus
from orbicalc_cli.main import EXIT_INPUT_ERROR, EXIT_MISMATCH, EXIT_OK, main
from orbicalc_cli.settings import Settings

FAILING = """\
[scenario]
name = user-failing
description = plane with a wrong rank

[step p]
op = plane

[expect]
p.rank = 2 | DERIVED deliberately wrong
"""

PASSING = """\
[scenario]
name = user-passing
description = plane rank

[step p]
op = plane

[expect]
p.rank = 1 | TRIVIAL
"""


@pytest.fixture(autouse=True)
def _clean_env(monkeypatch: pytest.MonkeyPatch) -> None:
    for name in (
        "ORBICALC_SCENARIO_PATH",
        "ORBICALC_FORMAT",
        "ORBICALC_WORKERS",
        "ORBICALC_SEARCH_BOUND",
        "ORBICALC_SEARCH_NBOUND",
    ):
        monkeypatch.delenv(name, raising=False)


@pytest.fixture
def user_dir(tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> Path:
    (tmp_path / "failing.scn").write_text(FAILING, encoding="utf-8")
    (tmp_path / "passing.scn").write_text(PASSING, encoding="utf-8")
    (tmp_path / "notes.txt").write_text("not a scenario", encoding="utf-8")
    monkeypatch.setenv("ORBICALC_SCENARIO_PATH", str(tmp_path))
    return tmp_path


class TestRun:
    def test_bundled_scenario_passes(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["run", "thm-4.3"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "=== SCENARIO thm-4.3 ===" in out
        assert "=== EXPECTATIONS ===" in out
        assert "RESULT: PASS" in out

    def test_params_and_record_format(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["run", "thm-4.3", "--params", "m=7", "--format", "record"]) == EXIT_OK
        record = json.loads(capsys.readouterr().out)
        assert record["scenario"] == "thm-4.3"
        assert record["params"] == {"m": "7"}
        assert record["passed"] is True
        bundle = next(s for s in record["steps"] if s["step"] == "bundle")
        assert bundle["values"]["h2"] == "Z_7^4"
        assert bundle["values"]["c1_squared"] == "25/98"

    def test_report_is_deterministic(self, capsys: pytest.CaptureFixture[str]) -> None:
        main(["run", "thm-3.2"])
        first = capsys.readouterr().out
        main(["run", "thm-3.2"])
        assert capsys.readouterr().out == first

    def test_discrepancy_is_shown(self, capsys: pytest.CaptureFixture[str]) -> None:
        main(["run", "thm-3.2"])
        out = capsys.readouterr().out
        assert "=== DISCREPANCIES ===" in out
        assert "d1-square" in out
        assert "1/10" in out

    def test_mismatch_exit_code(self, user_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["run", str(user_dir / "failing.scn")]) == EXIT_MISMATCH
        assert "RESULT: FAIL (0/1 expectations met)" in capsys.readouterr().out

    def test_run_by_user_corpus_name(self, user_dir: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["run", "user-passing"]) == EXIT_OK
        assert "user-passing" in capsys.readouterr().out

    def test_several_targets_take_the_worst_code(self, user_dir: Path) -> None:
        assert main(["run", "user-passing", "user-failing"]) == EXIT_MISMATCH

    def test_unknown_target(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["run", "no-such-scenario"]) == EXIT_INPUT_ERROR
        assert "no-such-scenario" in capsys.readouterr().err

    def test_parse_error_exit_code(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = tmp_path / "broken.scn"
        path.write_text("[scenario]\nname = broken\n[step]\n", encoding="utf-8")
        assert main(["run", str(path)]) == EXIT_INPUT_ERROR
        assert f"{path}:3:" in capsys.readouterr().err

    def test_step_error_exit_code(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = tmp_path / "chain.scn"
        path.write_text("[scenario]\nname = c\n[step p]\nop = plane\n[step c]\nop = contract\nchain = E1\n")
        assert main(["run", str(path)]) == EXIT_INPUT_ERROR
        assert "step 'c' (contract) failed" in capsys.readouterr().err

    def test_unreadable_file_exit_code(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        path = tmp_path / "latin.scn"
        path.write_bytes(b"[scenario]\nname = caf\xe9\n")
        assert main(["run", str(path)]) == EXIT_INPUT_ERROR
        assert f"cannot read {path}" in capsys.readouterr().err

    def test_bad_params(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["run", "thm-4.3", "--params", "m"]) == EXIT_INPUT_ERROR
        assert main(["run", "thm-4.3", "--params", "q=1"]) == EXIT_INPUT_ERROR

    def test_workers_must_be_positive(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["run", "thm-4.3", "--workers", "0"]) == EXIT_INPUT_ERROR

    def test_invalid_settings(self, monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
        monkeypatch.setenv("ORBICALC_FORMAT", "xml")
        assert main(["run", "thm-4.3"]) == EXIT_INPUT_ERROR
        assert "ORBICALC_FORMAT" in capsys.readouterr().err


class TestList:
    def test_bundled_only(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["list"]) == EXIT_OK
        out = capsys.readouterr().out
        for name in ("thm-3.2", "thm-3.9", "thm-4.3", "prop-5.4", "null-b2", "gk-table", "hj-kodaira"):
            assert name in out

    def test_user_directory(self, user_dir: Path) -> None:
        entries = corpus.list_scenarios(Settings())
        names = [e.name for e in entries]
        assert names.index("user-failing") > names.index("thm-3.2")
        user = [e for e in entries if e.origin == "user"]
        assert [e.name for e in user] == ["user-failing", "user-passing"]
        assert user[0].description == "plane with a wrong rank"

    def test_missing_directory_is_skipped(self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setenv("ORBICALC_SCENARIO_PATH", str(tmp_path / "missing"))
        assert all(e.origin == "bundled" for e in corpus.list_scenarios(Settings()))

    def test_resolve(self, user_dir: Path) -> None:
        assert corpus.resolve("thm-3.2", Settings()).parent == corpus.BUNDLED_DIR
        assert corpus.resolve(str(user_dir / "passing.scn"), Settings()) == user_dir / "passing.scn"
        with pytest.raises(FileNotFoundError):
            corpus.resolve("nothing", Settings())


class TestSearch:
    def test_with_kahler_filter(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["search-prop54", "--bound", "10", "--nbound", "10"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "survivors=0" in out

    def test_without_kahler_filter(self, capsys: pytest.CaptureFixture[str]) -> None:
        # n = 1, 3, 5, 7, 9 survive the arithmetic; every audit row holds.
        assert main(["search-prop54", "--bound", "10", "--nbound", "10", "--no-kahler", "--head", "3"]) == EXIT_OK
        out = capsys.readouterr().out
        assert "survivors=5" in out
        assert "no_kahler_class" in out

    def test_bounds_from_settings(self, monkeypatch: pytest.MonkeyPatch, capsys: pytest.CaptureFixture[str]) -> None:
        monkeypatch.setenv("ORBICALC_SEARCH_BOUND", "5")
        monkeypatch.setenv("ORBICALC_SEARCH_NBOUND", "6")
        assert main(["search-prop54"]) == EXIT_OK
        assert "|a|,|b| <= 5, 0 <= n <= 6" in capsys.readouterr().out

    def test_invalid_bound(self, capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["search-prop54", "--bound", "-3", "--nbound", "4"]) == EXIT_INPUT_ERROR

    @pytest.mark.parametrize("bounds", [["--bound", "0", "--nbound", "4"], ["--bound", "4", "--nbound", "0"]])
    def test_zero_bound_is_not_replaced_by_settings(self, bounds: list[str], capsys: pytest.CaptureFixture[str]) -> None:
        assert main(["search-prop54", *bounds]) == EXIT_INPUT_ERROR
        assert "search bounds must be >= 1" in capsys.readouterr().err
