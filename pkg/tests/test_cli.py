"""Command-line interface: exit codes, JSON wire output, human rendering."""

from __future__ import annotations

import json

from smartsearch import snapshot
from smartsearch.cli import main
from smartsearch.telemetry import validate_record

from conftest import MINI_ROOT, QUERIES_50, read_golden_bytes, read_golden_text


# ---------------------------------------------------------------------------
# index


def test_index_builds_a_loadable_snapshot(tmp_path, capsys):
    out = str(tmp_path / "mini.idx")
    assert main(["index", MINI_ROOT, "--out", out]) == 0
    assert capsys.readouterr().out == f"12 files indexed -> {out}\n"
    corpus = snapshot.load(out)
    assert len(corpus.documents) == 12


def test_index_reports_skipped_files(tmp_path, capsys):
    root = tmp_path / "tree"
    root.mkdir()
    (root / "ok.py").write_text("import json\n")
    (root / "blob.bin").write_bytes(b"\x00\x01\x02")
    out = str(tmp_path / "tree.idx")
    assert main(["index", str(root), "--out", out]) == 0
    assert capsys.readouterr().out == f"1 files indexed, 1 skipped -> {out}\n"


def test_index_rejects_missing_root(tmp_path, capsys):
    assert main(["index", str(tmp_path / "nope"), "--out", str(tmp_path / "x.idx")]) == 2
    assert "not a directory" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# search


def test_search_json_stream_matches_frozen_bytes(mini_snapshot, capsysbinary):
    code = main(["search", mini_snapshot, "jest test typescript", "--limit", "10", "--json"])
    assert code == 0
    assert capsysbinary.readouterr().out == read_golden_bytes("showcase_events.ndjson")


def test_search_accepts_a_directory_source(capsysbinary):
    code = main(["search", MINI_ROOT, "jest test typescript", "--limit", "10", "--json"])
    assert code == 0
    assert capsysbinary.readouterr().out == read_golden_bytes("showcase_events.ndjson")


def test_search_parallel_stream_is_identical(mini_snapshot, capsysbinary):
    code = main(
        ["search", mini_snapshot, "jest test typescript", "--limit", "10", "--json", "--parallel"]
    )
    assert code == 0
    assert capsysbinary.readouterr().out == read_golden_bytes("showcase_events.ndjson")


def test_search_exit_zero_on_match(mini_snapshot, capsys):
    assert main(["search", mini_snapshot, "func parse"]) == 0
    capsys.readouterr()


def test_search_exit_one_when_nothing_streams(mini_snapshot, capsys):
    assert main(["search", mini_snapshot, "zzzzqqq"]) == 1
    out = capsys.readouterr()
    assert out.out == "" and out.err == ""


def test_search_exit_two_on_parse_error(mini_snapshot, capsys):
    assert main(["search", mini_snapshot, "describe("]) == 2
    assert "unclosed group" in capsys.readouterr().err


def test_search_json_parse_error_streams_error_event(mini_snapshot, capsysbinary):
    assert main(["search", mini_snapshot, "describe(", "--json"]) == 2
    lines = capsysbinary.readouterr().out.splitlines()
    assert len(lines) == 1
    event = json.loads(lines[0])
    assert event["event"] == "error" and event["code"] == "parse"


def test_search_exit_two_on_unreadable_snapshot(tmp_path, capsys):
    bogus = tmp_path / "bogus.idx"
    bogus.write_bytes(b"not a snapshot")
    assert main(["search", str(bogus), "x"]) == 2
    assert "cannot load" in capsys.readouterr().err
    assert main(["search", str(tmp_path / "missing.idx"), "x"]) == 2
    capsys.readouterr()


def test_search_alternatives_can_rescue_zero_result_queries(mini_snapshot, capsys):
    # 'python' matches nothing, but the language alternative streams results,
    # so the exit code reports a hit; with atqe disabled it reports none.
    assert main(["search", mini_snapshot, "python", "--no-atqe"]) == 1
    capsys.readouterr()
    assert main(["search", mini_snapshot, "python"]) == 0
    assert "Smart Search:" in capsys.readouterr().out


def test_search_human_output_groups_and_alert(mini_snapshot, capsys):
    assert main(["search", mini_snapshot, "jest test typescript", "--limit", "10"]) == 0
    out = capsys.readouterr().out
    assert "webapp/src/app.test.ts  [alternative #1]" in out
    assert "  1: // jest test harness for the webapp, wired through jest-ci" in out
    assert "Smart Search:" in out
    assert "  Apply language filter for pattern: lang:typescript jest test (1 result)" in out
    assert (
        "  Also search for each term separately: jest AND test AND typescript (9+ results)"
        in out
    )
    # candidate groups come after the alert's own blank separator handling:
    # the original streamed nothing, so the first group is an alternative
    assert out.index("[alternative #1]") < out.index("[alternative #2]")
    assert out.index("[alternative #2]") < out.index("Smart Search:")


def test_search_human_output_without_trigger_has_no_alert(mini_snapshot, capsys):
    assert main(["search", mini_snapshot, "lang:go func"]) == 0
    out = capsys.readouterr().out
    assert "Smart Search:" not in out
    assert "server/parser.go" in out


def test_search_rejects_invalid_limit(mini_snapshot, capsys):
    assert main(["search", mini_snapshot, "x", "--limit", "-1"]) == 2
    assert "display_limit" in capsys.readouterr().err


# ---------------------------------------------------------------------------
# replay


def test_replay_report_file_matches_frozen(mini_snapshot, tmp_path, capsys):
    report_path = tmp_path / "report.json"
    assert main(["replay", mini_snapshot, QUERIES_50, "--report", str(report_path)]) == 0
    assert report_path.read_text(encoding="utf-8") == read_golden_text("replay_report.json")
    assert capsys.readouterr().out == ""


def test_replay_report_defaults_to_stdout(mini_snapshot, capsys):
    assert main(["replay", mini_snapshot, QUERIES_50]) == 0
    assert capsys.readouterr().out == read_golden_text("replay_report.json")


def test_replay_log_records_every_search(mini_snapshot, tmp_path, capsys):
    log_path = tmp_path / "events.ndjson"
    assert main(["replay", mini_snapshot, QUERIES_50, "--log", str(log_path)]) == 0
    capsys.readouterr()
    lines = log_path.read_text(encoding="utf-8").splitlines()
    assert len(lines) == 50
    for line in lines:
        validate_record(json.loads(line))


def test_replay_missing_queries_file(mini_snapshot, tmp_path, capsys):
    assert main(["replay", mini_snapshot, str(tmp_path / "none.ndjson")]) == 2
    assert "no such file" in capsys.readouterr().err
