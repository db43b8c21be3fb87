import io
import json
import subprocess
import sys

import pytest

from examples import CONDITION_SUITE, MOTIVATING
from slarr.cli import BUCKETS, BatchReport, main, run_batch
from slarr.parser import parse_file
from slarr.pipeline import RunOptions


def run(argv, stdin=None, monkeypatch=None):
    out = io.StringIO()
    if stdin is not None:
        monkeypatch.setattr(sys, "stdin", io.StringIO(stdin))
    code = main(argv, out)
    return code, out.getvalue()


@pytest.mark.usefixtures("cfg")
@pytest.mark.parametrize("text, code", [
    (MOTIVATING, 0),
    ("x -> 0 |- x -> 1", 1),
    (CONDITION_SUITE["iii"][0], 2),
])
def test_single_exit_codes(text, code):
    assert run(["-e", text])[0] == code


def test_unknown_exit_code(tmp_path):
    p = tmp_path / "solver"
    p.write_text("#!/bin/sh\ncat > /dev/null\necho unknown\necho unknown\n")
    p.chmod(0o755)
    assert run(["-e", "x -> 0 |- x -> 0", "--solver", str(p), "--no-u"])[0] == 3


def test_usage_errors(capsys):
    assert run(["-e", "x -> 0 * |- emp"])[0] == 4
    assert "dangling" in capsys.readouterr().err
    assert run([])[0] == 4
    assert run(["/nonexistent/file"])[0] == 4
    assert run(["--bench", "Nope", "3", "0"])[0] == 4
    assert run(["-e", "emp |- emp", "--solver", "/nonexistent/solver"])[0] == 4
    assert run(["--format", "xml", "x.txt"])[0] == 4
    assert run(["--help"])[0] == 0


def test_single_json(cfg):
    code, out = run(["-e", "x -> 0 |- x -> 1", "--format", "json", "--oracle", "2", "2"])
    d = json.loads(out)
    assert code == 1 and d["verdict"] == "invalid"
    assert d["countermodel"] == {"store": {"x": 1}, "heap": {"1": 0}}
    assert d["oracle"] == "countermodel"


def test_batch_text_and_json(tmp_path, cfg):
    f = tmp_path / "in.txt"
    f.write_text(f"a: {MOTIVATING}\nb: x -> 0 |- x -> 1\nc: {CONDITION_SUITE['iv'][0]}\n")
    code, out = run([str(f)])
    lines = out.splitlines()
    assert code == 0 and len(lines) == 6
    assert lines[0].split()[:2] == ["a", "valid"]
    assert lines[2].split()[:2] == ["c", "condition-violation"]
    assert lines[-1].startswith("-- time")
    code, out = run([str(f), "--format", "json"])
    d = json.loads(out)
    assert [r["verdict"] for r in d["entailments"]] == ["valid", "invalid", "condition-violation"]
    assert d["summary"]["verdicts"] == {"valid": 1, "invalid": 1, "condition-violation": 1}
    assert sum(d["summary"]["time_buckets"].values()) == 3
    assert list(d["summary"]["time_buckets"]) == [b for b, _ in BUCKETS] + ["timeout"]


def test_empty_file(tmp_path):
    f = tmp_path / "empty.txt"
    f.write_text("# nothing\n")
    assert run([str(f)]) == (0, "")
    code, out = run([str(f), "--format", "json"])
    assert code == 0 and json.loads(out)["entailments"] == []


def test_stdin(monkeypatch, cfg):
    code, out = run(["-"], stdin="emp |- emp\n", monkeypatch=monkeypatch)
    assert code == 0 and out.startswith("line1")


def test_bench_output_deterministic(tmp_path):
    a = run(["--bench", "SingleFrame3", "10", "4"])[1]
    assert a == run(["--bench", "SingleFrame3", "10", "4"])[1]
    assert len(parse_file(a)) == 10
    out = tmp_path / "b.txt"
    assert run(["--bench", "Multi", "5", "0", "-o", str(out)]) == (0, "")
    assert len(parse_file(out.read_text())) == 5


def test_bench_run_with_oracle(cfg):
    code, out = run(["--bench", "Base", "6", "0", "--run", "--oracle", "3", "3", "-j", "2"])
    assert code == 0 and "DISAGREE" not in out
    assert out.count("oracle=") == 6


def test_dump_smt(tmp_path, cfg):
    d = tmp_path / "dump"
    run(["-e", "x -> 0 * y -> 0 |- y -> 0 * x -> 0", "--no-f", "--dump-smt", str(d)])
    assert sorted(p.name for p in d.iterdir()) == ["entailment.0.smt2", "entailment.1.smt2"]


def test_option_flags(cfg):
    for flags in (["--no-u"], ["--no-f"], ["--simplify"], ["--timeout-ms", "5000"], ["--solver-arg=-in"]):
        assert run(["-e", MOTIVATING, *flags])[0] == 0


def test_run_batch_keeps_order(cfg):
    entries = parse_file("a: x -> 0 |- x -> 1\nb: emp |- emp\nc: Arr(1, 1) |- 1 -> 0\n")
    rep = run_batch(entries, RunOptions(solver=cfg), jobs=3)
    assert [r.name for r in rep.rows] == ["a", "b", "c"]
    assert rep.counts() == {"invalid": 2, "valid": 1}


def test_empty_report():
    assert BatchReport().to_text() == ""


def test_module_entry_point(cfg):
    p = subprocess.run([sys.executable, "-m", "slarr", "-e", "emp |- emp"], capture_output=True, text=True)
    assert p.returncode == 0 and p.stdout.strip() == "valid"
