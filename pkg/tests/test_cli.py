"""Command-line interface, exercised through real subprocesses.

Exit code contract: 0 on success, 1 with a stderr diagnostic on
operational failures, 2 on usage errors.
"""

import json
import os
import subprocess
import sys

import pytest

from warelab.metrics import decode_log, derive_timings
from warelab.orchestrator import SEQUENCES, load_plan

CLI = [sys.executable, "-m", "warelab.gateway.cli"]


def run_cli(*args, env_extra=None, check=True):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    proc = subprocess.run(
        CLI + [str(a) for a in args],
        capture_output=True, text=True, env=env, timeout=300,
    )
    if check:
        assert proc.returncode == 0, (
            f"cli {' '.join(map(str, args))} failed:\n{proc.stderr}"
        )
    return proc


@pytest.fixture(scope="module")
def plan_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("plans") / "plan.json"
    run_cli("plan", "--subjects", 24, "--seed", 5, "-o", path)
    return path


@pytest.fixture(scope="module")
def run_dir(tmp_path_factory, plan_file):
    out = tmp_path_factory.mktemp("runs")
    run_cli("headless", "--plan", plan_file, "--subject", "s01",
            "--subject", "s02", "--seed", 4, "--notify-delay", 2.0,
            "--out", out)
    return out


def test_plan_file_is_balanced(plan_file):
    plans = load_plan(plan_file)
    assert len(plans) == 24
    counts = [0] * len(SEQUENCES)
    for plan in plans:
        counts[SEQUENCES.index((plan.modality_order, plan.task_order))] += 1
    assert counts == [6, 6, 6, 6], f"unbalanced assignment: {counts}"


def test_plan_stdout_variant():
    proc = run_cli("plan", "--subjects", 4, "--seed", 5)
    doc = json.loads(proc.stdout)
    assert len(doc["subjects"]) == 4


def test_headless_outputs(run_dir):
    names = sorted(p.name for p in run_dir.iterdir())
    assert "s01.archive.json" in names and "s02.archive.json" in names
    logs = [n for n in names if n.endswith(".ndjson")]
    assert len(logs) == 4, f"expected 2 logs per subject, got {logs}"
    for name in logs:
        subject, session_index, modality = name[:-len(".ndjson")].split("_")
        events = decode_log((run_dir / name).read_text())
        timings = derive_timings(events)
        assert timings.total_time > 0
        assert events[0].data["modality"] == modality
        assert events[0].data["session_index"] == int(session_index)


def test_replay_accepts_fresh_archive(run_dir):
    proc = run_cli("replay", run_dir / "s01.archive.json")
    assert "verdict: identical" in proc.stdout
    assert "session 0" in proc.stdout and "session 1" in proc.stdout


def test_replay_rejects_tampered_archive(run_dir, tmp_path):
    doc = json.loads((run_dir / "s01.archive.json").read_text())
    trace = doc["sessions"][0]["trace"]
    doc["sessions"][0]["trace"] = [[t + 1.0, raw] for t, raw in trace]
    bad = tmp_path / "tampered.json"
    bad.write_text(json.dumps(doc))
    proc = run_cli("replay", bad, check=False)
    assert proc.returncode == 1
    assert "regenerated log differs" in proc.stderr


def test_analyze_writes_report(run_dir, tmp_path):
    logs = sorted(str(p) for p in run_dir.iterdir() if p.suffix == ".ndjson")
    out = tmp_path / "report"
    proc = run_cli("analyze", *logs, "--out", out)
    report = (out / "report.txt").read_text()
    assert "Total time [s]" in report
    assert "Usability score" in report
    assert "preference" in report
    rows = (out / "plot.csv").read_text().splitlines()
    assert rows[0] == "metric,modality,subject,value"
    assert len(rows) > 8
    assert "Total time [s]" in proc.stdout


def test_fixture_dump(tmp_path):
    proc = run_cli("fixture")
    doc = json.loads(proc.stdout)
    for key in ("lifecycle", "drone_affordances", "agv_rules", "colors",
                "version"):
        assert key in doc, f"fixture missing {key}: {sorted(doc)}"
    out = tmp_path / "fixture.json"
    run_cli("fixture", "-o", out)
    assert json.loads(out.read_text()) == doc


def test_data_dir_env_fallback(plan_file, tmp_path):
    env_dir = tmp_path / "envout"
    run_cli("headless", "--plan", plan_file, "--subject", "s03",
            "--seed", 4, "--notify-delay", 2.0,
            env_extra={"WARELAB_DATA_DIR": str(env_dir)})
    assert (env_dir / "s03.archive.json").exists()


def test_usage_errors_exit_2():
    assert run_cli("bogus", check=False).returncode == 2
    assert run_cli(check=False).returncode == 2
    assert run_cli("plan", "--subjects", 4, check=False).returncode == 2


def test_missing_subject_exits_1(plan_file):
    proc = run_cli("headless", "--plan", plan_file, "--subject", "zz9",
                   "--out", "/tmp/nowhere", check=False)
    assert proc.returncode == 1
    assert proc.stderr.strip(), "diagnostic expected on stderr"
