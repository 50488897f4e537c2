"""Headless runs, archives, and replay verification.

The determinism contract: same plan + scene + seed means byte-identical
archives, and replaying an archive's inbound traces regenerates each
session's event log byte for byte. Any tampering, with the traces, the
log, or the scene, must surface as ReplayDivergence.
"""

import copy
import json

import pytest

from warelab.gateway.agent import StallingAgent
from warelab.gateway.errors import ReplayDivergence, ScriptStalled
from warelab.gateway.headless import (
    SessionArchive,
    config_hash,
    load_archive,
    replay,
    run_headless,
    save_archive,
)
from warelab.metrics import decode_log, derive_timings
from warelab.metrics.eventlog import EventKind
from warelab.orchestrator import latin_plan
from warelab.sim.scene import default_scene

SEED = 11


@pytest.fixture(scope="module")
def scene():
    return default_scene()


@pytest.fixture(scope="module")
def plan(scene):
    return latin_plan(4, 7)[0]  # joypad first, then mr


@pytest.fixture(scope="module")
def archive(plan, scene):
    return run_headless(plan, scene, seed=SEED, notify_delay=10.0)


def test_two_runs_byte_identical(plan, scene, archive):
    again = run_headless(plan, scene, seed=SEED, notify_delay=10.0)
    assert again.canonical_json() == archive.canonical_json()


def test_seed_changes_only_questionnaires(plan, scene, archive):
    other = run_headless(plan, scene, seed=SEED + 1, notify_delay=10.0)
    assert other.canonical_json() != archive.canonical_json()
    for base, alt in zip(archive.sessions, other.sessions):
        t0 = derive_timings(decode_log(base["log"]))
        t1 = derive_timings(decode_log(alt["log"]))
        # scripted motion never consults the rng, so stamps agree exactly
        assert t0.total_time == t1.total_time
        assert t0.reaction_time == t1.reaction_time


def test_archive_file_round_trip(tmp_path, archive):
    path = tmp_path / "run.archive.json"
    save_archive(path, archive)
    loaded = load_archive(path)
    assert loaded.canonical_json() == archive.canonical_json()
    timings, verdict = replay(loaded)
    assert verdict == "identical"
    assert sorted(timings) == [0, 1]


def test_replay_is_identical(archive):
    timings, verdict = replay(archive)
    assert verdict == "identical"
    for session_index, t in timings.items():
        assert t.total_time > 0
        for k in range(2):
            assert t.reaction_time[k] > 0
            assert t.robot_time[k] > 0


def test_session_logs_satisfy_stamp_ordering(archive):
    for entry in archive.sessions:
        events = decode_log(entry["log"])
        stamps = {}
        for e in events:
            if e.kind in (EventKind.TASK_NOTIFIED, EventKind.INTERACTION_ACTIVATED,
                          EventKind.TASK_COMPLETED):
                stamps.setdefault(e.data["task_index"], {})[e.kind] = e.t
        for k in (0, 1):
            s = stamps[k]
            assert s[EventKind.TASK_NOTIFIED] <= s[EventKind.INTERACTION_ACTIVATED]
            assert s[EventKind.INTERACTION_ACTIVATED] <= s[EventKind.TASK_COMPLETED]
        assert stamps[0][EventKind.TASK_COMPLETED] <= stamps[1][EventKind.TASK_NOTIFIED]

        timings = derive_timings(events)
        # the total is the same float arithmetic, not merely close
        assert timings.total_time == (
            stamps[1][EventKind.TASK_COMPLETED] - stamps[0][EventKind.TASK_NOTIFIED]
        )


def test_reaction_times_track_the_scripted_delays(archive):
    for entry in archive.sessions:
        timings = derive_timings(decode_log(entry["log"]))
        delay = 5.0 if entry["modality"] == "joypad" else 2.0
        slack = 0.15 if entry["modality"] == "joypad" else 0.35
        for k in range(2):
            r = timings.reaction_time[k]
            assert delay <= r <= delay + slack, (
                f"{entry['modality']} reaction {r} outside "
                f"[{delay}, {delay + slack}]"
            )


def test_tampered_log_diverges(archive):
    doc = json.loads(archive.canonical_json())
    lines = doc["sessions"][0]["log"].splitlines()
    bad = json.loads(lines[3])
    bad["t"] = bad["t"] + 0.02
    lines[3] = json.dumps(bad, sort_keys=True, separators=(",", ":"))
    doc["sessions"][0]["log"] = "\n".join(lines) + "\n"
    with pytest.raises(ReplayDivergence, match="regenerated log differs"):
        replay(SessionArchive.from_doc(doc))


def test_tampered_trace_diverges(archive):
    doc = json.loads(archive.canonical_json())
    trace = doc["sessions"][1]["trace"]
    # push every inbound frame a second later: reaction stamps move
    doc["sessions"][1]["trace"] = [[t + 1.0, raw] for t, raw in trace]
    with pytest.raises(ReplayDivergence, match="regenerated log differs"):
        replay(SessionArchive.from_doc(doc))


def test_tampered_scene_fails_config_hash(archive):
    doc = json.loads(archive.canonical_json())
    doc = copy.deepcopy(doc)
    doc["scene"]["zones"][0]["radius"] = 99.0
    with pytest.raises(ReplayDivergence, match="config hash"):
        replay(SessionArchive.from_doc(doc))


def test_config_hash_covers_notify_delay(scene):
    assert config_hash(scene, 30.0) != config_hash(scene, 29.0)


def test_stalling_agent_is_caught(plan, scene):
    with pytest.raises(ScriptStalled):
        run_headless(plan, scene, seed=SEED, notify_delay=1.0,
                     agent_factory=StallingAgent, step_bound=400)


def test_trace_times_lie_on_the_step_grid(archive):
    dt = default_scene().fresh_world().config.dt
    for entry in archive.sessions:
        for t, _raw in entry["trace"]:
            steps = round(t / dt)
            assert abs(t - steps * dt) < 1e-9, f"off-grid trace time {t}"
