"""Headless session execution, archives, and byte-identical replay.

An archive captures everything that determined a run: the scene document,
the subject's plan entry, the seed, and per session the inbound frame
trace (with arrival sim_times) and the event log lines. Replay rebuilds a
fresh engine, feeds the recorded frames back at the recorded times, and
demands the regenerated log match byte for byte; any drift means the
simulation stopped being a pure function of its inputs and is reported as
ReplayDivergence, never papered over.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field

from ..metrics.eventlog import decode_log, encode_log
from ..metrics.timings import derive_timings
from ..orchestrator import SessionPlan, build_tasks, plans_from_doc, plans_to_doc
from ..sim.scene import Scene, scene_from_doc
from . import protocol as P
from .agent import ScriptedAgent
from .engine import SessionEngine
from .errors import ReplayDivergence, ScriptStalled

ARCHIVE_VERSION = 1
STEP_BOUND_DEFAULT = 200_000


def config_hash(scene: Scene, notify_delay: float) -> str:
    doc = {
        "notify_delay": notify_delay,
        "protocol": P.PROTOCOL_VERSION,
        "scene": scene.doc,
    }
    blob = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


@dataclass
class SessionArchive:
    scene_doc: dict
    plan: SessionPlan
    seed: int
    notify_delay: float
    config_hash: str
    sessions: list = field(default_factory=list)
    version: int = ARCHIVE_VERSION

    def to_doc(self) -> dict:
        return {
            "version": self.version,
            "scene": self.scene_doc,
            "plan": plans_to_doc([self.plan]),
            "seed": self.seed,
            "notify_delay": self.notify_delay,
            "config_hash": self.config_hash,
            "sessions": self.sessions,
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_doc(), sort_keys=True, separators=(",", ":")) + "\n"

    @classmethod
    def from_doc(cls, doc) -> "SessionArchive":
        return cls(
            scene_doc=doc["scene"],
            plan=plans_from_doc(doc["plan"])[0],
            seed=doc["seed"],
            notify_delay=doc["notify_delay"],
            config_hash=doc["config_hash"],
            sessions=doc["sessions"],
            version=doc["version"],
        )


def save_archive(path, archive: SessionArchive) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(archive.canonical_json())


def load_archive(path) -> SessionArchive:
    with open(path, "r", encoding="utf-8") as fh:
        return SessionArchive.from_doc(json.load(fh))


def _agent_seed(seed: int, subject_seed: int, session_index: int) -> int:
    # Mix in the plan's per-subject seed so scripted questionnaire answers
    # differ across subjects, not just across sessions.
    return (seed * 1_000_003 + subject_seed) * 2 + session_index


def run_headless(
    plan: SessionPlan,
    scene: Scene,
    seed: int = 0,
    notify_delay: float = 30.0,
    agent_factory=None,
    step_bound: int = STEP_BOUND_DEFAULT,
) -> SessionArchive:
    """Run both of the subject's sessions without a client.

    Raises ScriptStalled when a session exceeds step_bound ticks without
    reaching its end, which is the only way a misbehaving agent can fail.
    """
    if agent_factory is None:
        agent_factory = ScriptedAgent
    tasks = build_tasks(scene.tasks)
    archive = SessionArchive(
        scene_doc=scene.doc,
        plan=plan,
        seed=seed,
        notify_delay=notify_delay,
        config_hash=config_hash(scene, notify_delay),
    )
    for session_index in (0, 1):
        engine = SessionEngine(scene, plan, session_index, tasks, notify_delay)
        agent = agent_factory(
            plan.modality_order[session_index],
            _agent_seed(seed, plan.seed, session_index),
        )
        dt = engine.world.config.dt
        steps = 0
        while not engine.ended:
            if steps > step_bound:
                raise ScriptStalled(
                    f"session {session_index} still running after {steps} steps "
                    f"(phase {engine.session.phase.value})"
                )
            for msg in agent.step(engine):
                engine.handle_text(P.encode(msg))
            if engine.ended:
                break
            engine.advance(dt)
            steps += 1
        archive.sessions.append(
            {
                "session_index": session_index,
                "modality": engine.session.modality.value,
                "log": encode_log(engine.events),
                "trace": engine.inbound_trace,
            }
        )
    return archive


def replay(archive: SessionArchive, step_bound: int = STEP_BOUND_DEFAULT):
    """Re-simulate from the inbound traces; byte-compare the logs.

    Returns (timings, verdict) where timings maps session_index to the
    SessionTimings derived from the (verified) log.
    """
    scene = scene_from_doc(archive.scene_doc)
    expected_hash = config_hash(scene, archive.notify_delay)
    if expected_hash != archive.config_hash:
        raise ReplayDivergence(
            f"config hash mismatch: archive says {archive.config_hash[:12]}, "
            f"scene gives {expected_hash[:12]}"
        )
    tasks = build_tasks(scene.tasks)
    timings = {}
    for entry in archive.sessions:
        session_index = entry["session_index"]
        engine = SessionEngine(
            scene, archive.plan, session_index, tasks, archive.notify_delay
        )
        trace = list(entry["trace"])
        pos = 0
        dt = engine.world.config.dt
        steps = 0
        while True:
            while pos < len(trace) and trace[pos][0] <= engine.world.sim_time:
                engine.handle_text(trace[pos][1])
                pos += 1
            if engine.ended or pos >= len(trace):
                break
            if steps > step_bound:
                raise ReplayDivergence(
                    f"session {session_index}: replay exceeded {step_bound} steps"
                )
            engine.advance(dt)
            steps += 1
        regenerated = encode_log(engine.events)
        if regenerated != entry["log"]:
            raise ReplayDivergence(
                f"session {session_index}: regenerated log differs from archive"
            )
        timings[session_index] = derive_timings(decode_log(entry["log"]))
    return timings, "identical"
