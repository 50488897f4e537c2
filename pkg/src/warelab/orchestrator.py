"""Experiment session orchestration.

A study plan assigns every subject one of four counterbalancing sequences
(2 modality orders x 2 task orders). Each subject runs two sessions, one per
modality, with the same task order in both. Within a session the subject
works a primary task; 30 seconds into each primary block the orchestrator
notifies the next secondary task (through the headset overlay under the
replica modality, through the work-table screen under the joypad modality),
waits for the operator to engage, watches the world for completion, returns
to the primary task, and finishes after the second secondary task.

Timestamps recorded here (notified / activated / completed per task) are the
raw material for the timing metrics; they are simulation times supplied by
the caller, never wall-clock reads.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from enum import Enum

from ._kernels import dist2
from .errors import WarelabError
from .sim.model import WorldState

NOTIFY_DELAY_DEFAULT = 30.0


class OrchestratorError(WarelabError):
    pass


class SceneNotReady(OrchestratorError):
    pass


class NotPending(OrchestratorError):
    pass


class PlanError(OrchestratorError):
    pass


class Modality(str, Enum):
    MR_REPLICA = "mr"
    JOYPAD = "joypad"


class TaskKind(str, Enum):
    AGV_ROUTE = "agv_route"
    DRONE_LIFT = "drone_lift"


class NotifyChannel(str, Enum):
    HEADSET_OVERLAY = "headset_overlay"
    WORK_TABLE_SCREEN = "work_table_screen"


def channel_for(modality: Modality) -> NotifyChannel:
    """Notification channel is determined by the session modality."""
    if Modality(modality) is Modality.MR_REPLICA:
        return NotifyChannel.HEADSET_OVERLAY
    return NotifyChannel.WORK_TABLE_SCREEN


@dataclass(frozen=True)
class AgvRouteTask:
    agv_id: str
    route_id: str
    entry_zone_id: str

    @property
    def kind(self) -> TaskKind:
        return TaskKind.AGV_ROUTE


@dataclass(frozen=True)
class DroneLiftTask:
    box_id: str
    takeoff_zone_id: str
    landing_zone_id: str

    @property
    def kind(self) -> TaskKind:
        return TaskKind.DRONE_LIFT


def task_done(task, world: WorldState) -> bool:
    """World-fact completion predicate for a secondary task.

    AGV route: the AGV received the task's route command while standing in
    the entry zone, at any point so far (the sticky route log survives the
    AGV driving on). Drone lift: the task's box rests free of any carrier
    with its planar position inside the landing zone.
    """
    if isinstance(task, AgvRouteTask):
        agv = world.agvs[task.agv_id]
        zone = world.zones[task.entry_zone_id]
        for entry in agv.route_log:
            if entry.route_id != task.route_id:
                continue
            if dist2(entry.x, entry.y, zone.center.x, zone.center.y) <= zone.radius:
                return True
        return False
    if isinstance(task, DroneLiftTask):
        box = world.boxes[task.box_id]
        if box.carried_by is not None:
            return False
        zone = world.zones[task.landing_zone_id]
        pos = box.pose.position
        return dist2(pos.x, pos.y, zone.center.x, zone.center.y) <= zone.radius
    raise TypeError(f"not a secondary task: {task!r}")


# ---------------------------------------------------------------------------
# counterbalancing

SEQUENCES = (
    ((Modality.MR_REPLICA, Modality.JOYPAD), (TaskKind.AGV_ROUTE, TaskKind.DRONE_LIFT)),
    ((Modality.MR_REPLICA, Modality.JOYPAD), (TaskKind.DRONE_LIFT, TaskKind.AGV_ROUTE)),
    ((Modality.JOYPAD, Modality.MR_REPLICA), (TaskKind.AGV_ROUTE, TaskKind.DRONE_LIFT)),
    ((Modality.JOYPAD, Modality.MR_REPLICA), (TaskKind.DRONE_LIFT, TaskKind.AGV_ROUTE)),
)


@dataclass(frozen=True)
class SessionPlan:
    subject_id: str
    modality_order: tuple
    task_order: tuple
    seed: int

    def sequence_index(self) -> int:
        return SEQUENCES.index((tuple(self.modality_order), tuple(self.task_order)))


def latin_plan(subjects: int, seed: int) -> list[SessionPlan]:
    """Assign counterbalancing sequences to a cohort.

    Sequence counts differ by at most one; with a multiple of four they are
    exactly equal. The leftover sequences and the roster order are drawn
    from the given seed, and each subject receives a private seed for any
    downstream randomness, so a (subjects, seed) pair always produces the
    identical plan.
    """
    if subjects < 1:
        raise PlanError(f"need at least one subject, got {subjects}")
    rng = random.Random(seed)
    counts = [subjects // 4] * 4
    for i in rng.sample(range(4), subjects % 4):
        counts[i] += 1
    seq_ids = [i for i in range(4) for _ in range(counts[i])]
    rng.shuffle(seq_ids)
    plans = []
    for n, si in enumerate(seq_ids, start=1):
        modality_order, task_order = SEQUENCES[si]
        plans.append(
            SessionPlan(
                subject_id=f"s{n:02d}",
                modality_order=modality_order,
                task_order=task_order,
                seed=rng.getrandbits(31),
            )
        )
    return plans


def plans_to_doc(plans, master_seed=None) -> dict:
    return {
        "master_seed": master_seed,
        "subjects": [
            {
                "subject_id": p.subject_id,
                "modality_order": [m.value for m in p.modality_order],
                "task_order": [t.value for t in p.task_order],
                "seed": p.seed,
            }
            for p in plans
        ],
    }


def plans_from_doc(doc) -> list[SessionPlan]:
    try:
        out = []
        for entry in doc["subjects"]:
            plan = SessionPlan(
                subject_id=entry["subject_id"],
                modality_order=tuple(Modality(m) for m in entry["modality_order"]),
                task_order=tuple(TaskKind(t) for t in entry["task_order"]),
                seed=int(entry["seed"]),
            )
            plan.sequence_index()  # rejects malformed order combinations
            out.append(plan)
    except (KeyError, TypeError, ValueError) as exc:
        raise PlanError(f"malformed plan document: {exc}") from None
    if len({p.subject_id for p in out}) != len(out):
        raise PlanError("duplicate subject ids in plan")
    return out


def save_plan(path, plans, master_seed=None):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(plans_to_doc(plans, master_seed), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_plan(path) -> list[SessionPlan]:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise PlanError(f"unparseable plan file {path}: {exc}") from None
    return plans_from_doc(doc)


# ---------------------------------------------------------------------------
# session state machine


class SessionPhase(str, Enum):
    PRIMARY_ONLY = "primary_only"
    SECONDARY_PENDING = "secondary_pending"
    SECONDARY_ACTIVE = "secondary_active"
    DONE = "done"


@dataclass(frozen=True)
class Notification:
    task_index: int
    task_kind: TaskKind
    channel: NotifyChannel
    issued_at: float


@dataclass
class SessionState:
    modality: Modality
    session_index: int
    tasks: tuple
    notify_delay: float = NOTIFY_DELAY_DEFAULT
    phase: SessionPhase = SessionPhase.PRIMARY_ONLY
    task_index: int = 0
    phase_entered_at: float = 0.0
    notified_at: list = field(default_factory=lambda: [None, None])
    activated_at: list = field(default_factory=lambda: [None, None])
    completed_at: list = field(default_factory=lambda: [None, None])

    @property
    def done(self) -> bool:
        return self.phase is SessionPhase.DONE


def build_tasks(scene_tasks: dict) -> dict:
    """Parse a scene's task table into task objects keyed by kind."""
    out = {}
    try:
        if TaskKind.AGV_ROUTE.value in scene_tasks:
            t = scene_tasks[TaskKind.AGV_ROUTE.value]
            out[TaskKind.AGV_ROUTE] = AgvRouteTask(t["agv"], t["route"], t["entry_zone"])
        if TaskKind.DRONE_LIFT.value in scene_tasks:
            t = scene_tasks[TaskKind.DRONE_LIFT.value]
            out[TaskKind.DRONE_LIFT] = DroneLiftTask(
                t["box"], t["takeoff_zone"], t["landing_zone"]
            )
    except (KeyError, TypeError) as exc:
        raise SceneNotReady(f"malformed task table: {exc}") from None
    return out


def _validate_task(task, world, missing):
    if isinstance(task, AgvRouteTask):
        if task.agv_id not in world.agvs:
            missing.append(f"AGV {task.agv_id}")
        if task.route_id not in world.routes:
            missing.append(f"route {task.route_id}")
        if task.entry_zone_id not in world.zones:
            missing.append(f"zone {task.entry_zone_id}")
    else:
        if task.box_id not in world.boxes:
            missing.append(f"box {task.box_id}")
        for zid in (task.takeoff_zone_id, task.landing_zone_id):
            if zid not in world.zones:
                missing.append(f"zone {zid}")


def start_session(
    plan: SessionPlan,
    session_index: int,
    world: WorldState,
    tasks_by_kind: dict,
    notify_delay: float = NOTIFY_DELAY_DEFAULT,
) -> SessionState:
    """Open one of a subject's two sessions against a fresh world.

    Raises SceneNotReady when the plan's task order references task kinds or
    world entities the scene does not provide.
    """
    if session_index not in (0, 1):
        raise ValueError("session_index must be 0 or 1")
    ordered = []
    missing = []
    for kind in plan.task_order:
        task = tasks_by_kind.get(TaskKind(kind))
        if task is None:
            missing.append(f"task {TaskKind(kind).value}")
            continue
        _validate_task(task, world, missing)
        ordered.append(task)
    if missing:
        raise SceneNotReady("scene lacks: " + ", ".join(missing))
    return SessionState(
        modality=plan.modality_order[session_index],
        session_index=session_index,
        tasks=tuple(ordered),
        notify_delay=notify_delay,
        phase_entered_at=world.sim_time,
    )


def tick(session: SessionState, world: WorldState, now: float):
    """Advance the session machine; returns a Notification when one fires.

    Completion is only recognized while the task is active: the operator
    must have engaged before the world counts as done.
    """
    if session.phase is SessionPhase.PRIMARY_ONLY:
        if now - session.phase_entered_at >= session.notify_delay:
            k = session.task_index
            session.phase = SessionPhase.SECONDARY_PENDING
            session.phase_entered_at = now
            session.notified_at[k] = now
            return Notification(
                task_index=k,
                task_kind=session.tasks[k].kind,
                channel=channel_for(session.modality),
                issued_at=now,
            )
    elif session.phase is SessionPhase.SECONDARY_ACTIVE:
        k = session.task_index
        if task_done(session.tasks[k], world):
            session.completed_at[k] = now
            if k == 0:
                session.task_index = 1
                session.phase = SessionPhase.PRIMARY_ONLY
            else:
                session.phase = SessionPhase.DONE
            session.phase_entered_at = now
    return None


def record_activation(session: SessionState, now: float) -> int:
    """Mark the operator's first engagement with the pending task.

    Under the replica modality that is the panel opening; under the joypad
    modality, the first joypad input. Returns the task index. Raises
    NotPending outside the notified-but-not-engaged window.
    """
    if session.phase is not SessionPhase.SECONDARY_PENDING:
        raise NotPending(f"session phase is {session.phase.value}")
    k = session.task_index
    session.activated_at[k] = now
    session.phase = SessionPhase.SECONDARY_ACTIVE
    session.phase_entered_at = now
    return k
