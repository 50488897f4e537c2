"""Scripted reference agent: drives sessions through the wire protocol.

The agent sees exactly what a console could see (engine state it reads is
all mirrored in snapshots) and emits inbound messages on a fixed decision
period. Policies are pure functions of world state, so a (plan, seed)
pair always produces the identical message trace. The reaction delays
(2 s replica, 5 s joypad) exist to exercise the timing pipeline and are
not modeled human behavior.
"""

from __future__ import annotations

import math
import random

from .. import interaction as I
from ..orchestrator import AgvRouteTask, Modality, SessionPhase
from . import protocol as P

MR_REACTION_DEFAULT = 2.0
JOYPAD_REACTION_DEFAULT = 5.0
DECISION_PERIOD_DEFAULT = 0.1

_TURN_DEADBAND = 0.15
_AXIS_DEADBAND = 0.02


class ScriptedAgent:
    def __init__(self, modality, seed, reaction_delay=None, decision_period=None):
        self.modality = Modality(modality)
        self.rng = random.Random(seed)
        if reaction_delay is None:
            reaction_delay = (
                MR_REACTION_DEFAULT
                if self.modality is Modality.MR_REPLICA
                else JOYPAD_REACTION_DEFAULT
            )
        self.reaction_delay = reaction_delay
        self.decision_period = decision_period or DECISION_PERIOD_DEFAULT
        self._next_decision = 0.0
        self._mid = 0
        self._hello_sent = False
        self._gesture_queue = []
        self._wrapup = None  # "zero_axes" | "stow" pending cleanup steps
        self._sus_sent = False
        self._comparative_sent = False
        self._end_sent = False

    def _mk_mid(self) -> str:
        self._mid += 1
        return f"m{self._mid}"

    # ------------------------------------------------------------------

    def step(self, engine) -> list:
        """Messages to send at this tick (usually none between decisions)."""
        t = engine.world.sim_time
        if t + 1e-9 < self._next_decision:
            return []
        self._next_decision = t + self.decision_period

        if not self._hello_sent:
            self._hello_sent = True
            return [
                P.Hello(
                    mid=self._mk_mid(),
                    role="console",
                    subject=engine.plan.subject_id,
                )
            ]

        session = engine.session
        if session.done:
            return self._finish(engine)

        if self._gesture_queue:
            return [self._gesture_queue.pop(0)]

        phase = session.phase
        if phase is SessionPhase.PRIMARY_ONLY:
            return self._cleanup(engine)
        if phase is SessionPhase.SECONDARY_PENDING:
            k = session.task_index
            if t - session.notified_at[k] + 1e-9 < self.reaction_delay:
                return []
            return self._engage(engine)
        if phase is SessionPhase.SECONDARY_ACTIVE:
            return self._drive(engine)
        return []

    # ------------------------------------------------------------------
    # engagement

    def _task_robot(self, engine):
        task = engine.session.tasks[engine.session.task_index]
        if isinstance(task, AgvRouteTask):
            return task.agv_id
        return sorted(engine.world.drones)[0]

    def _engage(self, engine):
        if self.modality is Modality.JOYPAD:
            # first joypad input is the activation; make it a real command
            return self._drive(engine)
        robot = self._task_robot(engine)
        self._gesture_queue = [
            P.Gesture(mid=self._mk_mid(), gesture="grab_device", robot_id=robot),
            P.Gesture(mid=self._mk_mid(), gesture="release_device"),
        ]
        return [P.Gesture(mid=self._mk_mid(), gesture="palm_up")]

    def _cleanup(self, engine):
        if self._wrapup == "zero_axes":
            self._wrapup = "stow" if self.modality is Modality.MR_REPLICA else None
            return self._zero_axis_messages(engine)
        if (
            self.modality is Modality.MR_REPLICA
            and engine.ctrl.phase is I.ControllerPhase.PANEL_OPEN
        ):
            self._wrapup = None
            return [P.Gesture(mid=self._mk_mid(), gesture="stow_device")]
        return []

    # ------------------------------------------------------------------
    # task policies

    def _send(self, engine, action, magnitude):
        if self.modality is Modality.MR_REPLICA:
            return P.PanelAction(mid=self._mk_mid(), action=action, magnitude=magnitude)
        return P.JoypadInput(mid=self._mk_mid(), control=action, value=magnitude)

    def _drive(self, engine):
        task = engine.session.tasks[engine.session.task_index]
        if isinstance(task, AgvRouteTask):
            return self._drive_agv(engine, task)
        return self._drive_drone(engine, task)

    def _drive_agv(self, engine, task):
        world = engine.world
        agv = world.agvs[task.agv_id]
        offer = I.affordances(world, task.agv_id)
        button = f"route:{task.route_id}"
        if button in offer.buttons:
            self._wrapup = "stow" if self.modality is Modality.MR_REPLICA else None
            # null the drive command before handing over to the route
            return [
                self._send(engine, "forward", 0.0),
                self._send(engine, "yaw_ccw", 0.0),
                self._send(engine, button, 1.0),
            ]
        zone = world.zones[task.entry_zone_id]
        dx = zone.center.x - agv.pose.position.x
        dy = zone.center.y - agv.pose.position.y
        dist = math.hypot(dx, dy)
        err = _wrap(math.atan2(dy, dx) - agv.pose.yaw)
        if abs(err) > _TURN_DEADBAND:
            turn = "yaw_ccw" if err > 0 else "yaw_cw"
            return [
                self._send(engine, "forward", 0.0),
                self._send(engine, turn, min(1.0, abs(err))),
            ]
        return [
            self._send(engine, "yaw_ccw", 0.0),
            self._send(engine, "forward", min(1.0, dist)),
        ]

    def _drive_drone(self, engine, task):
        world = engine.world
        drone_id = sorted(world.drones)[0]
        drone = world.drones[drone_id]
        offer = I.affordances(world, drone_id)
        box = world.boxes[task.box_id]

        if box.carried_by == drone_id:
            if "release" in offer.buttons:
                self._wrapup = "zero_axes"
                return [self._send(engine, "release", 1.0)]
            land = world.zones[task.landing_zone_id]
            target = (land.center.x, land.center.y, 1.2)
        else:
            if "grasp" in offer.buttons:
                return [self._send(engine, "grasp", 1.0)]
            bp = box.pose.position
            target = (bp.x, bp.y, bp.z + 0.1)

        pos = drone.pose.position
        out = []
        for axis, err in (
            ("x", target[0] - pos.x),
            ("y", target[1] - pos.y),
            ("z", target[2] - pos.z),
        ):
            if abs(err) <= _AXIS_DEADBAND:
                out.append(self._send(engine, f"+{axis}", 0.0))
            else:
                sign = "+" if err > 0 else "-"
                out.append(self._send(engine, f"{sign}{axis}", min(1.0, abs(err))))
        return out

    def _zero_axis_messages(self, engine):
        return [self._send(engine, f"+{axis}", 0.0) for axis in ("x", "y", "z")]

    # ------------------------------------------------------------------
    # questionnaires and session end

    def _finish(self, engine):
        if (
            self.modality is Modality.MR_REPLICA
            and engine.ctrl.phase is not I.ControllerPhase.HIDDEN
        ):
            return self._cleanup(engine) or [
                P.Gesture(mid=self._mk_mid(), gesture="stow_device")
            ]
        if self._wrapup == "zero_axes":
            self._wrapup = None
            return self._zero_axis_messages(engine)
        if not self._sus_sent:
            self._sus_sent = True
            answers = {f"q{i}": self.rng.randint(1, 5) for i in range(1, 11)}
            return [P.QuestionnaireSubmit(mid=self._mk_mid(), stage="sus",
                                          answers=answers)]
        if engine.session.session_index == 1 and not self._comparative_sent:
            self._comparative_sent = True
            answers = {
                qid: {"choice": self.rng.choice(["mr", "joypad"]), "comment": ""}
                for qid in ("c1", "c2", "c3")
            }
            return [
                P.QuestionnaireSubmit(
                    mid=self._mk_mid(), stage="comparative", answers=answers
                )
            ]
        if not self._end_sent:
            self._end_sent = True
            return [P.SessionControl(mid=self._mk_mid(), op="end")]
        return []


def _wrap(angle: float) -> float:
    while angle > math.pi:
        angle -= 2.0 * math.pi
    while angle <= -math.pi:
        angle += 2.0 * math.pi
    return angle


class StallingAgent(ScriptedAgent):
    """Never engages a task; exists to exercise the step-bound guard."""

    def step(self, engine):
        t = engine.world.sim_time
        if t + 1e-9 < self._next_decision:
            return []
        self._next_decision = t + self.decision_period
        if not self._hello_sent:
            self._hello_sent = True
            return [P.Hello(mid=self._mk_mid(), role="console")]
        return []
