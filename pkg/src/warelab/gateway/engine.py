"""Session engine: one world + controller + orchestrator behind the protocol.

Everything a client can do arrives as a wire message; handle() validates it
against the live affordances and answers Ack or Err. advance() moves the
simulation and the session machine. All state changes that matter to the
study land in the event log, and every inbound frame is recorded with its
arrival sim_time, so a (scene, trace) pair replays to the identical log.

The engine is single-owner: the server's simulation loop or the headless
runner calls it; connection handlers never touch it directly.
"""

from __future__ import annotations

import json

from .. import interaction as I
from ..metrics.eventlog import EventKind, LogEvent
from ..metrics.errors import OutOfRangeItem, QuestionnaireSchemaError
from ..metrics.questionnaires import COMPARATIVE_IDS, SUS_ITEM_IDS, ComparativeAnswer
from ..metrics.sus import SusResponse
from ..orchestrator import (
    AgvRouteTask,
    Modality,
    NotPending,
    SessionPhase,
    record_activation,
    start_session,
    tick,
)
from ..sim import world as W
from ..sim.errors import SimError
from . import protocol as P
from .errors import ProtocolError

NOTIFY_DELAY_DEFAULT = 30.0


class SessionEngine:
    def __init__(self, scene, plan, session_index, tasks_by_kind, notify_delay=None):
        self.scene = scene
        self.plan = plan
        self.world = scene.fresh_world()
        self.session = start_session(
            plan,
            session_index,
            self.world,
            tasks_by_kind,
            notify_delay=NOTIFY_DELAY_DEFAULT if notify_delay is None else notify_delay,
        )
        self.ctrl = I.ControllerState()
        self.camera_on = False
        self.events = []
        self.inbound_trace = []  # [sim_time, raw frame] pairs
        self.seq = 0
        self.ended = False
        self._sus_submitted = False
        self._completion_logged = [False, False]
        self._last_aff = {}
        self._last_color = {}
        self._log(
            EventKind.SESSION_START,
            subject=plan.subject_id,
            modality=self.session.modality.value,
            session_index=session_index,
            scene=scene.name,
        )

    # ------------------------------------------------------------------
    # logging

    def _log(self, kind, **data):
        self.events.append(LogEvent(t=self.world.sim_time, kind=kind, data=data))

    # ------------------------------------------------------------------
    # inbound

    def handle_text(self, raw: str):
        """Record and process one wire frame; always returns outbound
        messages starting with the Ack/Err for this frame."""
        self.inbound_trace.append([self.world.sim_time, raw])
        try:
            msg = P.decode(raw)
        except ProtocolError as exc:
            return [P.Err(re=_best_effort_mid(raw), reason=str(exc), code="protocol")]
        if not P.is_inbound(msg):
            return [
                P.Err(re=_best_effort_mid(raw), reason="not an inbound message type",
                      code="protocol")
            ]
        return self.handle(msg)

    def handle(self, msg):
        handler = {
            P.Hello: self._on_hello,
            P.Gesture: self._on_gesture,
            P.PanelAction: self._on_panel_action,
            P.JoypadInput: self._on_joypad,
            P.QuestionnaireSubmit: self._on_questionnaire,
            P.SessionControl: self._on_session_control,
        }[type(msg)]
        return handler(msg)

    def _on_hello(self, msg):
        doc = self.scene.doc
        summary = {
            "scene": self.scene.name,
            "protocol": P.PROTOCOL_VERSION,
            "subject": self.plan.subject_id,
            "session_index": self.session.session_index,
            "modality": self.session.modality.value,
            "zones": doc.get("zones", []),
            "routes": doc.get("routes", []),
            "robots": self.world.robot_ids(),
        }
        return [P.Ack(re=msg.mid, data=summary)]

    def _on_gesture(self, msg):
        try:
            kind = I.GestureKind(msg.gesture)
        except ValueError:
            return [P.Err(re=msg.mid, reason=f"unknown gesture {msg.gesture!r}")]
        event = I.GestureEvent(kind=kind, robot_id=msg.robot_id)

        if kind is I.GestureKind.THUMB_UP:
            self.camera_on = I.camera_toggle(self.camera_on, event)
            self._log(EventKind.STATE_CHANGE, entity="camera", on=self.camera_on)
            return [P.Ack(re=msg.mid, data={"camera": self.camera_on})]
        if kind is I.GestureKind.HAND_NEAR_ROBOT:
            # presentation hint only; nothing in the engine moves
            return [P.Ack(re=msg.mid)]

        if msg.robot_id is not None and msg.robot_id not in self.world.drones \
                and msg.robot_id not in self.world.agvs:
            return [P.Err(re=msg.mid, reason=f"unknown robot {msg.robot_id!r}")]
        try:
            new = I.lifecycle_step(self.ctrl, event)
        except I.InvalidTransition as exc:
            return [P.Err(re=msg.mid, reason=str(exc))]
        old = self.ctrl
        self.ctrl = new
        self._log(
            EventKind.STATE_CHANGE,
            entity="controller",
            before=old.phase.value,
            after=new.phase.value,
            robot=new.robot_id or "",
        )
        out = [P.Ack(re=msg.mid, data={"phase": new.phase.value})]

        if (
            new.phase is I.ControllerPhase.PANEL_OPEN
            and self.session.modality is Modality.MR_REPLICA
            and self.session.phase is SessionPhase.SECONDARY_PENDING
        ):
            self._activate()

        out.extend(self._ui_messages())
        return out

    def _activate(self):
        k = record_activation(self.session, self.world.sim_time)
        self._log(EventKind.INTERACTION_ACTIVATED, task_index=k)

    def _on_panel_action(self, msg):
        try:
            cmd = I.dispatch(self.ctrl, self.world, msg.action, msg.magnitude)
            result = I.apply_command(self.world, cmd)
        except (I.InteractionError, SimError, ValueError) as exc:
            return [P.Err(re=msg.mid, reason=str(exc))]
        self._log(EventKind.COMMAND, source="panel", **cmd.payload())
        data = {} if result is None else {"result": result}
        return [P.Ack(re=msg.mid, data=data)] + self._ui_messages()

    def _joypad_target(self):
        task = self.session.tasks[self.session.task_index]
        if isinstance(task, AgvRouteTask):
            return task.agv_id
        drones = sorted(self.world.drones)
        return drones[0] if drones else None

    def _on_joypad(self, msg):
        if self.session.modality is not Modality.JOYPAD:
            return [P.Err(re=msg.mid, reason="joypad input outside joypad session")]
        if self.session.phase is SessionPhase.SECONDARY_PENDING:
            self._activate()
        elif self.session.phase is not SessionPhase.SECONDARY_ACTIVE:
            return [P.Err(re=msg.mid, reason="no secondary task to control")]
        target = self._joypad_target()
        if target is None:
            return [P.Err(re=msg.mid, reason="no robot available")]
        try:
            cmd = I.gate_action(self.world, target, msg.control, msg.value)
            result = I.apply_command(self.world, cmd)
        except (I.InteractionError, SimError, ValueError) as exc:
            return [P.Err(re=msg.mid, reason=str(exc))]
        self._log(EventKind.COMMAND, source="joypad", **cmd.payload())
        data = {} if result is None else {"result": result}
        return [P.Ack(re=msg.mid, data=data)] + self._ui_messages()

    def _on_questionnaire(self, msg):
        if not self.session.done:
            return [P.Err(re=msg.mid, reason="session still running")]
        if msg.stage == "sus":
            if self._sus_submitted:
                return [P.Err(re=msg.mid, reason="usability form already submitted")]
            try:
                items = tuple(msg.answers[i] for i in SUS_ITEM_IDS)
                SusResponse(items)
            except (KeyError, TypeError) as exc:
                return [P.Err(re=msg.mid, reason=f"bad usability answers: {exc}")]
            except OutOfRangeItem as exc:
                return [P.Err(re=msg.mid, reason=str(exc))]
            for item_id, value in zip(SUS_ITEM_IDS, items):
                self._log(EventKind.QUESTIONNAIRE_ANSWER, item=item_id, value=value)
            self._sus_submitted = True
            return [P.Ack(re=msg.mid)]
        if msg.stage == "comparative":
            if self.session.session_index != 1:
                return [
                    P.Err(re=msg.mid,
                          reason="comparative questions follow the second session")
                ]
            try:
                answers = []
                for qid in COMPARATIVE_IDS:
                    entry = msg.answers[qid]
                    answers.append(
                        ComparativeAnswer(
                            question_id=qid,
                            choice=entry["choice"],
                            comment=entry.get("comment", ""),
                        )
                    )
            except (KeyError, TypeError) as exc:
                return [P.Err(re=msg.mid, reason=f"bad comparative answers: {exc}")]
            except QuestionnaireSchemaError as exc:
                return [P.Err(re=msg.mid, reason=str(exc))]
            for ans in answers:
                self._log(
                    EventKind.QUESTIONNAIRE_ANSWER,
                    item=ans.question_id,
                    choice=ans.choice,
                    comment=ans.comment,
                )
            return [P.Ack(re=msg.mid)]
        return [P.Err(re=msg.mid, reason=f"unknown questionnaire stage {msg.stage!r}")]

    def _on_session_control(self, msg):
        if msg.op != "end":
            return [P.Err(re=msg.mid, reason=f"unknown session op {msg.op!r}")]
        if not self.session.done:
            return [P.Err(re=msg.mid, reason="session tasks not finished")]
        if not self._sus_submitted:
            return [P.Err(re=msg.mid, reason="usability form not yet submitted")]
        if self.ended:
            return [P.Err(re=msg.mid, reason="session already ended")]
        self.ended = True
        self._log(EventKind.SESSION_END)
        return [
            P.Ack(re=msg.mid),
            P.SessionEvent(kind="session_end", t=self.world.sim_time),
        ]

    # ------------------------------------------------------------------
    # time

    def advance(self, dt: float):
        """Step the world and session machine; returns outbound messages."""
        if self.ended:
            return []
        W.step(self.world, dt)
        out = []
        note = tick(self.session, self.world, self.world.sim_time)
        if note is not None:
            self._log(
                EventKind.TASK_NOTIFIED,
                task_index=note.task_index,
                task_kind=note.task_kind.value,
                channel=note.channel.value,
            )
            out.append(
                P.NotificationMsg(
                    task_index=note.task_index,
                    task_kind=note.task_kind.value,
                    channel=note.channel.value,
                    issued_at=note.issued_at,
                )
            )
        for k in range(len(self.session.tasks)):
            if self.session.completed_at[k] is not None and not self._completion_logged[k]:
                self._completion_logged[k] = True
                self._log(EventKind.TASK_COMPLETED, task_index=k)
                out.append(
                    P.SessionEvent(
                        kind="task_completed",
                        t=self.session.completed_at[k],
                        data={"task_index": k},
                    )
                )
        out.extend(self._ui_messages())
        return out

    # ------------------------------------------------------------------
    # outbound state

    def _watched_robots(self):
        ids = []
        if self.ctrl.robot_id is not None:
            ids.append(self.ctrl.robot_id)
        if (
            self.session.modality is Modality.JOYPAD
            and self.session.phase is SessionPhase.SECONDARY_ACTIVE
        ):
            target = self._joypad_target()
            if target is not None and target not in ids:
                ids.append(target)
        return ids

    def _ui_messages(self):
        """AffordanceUpdate / StateColor deltas since the last emission."""
        out = []
        if self.ctrl.phase is I.ControllerPhase.PALETTE_SHOWN:
            key = ""
            roster = tuple(f"grab:{rid}" for rid in self.world.robot_ids())
            entry = ((), roster, False)
            if self._last_aff.get(key) != entry:
                self._last_aff[key] = entry
                out.append(
                    P.AffordanceUpdate(
                        robot_id="", arrows=(), buttons=roster, arrows_visible=False
                    )
                )
        for rid in self._watched_robots():
            offer = I.affordances(self.world, rid)
            entry = (tuple(sorted(offer.arrows)), offer.buttons, offer.arrows_visible)
            if self._last_aff.get(rid) != entry:
                self._last_aff[rid] = entry
                out.append(
                    P.AffordanceUpdate(
                        robot_id=rid,
                        arrows=entry[0],
                        buttons=entry[1],
                        arrows_visible=entry[2],
                    )
                )
        for did in sorted(self.world.drones):
            state = I.drone_op_state(self.world, did)
            color = I.avatar_color(state).value
            if self._last_color.get(did) != (state.value, color):
                self._last_color[did] = (state.value, color)
                out.append(P.StateColor(robot_id=did, color=color, op_state=state.value))
        return out

    def snapshot(self) -> P.Snapshot:
        self.seq += 1
        world = self.world
        drones = tuple(
            {
                "id": d.id,
                "x": d.pose.position.x,
                "y": d.pose.position.y,
                "z": d.pose.position.z,
                "yaw": d.pose.yaw,
                "carried": d.carried or "",
                "op_state": I.drone_op_state(world, d.id).value,
                "color": I.avatar_color(I.drone_op_state(world, d.id)).value,
            }
            for d in (world.drones[i] for i in sorted(world.drones))
        )
        agvs = tuple(
            {
                "id": a.id,
                "x": a.pose.position.x,
                "y": a.pose.position.y,
                "yaw": a.pose.yaw,
                "forks": a.fork_raised,
                "route": a.active_route or "",
                "progress": a.route_progress,
            }
            for a in (world.agvs[i] for i in sorted(world.agvs))
        )
        boxes = tuple(
            {
                "id": b.id,
                "x": b.pose.position.x,
                "y": b.pose.position.y,
                "z": b.pose.position.z,
                "yaw": b.pose.yaw,
                "carried_by": b.carried_by or "",
            }
            for b in (world.boxes[i] for i in sorted(world.boxes))
        )
        return P.Snapshot(
            sim_time=world.sim_time,
            seq=self.seq,
            phase=self.session.phase.value,
            controller={
                "phase": self.ctrl.phase.value,
                "robot": self.ctrl.robot_id or "",
                "camera": self.camera_on,
            },
            drones=drones,
            agvs=agvs,
            boxes=boxes,
        )

    def camera_frame(self) -> P.CameraFrame | None:
        """Scene geometry in the camera drone's frame; None with camera off."""
        if not self.camera_on or not self.world.drones:
            return None
        did = sorted(self.world.drones)[0]
        drone = self.world.drones[did]
        items = []
        for bid in sorted(self.world.boxes):
            b = self.world.boxes[bid]
            items.append(_relative_item(drone.pose, b.id, "box", b.pose))
        for aid in sorted(self.world.agvs):
            a = self.world.agvs[aid]
            items.append(_relative_item(drone.pose, a.id, "agv", a.pose))
        for zid in sorted(self.world.zones):
            z = self.world.zones[zid]
            items.append(
                _relative_item_xyz(drone.pose, z.id, z.kind.value, z.center, z.pad_yaw)
            )
        return P.CameraFrame(
            drone_id=did, sim_time=self.world.sim_time, items=tuple(items)
        )


def _relative_item(drone_pose, item_id, kind, pose):
    return _relative_item_xyz(drone_pose, item_id, kind, pose.position, pose.yaw)


def _relative_item_xyz(drone_pose, item_id, kind, position, yaw):
    from .._kernels import relative_pose

    rx, ry, rz, ryaw = relative_pose(
        drone_pose.position.x, drone_pose.position.y, drone_pose.position.z,
        drone_pose.yaw,
        position.x, position.y, position.z, yaw,
    )
    return (item_id, kind, rx, ry, rz, ryaw)


def _best_effort_mid(raw: str) -> str:
    try:
        doc = json.loads(raw)
        mid = doc.get("mid") if isinstance(doc, dict) else None
        return mid if isinstance(mid, str) else ""
    except (json.JSONDecodeError, AttributeError):
        return ""
