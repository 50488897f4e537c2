"""Wire protocol: JSON text frames over a full-duplex socket.

Every message is one JSON object with a "type" tag; the socket layer
(WebSocket frames) provides the length delimiting. Inbound messages carry
a client-chosen correlation id `mid`, and the service answers every one
with exactly one Ack or Err echoing it as `re`. Snapshots carry sim_time
and a per-connection sequence number that only ever grows.

decode(encode(m)) == m for every message; the round-trip test generates a
corpus across all variants.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, fields
from typing import Optional

from .errors import ProtocolError

PROTOCOL_VERSION = 1

_REGISTRY = {}


def _register(tag):
    def deco(cls):
        cls.TYPE = tag
        _REGISTRY[tag] = cls
        return cls

    return deco


# ---------------------------------------------------------------------------
# inbound (client -> service)


@_register("hello")
@dataclass(frozen=True)
class Hello:
    mid: str
    role: str = "console"  # console | observer
    subject: Optional[str] = None
    protocol: int = PROTOCOL_VERSION


@_register("gesture")
@dataclass(frozen=True)
class Gesture:
    mid: str
    gesture: str  # palm_up | thumb_up | grab_device | release_device | stow_device
    robot_id: Optional[str] = None


@_register("panel_action")
@dataclass(frozen=True)
class PanelAction:
    mid: str
    action: str  # arrow name or button name
    magnitude: float = 1.0


@_register("joypad_input")
@dataclass(frozen=True)
class JoypadInput:
    mid: str
    control: str  # arrow name (axis) or button name
    value: float = 1.0


@_register("questionnaire_submit")
@dataclass(frozen=True)
class QuestionnaireSubmit:
    mid: str
    stage: str  # sus | comparative
    answers: dict = field(default_factory=dict)


@_register("session_control")
@dataclass(frozen=True)
class SessionControl:
    mid: str
    op: str  # end


INBOUND_TYPES = (
    Hello,
    Gesture,
    PanelAction,
    JoypadInput,
    QuestionnaireSubmit,
    SessionControl,
)


# ---------------------------------------------------------------------------
# outbound (service -> client)


@_register("snapshot")
@dataclass(frozen=True)
class Snapshot:
    sim_time: float
    seq: int
    phase: str  # session phase
    controller: dict = field(default_factory=dict)
    drones: tuple = ()
    agvs: tuple = ()
    boxes: tuple = ()


@_register("affordance_update")
@dataclass(frozen=True)
class AffordanceUpdate:
    robot_id: str
    arrows: tuple = ()
    buttons: tuple = ()
    arrows_visible: bool = True


@_register("notification")
@dataclass(frozen=True)
class NotificationMsg:
    task_index: int
    task_kind: str
    channel: str
    issued_at: float


@_register("state_color")
@dataclass(frozen=True)
class StateColor:
    robot_id: str
    color: str
    op_state: str


@_register("camera_frame")
@dataclass(frozen=True)
class CameraFrame:
    drone_id: str
    sim_time: float
    items: tuple = ()  # (id, kind, x, y, z, yaw) relative to the drone pose


@_register("session_event")
@dataclass(frozen=True)
class SessionEvent:
    kind: str
    t: float
    data: dict = field(default_factory=dict)


@_register("ack")
@dataclass(frozen=True)
class Ack:
    re: str
    data: dict = field(default_factory=dict)


@_register("err")
@dataclass(frozen=True)
class Err:
    re: str
    reason: str
    code: str = "rejected"


OUTBOUND_TYPES = (
    Snapshot,
    AffordanceUpdate,
    NotificationMsg,
    StateColor,
    CameraFrame,
    SessionEvent,
    Ack,
    Err,
)


# ---------------------------------------------------------------------------
# codec

_TUPLE_FIELDS = {"drones", "agvs", "boxes", "arrows", "buttons", "items"}


def encode(message) -> str:
    tag = getattr(type(message), "TYPE", None)
    if tag is None or _REGISTRY.get(tag) is not type(message):
        raise ProtocolError(f"not a wire message: {message!r}")
    doc = {"type": tag}
    for f in fields(message):
        value = getattr(message, f.name)
        doc[f.name] = _plain(value)
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def _plain(value):
    if isinstance(value, tuple):
        return [_plain(v) for v in value]
    if isinstance(value, dict):
        return {k: _plain(v) for k, v in value.items()}
    return value


def _tupled(value):
    if isinstance(value, list):
        return tuple(_tupled(v) for v in value)
    if isinstance(value, dict):
        return {k: _tupled(v) for k, v in value.items()}
    return value


def decode(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"frame is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise ProtocolError("frame must be a JSON object")
    tag = doc.get("type")
    cls = _REGISTRY.get(tag)
    if cls is None:
        raise ProtocolError(f"unknown message type {tag!r}")
    names = {f.name for f in fields(cls)}
    extra = set(doc) - names - {"type"}
    if extra:
        raise ProtocolError(f"{tag}: unexpected fields {sorted(extra)}")
    kwargs = {}
    for f in fields(cls):
        if f.name in doc:
            value = doc[f.name]
            kwargs[f.name] = _tupled(value) if f.name in _TUPLE_FIELDS else value
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ProtocolError(f"{tag}: {exc}") from None


def is_inbound(message) -> bool:
    return isinstance(message, INBOUND_TYPES)
