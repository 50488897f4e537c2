"""Newline-delimited session event logs.

One JSON object per line with keys data/kind/t in sorted order and no
whitespace, so that equal event sequences serialize to equal bytes. The
byte-for-byte replay check depends on that stability; do not reorder keys
or touch the float formatting (json's repr-based float output is already
deterministic).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .errors import MalformedLog


class EventKind(str, Enum):
    SESSION_START = "session_start"
    TASK_NOTIFIED = "task_notified"
    INTERACTION_ACTIVATED = "interaction_activated"
    TASK_COMPLETED = "task_completed"
    COMMAND = "command"
    STATE_CHANGE = "state_change"
    QUESTIONNAIRE_ANSWER = "questionnaire_answer"
    SESSION_END = "session_end"


@dataclass(frozen=True)
class LogEvent:
    t: float
    kind: EventKind
    data: dict = field(default_factory=dict)


def encode_line(event: LogEvent) -> str:
    doc = {"data": event.data, "kind": EventKind(event.kind).value, "t": event.t}
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def decode_line(line: str) -> LogEvent:
    try:
        doc = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedLog(f"unparseable log line: {exc}") from None
    if not isinstance(doc, dict):
        raise MalformedLog(f"log line is not an object: {line!r}")
    try:
        kind = EventKind(doc["kind"])
        t = float(doc["t"])
        data = doc.get("data", {})
    except (KeyError, ValueError, TypeError) as exc:
        raise MalformedLog(f"bad log line {line!r}: {exc}") from None
    if not isinstance(data, dict):
        raise MalformedLog(f"event data must be an object, got {type(data).__name__}")
    return LogEvent(t=t, kind=kind, data=data)


def encode_log(events) -> str:
    return "".join(encode_line(ev) + "\n" for ev in events)


def decode_log(text: str) -> list[LogEvent]:
    events = [decode_line(line) for line in text.splitlines() if line.strip()]
    for prev, cur in zip(events, events[1:]):
        if cur.t < prev.t:
            raise MalformedLog(
                f"timestamps must be nondecreasing: {prev.t} then {cur.t}"
            )
    return events


def write_log(path, events) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(encode_log(events))


def read_log(path) -> list[LogEvent]:
    with open(path, "r", encoding="utf-8") as fh:
        return decode_log(fh.read())
