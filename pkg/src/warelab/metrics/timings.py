"""Timing metrics derived from a session's event log.

reaction[k] = activated(k) - notified(k): how long until the operator got
the interaction system up for task k. robot[k] = completed(k) -
activated(k): how long commanding the robot took. total = completed(2) -
notified(1): the whole secondary-task span, primary-task interleaving
included, which is why total is NOT the sum of the parts.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import MalformedLog
from .eventlog import EventKind, LogEvent

TASK_COUNT = 2

_PER_TASK = (
    EventKind.TASK_NOTIFIED,
    EventKind.INTERACTION_ACTIVATED,
    EventKind.TASK_COMPLETED,
)


@dataclass(frozen=True)
class SessionTimings:
    total_time: float
    robot_time: tuple
    reaction_time: tuple
    task_kinds: tuple

    def metric(self, name: str):
        """Flat accessor used by the report assembly: 'total', 'reaction:k',
        'robot:k', or 'robot:<task kind>'."""
        if name == "total":
            return self.total_time
        field_name, _, key = name.partition(":")
        series = {"reaction": self.reaction_time, "robot": self.robot_time}[field_name]
        if key.isdigit():
            return series[int(key)]
        return series[self.task_kinds.index(key)]


def _task_index(event: LogEvent) -> int:
    try:
        k = event.data["task_index"]
    except KeyError:
        raise MalformedLog(f"{event.kind.value} event lacks task_index") from None
    if k not in (0, 1):
        raise MalformedLog(f"task_index {k!r} out of range")
    return k


def derive_timings(events) -> SessionTimings:
    """Pure function of the log; raises MalformedLog on missing, duplicated,
    or mis-ordered task events."""
    stamps = {kind: [None] * TASK_COUNT for kind in _PER_TASK}
    kinds = [None] * TASK_COUNT
    last_t = None
    for event in events:
        if last_t is not None and event.t < last_t:
            raise MalformedLog(f"timestamps regress at t={event.t}")
        last_t = event.t
        if event.kind not in stamps:
            continue
        k = _task_index(event)
        if stamps[event.kind][k] is not None:
            raise MalformedLog(f"duplicate {event.kind.value} for task {k}")
        stamps[event.kind][k] = event.t
        if event.kind is EventKind.TASK_NOTIFIED:
            kinds[k] = event.data.get("task_kind")

    for kind in _PER_TASK:
        for k in range(TASK_COUNT):
            if stamps[kind][k] is None:
                raise MalformedLog(f"missing {kind.value} for task {k}")

    notified = stamps[EventKind.TASK_NOTIFIED]
    activated = stamps[EventKind.INTERACTION_ACTIVATED]
    completed = stamps[EventKind.TASK_COMPLETED]
    for k in range(TASK_COUNT):
        if not (notified[k] <= activated[k] <= completed[k]):
            raise MalformedLog(
                f"task {k} events out of order: "
                f"notified@{notified[k]}, activated@{activated[k]}, "
                f"completed@{completed[k]}"
            )
    if completed[0] > notified[1]:
        raise MalformedLog("task 1 notified before task 0 completed")

    return SessionTimings(
        total_time=completed[1] - notified[0],
        robot_time=tuple(completed[k] - activated[k] for k in range(TASK_COUNT)),
        reaction_time=tuple(activated[k] - notified[k] for k in range(TASK_COUNT)),
        task_kinds=tuple(kinds),
    )
