"""Questionnaire schema: 23 statements per subject.

Each subject answers the 10-item usability form twice (once per modality,
items q1..q10) and three comparative preference questions after the second
session (items c1..c3, a modality choice plus a free-text comment kept
verbatim). 10 + 10 + 3 = 23; the schema rejects anything else.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import QuestionnaireSchemaError
from .eventlog import EventKind
from .sus import SusResponse

SUS_ITEM_IDS = tuple(f"q{i}" for i in range(1, 11))
COMPARATIVE_IDS = ("c1", "c2", "c3")
STATEMENT_COUNT = 23
MODALITY_VALUES = ("mr", "joypad")


@dataclass(frozen=True)
class ComparativeAnswer:
    question_id: str
    choice: str
    comment: str = ""

    def __post_init__(self):
        if self.question_id not in COMPARATIVE_IDS:
            raise QuestionnaireSchemaError(
                f"unknown comparative question {self.question_id!r}"
            )
        if self.choice not in MODALITY_VALUES:
            raise QuestionnaireSchemaError(
                f"choice must be one of {MODALITY_VALUES}, got {self.choice!r}"
            )


@dataclass(frozen=True)
class SubjectQuestionnaire:
    subject_id: str
    sus: dict = field(default_factory=dict)  # modality value -> SusResponse
    comparative: tuple = ()

    def __post_init__(self):
        if sorted(self.sus) != sorted(MODALITY_VALUES):
            raise QuestionnaireSchemaError(
                f"subject {self.subject_id}: need one usability form per "
                f"modality {MODALITY_VALUES}, got {sorted(self.sus)}"
            )
        ids = tuple(c.question_id for c in self.comparative)
        if ids != COMPARATIVE_IDS:
            raise QuestionnaireSchemaError(
                f"subject {self.subject_id}: comparative answers must be "
                f"exactly {COMPARATIVE_IDS} in order, got {ids}"
            )

    @property
    def statement_count(self) -> int:
        return sum(len(r.item_scores) for r in self.sus.values()) + len(
            self.comparative
        )


def sus_from_events(events) -> SusResponse:
    """Collect the q1..q10 answers out of one session's log."""
    answers = {}
    for ev in events:
        if ev.kind is not EventKind.QUESTIONNAIRE_ANSWER:
            continue
        item = ev.data.get("item")
        if item in SUS_ITEM_IDS:
            if item in answers:
                raise QuestionnaireSchemaError(f"duplicate answer for {item}")
            answers[item] = ev.data.get("value")
    missing = [i for i in SUS_ITEM_IDS if i not in answers]
    if missing:
        raise QuestionnaireSchemaError(f"missing usability answers: {missing}")
    return SusResponse(tuple(answers[i] for i in SUS_ITEM_IDS))


def comparative_from_events(events) -> tuple:
    """Collect c1..c3 out of a second-session log; empty logs yield ()."""
    found = {}
    for ev in events:
        if ev.kind is not EventKind.QUESTIONNAIRE_ANSWER:
            continue
        item = ev.data.get("item")
        if item in COMPARATIVE_IDS:
            if item in found:
                raise QuestionnaireSchemaError(f"duplicate answer for {item}")
            found[item] = ComparativeAnswer(
                question_id=item,
                choice=ev.data.get("choice"),
                comment=ev.data.get("comment", ""),
            )
    if not found:
        return ()
    missing = [i for i in COMPARATIVE_IDS if i not in found]
    if missing:
        raise QuestionnaireSchemaError(f"missing comparative answers: {missing}")
    return tuple(found[i] for i in COMPARATIVE_IDS)
