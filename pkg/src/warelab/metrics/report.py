"""Study report assembly: mean±SD tables, paired t-tests, SUS, preferences.

The paired tests pair within subject (same subject, both modalities), so a
mean and SD alone never determine the p-value; p is a property of the
actual per-subject pairing in the cohort being summarized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import TooFewSamples, UnpairedSubject, ZeroVariance
from .questionnaires import MODALITY_VALUES, SUS_ITEM_IDS
from .stats import mean_sd, paired_t_test, proportion
from .sus import sus_score
from .timings import SessionTimings

METRIC_ORDER = ("total", "reaction", "robot:agv_route", "robot:drone_lift")

_METRIC_LABELS = {
    "total": "Total time [s]",
    "reaction": "Reaction time [s]",
    "robot:agv_route": "Robot time, AGV route [s]",
    "robot:drone_lift": "Robot time, drone lift [s]",
    "sus": "Usability score",
}


@dataclass(frozen=True)
class SessionRecord:
    subject_id: str
    modality: str  # "mr" | "joypad"
    timings: SessionTimings


@dataclass(frozen=True)
class StudyReport:
    subjects: tuple
    summary: dict  # metric -> modality -> (mean, sd)
    t_tests: dict  # metric -> TTestResult | None
    zero_variance: tuple
    paired: dict  # metric -> {"subjects": ..., "mr": ..., "joypad": ...}
    sus_items: dict = field(default_factory=dict)  # modality -> ((mean, sd),)*10
    preferences: dict = field(default_factory=dict)  # qid -> {"mr","joypad","n"}


def _metric_value(timings: SessionTimings, metric: str) -> float:
    if metric == "reaction":
        return math.fsum(timings.reaction_time) / len(timings.reaction_time)
    return timings.metric(metric)


def _pair_sessions(records):
    by_subject = {}
    for rec in records:
        slot = by_subject.setdefault(rec.subject_id, {})
        if rec.modality in slot:
            raise UnpairedSubject(
                f"subject {rec.subject_id} has two {rec.modality} sessions"
            )
        if rec.modality not in MODALITY_VALUES:
            raise UnpairedSubject(f"unknown modality {rec.modality!r}")
        slot[rec.modality] = rec
    for sid, slot in by_subject.items():
        if sorted(slot) != sorted(MODALITY_VALUES):
            raise UnpairedSubject(f"subject {sid} lacks one modality session")
    return dict(sorted(by_subject.items()))


def summarize_study(records, questionnaires=()) -> StudyReport:
    """Reduce per-session timings (plus optional questionnaires) to a report.

    Every subject must appear exactly once per modality. A metric whose
    pairwise differences are all equal gets a zero-variance marker instead
    of a t-test; nothing raises for that here.
    """
    by_subject = _pair_sessions(records)
    if not by_subject:
        raise UnpairedSubject("no sessions to summarize")
    subjects = tuple(by_subject)

    paired = {}
    for metric in METRIC_ORDER:
        paired[metric] = {
            "subjects": subjects,
            "mr": tuple(
                _metric_value(by_subject[s]["mr"].timings, metric) for s in subjects
            ),
            "joypad": tuple(
                _metric_value(by_subject[s]["joypad"].timings, metric)
                for s in subjects
            ),
        }

    questionnaires = tuple(questionnaires)
    if questionnaires:
        scored = {q.subject_id: q for q in questionnaires}
        if sorted(scored) != sorted(subjects):
            raise UnpairedSubject(
                "questionnaires do not cover exactly the session subjects"
            )
        paired["sus"] = {
            "subjects": subjects,
            "mr": tuple(sus_score(scored[s].sus["mr"]) for s in subjects),
            "joypad": tuple(sus_score(scored[s].sus["joypad"]) for s in subjects),
        }

    summary, t_tests, zero_variance = {}, {}, []
    for metric, cols in paired.items():
        summary[metric] = {
            m: mean_sd(cols[m]) if len(cols[m]) >= 2 else (cols[m][0], 0.0)
            for m in MODALITY_VALUES
        }
        try:
            t_tests[metric] = paired_t_test(cols["mr"], cols["joypad"])
        except ZeroVariance:
            t_tests[metric] = None
            zero_variance.append(metric)
        except TooFewSamples:
            t_tests[metric] = None  # single-subject cohort: nothing to test

    sus_items = {}
    preferences = {}
    if questionnaires:
        for m in MODALITY_VALUES:
            per_item = []
            for i in range(len(SUS_ITEM_IDS)):
                xs = [q.sus[m].item_scores[i] for q in questionnaires]
                per_item.append(mean_sd(xs) if len(xs) >= 2 else (xs[0], 0.0))
            sus_items[m] = tuple(per_item)
        answered = [q for q in questionnaires if q.comparative]
        for k, qid in enumerate(("c1", "c2", "c3")):
            votes = [q.comparative[k].choice for q in answered]
            if votes:
                mr_pct = proportion(votes.count("mr"), len(votes))
                preferences[qid] = {
                    "mr": mr_pct,
                    "joypad": proportion(votes.count("joypad"), len(votes)),
                    "n": len(votes),
                }

    return StudyReport(
        subjects=subjects,
        summary=summary,
        t_tests=t_tests,
        zero_variance=tuple(zero_variance),
        paired=paired,
        sus_items=sus_items,
        preferences=preferences,
    )


def format_mean_sd(mean: float, sd: float) -> str:
    return f"{mean:.1f}±{sd:.1f}"


def render_table(report: StudyReport) -> str:
    """Fixed-width text table, one row per metric: mean±SD per modality plus
    the paired test."""
    lines = []
    header = (
        f"{'metric':<28}{'mr':>14}{'joypad':>14}"
        f"{'t':>9}{'df':>5}{'p':>9}"
    )
    lines.append(header)
    lines.append("-" * len(header))
    for metric, cols in report.summary.items():
        label = _METRIC_LABELS.get(metric, metric)
        mr = format_mean_sd(*cols["mr"])
        joy = format_mean_sd(*cols["joypad"])
        test = report.t_tests.get(metric)
        if test is not None:
            tail = f"{test.t_stat:>9.3f}{test.df:>5d}{test.p_two_sided:>9.4f}"
        elif metric in report.zero_variance:
            tail = f"{'zero variance':>23}"
        else:
            tail = f"{'n/a':>23}"
        lines.append(f"{label:<28}{mr:>14}{joy:>14}{tail}")
    if report.preferences:
        lines.append("")
        lines.append(f"{'preference':<28}{'mr':>14}{'joypad':>14}{'n':>9}")
        for qid, row in report.preferences.items():
            lines.append(
                f"{qid:<28}{row['mr']:>13.1f}%{row['joypad']:>13.1f}%{row['n']:>9d}"
            )
    return "\n".join(lines) + "\n"


def plot_rows(report: StudyReport) -> list:
    """Long-format rows (metric, modality, subject, value) for external
    plotting tools."""
    rows = []
    for metric, cols in report.paired.items():
        for m in MODALITY_VALUES:
            for subject, value in zip(cols["subjects"], cols[m]):
                rows.append((metric, m, subject, value))
    return rows


def plot_csv(report: StudyReport) -> str:
    lines = ["metric,modality,subject,value"]
    for metric, modality, subject, value in plot_rows(report):
        lines.append(f"{metric},{modality},{subject},{value!r}")
    return "\n".join(lines) + "\n"
