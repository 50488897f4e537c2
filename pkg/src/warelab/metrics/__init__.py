from .errors import (
    InvalidCounts,
    LengthMismatch,
    MalformedLog,
    MetricsError,
    OutOfRangeItem,
    QuestionnaireSchemaError,
    TooFewSamples,
    UnpairedSubject,
    ZeroVariance,
)
from .eventlog import (
    EventKind,
    LogEvent,
    decode_line,
    decode_log,
    encode_line,
    encode_log,
    read_log,
    write_log,
)
from .questionnaires import (
    COMPARATIVE_IDS,
    STATEMENT_COUNT,
    SUS_ITEM_IDS,
    ComparativeAnswer,
    SubjectQuestionnaire,
    comparative_from_events,
    sus_from_events,
)
from .report import (
    METRIC_ORDER,
    SessionRecord,
    StudyReport,
    format_mean_sd,
    plot_csv,
    plot_rows,
    render_table,
    summarize_study,
)
from .stats import (
    TTestResult,
    mean_sd,
    paired_t_test,
    proportion,
    student_t_cdf,
    student_t_two_sided,
)
from .sus import SusResponse, sus_score
from .timings import SessionTimings, derive_timings

__all__ = [
    "COMPARATIVE_IDS",
    "ComparativeAnswer",
    "EventKind",
    "InvalidCounts",
    "LengthMismatch",
    "LogEvent",
    "METRIC_ORDER",
    "MalformedLog",
    "MetricsError",
    "OutOfRangeItem",
    "QuestionnaireSchemaError",
    "STATEMENT_COUNT",
    "SUS_ITEM_IDS",
    "SessionRecord",
    "SessionTimings",
    "StudyReport",
    "SubjectQuestionnaire",
    "SusResponse",
    "TTestResult",
    "TooFewSamples",
    "UnpairedSubject",
    "ZeroVariance",
    "comparative_from_events",
    "decode_line",
    "decode_log",
    "derive_timings",
    "encode_line",
    "encode_log",
    "format_mean_sd",
    "mean_sd",
    "paired_t_test",
    "plot_csv",
    "plot_rows",
    "proportion",
    "read_log",
    "render_table",
    "student_t_cdf",
    "student_t_two_sided",
    "summarize_study",
    "sus_from_events",
    "sus_score",
    "write_log",
]
