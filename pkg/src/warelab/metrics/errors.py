from ..errors import WarelabError


class MetricsError(WarelabError):
    pass


class MalformedLog(MetricsError):
    pass


class OutOfRangeItem(MetricsError):
    pass


class LengthMismatch(MetricsError):
    pass


class ZeroVariance(MetricsError):
    pass


class TooFewSamples(MetricsError):
    pass


class InvalidCounts(MetricsError):
    pass


class UnpairedSubject(MetricsError):
    pass


class QuestionnaireSchemaError(MetricsError):
    pass
