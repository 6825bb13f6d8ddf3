"""Exception hierarchy shared by every stage of the pipeline."""


class StabilityError(Exception):
    """Base class for all errors raised by this package."""


# ingestion
class IngestionError(StabilityError):
    pass


class SourceUnavailable(IngestionError):
    """Raised once the retry budget is exhausted on a transient failure."""


class AuthRequired(IngestionError):
    pass


class RepoNotFound(IngestionError):
    pass


class MalformedFixture(IngestionError):
    pass


class InvalidEventSet(IngestionError):
    pass


# metrics
class MetricError(StabilityError, ValueError):
    pass


class EmptyWindow(MetricError):
    pass


class ZeroMean(MetricError):
    """A series with zero mean has no defined coefficient of variation."""


class NoIssues(MetricError):
    pass


class NoPulls(MetricError):
    pass


class NoOpenItems(MetricError):
    pass


class EmptyInput(MetricError):
    pass


# index / calibration
class InvalidSigma(StabilityError, ValueError):
    pass


class InvalidWeights(StabilityError, ValueError):
    pass


class EmptyCohort(StabilityError, ValueError):
    pass


class InvalidSpec(StabilityError, ValueError):
    pass


class MalformedAnalysis(StabilityError, ValueError):
    pass
