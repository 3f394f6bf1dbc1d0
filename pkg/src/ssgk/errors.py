"""Exception hierarchy. Argument errors use the builtin ``ValueError``."""


class SsgkError(Exception):
    """Base class for all library errors."""


class IngestionError(SsgkError):
    """A required dataset file is missing or unreadable."""


class GraphFormatError(SsgkError):
    """Malformed graph, dataset, catalog or vector file."""


class EstimationError(SsgkError):
    """A distribution cannot be estimated (e.g. all counts are zero)."""


class SamplingError(SsgkError):
    """The sampler ran out of its attempt budget."""

    def __init__(self, message, accepted=0):
        super().__init__(message)
        self.accepted = accepted


class ChainStateError(SsgkError):
    """Invalid operation on a Chinese-restaurant state (e.g. deleting from an empty restaurant)."""


class TrainingError(SsgkError):
    """The SVM cannot be trained on the given labels."""
