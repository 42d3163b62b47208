"""Exception types shared across the analysis pipeline."""


class BloomgateError(Exception):
    """Base class for all package errors."""


# --- ingest ---

class UnsupportedFormat(BloomgateError):
    pass


class EmptyDocument(BloomgateError):
    pass


class MalformedInput(BloomgateError):
    pass


# --- classification / features ---

class EmptyQuestion(BloomgateError):
    pass


class LexiconFormatError(BloomgateError):
    """Raised when a verb lexicon file violates the format contract.

    Carries the 1-based line number of the offending entry when known.
    """

    def __init__(self, message: str, line_no: int | None = None):
        super().__init__(message)
        self.line_no = line_no


class EmptyCorpus(BloomgateError):
    pass


class DimensionMismatch(BloomgateError):
    pass


class ZeroVector(BloomgateError):
    pass


# --- providers / judge ---

class ProviderUnavailable(BloomgateError):
    pass


class NoScoreFound(BloomgateError):
    pass


class JudgeUnparseable(BloomgateError):
    pass


# --- fusion / analytics ---

class NoSignals(BloomgateError):
    pass


class OutOfRange(BloomgateError):
    pass


class EmptyList(BloomgateError):
    pass


class EmptyAnalysis(BloomgateError):
    pass


# --- store ---

class DuplicateId(BloomgateError):
    pass


class NotFound(BloomgateError):
    pass


class StorageFailure(BloomgateError):
    pass


# --- config ---

class ConfigError(BloomgateError):
    pass
