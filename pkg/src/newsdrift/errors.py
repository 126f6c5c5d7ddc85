"""Exception types shared across the engine."""


class NewsdriftError(Exception):
    """Base class for all engine errors."""


class ConfigError(NewsdriftError):
    """Invalid run configuration or CLI arguments."""


class ValidationError(NewsdriftError):
    """An input record or value violates its declared contract."""


class CorpusError(NewsdriftError):
    """Fatal corpus problem, e.g. duplicate article ids."""


class MatchingError(NewsdriftError):
    """Profile matching could not produce any output."""


class YearEmptyError(NewsdriftError):
    """No articles available for the requested simulation year."""


class SchemaError(NewsdriftError):
    """Backend response did not conform to the expected schema.

    Carries the raw response text so callers can log or inspect it.
    """

    def __init__(self, message: str, raw: str = ""):
        super().__init__(message)
        self.raw = raw


class TransportError(NewsdriftError):
    """Remote backend unreachable after all retries."""


class ReplayError(NewsdriftError):
    """Replay log missing an entry required by the current run."""


class ResumeError(NewsdriftError):
    """Checkpoint cannot be resumed, e.g. config drift."""
