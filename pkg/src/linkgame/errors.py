"""Exception types shared across the engine."""


class LinkGameError(Exception):
    """Base class for all engine errors."""

    code = "error"

    def __init__(self, message: str):
        super().__init__(message)
        self.message = message


class UnknownIdError(LinkGameError):
    """A referenced resource, predicate, link, task, player or round id does not exist."""

    code = "unknown-id"


class DuplicateError(LinkGameError):
    """Insertion would violate a uniqueness constraint."""

    code = "duplicate"


class DomainError(LinkGameError):
    """A numeric argument is outside its allowed domain."""

    code = "domain"


class UnknownCandidateError(LinkGameError):
    """The selected resource is not among the task's candidates."""

    code = "unknown-candidate"


class StaleTaskError(LinkGameError):
    """The task was already solved and retired from play."""

    code = "stale-task"


class DoubleFinalizeError(LinkGameError):
    """The round has already been finalized."""

    code = "double-finalize"


class ActiveRoundExistsError(LinkGameError):
    """The player already has an active round."""

    code = "active-round-exists"


class RoundClosedError(LinkGameError):
    """The round is not accepting answers."""

    code = "round-closed"


class DuplicateAnswerError(LinkGameError):
    """The task was already answered in this round."""

    code = "duplicate-answer"


class UnknownTaskError(LinkGameError):
    """The task is not part of the round's plan."""

    code = "unknown-task"


class DeadlinePassedError(LinkGameError):
    """The timed round's deadline has passed."""

    code = "deadline-passed"


class InconsistentLogError(LinkGameError):
    """The answer log references rounds or tasks that were never recorded."""

    code = "inconsistent-log"


class FixtureValidationError(LinkGameError):
    """A fixture document failed validation; nothing was inserted.

    ``diagnostics`` holds one entry per offending row:
    ``{"section": ..., "index": ..., "error": ...}``.
    """

    code = "fixture-validation"

    def __init__(self, message: str, diagnostics: list[dict] | None = None):
        super().__init__(message)
        self.diagnostics = diagnostics or []


class RetryExhaustedError(LinkGameError):
    """A transactional update kept conflicting and gave up."""

    code = "retry-exhausted"
