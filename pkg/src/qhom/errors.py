"""Exception types shared across the package."""

from __future__ import annotations


class FormatError(ValueError):
    """Malformed input: a matrix literal, window file, or spec payload."""


class PreconditionError(ValueError):
    """An operation was called outside its stated contract."""


class HypothesisError(PreconditionError):
    """A reduction hypothesis failed; records which condition and where.

    ``condition`` is 1 (periodicity), 2 (palindromicity) or 3 (cancellation);
    ``index`` is the sequence position at which the check failed.
    """

    def __init__(self, condition: int, index: int | None, message: str):
        super().__init__(message)
        self.condition = condition
        self.index = index


class CertificationError(RuntimeError):
    """A result failed its own certification re-check."""


class NotQuasihomError(Exception):
    """The window violates the required defect bound.

    Carries the defect report (with witness pair) when the failure came from
    a direct defect scan; ``report`` is None when detection failed for a
    different reason (see the message).
    """

    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class InconclusiveWindowError(Exception):
    """The window is too small to finish structure detection."""

    def __init__(self, m: int, required_n: int):
        super().__init__(
            f"window too small: first index with three independent lines is "
            f"m = {m}, need radius N >= {required_n}"
        )
        self.m = m
        self.required_n = required_n
