"""Exception types shared across the toolkit."""

from __future__ import annotations


class LuxnerError(Exception):
    """Base class for all toolkit errors."""


class UnknownLabelError(LuxnerError):
    """A label spelling could not be resolved against the taxonomy."""

    def __init__(self, raw: str) -> None:
        super().__init__(f"unknown label: {raw!r}")
        self.raw = raw


class InvalidSpanError(LuxnerError):
    """A span violates the document invariants (bounds, overlap, surface)."""


class BoundaryMismatchError(LuxnerError):
    """A span boundary falls strictly inside a token (strict encoding only)."""


class InvalidSequenceError(LuxnerError):
    """A tag sequence violates IOB2 validity."""


class InlineSyntaxError(LuxnerError):
    """Malformed inline annotation markup."""


class CorpusFormatError(LuxnerError):
    """A corpus file could not be parsed; carries location context."""

    def __init__(self, message: str, *, line: int | None = None, doc_id: str | None = None) -> None:
        where = []
        if line is not None:
            where.append(f"line {line}")
        if doc_id is not None:
            where.append(f"doc {doc_id!r}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)
        self.line = line
        self.doc_id = doc_id


class DocIdMismatchError(LuxnerError):
    """Gold and predicted corpora do not cover the same documents."""

    def __init__(self, missing: list[str], extra: list[str]) -> None:
        super().__init__(f"doc_id mismatch: missing={missing!r} extra={extra!r}")
        self.missing = missing
        self.extra = extra


class LengthMismatchError(LuxnerError):
    """Aligned tag sequences differ in length."""


class TextMismatchError(LuxnerError):
    """Two documents expected to share text do not."""


class EmptyHistogramError(LuxnerError):
    """No token counts available to derive class weights from."""


class TransportError(LuxnerError):
    """A model endpoint request failed after exhausting retries."""

    def __init__(self, message: str, *, attempts: int = 1) -> None:
        super().__init__(message)
        self.attempts = attempts


class CacheMissError(LuxnerError):
    """Replay mode was asked for a prompt absent from the response cache."""

    def __init__(self, key: str) -> None:
        super().__init__(f"replay cache has no entry for key {key}")
        self.key = key


class ConfigError(LuxnerError):
    """Invalid or incomplete runtime configuration."""
