"""Annotated-document data model and the span <-> BIO tag codec.

Character offsets count Unicode scalar values, so "Hermès" spans 6 positions
regardless of encoding. All values are immutable; every operation is a pure
function.
"""

from __future__ import annotations

import enum
import logging
import unicodedata
from dataclasses import dataclass, field

from .errors import (
    BoundaryMismatchError,
    InvalidSequenceError,
    InvalidSpanError,
)
from .taxonomy import Label, Taxonomy

logger = logging.getLogger(__name__)


class BoundaryPolicy(enum.Enum):
    STRICT = "strict"
    EXPAND_TO_TOKEN = "expand"


class RepairMode(enum.Enum):
    ERROR = "error"
    STRAY_I_TO_B = "stray-i-to-b"


@dataclass(frozen=True)
class Token:
    text: str
    start: int
    end: int


@dataclass(frozen=True)
class EntitySpan:
    """A labeled character range; surface always equals the text slice."""

    start: int
    end: int
    label: Label
    surface: str

    def overlaps(self, other: "EntitySpan") -> bool:
        return self.start < other.end and other.start < self.end


@dataclass(frozen=True)
class BioTag:
    """One of O, B-<label>, I-<label>; label present iff kind is not O."""

    kind: str  # "O" | "B" | "I"
    label: Label | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("O", "B", "I"):
            raise ValueError(f"bad tag kind {self.kind!r}")
        if (self.label is None) != (self.kind == "O"):
            raise ValueError("label must be present exactly when kind is B or I")

    @classmethod
    def outside(cls) -> "BioTag":
        return cls("O")

    @classmethod
    def begin(cls, label: Label) -> "BioTag":
        return cls("B", label)

    @classmethod
    def inside(cls, label: Label) -> "BioTag":
        return cls("I", label)

    @classmethod
    def parse(cls, text: str, taxonomy: Taxonomy) -> "BioTag":
        if text == "O":
            return cls.outside()
        if len(text) > 2 and text[1] == "-" and text[0] in ("B", "I"):
            return cls(text[0], taxonomy.normalize(text[2:]))
        raise InvalidSequenceError(f"unparseable tag {text!r}")

    def __str__(self) -> str:
        if self.kind == "O":
            return "O"
        assert self.label is not None
        return f"{self.kind}-{self.label.canonical_name}"


@dataclass(frozen=True)
class TaggedSequence:
    """Aligned tokens and BIO tags for one document."""

    tokens: tuple[Token, ...]
    tags: tuple[BioTag, ...]

    def __post_init__(self) -> None:
        if len(self.tokens) != len(self.tags):
            raise InvalidSequenceError(
                f"{len(self.tokens)} tokens vs {len(self.tags)} tags"
            )

    def tag_strings(self) -> list[str]:
        return [str(t) for t in self.tags]


@dataclass(frozen=True)
class Document:
    """Text plus sorted, non-overlapping, non-O entity spans."""

    doc_id: str
    source: str
    text: str
    spans: tuple[EntitySpan, ...] = field(default=())

    def __post_init__(self) -> None:
        ordered = tuple(sorted(self.spans, key=lambda s: (s.start, s.end)))
        object.__setattr__(self, "spans", ordered)
        n = len(self.text)
        prev: EntitySpan | None = None
        for span in ordered:
            if not (0 <= span.start < span.end <= n):
                raise InvalidSpanError(
                    f"{self.doc_id}: span ({span.start}, {span.end}) out of bounds for text of length {n}"
                )
            if span.label.is_outside:
                raise InvalidSpanError(f"{self.doc_id}: span carries the O label")
            actual = self.text[span.start:span.end]
            if span.surface != actual:
                raise InvalidSpanError(
                    f"{self.doc_id}: surface {span.surface!r} != text slice {actual!r}"
                )
            if prev is not None and span.start < prev.end:
                raise InvalidSpanError(
                    f"{self.doc_id}: spans ({prev.start}, {prev.end}) and "
                    f"({span.start}, {span.end}) overlap"
                )
            prev = span


def make_span(text: str, start: int, end: int, label: Label) -> EntitySpan:
    """Span whose surface is taken from the text; bounds checked by Document."""
    return EntitySpan(start=start, end=end, label=label, surface=text[start:end])


def _is_word_char(ch: str) -> bool:
    cat = unicodedata.category(ch)
    # letters, decimal digits, and combining marks form word runs; everything
    # else non-space (punctuation, currency signs, superscripts) stands alone
    return cat.startswith("L") or cat == "Nd" or cat.startswith("M")


def tokenize(text: str) -> list[Token]:
    """Deterministic offset-preserving word/punctuation segmentation."""
    tokens: list[Token] = []
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch.isspace():
            i += 1
            continue
        if _is_word_char(ch):
            j = i + 1
            while j < n and _is_word_char(text[j]):
                j += 1
        else:
            j = i + 1
        tokens.append(Token(text=text[i:j], start=i, end=j))
        i = j
    return tokens


def _expand_to_tokens(span: EntitySpan, tokens: list[Token]) -> tuple[int, int]:
    """Widen span boundaries outward to enclosing token edges."""
    start, end = span.start, span.end
    for tok in tokens:
        if tok.start < start < tok.end:
            start = tok.start
        if tok.start < end < tok.end:
            end = tok.end
    return start, end


def encode_bio(
    doc: Document,
    tokens: list[Token] | None = None,
    boundary_policy: BoundaryPolicy = BoundaryPolicy.STRICT,
) -> TaggedSequence:
    """Project document spans onto per-token B/I/O tags (IOB2)."""
    if tokens is None:
        tokens = tokenize(doc.text)
    tags: list[BioTag] = [BioTag.outside()] * len(tokens)
    claimed: list[EntitySpan | None] = [None] * len(tokens)

    for span in doc.spans:
        start, end = span.start, span.end
        covered = [k for k, t in enumerate(tokens) if t.start >= start and t.end <= end]
        aligned = (
            covered
            and tokens[covered[0]].start == start
            and tokens[covered[-1]].end == end
        )
        if not aligned:
            if boundary_policy is BoundaryPolicy.STRICT:
                raise BoundaryMismatchError(
                    f"{doc.doc_id}: span ({start}, {end}) {span.surface!r} does not "
                    f"align to token boundaries"
                )
            start, end = _expand_to_tokens(span, tokens)
            covered = [k for k, t in enumerate(tokens) if t.start >= start and t.end <= end]
            if not covered:
                raise BoundaryMismatchError(
                    f"{doc.doc_id}: span ({span.start}, {span.end}) covers no token"
                )
            logger.warning(
                "%s: span (%d, %d) %r widened to token boundaries (%d, %d)",
                doc.doc_id, span.start, span.end, span.surface, start, end,
            )
        for pos, k in enumerate(covered):
            if claimed[k] is not None:
                raise BoundaryMismatchError(
                    f"{doc.doc_id}: token {tokens[k].text!r} claimed by two spans "
                    f"after widening"
                )
            claimed[k] = span
            tags[k] = BioTag.begin(span.label) if pos == 0 else BioTag.inside(span.label)
    return TaggedSequence(tokens=tuple(tokens), tags=tuple(tags))


def validate_iob(tags: list[BioTag] | tuple[BioTag, ...]) -> None:
    """Raise InvalidSequenceError unless every I-X follows B-X or I-X."""
    prev: BioTag | None = None
    for i, tag in enumerate(tags):
        if tag.kind == "I":
            ok = prev is not None and prev.kind in ("B", "I") and prev.label == tag.label
            if not ok:
                raise InvalidSequenceError(f"stray {tag} at position {i}")
        prev = tag


def decode_bio(seq: TaggedSequence, text: str) -> list[EntitySpan]:
    """Collapse B-X (I-X)* runs back into entity spans over the text."""
    validate_iob(seq.tags)
    spans: list[EntitySpan] = []
    run_start: int | None = None
    run_label: Label | None = None
    run_end = 0

    def flush() -> None:
        nonlocal run_start, run_label
        if run_start is not None and run_label is not None:
            spans.append(make_span(text, run_start, run_end, run_label))
        run_start = None
        run_label = None

    for tok, tag in zip(seq.tokens, seq.tags):
        if tag.kind == "B":
            flush()
            run_start, run_label, run_end = tok.start, tag.label, tok.end
        elif tag.kind == "I":
            run_end = tok.end
        else:
            flush()
    flush()
    return spans


def repair_iob(
    tags: list[BioTag] | tuple[BioTag, ...],
    mode: RepairMode = RepairMode.STRAY_I_TO_B,
) -> list[BioTag]:
    """Make a tag list IOB2-valid; stray I-X becomes B-X, or raise in ERROR mode."""
    if mode is RepairMode.ERROR:
        validate_iob(tags)
        return list(tags)
    repaired: list[BioTag] = []
    prev: BioTag | None = None
    for tag in tags:
        if tag.kind == "I":
            ok = prev is not None and prev.kind in ("B", "I") and prev.label == tag.label
            if not ok:
                tag = BioTag.begin(tag.label)  # type: ignore[arg-type]
        repaired.append(tag)
        prev = tag
    return repaired
