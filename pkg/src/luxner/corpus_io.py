"""Corpus containers, the three exchange formats, and corpus statistics.

Formats:
  inline   human-auditable markup: plain text with ``{surface|Label}``
           annotations; a corpus file prefixes each document with a
           ``#| doc_id | source`` header line.
  columns  token-per-line ``token<TAB>tag`` with a blank line between
           documents; lossy on inter-token whitespace (single-space joins).
  records  JSON record per line; the canonical lossless persistence format,
           bit-stable so emitted files are diffable.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
import json

from .annotation import (
    BioTag,
    BoundaryPolicy,
    Document,
    RepairMode,
    Token,
    decode_bio,
    encode_bio,
    make_span,
    repair_iob,
    tokenize,
    TaggedSequence,
)
from .errors import CorpusFormatError, InlineSyntaxError, InvalidSpanError
from .taxonomy import Taxonomy, builtin_taxonomy


@dataclass(frozen=True)
class Corpus:
    name: str
    documents: tuple[Document, ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for doc in self.documents:
            if doc.doc_id in seen:
                raise CorpusFormatError(f"duplicate doc_id {doc.doc_id!r}")
            seen.add(doc.doc_id)

    def __len__(self) -> int:
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)

    def by_id(self) -> dict[str, Document]:
        return {d.doc_id: d for d in self.documents}


@dataclass
class LabelHistogram:
    """Mention counts per label plus token-level tag counts (including O)."""

    mention_counts: dict[str, int] = field(default_factory=dict)
    tag_counts: dict[str, int] = field(default_factory=dict)
    documents: int = 0
    tokens: int = 0

    def total_mentions(self) -> int:
        return sum(self.mention_counts.values())

    def __add__(self, other: "LabelHistogram") -> "LabelHistogram":
        mentions = Counter(self.mention_counts)
        mentions.update(other.mention_counts)
        tags = Counter(self.tag_counts)
        tags.update(other.tag_counts)
        return LabelHistogram(
            mention_counts=dict(mentions),
            tag_counts=dict(tags),
            documents=self.documents + other.documents,
            tokens=self.tokens + other.tokens,
        )


# --- inline format ----------------------------------------------------------

_ESCAPABLE = "\\{}"


def _unescape(raw: str) -> str:
    out = []
    i = 0
    while i < len(raw):
        ch = raw[i]
        if ch == "\\" and i + 1 < len(raw) and raw[i + 1] in _ESCAPABLE:
            out.append(raw[i + 1])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def _escape(text: str) -> str:
    out = []
    for ch in text:
        if ch in _ESCAPABLE:
            out.append("\\")
        out.append(ch)
    return "".join(out)


def parse_inline(
    markup: str,
    taxonomy: Taxonomy | None = None,
    *,
    doc_id: str = "inline",
    source: str = "",
) -> Document:
    """Parse ``{surface|Label}`` markup into a Document with derived offsets."""
    taxonomy = taxonomy or builtin_taxonomy()
    text_parts: list[str] = []
    length = 0
    spans = []
    i = 0
    n = len(markup)
    while i < n:
        ch = markup[i]
        if ch == "\\" and i + 1 < n and markup[i + 1] in _ESCAPABLE:
            text_parts.append(markup[i + 1])
            length += 1
            i += 2
        elif ch == "{":
            j = i + 1
            depth_content = []
            while j < n:
                cj = markup[j]
                if cj == "\\" and j + 1 < n and markup[j + 1] in _ESCAPABLE:
                    depth_content.append(markup[j:j + 2])
                    j += 2
                    continue
                if cj == "}":
                    break
                if cj == "{":
                    raise InlineSyntaxError(f"{doc_id}: nested '{{' at offset {j}")
                depth_content.append(cj)
                j += 1
            if j >= n:
                raise InlineSyntaxError(f"{doc_id}: unclosed '{{' at offset {i}")
            content = "".join(depth_content)
            if "|" not in content:
                raise InlineSyntaxError(f"{doc_id}: annotation missing '|' at offset {i}")
            raw_surface, raw_label = content.rsplit("|", 1)
            surface = _unescape(raw_surface)
            if not surface:
                raise InlineSyntaxError(f"{doc_id}: empty surface at offset {i}")
            label = taxonomy.normalize(raw_label.strip())
            spans.append((length, length + len(surface), label, surface))
            text_parts.append(surface)
            length += len(surface)
            i = j + 1
        elif ch == "}":
            raise InlineSyntaxError(f"{doc_id}: unbalanced '}}' at offset {i}")
        else:
            text_parts.append(ch)
            length += 1
            i += 1
    text = "".join(text_parts)
    return Document(
        doc_id=doc_id,
        source=source,
        text=text,
        spans=tuple(
            make_span(text, s, e, label) for s, e, label, _ in spans
        ),
    )


def emit_inline(doc: Document) -> str:
    """Inverse of parse_inline; lossless including whitespace."""
    out = []
    pos = 0
    for span in doc.spans:
        out.append(_escape(doc.text[pos:span.start]))
        out.append("{" + _escape(span.surface) + "|" + span.label.canonical_name + "}")
        pos = span.end
    out.append(_escape(doc.text[pos:]))
    return "".join(out)


_HEADER_PREFIX = "#| "


def parse_inline_corpus(
    text: str,
    taxonomy: Taxonomy | None = None,
    *,
    name: str = "corpus",
) -> Corpus:
    """Parse a multi-document inline file (``#| doc_id | source`` headers)."""
    docs: list[Document] = []
    header: tuple[str, str, int] | None = None
    body: list[str] = []

    def flush() -> None:
        if header is None:
            return
        doc_id, source, lineno = header
        if body and body[-1] == "":  # blank separator emitted between documents
            body.pop()
        markup = "\n".join(body)
        try:
            docs.append(parse_inline(markup, taxonomy, doc_id=doc_id, source=source))
        except (InlineSyntaxError, InvalidSpanError) as exc:
            raise CorpusFormatError(str(exc), line=lineno, doc_id=doc_id) from exc

    for lineno, line in enumerate(text.splitlines(), 1):
        if line.startswith(_HEADER_PREFIX):
            flush()
            rest = line[len(_HEADER_PREFIX):]
            if " | " in rest:
                doc_id, source = rest.split(" | ", 1)
            else:
                doc_id, source = rest, ""
            doc_id = doc_id.strip()
            if not doc_id:
                raise CorpusFormatError("empty doc_id in header", line=lineno)
            header = (doc_id, source, lineno)
            body = []
        else:
            if header is None:
                if line.strip():
                    raise CorpusFormatError("content before first document header", line=lineno)
                continue
            body.append(line)
    flush()
    return Corpus(name=name, documents=tuple(docs))


def emit_inline_corpus(corpus: Corpus) -> str:
    lines = []
    for doc in corpus.documents:
        if "|" in doc.doc_id:
            raise CorpusFormatError(f"doc_id {doc.doc_id!r} may not contain '|'")
        for text_line in doc.text.splitlines():
            if text_line.startswith(_HEADER_PREFIX.rstrip()):
                raise CorpusFormatError(
                    "document text line collides with header prefix", doc_id=doc.doc_id
                )
        if doc.text.endswith("\n"):
            raise CorpusFormatError(
                "inline container cannot represent trailing newline", doc_id=doc.doc_id
            )
        lines.append(f"{_HEADER_PREFIX}{doc.doc_id} | {doc.source}")
        lines.append(emit_inline(doc))
        lines.append("")
    return "\n".join(lines)


# --- columns format ---------------------------------------------------------


def emit_columns(
    doc: Document,
    boundary_policy: BoundaryPolicy = BoundaryPolicy.STRICT,
) -> str:
    """One ``token<TAB>tag`` line per token, ending with a newline."""
    seq = encode_bio(doc, boundary_policy=boundary_policy)
    return "".join(f"{tok.text}\t{tag}\n" for tok, tag in zip(seq.tokens, seq.tags))


def emit_columns_corpus(
    corpus: Corpus,
    boundary_policy: BoundaryPolicy = BoundaryPolicy.STRICT,
) -> str:
    blocks = [emit_columns(doc, boundary_policy) for doc in corpus.documents]
    return "\n".join(blocks)


def parse_columns(
    text: str,
    taxonomy: Taxonomy | None = None,
    *,
    name: str = "columns",
    repair: RepairMode = RepairMode.ERROR,
) -> Corpus:
    """Rebuild documents from column blocks; text uses single-space joins."""
    taxonomy = taxonomy or builtin_taxonomy()
    docs: list[Document] = []
    block: list[tuple[str, str, int]] = []

    def flush() -> None:
        if not block:
            return
        index = len(docs) + 1
        doc_id = f"{name}-{index:04d}"
        words = [w for w, _, _ in block]
        tokens: list[Token] = []
        pos = 0
        for w in words:
            tokens.append(Token(text=w, start=pos, end=pos + len(w)))
            pos += len(w) + 1
        reconstructed = " ".join(words)
        first_line = block[0][2]
        try:
            tags = [BioTag.parse(t, taxonomy) for _, t, _ in block]
            tags = repair_iob(tags, repair)
            seq = TaggedSequence(tokens=tuple(tokens), tags=tuple(tags))
            spans = decode_bio(seq, reconstructed)
        except Exception as exc:
            raise CorpusFormatError(str(exc), line=first_line, doc_id=doc_id) from exc
        docs.append(Document(
            doc_id=doc_id, source="columns import", text=reconstructed, spans=tuple(spans)
        ))
        block.clear()

    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            flush()
            continue
        parts = line.split("\t")
        if len(parts) != 2 or not parts[0]:
            raise CorpusFormatError("expected 'token<TAB>tag'", line=lineno)
        block.append((parts[0], parts[1], lineno))
    flush()
    return Corpus(name=name, documents=tuple(docs))


# --- records format ---------------------------------------------------------


def write_records(corpus: Corpus, path: str | Path) -> None:
    """One JSON object per line; stable field order, compact separators."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in corpus.documents:
            record = {
                "doc_id": doc.doc_id,
                "source": doc.source,
                "text": doc.text,
                "spans": [[s.start, s.end, s.label.canonical_name] for s in doc.spans],
            }
            fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")))
            fh.write("\n")


def read_records(
    path: str | Path,
    taxonomy: Taxonomy | None = None,
    *,
    name: str | None = None,
) -> Corpus:
    taxonomy = taxonomy or builtin_taxonomy()
    path = Path(path)
    docs: list[Document] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"bad JSON: {exc.msg}", line=lineno) from exc
            try:
                doc_id = record["doc_id"]
                text = record["text"]
                spans = tuple(
                    make_span(text, int(s), int(e), taxonomy.normalize(lab))
                    for s, e, lab in record.get("spans", ())
                )
                docs.append(Document(
                    doc_id=doc_id,
                    source=record.get("source", ""),
                    text=text,
                    spans=spans,
                ))
            except (KeyError, TypeError, ValueError) as exc:
                raise CorpusFormatError(f"bad record: {exc}", line=lineno) from exc
            except InvalidSpanError as exc:
                raise CorpusFormatError(
                    f"invalid spans: {exc}", line=lineno, doc_id=record.get("doc_id")
                ) from exc
    return Corpus(name=name or path.stem, documents=tuple(docs))


# --- statistics -------------------------------------------------------------


def corpus_stats(
    corpus: Corpus,
    taxonomy: Taxonomy | None = None,
    boundary_policy: BoundaryPolicy = BoundaryPolicy.STRICT,
) -> LabelHistogram:
    """Mention counts per label plus token tag counts; zero-seeded over the
    full taxonomy so reports and class weights cover every class."""
    taxonomy = taxonomy or builtin_taxonomy()
    mentions: Counter[str] = Counter()
    tags: Counter[str] = Counter()
    for label in taxonomy.entity_labels():
        mentions[label.canonical_name] = 0
        tags[f"B-{label.canonical_name}"] = 0
        tags[f"I-{label.canonical_name}"] = 0
    tags["O"] = 0

    tokens = 0
    for doc in corpus.documents:
        seq = encode_bio(doc, boundary_policy=boundary_policy)
        tokens += len(seq.tokens)
        for span in doc.spans:
            mentions[span.label.canonical_name] += 1
        for tag in seq.tags:
            tags[str(tag)] += 1
    return LabelHistogram(
        mention_counts=dict(mentions),
        tag_counts=dict(tags),
        documents=len(corpus.documents),
        tokens=tokens,
    )
