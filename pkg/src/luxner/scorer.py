"""Strict entity-level scoring with per-label breakdowns plus token accuracy.

A predicted mention counts as a true positive only with identical character
boundaries and identical label. The 0/0 conventions: a ratio with a zero
denominator is 0.0 when the opposite mention set is non-empty and 1.0 when
both sets are empty, so self-scoring an empty label never drags averages
down. Micro metrics pool counts across labels and documents; macro F1 is the
unweighted mean over labels present in gold or predictions.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .annotation import Document, EntitySpan, TaggedSequence
from .corpus_io import Corpus
from .errors import DocIdMismatchError, LengthMismatchError, TextMismatchError

# A predicted mention with no real span (ungrounded or out-of-taxonomy model
# output) still costs a false positive; it is pooled under this row key.
UNMATCHABLE = "(unmatchable)"

Mention = tuple[int, int, str]  # start, end, canonical label name


@dataclass
class LabelCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    @property
    def support(self) -> int:
        return self.tp + self.fn

    @property
    def predicted(self) -> int:
        return self.tp + self.fp


@dataclass
class MatchCounts:
    per_label: dict[str, LabelCounts] = field(default_factory=dict)

    def label(self, name: str) -> LabelCounts:
        return self.per_label.setdefault(name, LabelCounts())

    def pooled(self) -> LabelCounts:
        total = LabelCounts()
        for c in self.per_label.values():
            total.tp += c.tp
            total.fp += c.fp
            total.fn += c.fn
        return total

    def merge(self, other: "MatchCounts") -> None:
        for name, c in other.per_label.items():
            mine = self.label(name)
            mine.tp += c.tp
            mine.fp += c.fp
            mine.fn += c.fn


@dataclass(frozen=True)
class LabelMetrics:
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    fn: int

    @property
    def support(self) -> int:
        return self.tp + self.fn


@dataclass(frozen=True)
class MetricsReport:
    per_label: dict[str, LabelMetrics]
    micro_precision: float
    micro_recall: float
    micro_f1: float
    macro_f1: float
    token_accuracy: float | None
    documents: int
    gold_mentions: int

    def as_dict(self) -> dict:
        return {
            "micro_precision": self.micro_precision,
            "micro_recall": self.micro_recall,
            "micro_f1": self.micro_f1,
            "macro_f1": self.macro_f1,
            "token_accuracy": self.token_accuracy,
            "documents": self.documents,
            "gold_mentions": self.gold_mentions,
            "per_label": {
                name: {
                    "precision": m.precision,
                    "recall": m.recall,
                    "f1": m.f1,
                    "tp": m.tp,
                    "fp": m.fp,
                    "fn": m.fn,
                    "support": m.support,
                }
                for name, m in sorted(self.per_label.items())
            },
        }


def _safe_ratio(numerator: int, denominator: int, other: int) -> float:
    if denominator > 0:
        return numerator / denominator
    return 1.0 if other == 0 else 0.0


def _f1(p: float, r: float) -> float:
    return 2 * p * r / (p + r) if (p + r) > 0 else 0.0


def metrics_from_counts(
    counts: MatchCounts, *, token_accuracy: float | None = None, documents: int = 0
) -> MetricsReport:
    """Derive ratios from raw counts; shared by corpus and benchmark scoring."""
    per_label: dict[str, LabelMetrics] = {}
    f1s = []
    for name in sorted(counts.per_label):
        c = counts.per_label[name]
        if c.support == 0 and c.predicted == 0:
            continue
        p = _safe_ratio(c.tp, c.predicted, c.support)
        r = _safe_ratio(c.tp, c.support, c.predicted)
        f = _f1(p, r)
        per_label[name] = LabelMetrics(precision=p, recall=r, f1=f, tp=c.tp, fp=c.fp, fn=c.fn)
        f1s.append(f)
    pooled = counts.pooled()
    micro_p = _safe_ratio(pooled.tp, pooled.predicted, pooled.support)
    micro_r = _safe_ratio(pooled.tp, pooled.support, pooled.predicted)
    micro_f = _f1(micro_p, micro_r)
    return MetricsReport(
        per_label=per_label,
        micro_precision=micro_p,
        micro_recall=micro_r,
        micro_f1=micro_f,
        macro_f1=sum(f1s) / len(f1s) if f1s else micro_f,
        token_accuracy=token_accuracy,
        documents=documents,
        gold_mentions=pooled.support,
    )


def count_matches(
    gold_spans: Iterable[EntitySpan],
    predicted: Iterable[Mention],
    counts: MatchCounts,
    extra_fp_labels: Iterable[str] = (),
) -> None:
    """Accumulate TP/FP/FN for one document into counts.

    Gold spans are consumed at most once each; document invariants make
    duplicate gold mentions impossible, but predictions may repeat.
    """
    remaining = {(s.start, s.end, s.label.canonical_name) for s in gold_spans}
    for span in gold_spans:
        counts.label(span.label.canonical_name)
    for mention in predicted:
        name = mention[2]
        if mention in remaining:
            remaining.discard(mention)
            counts.label(name).tp += 1
        else:
            counts.label(name).fp += 1
    for _, _, name in remaining:
        counts.label(name).fn += 1
    for name in extra_fp_labels:
        counts.label(name).fp += 1


def score_mention_sets(
    gold: Corpus,
    predicted: Mapping[str, Sequence[Mention]],
    *,
    extra_fp_labels: Mapping[str, Sequence[str]] | None = None,
    token_accuracy: float | None = None,
) -> MetricsReport:
    """Score arbitrary predicted mention sets keyed by doc_id against gold."""
    extra_fp_labels = extra_fp_labels or {}
    gold_ids = {d.doc_id for d in gold.documents}
    pred_ids = set(predicted)
    if gold_ids != pred_ids:
        raise DocIdMismatchError(
            missing=sorted(gold_ids - pred_ids), extra=sorted(pred_ids - gold_ids)
        )
    counts = MatchCounts()
    for doc in sorted(gold.documents, key=lambda d: d.doc_id):
        count_matches(
            doc.spans,
            predicted[doc.doc_id],
            counts,
            extra_fp_labels.get(doc.doc_id, ()),
        )
    return metrics_from_counts(
        counts, token_accuracy=token_accuracy, documents=len(gold.documents)
    )


def score_entities(gold: Corpus, predicted: Corpus) -> MetricsReport:
    """Strict-match entity scoring between two corpora over the same doc_ids."""
    mention_sets = {
        doc.doc_id: [(s.start, s.end, s.label.canonical_name) for s in doc.spans]
        for doc in predicted.documents
    }
    return score_mention_sets(gold, mention_sets)


def score_tokens(
    gold: Sequence[TaggedSequence], predicted: Sequence[TaggedSequence]
) -> float:
    """Fraction of aligned positions with identical tags (O included)."""
    if len(gold) != len(predicted):
        raise LengthMismatchError(
            f"{len(gold)} gold sequences vs {len(predicted)} predicted"
        )
    total = 0
    same = 0
    for index, (g, p) in enumerate(zip(gold, predicted)):
        if len(g.tags) != len(p.tags):
            raise LengthMismatchError(
                f"sequence {index}: {len(g.tags)} gold tags vs {len(p.tags)} predicted"
            )
        total += len(g.tags)
        same += sum(1 for a, b in zip(g.tags, p.tags) if a == b)
    return same / total if total else 1.0


class DiffKind(enum.Enum):
    TP = "TP"
    FP = "FP"
    FN = "FN"
    LABEL_ERROR = "LabelError"
    BOUNDARY_ERROR = "BoundaryError"


@dataclass(frozen=True)
class DiffEntry:
    kind: DiffKind
    gold: EntitySpan | None
    predicted: EntitySpan | None

    def anchor(self) -> int:
        span = self.gold or self.predicted
        return span.start if span else 0


def diff_entities(gold: Document, predicted: Document) -> list[DiffEntry]:
    """Classify every span pairing for error analysis.

    LabelError and BoundaryError refine FP/FN for reporting only; strict
    scoring still charges them as one FP plus one FN.
    """
    if gold.text != predicted.text:
        raise TextMismatchError(
            f"documents {gold.doc_id!r} and {predicted.doc_id!r} differ in text"
        )
    entries: list[DiffEntry] = []
    gold_left = list(gold.spans)
    pred_left = list(predicted.spans)

    def pair_off(kind: DiffKind, match) -> None:
        for g in list(gold_left):
            for p in list(pred_left):
                if match(g, p):
                    entries.append(DiffEntry(kind=kind, gold=g, predicted=p))
                    gold_left.remove(g)
                    pred_left.remove(p)
                    break

    pair_off(DiffKind.TP, lambda g, p: (g.start, g.end, g.label) == (p.start, p.end, p.label))
    pair_off(DiffKind.LABEL_ERROR, lambda g, p: (g.start, g.end) == (p.start, p.end))
    pair_off(
        DiffKind.BOUNDARY_ERROR,
        lambda g, p: g.label == p.label and g.overlaps(p),
    )
    entries.extend(DiffEntry(kind=DiffKind.FN, gold=g, predicted=None) for g in gold_left)
    entries.extend(DiffEntry(kind=DiffKind.FP, gold=None, predicted=p) for p in pred_left)
    entries.sort(key=lambda e: (e.anchor(), e.kind.value))
    return entries
