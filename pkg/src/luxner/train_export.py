"""Training-side exports: class weights for imbalanced losses and a
vocabulary-extension token list for tokenizer growth.

This module only produces data files for external fine-tuning stacks; it runs
no training. The reference hyperparameters written into export headers are
the defaults the weights were designed around.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from pathlib import Path

from .annotation import tokenize
from .corpus_io import Corpus, LabelHistogram
from .errors import EmptyHistogramError

REFERENCE_TRAINING_DEFAULTS = {
    "epochs": 10,
    "learning_rate": 5e-05,
    "train_batch_size": 32,
    "eval_batch_size": 32,
    "optimizer": "adam",
    "adam_betas": [0.9, 0.999],
    "adam_epsilon": 1e-08,
    "scheduler": "linear",
}

DEFAULT_VOCAB_LIMIT = 300


class WeightScheme:
    INVERSE_FREQUENCY = "inverse-frequency"
    BALANCED_MEAN = "balanced-mean"
    UNIFORM = "uniform"
    ALL = (INVERSE_FREQUENCY, BALANCED_MEAN, UNIFORM)


class WeightEncoding:
    PER_LABEL = "per-label"    # O plus one class per entity label
    PER_BIO_TAG = "per-bio-tag"  # O plus separate B-/I- classes
    ALL = (PER_LABEL, PER_BIO_TAG)


@dataclass(frozen=True)
class ClassWeights:
    weights: dict[str, float]
    counts: dict[str, int]
    scheme: str
    encoding: str
    zero_count_classes: tuple[str, ...]
    note: str


def _classes_from_histogram(hist: LabelHistogram, encoding: str) -> dict[str, int]:
    if encoding == WeightEncoding.PER_BIO_TAG:
        return dict(hist.tag_counts)
    merged: dict[str, int] = {}
    for tag, count in hist.tag_counts.items():
        name = tag if tag == "O" else tag[2:]
        merged[name] = merged.get(name, 0) + count
    return merged


def class_weights(
    hist: LabelHistogram,
    scheme: str = WeightScheme.INVERSE_FREQUENCY,
    encoding: str = WeightEncoding.PER_LABEL,
) -> ClassWeights:
    """Per-class loss weights from token tag counts.

    inverse-frequency: w_c = T / n_c.
    balanced-mean:     w_c = T / (K * n_c), rescaled so the frequency-weighted
                       mean over observed classes is exactly 1.
    uniform:           all 1.
    Zero-count classes get the maximum computed weight and are flagged,
    keeping every weight finite.
    """
    if scheme not in WeightScheme.ALL:
        raise ValueError(f"unknown scheme {scheme!r}")
    if encoding not in WeightEncoding.ALL:
        raise ValueError(f"unknown encoding {encoding!r}")
    counts = _classes_from_histogram(hist, encoding)
    total = sum(counts.values())
    if total == 0:
        raise EmptyHistogramError("histogram has no token counts")

    nonzero = {c: n for c, n in counts.items() if n > 0}
    zero = tuple(sorted(c for c, n in counts.items() if n == 0))
    k = len(nonzero)

    weights: dict[str, float] = {}
    if scheme == WeightScheme.UNIFORM:
        weights = {c: 1.0 for c in counts}
    else:
        for c, n in nonzero.items():
            w = total / n
            if scheme == WeightScheme.BALANCED_MEAN:
                w /= k
            weights[c] = w
        if scheme == WeightScheme.BALANCED_MEAN:
            fw_mean = sum(counts[c] * w for c, w in weights.items()) / total
            weights = {c: w / fw_mean for c, w in weights.items()}
        peak = max(weights.values())
        for c in zero:
            weights[c] = peak

    note = f"{scheme} over {encoding} classes; zero-count classes pinned to max weight"
    return ClassWeights(
        weights=weights,
        counts=counts,
        scheme=scheme,
        encoding=encoding,
        zero_count_classes=zero,
        note=note,
    )


def write_weights(cw: ClassWeights, path: str | Path) -> None:
    """Header record with provenance, then one (class, weight, count) record
    per line, class-sorted so files diff cleanly."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        header = {
            "scheme": cw.scheme,
            "encoding": cw.encoding,
            "note": cw.note,
            "zero_count_classes": list(cw.zero_count_classes),
            "reference_training_defaults": REFERENCE_TRAINING_DEFAULTS,
        }
        fh.write(json.dumps(header, ensure_ascii=False) + "\n")
        for name in sorted(cw.weights):
            record = {
                "class": name,
                "weight": cw.weights[name],
                "count": cw.counts.get(name, 0),
                "scheme": cw.scheme,
            }
            fh.write(json.dumps(record, ensure_ascii=False) + "\n")


@dataclass(frozen=True)
class TokenDiagnostic:
    token: str
    frequency: int
    in_entity: bool
    has_diacritic: bool
    scripts: tuple[str, ...]


@dataclass(frozen=True)
class VocabExtension:
    tokens: tuple[str, ...]
    limit: int
    diagnostics: tuple[TokenDiagnostic, ...]


def _has_diacritic(token: str) -> bool:
    decomposed = unicodedata.normalize("NFD", token)
    return any(unicodedata.combining(ch) for ch in decomposed)


def _scripts(token: str) -> tuple[str, ...]:
    found: list[str] = []
    for ch in token:
        name = unicodedata.name(ch, "")
        script = name.split()[0] if name else "UNKNOWN"
        if script in ("LATIN", "CYRILLIC", "GREEK", "CJK", "HIRAGANA", "KATAKANA",
                      "ARABIC", "HANGUL", "HEBREW", "DIGIT"):
            tag = script
        elif ch.isdigit():
            tag = "DIGIT"
        else:
            tag = "OTHER"
        if tag not in found:
            found.append(tag)
    return tuple(found)


def vocab_candidates(
    corpus: Corpus,
    base_vocab: set[str] | list[str],
    limit: int = DEFAULT_VOCAB_LIMIT,
) -> VocabExtension:
    """Rank corpus tokens absent from the base vocabulary: entity-internal
    tokens first, then by frequency, diacritics ahead of plain spellings,
    lexicographic last. Case-sensitive membership, deterministic output."""
    base = set(base_vocab)
    frequency: dict[str, int] = {}
    in_entity: dict[str, bool] = {}
    for doc in corpus.documents:
        tokens = tokenize(doc.text)
        for token in tokens:
            word = token.text
            if word in base:
                continue
            frequency[word] = frequency.get(word, 0) + 1
            inside = any(
                token.start >= s.start and token.end <= s.end for s in doc.spans
            )
            in_entity[word] = in_entity.get(word, False) or inside

    ranked = sorted(
        frequency,
        key=lambda w: (not in_entity[w], -frequency[w], not _has_diacritic(w), w),
    )
    chosen = ranked[: max(limit, 0)]
    diagnostics = tuple(
        TokenDiagnostic(
            token=w,
            frequency=frequency[w],
            in_entity=in_entity[w],
            has_diacritic=_has_diacritic(w),
            scripts=_scripts(w),
        )
        for w in chosen
    )
    return VocabExtension(tokens=tuple(chosen), limit=limit, diagnostics=diagnostics)


def write_vocab(ext: VocabExtension, path: str | Path, diagnostics_path: str | Path | None = None) -> None:
    Path(path).write_text(
        "".join(f"{t}\n" for t in ext.tokens), encoding="utf-8", newline="\n"
    )
    if diagnostics_path is not None:
        with open(diagnostics_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps({"limit": ext.limit, "selected": len(ext.tokens)}) + "\n")
            for d in ext.diagnostics:
                fh.write(json.dumps({
                    "token": d.token,
                    "frequency": d.frequency,
                    "in_entity": d.in_entity,
                    "has_diacritic": d.has_diacritic,
                    "scripts": list(d.scripts),
                }, ensure_ascii=False) + "\n")
