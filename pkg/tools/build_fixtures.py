#!/usr/bin/env python3
"""Regenerate the derived test fixtures.

- benchmark_histogram.json: label/tag counts over the gold benchmark,
  computed here by an independent regex/groupby walk (not the package's
  parser or tokenizer) so transcription and implementation drift is caught.
- golden_prompt_*.txt: frozen prompt bytes for the first benchmark passage.
- replay_cache/: a deterministic mock response cache for the whole benchmark,
  with deliberately varied response quality (fences, two-field objects,
  refusals, hallucinations).
- replay_expected.json: metrics for that cache computed by brute-force
  pair enumeration rather than the scorer's counting path.

Run from the repository root: python3 tools/build_fixtures.py
"""

from __future__ import annotations

import itertools
import json
import re
import shutil
import unicodedata
from pathlib import Path

from luxner import benchmark_corpus, build_prompt, ground, parse_response
from luxner.builtin import few_shot_spec
from luxner.llm_bench import PromptSpec
from luxner.model_client import cache_key
from luxner.taxonomy import builtin_taxonomy

ROOT = Path(__file__).resolve().parent.parent
TESTS_DATA = ROOT / "tests" / "data"
INLINE_FILE = ROOT / "src" / "luxner" / "data" / "benchmark_gold.inline"

REPLAY_MODEL_ID = "fixture-chat-v1"
REPLAY_TIMESTAMP = "2024-09-01T00:00:00Z"

ANNOTATION_RE = re.compile(r"\{([^{}|]+)\|([^{}|]+)\}")


# --- independent histogram ---------------------------------------------------


def _word_char(ch: str) -> bool:
    cat = unicodedata.category(ch)
    return cat.startswith("L") or cat == "Nd" or cat.startswith("M")


def count_tokens(text: str) -> int:
    total = 0
    for chunk in text.split():
        for is_word, run in itertools.groupby(chunk, key=_word_char):
            total += 1 if is_word else len(list(run))
    return total


def independent_histogram() -> dict:
    taxonomy = builtin_taxonomy()
    mention_counts = {l.canonical_name: 0 for l in taxonomy.entity_labels()}
    tag_counts = {"O": 0}
    for label in taxonomy.entity_labels():
        tag_counts[f"B-{label.canonical_name}"] = 0
        tag_counts[f"I-{label.canonical_name}"] = 0

    documents = 0
    tokens = 0
    for raw_line in INLINE_FILE.read_text(encoding="utf-8").splitlines():
        if raw_line.startswith("#| "):
            documents += 1
            continue
        if not raw_line.strip():
            continue
        doc_tokens = 0
        entity_tokens = 0
        plain = ANNOTATION_RE.sub(lambda m: m.group(1), raw_line)
        doc_tokens = count_tokens(plain)
        for match in ANNOTATION_RE.finditer(raw_line):
            surface, alias = match.group(1), match.group(2)
            canonical = taxonomy.normalize(alias).canonical_name
            mention_counts[canonical] += 1
            span_tokens = count_tokens(surface)
            tag_counts[f"B-{canonical}"] += 1
            tag_counts[f"I-{canonical}"] += span_tokens - 1
            entity_tokens += span_tokens
        tag_counts["O"] += doc_tokens - entity_tokens
        tokens += doc_tokens
    return {
        "documents": documents,
        "tokens": tokens,
        "mention_counts": mention_counts,
        "tag_counts": tag_counts,
    }


# --- prompt goldens ----------------------------------------------------------


def write_prompt_goldens() -> None:
    corpus = benchmark_corpus()
    passage = sorted(corpus.documents, key=lambda d: d.doc_id)[0].text
    zero = build_prompt(PromptSpec.zero_shot(), passage)
    few = build_prompt(few_shot_spec(), passage)
    (TESTS_DATA / "golden_prompt_zero_shot.txt").write_text(zero, encoding="utf-8")
    (TESTS_DATA / "golden_prompt_few_shot.txt").write_text(few, encoding="utf-8")


# --- replay cache ------------------------------------------------------------


def _gold_pairs(doc) -> list[tuple[str, str]]:
    return [(s.surface, s.label.display_name) for s in doc.spans]


def _quote(value: str) -> str:
    return "'" + value.replace("'", "\\'") + "'"


def make_response(index: int, doc) -> str:
    pairs = _gold_pairs(doc)
    if index % 17 == 10:
        return "I'm sorry, I cannot identify any entities in this passage."
    if index % 17 == 5:
        pairs = pairs[:-1] + [("Luxury", "Brandz")]
    if index % 13 == 9:
        pairs = pairs + [("Paris Fashion Group", "Listed Group")]
    if index % 10 == 3:
        body = json.dumps([{name: label} for name, label in pairs], ensure_ascii=False)
        return f"Here are the extracted entities:\n```json\n{body}\n```\nLet me know if you need more."
    if index % 10 == 7:
        items = ", ".join(
            "{" + f"'Entity Name': {_quote(n)}, 'Entity Label': {_quote(l)}" + "}"
            for n, l in pairs
        )
        return f"[{items}]"
    if not pairs:
        return "[]"
    items = ", ".join("{" + f"{_quote(n)}: {_quote(l)}" + "}" for n, l in pairs)
    return f"[{items}]"


def oracle_ratio(num: int, den: int, other: int) -> float:
    if den > 0:
        return num / den
    return 1.0 if other == 0 else 0.0


def build_replay_fixture() -> dict:
    taxonomy = builtin_taxonomy()
    corpus = benchmark_corpus()
    docs = sorted(corpus.documents, key=lambda d: d.doc_id)
    spec = PromptSpec.zero_shot()
    cache_dir = TESTS_DATA / "replay_cache"
    if cache_dir.exists():
        shutil.rmtree(cache_dir)
    cache_dir.mkdir(parents=True)

    per_label: dict[str, dict[str, int]] = {}

    def bucket(name: str) -> dict[str, int]:
        return per_label.setdefault(name, {"tp": 0, "fp": 0, "fn": 0})

    for index, doc in enumerate(docs):
        prompt = build_prompt(spec, doc.text)
        response = make_response(index, doc)
        key = cache_key(REPLAY_MODEL_ID, prompt)
        record = {
            "key": key,
            "model_id": REPLAY_MODEL_ID,
            "prompt_sha256": __import__("hashlib").sha256(prompt.encode()).hexdigest(),
            "response": response,
            "captured_at": REPLAY_TIMESTAMP,
        }
        (cache_dir / f"{key}.json").write_text(
            json.dumps(record, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )

        # brute-force enumeration of exact matches, independent of the scorer
        parsed = parse_response(response, taxonomy)
        grounded = ground(parsed.predictions, doc.text)
        gold = [(s.start, s.end, s.label.canonical_name) for s in doc.spans]
        unused = list(gold)
        for g in grounded:
            if g.span is None:
                name = g.origin.label.canonical_name if g.origin.label else "(unmatchable)"
                bucket(name)["fp"] += 1
                continue
            identity = (g.span.start, g.span.end, g.span.label.canonical_name)
            matched = False
            for candidate in unused:
                if candidate == identity:
                    unused.remove(candidate)
                    bucket(identity[2])["tp"] += 1
                    matched = True
                    break
            if not matched:
                bucket(identity[2])["fp"] += 1
        for _, _, name in unused:
            bucket(name)["fn"] += 1

    tp = sum(c["tp"] for c in per_label.values())
    fp = sum(c["fp"] for c in per_label.values())
    fn = sum(c["fn"] for c in per_label.values())
    precision = oracle_ratio(tp, tp + fp, tp + fn)
    recall = oracle_ratio(tp, tp + fn, tp + fp)
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    f1s = []
    for name, c in sorted(per_label.items()):
        if c["tp"] + c["fp"] + c["fn"] == 0:
            continue
        p = oracle_ratio(c["tp"], c["tp"] + c["fp"], c["tp"] + c["fn"])
        r = oracle_ratio(c["tp"], c["tp"] + c["fn"], c["tp"] + c["fp"])
        f1s.append(2 * p * r / (p + r) if p + r else 0.0)
    return {
        "model_id": REPLAY_MODEL_ID,
        "documents": len(docs),
        "per_label": {k: per_label[k] for k in sorted(per_label)},
        "micro_precision": precision,
        "micro_recall": recall,
        "micro_f1": f1,
        "macro_f1": sum(f1s) / len(f1s),
    }


def main() -> None:
    TESTS_DATA.mkdir(parents=True, exist_ok=True)
    histogram = independent_histogram()
    (TESTS_DATA / "benchmark_histogram.json").write_text(
        json.dumps(histogram, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"histogram: {histogram['documents']} docs, {histogram['tokens']} tokens, "
          f"{sum(histogram['mention_counts'].values())} mentions")
    write_prompt_goldens()
    print("prompt goldens written")
    expected = build_replay_fixture()
    (TESTS_DATA / "replay_expected.json").write_text(
        json.dumps(expected, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"replay fixture: micro F1 {expected['micro_f1']:.4f}")


if __name__ == "__main__":
    main()
