"""Batch command-line surface: validate, convert, stats, score, bench, export.

Exit codes: 0 success, 1 validation or scoring mismatch, 2 usage/config
error, 3 transport failure (live bench only).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

from . import builtin
from .annotation import RepairMode
from .corpus_io import (
    Corpus,
    corpus_stats,
    emit_columns_corpus,
    emit_inline_corpus,
    parse_columns,
    parse_inline_corpus,
    read_records,
    write_records,
)
from .errors import (
    CacheMissError,
    ConfigError,
    CorpusFormatError,
    DocIdMismatchError,
    LuxnerError,
    TransportError,
)
from .llm_bench import (
    BenchSettings,
    GroundingPolicy,
    PromptSpec,
    build_prompt,
    run_benchmark,
)
from .model_client import CachingClient, DecodingParams, HttpChatClient, ReplayClient, ResponseCache
from .reports import metrics_report, metrics_sidecar, stats_table
from .scorer import score_entities
from .train_export import (
    DEFAULT_VOCAB_LIMIT,
    WeightEncoding,
    WeightScheme,
    class_weights,
    vocab_candidates,
    write_vocab,
    write_weights,
)

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_TRANSPORT = 3

FORMATS = ("inline", "columns", "records")

_SUFFIX_FORMATS = {
    ".inline": "inline",
    ".columns": "columns",
    ".conll": "columns",
    ".tsv": "columns",
    ".jsonl": "records",
    ".records": "records",
}


@dataclass
class Config:
    base_url: str = ""
    model: str = ""
    api_key_env: str = "LUXNER_API_KEY"
    timeout: float = 60.0
    max_in_flight: int = 4
    cache_dir: str = ""
    case_insensitive_grounding: bool = True
    dedupe_mentions: bool = False

    def __post_init__(self) -> None:
        if self.max_in_flight < 1:
            raise ConfigError("max_in_flight must be >= 1")
        if self.timeout <= 0:
            raise ConfigError("timeout must be positive")


def load_config(path: str | None) -> Config:
    candidates = [path, os.environ.get("LUXNER_CONFIG"), "luxner.json"]
    chosen = next((c for c in candidates if c and Path(c).exists()), None)
    if chosen is None:
        if path:
            raise ConfigError(f"config file not found: {path}")
        return Config()
    try:
        raw = json.loads(Path(chosen).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {chosen} is not valid JSON: {exc}") from exc
    endpoint = raw.get("endpoint", {})
    grounding = raw.get("grounding", {})
    return Config(
        base_url=endpoint.get("base_url", ""),
        model=endpoint.get("model", ""),
        api_key_env=endpoint.get("api_key_env", "LUXNER_API_KEY"),
        timeout=float(endpoint.get("timeout", 60.0)),
        max_in_flight=int(endpoint.get("max_in_flight", 4)),
        cache_dir=raw.get("cache_dir", ""),
        case_insensitive_grounding=bool(grounding.get("case_insensitive", True)),
        dedupe_mentions=bool(grounding.get("dedupe", False)),
    )


def detect_format(path: str, explicit: str | None) -> str:
    if explicit:
        return explicit
    fmt = _SUFFIX_FORMATS.get(Path(path).suffix.lower())
    if fmt is None:
        raise ConfigError(
            f"cannot infer corpus format from {path!r}; pass --format"
        )
    return fmt


def read_corpus(path: str, fmt: str, repair: RepairMode = RepairMode.ERROR) -> Corpus:
    name = Path(path).stem
    if fmt == "records":
        return read_records(path, name=name)
    text = Path(path).read_text(encoding="utf-8")
    if fmt == "inline":
        return parse_inline_corpus(text, name=name)
    return parse_columns(text, name=name, repair=repair)


def write_corpus(corpus: Corpus, path: str, fmt: str) -> None:
    if fmt == "records":
        write_records(corpus, path)
        return
    if fmt == "inline":
        payload = emit_inline_corpus(corpus)
    else:
        payload = emit_columns_corpus(corpus)
    Path(path).write_text(payload, encoding="utf-8", newline="\n")


def _write_or_print(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    else:
        sys.stdout.write(text)


def _write_sidecar(records: list[dict], path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for record in records:
            fh.write(json.dumps(record, ensure_ascii=False, separators=(",", ":")) + "\n")


# --- commands ----------------------------------------------------------------


def cmd_validate(args: argparse.Namespace) -> int:
    failures = 0
    for path in args.paths:
        try:
            fmt = detect_format(path, args.format)
            corpus = read_corpus(path, fmt)
        except (LuxnerError, OSError) as exc:
            print(f"FAIL {path}: {exc}")
            failures += 1
            continue
        mentions = sum(len(d.spans) for d in corpus.documents)
        print(f"OK   {path}: {len(corpus.documents)} documents, {mentions} mentions")
    return EXIT_MISMATCH if failures else EXIT_OK


def cmd_convert(args: argparse.Namespace) -> int:
    corpus = read_corpus(
        args.input,
        detect_format(args.input, getattr(args, "from")),
        repair=RepairMode.STRAY_I_TO_B if args.repair else RepairMode.ERROR,
    )
    write_corpus(corpus, args.output, detect_format(args.output, args.to))
    print(f"wrote {args.output} ({len(corpus.documents)} documents)")
    return EXIT_OK


def cmd_stats(args: argparse.Namespace) -> int:
    corpus = read_corpus(args.path, detect_format(args.path, args.format))
    hist = corpus_stats(corpus)
    _write_or_print(stats_table(hist, title=f"Corpus statistics: {corpus.name}"), args.out)
    return EXIT_OK


def cmd_score(args: argparse.Namespace) -> int:
    gold = read_corpus(args.gold, detect_format(args.gold, args.format))
    predicted = read_corpus(args.predicted, detect_format(args.predicted, args.format))
    report = score_entities(gold, predicted)
    _write_or_print(metrics_report(report), args.out)
    if args.sidecar:
        _write_sidecar(metrics_sidecar(report), args.sidecar)
    return EXIT_OK


def _bench_spec(mode: str) -> PromptSpec:
    if mode == "zero":
        return PromptSpec.zero_shot()
    return builtin.few_shot_spec()


def cmd_bench(args: argparse.Namespace) -> int:
    config = load_config(args.config)
    corpus = read_corpus(args.corpus, detect_format(args.corpus, args.format))
    spec = _bench_spec(args.mode)
    docs = sorted(corpus.documents, key=lambda d: d.doc_id)

    if args.dry_run:
        if args.out_dir:
            out_dir = Path(args.out_dir)
            out_dir.mkdir(parents=True, exist_ok=True)
            for doc in docs:
                (out_dir / f"{doc.doc_id}.prompt.txt").write_text(
                    build_prompt(spec, doc.text), encoding="utf-8", newline="\n"
                )
            print(f"wrote {len(docs)} prompts to {out_dir}")
        else:
            for doc in docs:
                print(f"--- {doc.doc_id} ---")
                print(build_prompt(spec, doc.text))
        return EXIT_OK

    model_id = args.model or config.model
    if not model_id:
        raise ConfigError("no model id: pass --model or set endpoint.model in the config")
    cache_dir = args.cache_dir or config.cache_dir
    if args.replay:
        if not cache_dir:
            raise ConfigError("--replay needs --cache-dir (or cache_dir in the config)")
        client = ReplayClient(ResponseCache(cache_dir))
    else:
        if not config.base_url:
            raise ConfigError("live bench needs endpoint.base_url in the config")
        live = HttpChatClient(
            config.base_url, api_key_env=config.api_key_env, timeout=config.timeout
        )
        client = CachingClient(live, ResponseCache(cache_dir)) if cache_dir else live

    settings = BenchSettings(
        model_id=model_id,
        decoding=DecodingParams(temperature=args.temperature),
        max_in_flight=args.max_in_flight or config.max_in_flight,
        grounding=GroundingPolicy(
            allow_case_insensitive=config.case_insensitive_grounding,
            dedupe_mentions=config.dedupe_mentions,
        ),
    )
    run = run_benchmark(corpus, spec, client, settings)

    out_dir = Path(args.out_dir or "bench-out")
    out_dir.mkdir(parents=True, exist_ok=True)
    run.write_transcript(out_dir / "transcript.jsonl")
    title = f"Benchmark report: {run.model_id} ({run.mode})"
    (out_dir / "report.md").write_text(
        metrics_report(run.metrics, title=title), encoding="utf-8", newline="\n"
    )
    _write_sidecar(metrics_sidecar(run.metrics), str(out_dir / "report.jsonl"))
    print(metrics_report(run.metrics, title=title))

    failures = sum(1 for r in run.doc_results if r.parse_status.startswith("transport_error"))
    if failures:
        print(f"{failures} documents failed transport after retries", file=sys.stderr)
        return EXIT_TRANSPORT
    return EXIT_OK


def cmd_export(args: argparse.Namespace) -> int:
    corpus = read_corpus(args.corpus, detect_format(args.corpus, args.format))
    if args.what == "weights":
        hist = corpus_stats(corpus)
        cw = class_weights(hist, scheme=args.scheme, encoding=args.encoding)
        write_weights(cw, args.out)
        print(f"wrote {args.out} ({len(cw.weights)} classes, scheme={cw.scheme})")
    else:
        base = Path(args.base_vocab).read_text(encoding="utf-8").splitlines() if args.base_vocab else []
        ext = vocab_candidates(corpus, base, limit=args.limit)
        write_vocab(ext, args.out, args.diagnostics)
        print(f"wrote {args.out} ({len(ext.tokens)} tokens, limit={ext.limit})")
    return EXIT_OK


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="luxner",
        description="Luxury-domain NER corpora, scoring, and LLM benchmarking",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check corpus files against all invariants")
    p.add_argument("paths", nargs="+")
    p.add_argument("--format", choices=FORMATS)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("convert", help="convert between corpus formats")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--from", dest="from", choices=FORMATS)
    p.add_argument("--to", choices=FORMATS)
    p.add_argument("--repair", action="store_true",
                   help="repair stray I- tags when reading columns input")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("stats", help="label histogram for a corpus")
    p.add_argument("path")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--out")
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("score", help="strict entity-level scoring")
    p.add_argument("gold")
    p.add_argument("predicted")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--out")
    p.add_argument("--sidecar")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("bench", help="run the zero/few-shot benchmark")
    p.add_argument("corpus")
    p.add_argument("--mode", choices=("zero", "few"), default="zero")
    p.add_argument("--model", default="")
    group = p.add_mutually_exclusive_group()
    group.add_argument("--live", action="store_true")
    group.add_argument("--replay", action="store_true")
    group.add_argument("--dry-run", action="store_true")
    p.add_argument("--cache-dir", default="")
    p.add_argument("--out-dir", default="")
    p.add_argument("--config")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--temperature", type=float, default=0.0)
    p.add_argument("--max-in-flight", type=int, default=0)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("export", help="training-side artifacts")
    p.add_argument("what", choices=("weights", "vocab"))
    p.add_argument("corpus")
    p.add_argument("--format", choices=FORMATS)
    p.add_argument("--out", required=True)
    p.add_argument("--scheme", choices=WeightScheme.ALL, default=WeightScheme.INVERSE_FREQUENCY)
    p.add_argument("--encoding", choices=WeightEncoding.ALL, default=WeightEncoding.PER_LABEL)
    p.add_argument("--base-vocab")
    p.add_argument("--limit", type=int, default=DEFAULT_VOCAB_LIMIT)
    p.add_argument("--diagnostics")
    p.set_defaults(func=cmd_export)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TransportError as exc:
        print(f"transport error: {exc}", file=sys.stderr)
        return EXIT_TRANSPORT
    except (CorpusFormatError, DocIdMismatchError, CacheMissError, LuxnerError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    raise SystemExit(main())
