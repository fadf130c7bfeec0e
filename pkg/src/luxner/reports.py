"""Markdown report rendering plus machine-readable sidecar records.

Numbers render at 4 decimal places (round-half-even via IEEE formatting) so
reports can be diffed against reference tables.
"""

from __future__ import annotations

from .corpus_io import LabelHistogram
from .scorer import MetricsReport


def fmt(value: float) -> str:
    return f"{value:.4f}"


def stats_table(hist: LabelHistogram, title: str = "Corpus statistics") -> str:
    lines = [
        f"# {title}",
        "",
        f"Documents: {hist.documents}  ",
        f"Tokens: {hist.tokens}  ",
        f"Entity mentions: {hist.total_mentions()}  ",
        f"O tokens: {hist.tag_counts.get('O', 0)}",
        "",
        "| Label | Mentions |",
        "| --- | ---: |",
    ]
    ordered = sorted(hist.mention_counts.items(), key=lambda kv: (-kv[1], kv[0]))
    for name, count in ordered:
        lines.append(f"| {name} | {count} |")
    return "\n".join(lines) + "\n"


def metrics_report(report: MetricsReport, title: str = "Entity scoring report") -> str:
    lines = [
        f"# {title}",
        "",
        f"Documents: {report.documents}  ",
        f"Gold mentions: {report.gold_mentions}",
        "",
        "| Average | Precision | Recall | F1 |",
        "| --- | ---: | ---: | ---: |",
        f"| micro | {fmt(report.micro_precision)} | {fmt(report.micro_recall)} | {fmt(report.micro_f1)} |",
        f"| macro | - | - | {fmt(report.macro_f1)} |",
    ]
    if report.token_accuracy is not None:
        lines += ["", f"Token accuracy: {fmt(report.token_accuracy)}"]
    lines += [
        "",
        "## Per-label",
        "",
        "| Label | Precision | Recall | F1 | Support |",
        "| --- | ---: | ---: | ---: | ---: |",
    ]
    for name, m in sorted(report.per_label.items()):
        lines.append(
            f"| {name} | {fmt(m.precision)} | {fmt(m.recall)} | {fmt(m.f1)} | {m.support} |"
        )
    return "\n".join(lines) + "\n"


def metrics_sidecar(report: MetricsReport) -> list[dict]:
    records: list[dict] = [{
        "kind": "summary",
        "micro_precision": report.micro_precision,
        "micro_recall": report.micro_recall,
        "micro_f1": report.micro_f1,
        "macro_f1": report.macro_f1,
        "token_accuracy": report.token_accuracy,
        "documents": report.documents,
        "gold_mentions": report.gold_mentions,
    }]
    for name, m in sorted(report.per_label.items()):
        records.append({
            "kind": "label",
            "label": name,
            "precision": m.precision,
            "recall": m.recall,
            "f1": m.f1,
            "tp": m.tp,
            "fp": m.fp,
            "fn": m.fn,
            "support": m.support,
        })
    return records
