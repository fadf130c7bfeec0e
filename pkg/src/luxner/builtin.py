"""Loaders for the corpora shipped inside the package.

The gold benchmark is a 50-paragraph corpus of annotated excerpts from
shareholder letters, annual reports, and trade coverage; the few-shot file
holds the four worked examples used by the few-shot prompt.
"""

from __future__ import annotations

from functools import lru_cache
from importlib import resources
from pathlib import Path

from .corpus_io import Corpus, parse_inline_corpus
from .llm_bench import PromptSpec, render_annotated_example
from .taxonomy import Taxonomy, builtin_taxonomy


def data_path(name: str) -> Path:
    """Filesystem path of a packaged data file."""
    return Path(str(resources.files("luxner").joinpath("data", name)))


def _load_corpus(name: str, corpus_name: str) -> Corpus:
    text = data_path(name).read_text(encoding="utf-8")
    return parse_inline_corpus(text, builtin_taxonomy(), name=corpus_name)


@lru_cache(maxsize=1)
def benchmark_corpus() -> Corpus:
    """The 50-paragraph gold benchmark."""
    return _load_corpus("benchmark_gold.inline", "benchmark")


@lru_cache(maxsize=1)
def fewshot_documents() -> Corpus:
    """The four annotated few-shot example documents."""
    return _load_corpus("fewshot_examples.inline", "fewshot")


def fewshot_example_strings() -> tuple[str, ...]:
    """The four examples rendered in the annotated prompt style."""
    return tuple(render_annotated_example(doc) for doc in fewshot_documents())


def few_shot_spec(taxonomy: Taxonomy | None = None) -> PromptSpec:
    """Few-shot prompt spec preloaded with the built-in four examples."""
    return PromptSpec.few_shot(fewshot_example_strings(), taxonomy)
