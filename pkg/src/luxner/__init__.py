"""Entity-annotation toolkit and LLM benchmark harness for luxury-domain NER."""

from .annotation import (
    BioTag,
    BoundaryPolicy,
    Document,
    EntitySpan,
    RepairMode,
    TaggedSequence,
    Token,
    decode_bio,
    encode_bio,
    make_span,
    repair_iob,
    tokenize,
    validate_iob,
)
from .builtin import benchmark_corpus, few_shot_spec, fewshot_documents
from .corpus_io import (
    Corpus,
    LabelHistogram,
    corpus_stats,
    emit_columns,
    emit_inline,
    emit_inline_corpus,
    parse_columns,
    parse_inline,
    parse_inline_corpus,
    read_records,
    write_records,
)
from .llm_bench import (
    BenchRun,
    BenchSettings,
    GroundingPolicy,
    PromptMode,
    PromptSpec,
    build_prompt,
    ground,
    parse_response,
    render_annotated_example,
    run_benchmark,
)
from .model_client import (
    CachingClient,
    DecodingParams,
    HttpChatClient,
    MockClient,
    ReplayClient,
    ResponseCache,
)
from .scorer import (
    MetricsReport,
    diff_entities,
    score_entities,
    score_mention_sets,
    score_tokens,
)
from .taxonomy import Label, Taxonomy, Tier, builtin_taxonomy, normalize_label, prompt_display_names
from .train_export import class_weights, vocab_candidates

__version__ = "0.1.0"
