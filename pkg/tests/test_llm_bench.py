from __future__ import annotations

import json
import random
from pathlib import Path

import pytest

from luxner.builtin import few_shot_spec, fewshot_documents
from luxner.corpus_io import Corpus
from luxner.errors import CacheMissError, ConfigError, TransportError
from luxner.llm_bench import (
    BenchSettings,
    GroundingNote,
    GroundingPolicy,
    PromptMode,
    PromptSpec,
    RawPrediction,
    build_prompt,
    ground,
    parse_response,
    render_annotated_example,
    run_benchmark,
)
from luxner.model_client import (
    CachingClient,
    DecodingParams,
    HttpChatClient,
    MockClient,
    ReplayClient,
    ResponseCache,
)

DATA_DIR = Path(__file__).parent / "data"


class TestBuildPrompt:
    def test_zero_shot_opening(self):
        prompt = build_prompt(PromptSpec.zero_shot(), "some passage")
        assert prompt.startswith(
            "Given entity label set: ['Location', 'Event', 'Monetary Value', 'Date', "
        )

    def test_empty_list_sentence_present(self):
        prompt = build_prompt(PromptSpec.zero_shot(), "p")
        assert (
            "If there is no entity in the text, return the following empty list: []."
            in prompt
        )

    def test_json_format_sentence_present(self):
        prompt = build_prompt(PromptSpec.zero_shot(), "p")
        assert "provide answer in the following JSON format: [{'Entity Name': 'Entity Label'}]" in prompt

    def test_few_shot_connector_appears_once(self):
        prompt = build_prompt(few_shot_spec(), "p")
        assert prompt.count("Please found below four example:") == 1

    def test_few_shot_includes_examples_verbatim(self):
        spec = few_shot_spec()
        prompt = build_prompt(spec, "p")
        for example in spec.examples:
            assert example in prompt

    def test_deterministic(self):
        spec = few_shot_spec()
        assert build_prompt(spec, "same passage") == build_prompt(spec, "same passage")

    def test_golden_zero_shot(self, benchmark):
        passage = sorted(benchmark.documents, key=lambda d: d.doc_id)[0].text
        golden = (DATA_DIR / "golden_prompt_zero_shot.txt").read_text(encoding="utf-8")
        assert build_prompt(PromptSpec.zero_shot(), passage) == golden

    def test_golden_few_shot(self, benchmark):
        passage = sorted(benchmark.documents, key=lambda d: d.doc_id)[0].text
        golden = (DATA_DIR / "golden_prompt_few_shot.txt").read_text(encoding="utf-8")
        assert build_prompt(few_shot_spec(), passage) == golden

    def test_few_shot_requires_examples(self):
        with pytest.raises(ValueError):
            PromptSpec(mode=PromptMode.FEW_SHOT, label_list=("House",))

    def test_label_list_rejects_outside(self):
        with pytest.raises(ValueError):
            PromptSpec(mode=PromptMode.ZERO_SHOT, label_list=("House", "O"))


class TestRenderAnnotatedExample:
    def test_tag_follows_trailing_punctuation(self, taxonomy):
        docs = {d.doc_id: d for d in fewshot_documents()}
        rendered = render_annotated_example(docs["ex3"])
        assert rendered.endswith("in **Milan**. **LOCATION**")
        assert "**Milan Fashion Week**, **EVENT**" in rendered

    def test_upper_squashed_tags(self):
        rendered = render_annotated_example(list(fewshot_documents())[0])
        assert "**H&M** **LISTEDGROUP**" in rendered
        assert "**Fashion Pact** **SUSTAINABILITY**" in rendered


class TestParseResponse:
    def test_curated_malformed_suite(self, taxonomy, malformed_cases):
        assert len(malformed_cases) >= 10
        for case in malformed_cases:
            result = parse_response(case["raw"], taxonomy)
            assert result.diagnostics.status == case["status"], case["name"]
            got = [
                (p.entity_name, p.label.canonical_name if p.label else None)
                for p in result.predictions
            ]
            want = [(p["name"], p["label"]) for p in case["predictions"]]
            assert got == want, case["name"]

    def test_refusal_yields_no_predictions_and_diagnostic(self, taxonomy):
        result = parse_response("no entities found", taxonomy)
        assert result.diagnostics.status == "unparseable"
        assert result.predictions == ()
        assert result.diagnostics.detail

    def test_out_of_taxonomy_counted(self, taxonomy):
        result = parse_response("[{'Kering': 'Conglomerate'}]", taxonomy)
        assert result.diagnostics.out_of_taxonomy == 1
        assert result.predictions[0].out_of_taxonomy

    def test_code_fence_repair_recorded(self, taxonomy):
        result = parse_response("```json\n[{\"Creed\": \"Private Company\"}]\n```", taxonomy)
        assert "code_fence" in result.diagnostics.repairs


EUROPE_TEXT = (
    "The group reorganised its European based operations after a strong quarter."
)


class TestGround:
    def prediction(self, taxonomy, name, label="Location"):
        return RawPrediction(entity_name=name, raw_label=label, label=taxonomy.get(label))

    def test_partial_word_match_is_rejected(self, taxonomy):
        predictions = [self.prediction(taxonomy, "Europe")]
        grounded = ground(predictions, EUROPE_TEXT)
        assert grounded[0].note is GroundingNote.UNGROUNDED
        assert grounded[0].span is None

    def test_duplicate_surfaces_take_leftmost_unconsumed(self, taxonomy, benchmark):
        p17 = benchmark.by_id()["p17"]
        listed = taxonomy.get("ListedGroup")
        predictions = [
            RawPrediction("Kering", "Listed Group", listed),
            RawPrediction("Kering", "Listed Group", listed),
        ]
        grounded = ground(predictions, p17.text)
        first, second = (g.span for g in grounded)
        assert first is not None and second is not None
        assert first.start == p17.text.find("Kering")
        assert second.start == p17.text.find("Kering", first.end)
        assert first.start < second.start

    def test_empty_prediction_list(self):
        assert ground([], "anything") == []

    def test_case_insensitive_fallback(self, taxonomy):
        text = "KERING announced growth."
        grounded = ground([self.prediction(taxonomy, "Kering", "ListedGroup")], text)
        assert grounded[0].note is GroundingNote.CASE_INSENSITIVE
        assert grounded[0].span.surface == "KERING"

    def test_case_insensitive_can_be_disabled(self, taxonomy):
        text = "KERING announced growth."
        policy = GroundingPolicy(allow_case_insensitive=False)
        grounded = ground([self.prediction(taxonomy, "Kering", "ListedGroup")], text, policy)
        assert grounded[0].note is GroundingNote.UNGROUNDED

    def test_out_of_taxonomy_prediction_stays_ungrounded(self, taxonomy):
        raw = RawPrediction("Kering", "Brandz", None)
        grounded = ground([raw], "Kering announced growth.")
        assert grounded[0].note is GroundingNote.UNGROUNDED

    def test_dedupe_mentions_policy(self, taxonomy):
        listed = taxonomy.get("ListedGroup")
        predictions = [
            RawPrediction("Kering", "Listed Group", listed),
            RawPrediction("Kering", "Listed Group", listed),
        ]
        grounded = ground(predictions, "Kering and Kering.", GroundingPolicy(dedupe_mentions=True))
        assert len(grounded) == 1

    def test_conservation_and_non_overlap_randomized(self, taxonomy):
        rng = random.Random(404)
        vocab = ["Kering", "Gucci", "Paris", "2023", "maison", "Hermès", "growth"]
        labels = taxonomy.entity_labels()
        for _ in range(300):
            text = " ".join(rng.choice(vocab) for _ in range(rng.randint(1, 15)))
            predictions = []
            for _ in range(rng.randint(0, 6)):
                name = rng.choice(vocab + ["Chanel", "absent phrase", "Kering Gucci"])
                predictions.append(
                    RawPrediction(name, "House", rng.choice(labels))
                )
            grounded = ground(predictions, text)
            assert len(grounded) == len(predictions)
            for g in grounded:
                if g.note is GroundingNote.EXACT:
                    assert g.span.surface == g.origin.entity_name.strip()
                elif g.note is GroundingNote.CASE_INSENSITIVE:
                    assert g.span.surface.lower() == g.origin.entity_name.strip().lower()
            spans = [g.span for g in grounded if g.span is not None]
            for i, a in enumerate(spans):
                for b in spans[i + 1:]:
                    assert a.end <= b.start or b.end <= a.start


class TestClients:
    def test_mock_empty_list(self, taxonomy):
        client = MockClient()
        raw = client.complete("m", "prompt", DecodingParams())
        assert parse_response(raw, taxonomy).predictions == ()

    def test_cache_hit_returns_stored_bytes(self, tmp_path):
        cache = ResponseCache(tmp_path)
        cache.put("m", "prompt", "[{'Kering': 'Listed Group'}]")
        assert cache.get("m", "prompt") == "[{'Kering': 'Listed Group'}]"
        replay = ReplayClient(cache)
        assert replay.complete("m", "prompt", DecodingParams()) == "[{'Kering': 'Listed Group'}]"

    def test_replay_miss_is_hard_error(self, tmp_path):
        replay = ReplayClient(ResponseCache(tmp_path))
        with pytest.raises(CacheMissError):
            replay.complete("m", "never cached", DecodingParams())

    def test_caching_client_fills_cache(self, tmp_path):
        cache = ResponseCache(tmp_path)
        inner = MockClient(default="[]")
        client = CachingClient(inner, cache)
        client.complete("m", "p", DecodingParams())
        client.complete("m", "p", DecodingParams())
        assert len(inner.calls) == 1
        assert cache.get("m", "p") == "[]"

    def test_http_client_requires_api_key(self, monkeypatch):
        monkeypatch.delenv("LUXNER_API_KEY", raising=False)
        with pytest.raises(ConfigError):
            HttpChatClient("https://example.invalid/v1")


class FlakyClient:
    live = True

    def __init__(self, fail_times: int):
        self.fail_times = fail_times
        self.calls = 0

    def complete(self, model_id, prompt, decoding):
        self.calls += 1
        if self.calls <= self.fail_times:
            raise TransportError("boom")
        return "[]"


class TestRunBenchmark:
    def fixture_corpus(self, benchmark):
        return Corpus(name="mini", documents=benchmark.documents[:3])

    def test_retries_then_succeeds(self, benchmark):
        corpus = Corpus(name="mini", documents=benchmark.documents[:1])
        client = FlakyClient(fail_times=2)
        settings = BenchSettings(model_id="m", max_attempts=3, backoff_seconds=0.0,
                                 max_in_flight=1)
        run = run_benchmark(corpus, PromptSpec.zero_shot(), client, settings)
        assert client.calls == 3
        assert run.doc_results[0].parse_status == "ok"

    def test_transport_failure_scores_zero_predictions(self, benchmark):
        corpus = Corpus(name="mini", documents=benchmark.documents[:1])
        client = FlakyClient(fail_times=99)
        settings = BenchSettings(model_id="m", max_attempts=2, backoff_seconds=0.0,
                                 max_in_flight=1)
        run = run_benchmark(corpus, PromptSpec.zero_shot(), client, settings)
        result = run.doc_results[0]
        assert result.parse_status.startswith("transport_error")
        assert result.predictions == []
        assert result.counts["fn"] == len(corpus.documents[0].spans)
        assert run.metrics.micro_recall == 0.0

    def test_empty_corpus_rejected(self):
        with pytest.raises(ValueError):
            run_benchmark(
                Corpus(name="e", documents=()), PromptSpec.zero_shot(),
                MockClient(), BenchSettings(model_id="m"),
            )

    def test_replay_run_is_bit_identical(self, benchmark, replay_cache_dir, tmp_path):
        client = ReplayClient(ResponseCache(replay_cache_dir))
        settings = BenchSettings(model_id="fixture-chat-v1")
        spec = PromptSpec.zero_shot()
        run1 = run_benchmark(benchmark, spec, client, settings)
        run2 = run_benchmark(benchmark, spec, client, settings)
        a, b = tmp_path / "a.jsonl", tmp_path / "b.jsonl"
        run1.write_transcript(a)
        run2.write_transcript(b)
        assert a.read_bytes() == b.read_bytes()

    def test_replay_metrics_match_oracle_fixture(self, benchmark, replay_cache_dir, replay_expected):
        client = ReplayClient(ResponseCache(replay_cache_dir))
        run = run_benchmark(benchmark, PromptSpec.zero_shot(), client,
                            BenchSettings(model_id="fixture-chat-v1"))
        m = run.metrics
        assert m.micro_precision == replay_expected["micro_precision"]
        assert m.micro_recall == replay_expected["micro_recall"]
        assert m.micro_f1 == replay_expected["micro_f1"]
        assert m.macro_f1 == replay_expected["macro_f1"]
        for name, c in replay_expected["per_label"].items():
            got = m.per_label[name]
            assert (got.tp, got.fp, got.fn) == (c["tp"], c["fp"], c["fn"]), name

    def test_perfect_cache_reaches_full_recall(self, benchmark):
        spec = PromptSpec.zero_shot()
        responses = {}
        for doc in benchmark:
            pairs = ", ".join(
                "{" + repr(s.surface) + ": " + repr(s.label.display_name) + "}"
                for s in doc.spans
            )
            responses[build_prompt(spec, doc.text)] = f"[{pairs}]"
        run = run_benchmark(benchmark, spec, MockClient(responses),
                            BenchSettings(model_id="m"))
        assert run.metrics.micro_recall == 1.0
        assert run.metrics.micro_f1 == 1.0

    def test_fingerprint_depends_on_model_and_template(self, benchmark):
        corpus = Corpus(name="mini", documents=benchmark.documents[:1])
        run_a = run_benchmark(corpus, PromptSpec.zero_shot(), MockClient(),
                              BenchSettings(model_id="a"))
        run_b = run_benchmark(corpus, PromptSpec.zero_shot(), MockClient(),
                              BenchSettings(model_id="b"))
        assert run_a.fingerprint != run_b.fingerprint
