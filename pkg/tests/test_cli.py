from __future__ import annotations

import json
from pathlib import Path

import pytest

from luxner.builtin import data_path
from luxner.cli import main
from luxner.corpus_io import write_records

DATA_DIR = Path(__file__).parent / "data"
BENCHMARK_INLINE = data_path("benchmark_gold.inline")


@pytest.fixture
def records_path(benchmark, tmp_path):
    path = tmp_path / "benchmark.jsonl"
    write_records(benchmark, path)
    return path


class TestValidate:
    def test_benchmark_passes(self, capsys):
        assert main(["validate", str(BENCHMARK_INLINE)]) == 0
        assert "50 documents" in capsys.readouterr().out

    def test_overlapping_spans_fail_with_doc_id(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text(
            '{"doc_id":"d9","source":"","text":"Louis Vuitton","spans":[[0,13,"House"],[6,13,"House"]]}\n',
            encoding="utf-8",
        )
        assert main(["validate", str(bad)]) == 1
        assert "d9" in capsys.readouterr().out

    def test_unknown_label_fail_names_alias(self, tmp_path, capsys):
        bad = tmp_path / "bad.inline"
        bad.write_text("#| d1 | src\n{Kering|Brandz}\n", encoding="utf-8")
        assert main(["validate", str(bad)]) == 1
        assert "Brandz" in capsys.readouterr().out

    def test_unknown_format_is_usage_error(self, tmp_path, capsys):
        path = tmp_path / "corpus.dat"
        path.write_text("", encoding="utf-8")
        assert main(["validate", str(path)]) == 1  # reported per-path as failure


class TestConvert:
    def test_records_inline_records_round_trip(self, records_path, tmp_path):
        inline = tmp_path / "mid.inline"
        back = tmp_path / "back.jsonl"
        assert main(["convert", str(records_path), str(inline)]) == 0
        assert main(["convert", str(inline), str(back)]) == 0
        assert records_path.read_bytes() == back.read_bytes()

    def test_columns_output_ends_with_newline(self, records_path, tmp_path):
        out = tmp_path / "out.conll"
        assert main(["convert", str(records_path), str(out)]) == 0
        assert out.read_text(encoding="utf-8").endswith("\n")

    def test_bad_format_name_is_usage_error(self, records_path, tmp_path):
        with pytest.raises(SystemExit) as err:
            main(["convert", str(records_path), str(tmp_path / "x"), "--to", "parquet"])
        assert err.value.code == 2


class TestStats:
    def test_benchmark_table(self, capsys, histogram_fixture):
        assert main(["stats", str(BENCHMARK_INLINE)]) == 0
        out = capsys.readouterr().out
        assert f"Documents: {histogram_fixture['documents']}" in out
        assert f"Tokens: {histogram_fixture['tokens']}" in out
        top = max(histogram_fixture["mention_counts"].items(), key=lambda kv: kv[1])
        assert f"| {top[0]} | {top[1]} |" in out

    def test_sorted_by_count_desc(self, capsys):
        main(["stats", str(BENCHMARK_INLINE)])
        out = capsys.readouterr().out
        counts = [
            int(line.split("|")[2].strip())
            for line in out.splitlines()
            if line.startswith("| ") and line.split("|")[2].strip().isdigit()
        ]
        assert counts == sorted(counts, reverse=True)


class TestScore:
    def test_gold_vs_gold_all_ones(self, records_path, capsys):
        assert main(["score", str(records_path), str(records_path)]) == 0
        out = capsys.readouterr().out
        assert "| micro | 1.0000 | 1.0000 | 1.0000 |" in out

    def test_hand_fixture_values(self, taxonomy, tmp_path, capsys):
        from luxner.annotation import Document, make_span
        from luxner.corpus_io import Corpus

        text = "Kering owns Gucci and Balenciaga"
        gold = Corpus(name="g", documents=(Document(
            doc_id="d", source="", text=text,
            spans=(
                make_span(text, 0, 6, taxonomy.get("ListedGroup")),
                make_span(text, 12, 17, taxonomy.get("House")),
                make_span(text, 22, 32, taxonomy.get("House")),
            ),
        ),))
        pred = Corpus(name="p", documents=(Document(
            doc_id="d", source="", text=text,
            spans=(
                make_span(text, 0, 6, taxonomy.get("ListedGroup")),
                make_span(text, 12, 17, taxonomy.get("Brand")),
            ),
        ),))
        gold_path = tmp_path / "gold.jsonl"
        pred_path = tmp_path / "pred.jsonl"
        write_records(gold, gold_path)
        write_records(pred, pred_path)
        assert main(["score", str(gold_path), str(pred_path)]) == 0
        assert "| micro | 0.5000 | 0.3333 | 0.4000 |" in capsys.readouterr().out

    def test_doc_id_mismatch_exits_one(self, records_path, tmp_path, capsys):
        other = tmp_path / "other.jsonl"
        other.write_text('{"doc_id":"zz","source":"","text":"x","spans":[]}\n', encoding="utf-8")
        assert main(["score", str(records_path), str(other)]) == 1

    def test_sidecar_written(self, records_path, tmp_path):
        sidecar = tmp_path / "report.jsonl"
        assert main(["score", str(records_path), str(records_path),
                     "--sidecar", str(sidecar), "--out", str(tmp_path / "r.md")]) == 0
        records = [json.loads(l) for l in sidecar.read_text(encoding="utf-8").splitlines()]
        assert records[0]["kind"] == "summary"
        assert records[0]["micro_f1"] == 1.0


class TestBench:
    def test_dry_run_first_prompt_matches_golden(self, tmp_path):
        out_dir = tmp_path / "prompts"
        assert main([
            "bench", str(BENCHMARK_INLINE), "--mode", "zero", "--dry-run",
            "--out-dir", str(out_dir),
        ]) == 0
        golden = (DATA_DIR / "golden_prompt_zero_shot.txt").read_bytes()
        assert (out_dir / "p01.prompt.txt").read_bytes() == golden

    def test_replay_bit_identical_and_matches_fixture(self, tmp_path, replay_cache_dir, replay_expected):
        outputs = []
        for name in ("one", "two"):
            out_dir = tmp_path / name
            code = main([
                "bench", str(BENCHMARK_INLINE), "--mode", "zero", "--replay",
                "--model", "fixture-chat-v1",
                "--cache-dir", str(replay_cache_dir),
                "--out-dir", str(out_dir),
            ])
            assert code == 0
            outputs.append(out_dir)
        first, second = outputs
        assert (first / "transcript.jsonl").read_bytes() == (second / "transcript.jsonl").read_bytes()
        assert (first / "report.md").read_bytes() == (second / "report.md").read_bytes()
        summary = json.loads((first / "report.jsonl").read_text(encoding="utf-8").splitlines()[0])
        assert summary["micro_f1"] == replay_expected["micro_f1"]

    def test_replay_without_cache_dir_is_config_error(self):
        assert main([
            "bench", str(BENCHMARK_INLINE), "--replay", "--model", "m",
        ]) == 2

    def test_live_without_api_key_is_config_error(self, tmp_path, monkeypatch):
        monkeypatch.delenv("LUXNER_API_KEY", raising=False)
        config = tmp_path / "config.json"
        config.write_text(json.dumps({
            "endpoint": {"base_url": "https://example.invalid/v1", "model": "m"},
        }), encoding="utf-8")
        assert main([
            "bench", str(BENCHMARK_INLINE), "--live", "--config", str(config),
        ]) == 2

    def test_cache_miss_exits_one(self, tmp_path):
        empty_cache = tmp_path / "cache"
        empty_cache.mkdir()
        assert main([
            "bench", str(BENCHMARK_INLINE), "--replay", "--model", "nope",
            "--cache-dir", str(empty_cache), "--out-dir", str(tmp_path / "out"),
        ]) == 1


class TestExport:
    def test_weights_uniform_corpus(self, taxonomy, tmp_path, capsys):
        from luxner.corpus_io import Corpus, parse_inline

        docs = tuple(
            parse_inline("{Kering|ListedGroup} x {Gucci|House}", taxonomy, doc_id=f"d{i}")
            for i in range(2)
        )
        path = tmp_path / "c.jsonl"
        write_records(Corpus(name="c", documents=docs), path)
        out = tmp_path / "weights.jsonl"
        assert main(["export", "weights", str(path), "--out", str(out),
                     "--scheme", "uniform"]) == 0
        rows = [json.loads(l) for l in out.read_text(encoding="utf-8").splitlines()[1:]]
        assert {r["weight"] for r in rows} == {1.0}

    def test_vocab_limit_default_300(self, records_path, tmp_path, capsys):
        out = tmp_path / "vocab.txt"
        assert main(["export", "vocab", str(records_path), "--out", str(out)]) == 0
        assert "limit=300" in capsys.readouterr().out

    def test_empty_corpus_weights_error(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        path.write_text("", encoding="utf-8")
        out = tmp_path / "w.jsonl"
        assert main(["export", "weights", str(path), "--out", str(out)]) == 1
