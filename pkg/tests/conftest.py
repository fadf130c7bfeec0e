from __future__ import annotations

import json
from pathlib import Path

import pytest

from luxner import benchmark_corpus, builtin_taxonomy

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def taxonomy():
    return builtin_taxonomy()


@pytest.fixture(scope="session")
def benchmark():
    return benchmark_corpus()


@pytest.fixture(scope="session")
def histogram_fixture():
    return json.loads((DATA_DIR / "benchmark_histogram.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def replay_expected():
    return json.loads((DATA_DIR / "replay_expected.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def replay_cache_dir():
    return DATA_DIR / "replay_cache"


@pytest.fixture(scope="session")
def malformed_cases():
    return json.loads((DATA_DIR / "malformed_responses.json").read_text(encoding="utf-8"))
