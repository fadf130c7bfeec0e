"""Chat-completion clients: live HTTP, deterministic replay, and test mocks.

The replay cache is a directory of JSON record files named ``<key>.json``
where key = SHA-256 over ``model_id`` + NUL + prompt bytes. Each record holds
the verbatim response text plus capture metadata, so checked-in caches make
benchmark runs fully reproducible.
"""

from __future__ import annotations

import hashlib
import json
import os
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping, Protocol

import requests

from .errors import CacheMissError, ConfigError, TransportError


@dataclass(frozen=True)
class DecodingParams:
    temperature: float = 0.0
    max_output_tokens: int = 1024


def cache_key(model_id: str, prompt: str) -> str:
    digest = hashlib.sha256()
    digest.update(model_id.encode("utf-8"))
    digest.update(b"\x00")
    digest.update(prompt.encode("utf-8"))
    return digest.hexdigest()


def prompt_sha256(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


class ModelClient(Protocol):
    """One chat completion per call: a single user message, raw text back."""

    live: bool

    def complete(self, model_id: str, prompt: str, decoding: DecodingParams) -> str:
        ...


class ResponseCache:
    """Directory-backed response store; concurrent reads, exclusive writes."""

    def __init__(self, root: str | Path) -> None:
        self.root = Path(root)

    def path_for(self, key: str) -> Path:
        return self.root / f"{key}.json"

    def get(self, model_id: str, prompt: str) -> str | None:
        path = self.path_for(cache_key(model_id, prompt))
        if not path.exists():
            return None
        record = json.loads(path.read_text(encoding="utf-8"))
        return record["response"]

    def put(self, model_id: str, prompt: str, response: str) -> Path:
        self.root.mkdir(parents=True, exist_ok=True)
        key = cache_key(model_id, prompt)
        record = {
            "key": key,
            "model_id": model_id,
            "prompt_sha256": prompt_sha256(prompt),
            "response": response,
            "captured_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        }
        path = self.path_for(key)
        path.write_text(
            json.dumps(record, ensure_ascii=False, indent=2) + "\n", encoding="utf-8"
        )
        return path


class ReplayClient:
    """Serves responses from a cache only; a miss is a hard error."""

    live = False

    def __init__(self, cache: ResponseCache) -> None:
        self.cache = cache

    def complete(self, model_id: str, prompt: str, decoding: DecodingParams) -> str:
        response = self.cache.get(model_id, prompt)
        if response is None:
            raise CacheMissError(cache_key(model_id, prompt))
        return response


class CachingClient:
    """Wraps a live client, reading from and filling the cache."""

    def __init__(self, inner: ModelClient, cache: ResponseCache) -> None:
        self.inner = inner
        self.cache = cache

    @property
    def live(self) -> bool:
        return self.inner.live

    def complete(self, model_id: str, prompt: str, decoding: DecodingParams) -> str:
        cached = self.cache.get(model_id, prompt)
        if cached is not None:
            return cached
        response = self.inner.complete(model_id, prompt, decoding)
        self.cache.put(model_id, prompt, response)
        return response


class MockClient:
    """Scripted client for tests: a mapping or callable from prompt to text."""

    live = False

    def __init__(
        self,
        responses: Mapping[str, str] | Callable[[str], str] | None = None,
        default: str = "[]",
    ) -> None:
        self.responses = responses
        self.default = default
        self.calls: list[str] = []

    def complete(self, model_id: str, prompt: str, decoding: DecodingParams) -> str:
        self.calls.append(prompt)
        if callable(self.responses):
            return self.responses(prompt)
        if self.responses is not None:
            return self.responses.get(prompt, self.default)
        return self.default


class HttpChatClient:
    """Minimal client for OpenAI-compatible /chat/completions endpoints."""

    live = True

    def __init__(
        self,
        base_url: str,
        api_key_env: str = "LUXNER_API_KEY",
        timeout: float = 60.0,
        session: requests.Session | None = None,
    ) -> None:
        if timeout <= 0:
            raise ConfigError("timeout must be positive")
        api_key = os.environ.get(api_key_env, "")
        if not api_key:
            raise ConfigError(
                f"API key environment variable {api_key_env!r} is not set"
            )
        self.base_url = base_url.rstrip("/")
        self.timeout = timeout
        self._session = session or requests.Session()
        self._headers = {
            "Authorization": f"Bearer {api_key}",
            "Content-Type": "application/json",
        }

    def complete(self, model_id: str, prompt: str, decoding: DecodingParams) -> str:
        payload = {
            "model": model_id,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": decoding.temperature,
            "max_tokens": decoding.max_output_tokens,
        }
        try:
            response = self._session.post(
                f"{self.base_url}/chat/completions",
                json=payload,
                headers=self._headers,
                timeout=self.timeout,
            )
            response.raise_for_status()
            body = response.json()
            return body["choices"][0]["message"]["content"] or ""
        except (requests.RequestException, KeyError, IndexError, ValueError) as exc:
            raise TransportError(f"chat completion failed: {exc}") from exc
