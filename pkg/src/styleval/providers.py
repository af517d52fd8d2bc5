"""Clients for the generation endpoint and the scoring sidecar.

The chat client speaks the common chat-completions wire format and adds
disk caching plus retry with exponential backoff. The scorer client wraps
the sidecar's /embed and /score routes; callers treat its failures as a
signal to skip optional metrics rather than abort.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
import time
from dataclasses import dataclass, field

import requests

from .errors import BadRequest, EmptyCompletion, EndpointUnavailable, ScorerUnavailable

EMBED_KINDS = ("embed_sbert", "embed_luar", "embed_stylecav")
SCORE_KINDS = ("score_mis", "score_cola", "classify_formality")


@dataclass(frozen=True)
class ChatRequest:
    model: str
    messages: tuple[tuple[str, str], ...]  # (role, content)
    max_new_tokens: int = 1024
    temperature: float | None = None
    top_p: float | None = None

    def __post_init__(self):
        roles = {r for r, _ in self.messages}
        bad = roles - {"system", "user", "assistant"}
        if bad:
            raise ValueError(f"unknown message roles: {sorted(bad)}")
        if "user" not in roles:
            raise ValueError("chat request needs at least one user message")

    def wire_body(self) -> dict:
        body = {
            "model": self.model,
            "messages": [{"role": r, "content": c} for r, c in self.messages],
            "max_tokens": self.max_new_tokens,
        }
        if self.temperature is not None:
            body["temperature"] = self.temperature
        if self.top_p is not None:
            body["top_p"] = self.top_p
        return body


@dataclass(frozen=True)
class ScorerRequest:
    kind: str
    texts: tuple[str, ...] | None = None
    pairs: tuple[tuple[str, str], ...] | None = None

    def __post_init__(self):
        if self.kind not in EMBED_KINDS + SCORE_KINDS:
            raise ValueError(f"unknown scorer kind {self.kind!r}")
        if self.kind == "score_mis":
            if self.pairs is None:
                raise ValueError("score_mis requires pairs")
        elif self.texts is None:
            raise ValueError(f"{self.kind} requires texts")


def cache_key(base_url: str, req: ChatRequest) -> str:
    """Stable digest of endpoint plus the full request."""
    payload = {
        "endpoint": base_url,
        "model": req.model,
        "messages": [[r, c] for r, c in req.messages],
        "max_new_tokens": req.max_new_tokens,
        "temperature": req.temperature,
        "top_p": req.top_p,
    }
    blob = json.dumps(payload, sort_keys=True, ensure_ascii=True)
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()


@dataclass
class ChatEndpointConfig:
    base_url: str
    model: str
    api_key_header: str | None = None
    api_key: str | None = None
    cache_dir: str | None = None
    max_attempts: int = 3
    backoff_base: float = 1.0
    timeout: float = 120.0
    concurrency: int = 4


class ChatClient:
    """Cached, retrying client for a chat-completions endpoint."""

    def __init__(self, config: ChatEndpointConfig, sleep=time.sleep):
        self.config = config
        self._sleep = sleep
        self._session = requests.Session()
        self._semaphore = threading.Semaphore(max(1, config.concurrency))
        self._cache_lock = threading.Lock()
        self.network_calls = 0
        if config.cache_dir:
            os.makedirs(config.cache_dir, exist_ok=True)

    def _cache_path(self, key: str) -> str | None:
        if not self.config.cache_dir:
            return None
        return os.path.join(self.config.cache_dir, key + ".json")

    def _cache_read(self, key: str) -> str | None:
        path = self._cache_path(key)
        if path is None or not os.path.exists(path):
            return None
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)["response"]

    def _cache_write(self, key: str, req: ChatRequest, response: str) -> None:
        path = self._cache_path(key)
        if path is None:
            return
        record = {"request": req.wire_body(), "response": response}
        with self._cache_lock:
            tmp = path + ".tmp"
            with open(tmp, "w", encoding="utf-8") as fh:
                json.dump(record, fh, ensure_ascii=False)
            os.replace(tmp, path)

    def _headers(self) -> dict:
        headers = {"Content-Type": "application/json"}
        if self.config.api_key_header and self.config.api_key:
            headers[self.config.api_key_header] = self.config.api_key
        return headers

    def chat(self, req: ChatRequest) -> str:
        """Assistant message for the request; cached responses skip the network."""
        key = cache_key(self.config.base_url, req)
        cached = self._cache_read(key)
        if cached is not None:
            return cached

        url = self.config.base_url.rstrip("/") + "/v1/chat/completions"
        last_error: Exception | None = None
        for attempt in range(self.config.max_attempts):
            if attempt > 0:
                self._sleep(self.config.backoff_base * (2 ** (attempt - 1)))
            try:
                with self._semaphore:
                    self.network_calls += 1
                    resp = self._session.post(
                        url,
                        json=req.wire_body(),
                        headers=self._headers(),
                        timeout=self.config.timeout,
                    )
            except requests.RequestException as exc:
                last_error = exc
                continue
            if 400 <= resp.status_code < 500:
                raise BadRequest(f"endpoint rejected request ({resp.status_code}): {resp.text}")
            if resp.status_code != 200:
                last_error = EndpointUnavailable(
                    f"endpoint returned {resp.status_code}: {resp.text[:200]}"
                )
                continue
            try:
                content = resp.json()["choices"][0]["message"]["content"]
            except (ValueError, KeyError, IndexError) as exc:
                last_error = EndpointUnavailable(f"malformed endpoint response: {exc}")
                continue
            if not content:
                raise EmptyCompletion("endpoint returned an empty assistant message")
            self._cache_write(key, req, content)
            return content
        raise EndpointUnavailable(
            f"chat endpoint failed after {self.config.max_attempts} attempts: {last_error}"
        )


@dataclass
class ScorerConfig:
    base_url: str
    max_attempts: int = 3
    backoff_base: float = 1.0
    timeout: float = 120.0
    concurrency: int = 4


class ScorerClient:
    """Client for the scoring sidecar's /health, /embed and /score routes."""

    def __init__(self, config: ScorerConfig, sleep=time.sleep):
        self.config = config
        self._sleep = sleep
        self._session = requests.Session()
        self._semaphore = threading.Semaphore(max(1, config.concurrency))

    def _post(self, route: str, body: dict) -> dict:
        url = self.config.base_url.rstrip("/") + route
        last_error: Exception | None = None
        for attempt in range(self.config.max_attempts):
            if attempt > 0:
                self._sleep(self.config.backoff_base * (2 ** (attempt - 1)))
            try:
                with self._semaphore:
                    resp = self._session.post(url, json=body, timeout=self.config.timeout)
            except requests.RequestException as exc:
                last_error = exc
                continue
            if 400 <= resp.status_code < 500:
                raise BadRequest(f"sidecar rejected request ({resp.status_code}): {resp.text}")
            if resp.status_code != 200:
                last_error = ScorerUnavailable(f"sidecar returned {resp.status_code}")
                continue
            return resp.json()
        raise ScorerUnavailable(
            f"scorer sidecar unreachable after {self.config.max_attempts} attempts: {last_error}"
        )

    def health(self) -> dict:
        try:
            resp = self._session.get(
                self.config.base_url.rstrip("/") + "/health", timeout=self.config.timeout
            )
        except requests.RequestException as exc:
            raise ScorerUnavailable(f"sidecar health check failed: {exc}") from exc
        if resp.status_code != 200:
            raise ScorerUnavailable(f"sidecar health returned {resp.status_code}")
        return resp.json()

    def embed(self, req: ScorerRequest) -> list[list[float]]:
        if req.kind not in EMBED_KINDS:
            raise ValueError(f"embed called with scoring kind {req.kind!r}")
        if not req.texts:
            return []
        data = self._post("/embed", {"kind": req.kind, "texts": list(req.texts)})
        return data["vectors"]

    def score(self, req: ScorerRequest) -> list[float]:
        if req.kind not in SCORE_KINDS:
            raise ValueError(f"score called with embedding kind {req.kind!r}")
        body: dict = {"kind": req.kind}
        if req.kind == "score_mis":
            if not req.pairs:
                return []
            body["pairs"] = [list(p) for p in req.pairs]
        else:
            if not req.texts:
                return []
            body["texts"] = list(req.texts)
        data = self._post("/score", body)
        return data["scores"]
