"""In-process mock chat-completions server for tests and offline demos.

Modes:
  echo      return the last user message verbatim
  script    return queued responses in order (then 500 when exhausted)
  pipeline  recognize the package's prompt shapes and produce plausible
            deterministic outputs (paraphrases, descriptor lists, rewrites)

The server can also fail the first N requests with a 503 to exercise
retry logic; every instance counts the requests it has served.
"""

from __future__ import annotations

import hashlib
import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

DESCRIPTOR_POOL = [
    "formal", "informal", "concise", "verbose", "vivid", "plain", "direct",
    "playful", "serious", "technical", "casual", "emphatic", "measured",
    "conversational", "ornate", "blunt",
]


def _pick_descriptors(seed_text: str, count: int = 4) -> list[str]:
    digest = hashlib.sha256(seed_text.encode("utf-8")).digest()
    picked = []
    pool = list(DESCRIPTOR_POOL)
    for i in range(count):
        index = digest[i] % len(pool)
        picked.append(pool.pop(index))
    return picked


def _extract(prompt: str, start_marker: str, end_markers: list[str]) -> str:
    begin = prompt.index(start_marker) + len(start_marker)
    end = len(prompt)
    for marker in end_markers:
        pos = prompt.find(marker, begin)
        if pos != -1:
            end = min(end, pos)
    return prompt[begin:end].strip()


def pipeline_reply(prompt: str) -> str:
    """Deterministic plausible completion for any of the pipeline prompts."""
    if "List some adjectives" in prompt:
        return ", ".join(_pick_descriptors(prompt))
    if "Paraphrase the passage in a simple neutral style" in prompt:
        passage = _extract(prompt, "Passage:", ["Paraphrase the passage"])
        words = re.findall(r"[\w']+", passage.lower())
        return "this text says " + " ".join(words[:60])
    if "dimensions of register variation" in prompt:
        return (
            "The passage shows involved production with frequent pronouns "
            "and low informational density relative to academic prose."
        )
    if "Rewrite the text to be more" in prompt or "Here is a rewrite" in prompt:
        source = _extract(prompt, "Here is a text:", ["Rewrite the text", "Here is a rewrite"])
        return "Honestly, " + source
    if "Rewrite" in prompt and "authorship style of the target text" in prompt:
        source = _extract(prompt, "Rewrite ", [" into the authorship style"])
        return "Well, " + source
    return "Understood: " + prompt[:80]


class _Handler(BaseHTTPRequestHandler):
    server_version = "MockChat/1.0"

    def log_message(self, fmt, *args):  # silence request logging in tests
        pass

    def do_POST(self):
        if self.path != "/v1/chat/completions":
            self.send_error(404)
            return
        owner: "MockChatServer" = self.server.owner  # type: ignore[attr-defined]
        length = int(self.headers.get("Content-Length", "0"))
        body = json.loads(self.rfile.read(length) or b"{}")
        with owner.lock:
            owner.request_count += 1
            should_fail = owner.fail_budget > 0
            if should_fail:
                owner.fail_budget -= 1
        if should_fail:
            self._respond(owner.fail_status, {"error": "scripted failure"})
            return

        messages = body.get("messages", [])
        user_texts = [m["content"] for m in messages if m.get("role") == "user"]
        prompt = user_texts[-1] if user_texts else ""

        if owner.mode == "echo":
            content = prompt
        elif owner.mode == "script":
            with owner.lock:
                if not owner.script:
                    self._respond(500, {"error": "script exhausted"})
                    return
                content = owner.script.pop(0)
        else:
            content = pipeline_reply(prompt)

        self._respond(
            200,
            {
                "id": "mock",
                "object": "chat.completion",
                "model": body.get("model", "mock"),
                "choices": [
                    {
                        "index": 0,
                        "message": {"role": "assistant", "content": content},
                        "finish_reason": "stop",
                    }
                ],
            },
        )

    def _respond(self, status: int, payload: dict) -> None:
        blob = json.dumps(payload).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(blob)))
        self.end_headers()
        self.wfile.write(blob)


class MockChatServer:
    """Context-managed HTTP server bound to an ephemeral localhost port."""

    def __init__(self, mode: str = "pipeline", script: list[str] | None = None,
                 fail_times: int = 0, fail_status: int = 503):
        if mode not in ("echo", "script", "pipeline"):
            raise ValueError(f"unknown mock mode {mode!r}")
        self.mode = mode
        self.script = list(script or [])
        self.fail_budget = fail_times
        self.fail_status = fail_status
        self.request_count = 0
        self.lock = threading.Lock()
        self._server = ThreadingHTTPServer(("127.0.0.1", 0), _Handler)
        self._server.owner = self  # type: ignore[attr-defined]
        self._thread = threading.Thread(target=self._server.serve_forever, daemon=True)

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def start(self) -> "MockChatServer":
        self._thread.start()
        return self

    def stop(self) -> None:
        self._server.shutdown()
        self._server.server_close()
        self._thread.join(timeout=5)

    def __enter__(self) -> "MockChatServer":
        return self.start()

    def __exit__(self, *exc) -> None:
        self.stop()
