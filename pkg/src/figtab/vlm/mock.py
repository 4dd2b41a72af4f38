"""Deterministic mock backend for tests and offline benchmark runs.

The mock is a transport, not a shortcut around the client: requests go
through the same retry, logging and batching machinery as real
providers. Replies are resolved, in order of precedence, from a
scripted outcome queue, a respond function, or an image-hash transcript
(the record/replay format: JSON object mapping sha256 of the PNG bytes
to the canned reply text).
"""

from __future__ import annotations

import base64
import json
import threading
from pathlib import Path
from typing import Callable, Optional, Union

from .providers import ProviderRequest, ProviderResponse, image_sha256

# scripted outcomes: an int is an HTTP status to fail with once,
# a string is a successful reply text
ScriptItem = Union[int, str]


class MockTransport:
    """In-process transport answering like a provider endpoint."""

    def __init__(
        self,
        replies: Optional[dict[str, str]] = None,
        respond_fn: Optional[Callable[[bytes, str], Union[str, int]]] = None,
        script: Optional[list[ScriptItem]] = None,
    ) -> None:
        self.replies = replies or {}
        self.respond_fn = respond_fn
        self.script = list(script) if script else []
        self.calls = 0
        self._lock = threading.Lock()

    def __call__(self, request: ProviderRequest, timeout: float) -> ProviderResponse:
        with self._lock:
            self.calls += 1
            if self.script:
                item = self.script.pop(0)
                if isinstance(item, int):
                    return ProviderResponse(status=item, error=f"scripted {item}")
                return ProviderResponse(status=200, body={"text": item})

        if self.respond_fn is not None:
            png = base64.b64decode(request.body["image_base64"])
            outcome = self.respond_fn(png, request.body["prompt"])
            if isinstance(outcome, int):  # an HTTP status to fail with
                return ProviderResponse(status=outcome, error=f"scripted {outcome}")
            return ProviderResponse(status=200, body={"text": outcome})

        digest = request.body["image_sha256"]
        if digest in self.replies:
            return ProviderResponse(status=200, body={"text": self.replies[digest]})
        return ProviderResponse(status=404, error=f"no transcript entry for {digest}")


def load_transcript(path: str | Path) -> dict[str, str]:
    payload = json.loads(Path(path).read_text())
    if not isinstance(payload, dict):
        raise ValueError("transcript must be a JSON object of sha256 -> reply")
    return {str(k): str(v) for k, v in payload.items()}


def save_transcript(path: str | Path, replies: dict[str, str]) -> None:
    Path(path).write_text(json.dumps(replies, indent=2, sort_keys=True))


def transcript_key(png_bytes: bytes) -> str:
    return image_sha256(png_bytes)
