"""Wire-format adapters for each provider style.

Adapters differ only in how they encode the request and pull the text
out of the response; everything else (retries, limits, logging) is
shared by the client. The image travels as base64 PNG in all formats.
"""

from __future__ import annotations

import base64
import hashlib
from dataclasses import dataclass, field
from typing import Any, Callable, Optional

from .config import BackendConfig

_DEFAULT_ENDPOINTS = {
    "anthropic-style": "https://api.anthropic.com",
    "openai-style": "https://api.openai.com",
    "google-style": "https://generativelanguage.googleapis.com",
    "mock": "mock://local",
}


@dataclass
class ProviderRequest:
    url: str
    headers: dict[str, str]
    body: dict[str, Any]


@dataclass
class ProviderResponse:
    status: int
    body: Optional[dict] = None
    error: Optional[str] = None  # transport-level failure (timeout, refused)


def _endpoint(config: BackendConfig) -> str:
    return (config.endpoint_url or _DEFAULT_ENDPOINTS[config.provider]).rstrip("/")


def image_sha256(png_bytes: bytes) -> str:
    return hashlib.sha256(png_bytes).hexdigest()


def _anthropic_request(config: BackendConfig, png: bytes, prompt: str, key: str) -> ProviderRequest:
    return ProviderRequest(
        url=f"{_endpoint(config)}/v1/messages",
        headers={
            "x-api-key": key,
            "anthropic-version": "2023-06-01",
            "content-type": "application/json",
        },
        body={
            "model": config.model_id,
            "max_tokens": 4096,
            "temperature": 0,
            "messages": [
                {
                    "role": "user",
                    "content": [
                        {
                            "type": "image",
                            "source": {
                                "type": "base64",
                                "media_type": "image/png",
                                "data": base64.b64encode(png).decode("ascii"),
                            },
                        },
                        {"type": "text", "text": prompt},
                    ],
                }
            ],
        },
    )


def _anthropic_text(body: dict) -> str:
    return "".join(
        block.get("text", "")
        for block in body.get("content", [])
        if block.get("type") == "text"
    )


def _openai_request(config: BackendConfig, png: bytes, prompt: str, key: str) -> ProviderRequest:
    data_url = "data:image/png;base64," + base64.b64encode(png).decode("ascii")
    return ProviderRequest(
        url=f"{_endpoint(config)}/v1/chat/completions",
        headers={"Authorization": f"Bearer {key}", "content-type": "application/json"},
        body={
            "model": config.model_id,
            "temperature": 0,
            "messages": [
                {
                    "role": "user",
                    "content": [
                        {"type": "text", "text": prompt},
                        {"type": "image_url", "image_url": {"url": data_url}},
                    ],
                }
            ],
        },
    )


def _openai_text(body: dict) -> str:
    return body["choices"][0]["message"]["content"]


def _google_request(config: BackendConfig, png: bytes, prompt: str, key: str) -> ProviderRequest:
    return ProviderRequest(
        url=f"{_endpoint(config)}/v1beta/models/{config.model_id}:generateContent",
        headers={"x-goog-api-key": key, "content-type": "application/json"},
        body={
            "contents": [
                {
                    "parts": [
                        {"text": prompt},
                        {
                            "inline_data": {
                                "mime_type": "image/png",
                                "data": base64.b64encode(png).decode("ascii"),
                            }
                        },
                    ]
                }
            ],
            "generationConfig": {"temperature": 0},
        },
    )


def _google_text(body: dict) -> str:
    parts = body["candidates"][0]["content"]["parts"]
    return "".join(p.get("text", "") for p in parts)


def _mock_request(config: BackendConfig, png: bytes, prompt: str, key: str) -> ProviderRequest:
    return ProviderRequest(
        url=f"{_endpoint(config)}/extract",
        headers={},
        body={
            "model": config.model_id,
            "prompt": prompt,
            "image_sha256": image_sha256(png),
            "image_base64": base64.b64encode(png).decode("ascii"),
        },
    )


def _mock_text(body: dict) -> str:
    return body["text"]


@dataclass
class Adapter:
    build_request: Callable[[BackendConfig, bytes, str, str], ProviderRequest]
    parse_text: Callable[[dict], str]
    needs_key: bool = True


ADAPTERS: dict[str, Adapter] = {
    "anthropic-style": Adapter(_anthropic_request, _anthropic_text),
    "openai-style": Adapter(_openai_request, _openai_text),
    "google-style": Adapter(_google_request, _google_text),
    "mock": Adapter(_mock_request, _mock_text, needs_key=False),
}
