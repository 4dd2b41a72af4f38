"""Backend and prompt configuration for the extraction client."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

PROVIDERS = ("anthropic-style", "openai-style", "google-style", "mock")

# The minimal prompt; must stay byte-identical, benchmark runs depend on it.
SIMPLE_PROMPT = "Extract the data from this chart as a tab-separated table"

DETAILED_PROMPT = """\
Extract the data from this chart as a tab-separated table.
Rules:
- Output only the table: one header row naming each column, then one row per \
category or x-value, cells separated by single tab characters.
- For stacked or grouped bars, report each series as its own column with the \
per-segment value, not the cumulative height.
- Apply any axis scale multiplier (for example "x10^6", "in millions", \
"thousands") so every cell holds the actual value.
- Keep units out of the cells; fold them into the column header instead.
- Write plain decimal numbers without thousands separators."""


@dataclass(frozen=True)
class PromptProfile:
    kind: str  # "simple" | "detailed"
    text: str

    @classmethod
    def simple(cls) -> "PromptProfile":
        return cls("simple", SIMPLE_PROMPT)

    @classmethod
    def detailed(cls) -> "PromptProfile":
        return cls("detailed", DETAILED_PROMPT)

    @classmethod
    def named(cls, kind: str) -> "PromptProfile":
        if kind == "simple":
            return cls.simple()
        if kind == "detailed":
            return cls.detailed()
        raise ValueError(f"unknown prompt profile: {kind!r}")


@dataclass
class BackendConfig:
    provider: str
    model_id: str = ""
    endpoint_url: str = ""
    api_key_env: str = ""
    max_retries: int = 3
    timeout: float = 60.0
    rate_limit_per_s: Optional[float] = None
    name: str = ""
    transcript: Optional[str] = None  # mock provider: path to hash->reply map

    def __post_init__(self) -> None:
        if self.provider not in PROVIDERS:
            raise ValueError(f"unknown provider: {self.provider!r}")
        if self.max_retries < 0:
            raise ValueError("max_retries must be >= 0")
        if self.timeout <= 0:
            raise ValueError("timeout must be > 0")
        if self.provider != "mock" and not self.api_key_env:
            raise ValueError("api_key_env required for non-mock providers")

    @property
    def label(self) -> str:
        return self.name or self.model_id or self.provider


def load_backends_file(path: str | Path) -> tuple[dict[str, BackendConfig], str]:
    """Read a backends config file.

    JSON shape: {"backends": {name: {provider, model_id, ...}}, "default": name}.
    Returns (backends by name, default name).
    """
    path = Path(path)
    payload = json.loads(path.read_text())
    backends: dict[str, BackendConfig] = {}
    for name, spec in payload.get("backends", {}).items():
        known = {f for f in BackendConfig.__dataclass_fields__}
        unknown = set(spec) - known
        if unknown:
            raise ValueError(f"backend {name!r}: unknown fields {sorted(unknown)}")
        spec = dict(spec)
        if spec.get("transcript"):
            # transcript paths are relative to the config file
            spec["transcript"] = str((path.parent / spec["transcript"]).resolve())
        backends[name] = BackendConfig(name=name, **spec)
    default = payload.get("default", "")
    if not backends:
        raise ValueError(f"no backends defined in {path}")
    if not default:
        default = next(iter(backends))
    if default not in backends:
        raise ValueError(f"default backend {default!r} not defined")
    return backends, default
