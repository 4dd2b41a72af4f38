"""Extraction client: image in, raw tab-separated reply out.

The reply text is passed downstream untouched (fences, prose and all);
cleanup belongs to the table parser. Retries cover rate limits and
transient failures with exponential backoff and jitter, capped so the
delay sequence is still nondecreasing.
"""

from __future__ import annotations

import io
import json
import os
import random
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

from PIL import Image

from .config import BackendConfig, PromptProfile
from .mock import MockTransport, load_transcript
from .providers import ADAPTERS, ProviderRequest, ProviderResponse

BACKOFF_BASE = 1.0
BACKOFF_FACTOR = 2.0
BACKOFF_JITTER = 0.2
BACKOFF_CAP = 30.0

UPSCALE_PIXEL_CAP = 4096

RETRYABLE_STATUSES = {408, 429, 500, 502, 503, 504}

Transport = Callable[[ProviderRequest, float], ProviderResponse]
ImageInput = Union[Image.Image, bytes]


class VlmError(Exception):
    pass


class AuthError(VlmError):
    pass


class RateLimited(VlmError):
    pass


class ProviderError(VlmError):
    pass


class Timeout(VlmError):
    pass


@dataclass
class RawExtraction:
    backend: BackendConfig
    prompt_kind: str
    response_text: str
    latency: float
    request_id: str


@dataclass
class BatchItem:
    index: int
    extraction: Optional[RawExtraction] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.extraction is not None


class AttemptLog:
    """JSON-lines request/response audit log (one record per attempt)."""

    def __init__(self, path: Optional[str | Path] = None) -> None:
        self.path = Path(path) if path else None
        self.records: list[dict] = []
        self._lock = threading.Lock()

    def record(self, **fields) -> None:
        with self._lock:
            self.records.append(fields)
            if self.path:
                with self.path.open("a") as fh:
                    fh.write(json.dumps(fields) + "\n")

    def attempts_for(self, request_id: str) -> list[dict]:
        with self._lock:
            return [r for r in self.records if r.get("request_id") == request_id]


class RateLimiter:
    """Spaces request starts at least min_interval apart. Thread-safe."""

    def __init__(self, per_second: float, clock=time.monotonic, sleeper=time.sleep):
        self.min_interval = 1.0 / per_second
        self._clock = clock
        self._sleep = sleeper
        self._lock = threading.Lock()
        self._next_at = 0.0

    def acquire(self) -> None:
        with self._lock:
            now = self._clock()
            wait = self._next_at - now
            start = max(now, self._next_at)
            self._next_at = start + self.min_interval
        if wait > 0:
            self._sleep(wait)


_limiters: dict[tuple, RateLimiter] = {}
_limiters_lock = threading.Lock()


def _limiter_for(config: BackendConfig) -> Optional[RateLimiter]:
    if not config.rate_limit_per_s:
        return None
    key = (config.provider, config.model_id, config.endpoint_url, config.rate_limit_per_s)
    with _limiters_lock:
        if key not in _limiters:
            _limiters[key] = RateLimiter(config.rate_limit_per_s)
        return _limiters[key]


def to_png_bytes(image: ImageInput) -> bytes:
    if isinstance(image, bytes):
        return image
    buf = io.BytesIO()
    image.convert("RGB").save(buf, format="PNG")
    return buf.getvalue()


def preprocess(image: Image.Image, pixel_cap: int = UPSCALE_PIXEL_CAP) -> Image.Image:
    """Upscale 2x (bilinear) unless a doubled dimension would pass the cap.

    Charts gain about three points of accuracy from the upscale; very
    large inputs are left alone to stay inside provider size limits.
    """
    w, h = image.size
    if 2 * w > pixel_cap or 2 * h > pixel_cap:
        return image
    return image.resize((2 * w, 2 * h), Image.Resampling.BILINEAR)


def backoff_delay(attempt: int, rng: random.Random) -> float:
    """Delay before retry number ``attempt`` (0-based), jittered +-20%.

    Jitter is applied before the cap, so consecutive delays never
    decrease: 0.8 * 2^(k+1) >= 1.2 * 2^k.
    """
    raw = BACKOFF_BASE * (BACKOFF_FACTOR**attempt)
    jittered = raw * (1.0 + rng.uniform(-BACKOFF_JITTER, BACKOFF_JITTER))
    return min(BACKOFF_CAP, jittered)


def default_transport(config: BackendConfig) -> Transport:
    if config.provider == "mock":
        replies = load_transcript(config.transcript) if config.transcript else {}
        return MockTransport(replies=replies)

    import httpx

    def send(request: ProviderRequest, timeout: float) -> ProviderResponse:
        try:
            resp = httpx.post(
                request.url, headers=request.headers, json=request.body, timeout=timeout
            )
        except httpx.TimeoutException as exc:
            return ProviderResponse(status=0, error=f"timeout: {exc}")
        except httpx.HTTPError as exc:
            return ProviderResponse(status=0, error=f"transport: {exc}")
        try:
            body = resp.json()
        except ValueError:
            body = None
        return ProviderResponse(status=resp.status_code, body=body, error=None)

    return send


class VlmClient:
    """One backend, shared retry/rate-limit/log state. Reentrant."""

    def __init__(
        self,
        backend: BackendConfig,
        transport: Optional[Transport] = None,
        log: Optional[AttemptLog] = None,
        sleeper: Callable[[float], None] = time.sleep,
        rng: Optional[random.Random] = None,
        clock: Callable[[], float] = time.monotonic,
    ) -> None:
        self.backend = backend
        self.adapter = ADAPTERS[backend.provider]
        self.transport = transport or default_transport(backend)
        self.log = log or AttemptLog()
        self._sleep = sleeper
        self._rng = rng or random.Random()
        self._clock = clock
        self._limiter = _limiter_for(backend)

    def _api_key(self) -> str:
        if not self.adapter.needs_key:
            return ""
        key = os.environ.get(self.backend.api_key_env, "")
        if not key:
            raise AuthError(
                f"environment variable {self.backend.api_key_env!r} is not set"
            )
        return key

    def extract(self, image: ImageInput, profile: PromptProfile) -> RawExtraction:
        """Send one image; retry transient failures up to max_retries."""
        key = self._api_key()  # fail before any network traffic
        png = to_png_bytes(image)
        request = self.adapter.build_request(self.backend, png, profile.text, key)
        request_id = uuid.uuid4().hex
        started = self._clock()

        retries_left = self.backend.max_retries
        attempt = 0
        while True:
            attempt += 1
            if self._limiter:
                self._limiter.acquire()
            sent = self._clock()
            response = self.transport(request, self.backend.timeout)
            latency = self._clock() - sent
            retryable = response.status == 0 or response.status in RETRYABLE_STATUSES
            self.log.record(
                ts=time.time(),
                request_id=request_id,
                backend=self.backend.label,
                model=self.backend.model_id,
                prompt_kind=profile.kind,
                attempt=attempt,
                status=response.status,
                retryable=retryable,
                latency_s=round(latency, 6),
                error=response.error,
            )

            if response.status == 200 and response.body is not None:
                text = self.adapter.parse_text(response.body)
                return RawExtraction(
                    backend=self.backend,
                    prompt_kind=profile.kind,
                    response_text=text,
                    latency=self._clock() - started,
                    request_id=request_id,
                )
            if response.status in (401, 403):
                raise AuthError(f"auth rejected (HTTP {response.status})")
            if not retryable:
                detail = response.error or (response.body or {}).get("error", "")
                raise ProviderError(f"HTTP {response.status}: {detail}")

            if retries_left <= 0:
                if response.status == 429:
                    raise RateLimited(f"retries exhausted after {attempt} attempts")
                if response.status == 0 and "timeout" in (response.error or ""):
                    raise Timeout(f"timed out after {attempt} attempts")
                raise ProviderError(
                    f"transient failure persisted (HTTP {response.status}, "
                    f"{attempt} attempts): {response.error or ''}"
                )
            self._sleep(backoff_delay(attempt - 1, self._rng))
            retries_left -= 1

    def batch_extract(
        self,
        images: Sequence[ImageInput],
        profile: PromptProfile,
        parallelism: int = 1,
    ) -> list[BatchItem]:
        """Extract many images; results come back in input order.

        Individual failures are captured per item, never raised.
        """
        if parallelism < 1:
            raise ValueError("parallelism must be >= 1")
        if not images:
            return []

        def run(pair: tuple[int, ImageInput]) -> BatchItem:
            index, image = pair
            try:
                return BatchItem(index=index, extraction=self.extract(image, profile))
            except VlmError as exc:
                return BatchItem(index=index, error=f"{type(exc).__name__}: {exc}")

        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(run, enumerate(images)))
        return results


def extract(
    image: ImageInput,
    profile: PromptProfile,
    backend: BackendConfig,
    **client_kwargs,
) -> RawExtraction:
    return VlmClient(backend, **client_kwargs).extract(image, profile)


def batch_extract(
    images: Sequence[ImageInput],
    profile: PromptProfile,
    backend: BackendConfig,
    parallelism: int = 1,
    **client_kwargs,
) -> list[BatchItem]:
    return VlmClient(backend, **client_kwargs).batch_extract(images, profile, parallelism)
