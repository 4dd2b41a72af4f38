from .client import (
    AttemptLog,
    AuthError,
    BatchItem,
    ProviderError,
    RateLimited,
    RateLimiter,
    RawExtraction,
    Timeout,
    VlmClient,
    VlmError,
    backoff_delay,
    batch_extract,
    extract,
    preprocess,
    to_png_bytes,
)
from .config import (
    DETAILED_PROMPT,
    SIMPLE_PROMPT,
    BackendConfig,
    PromptProfile,
    load_backends_file,
)
from .mock import MockTransport, load_transcript, save_transcript, transcript_key
from .providers import ADAPTERS, ProviderRequest, ProviderResponse

__all__ = [
    "ADAPTERS",
    "AttemptLog",
    "AuthError",
    "BackendConfig",
    "BatchItem",
    "DETAILED_PROMPT",
    "MockTransport",
    "PromptProfile",
    "ProviderError",
    "ProviderRequest",
    "ProviderResponse",
    "RateLimited",
    "RateLimiter",
    "RawExtraction",
    "SIMPLE_PROMPT",
    "Timeout",
    "VlmClient",
    "VlmError",
    "backoff_delay",
    "batch_extract",
    "extract",
    "load_backends_file",
    "load_transcript",
    "preprocess",
    "save_transcript",
    "to_png_bytes",
    "transcript_key",
]
