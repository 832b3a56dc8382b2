"""LLM backends: live chat-completion HTTP, transcript replay, recording, scripted."""

from __future__ import annotations

import hashlib
import json
import logging
import math
import os
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Protocol, Sequence

import httpx

log = logging.getLogger(__name__)

API_KEY_ENV = "TRIAD_LLM_API_KEY"
BASE_URL_ENV = "TRIAD_LLM_BASE_URL"
TRANSCRIPT_FIELDS = ("subtask", "prompt_sha256", "prompt", "response", "prompt_tokens",
                     "completion_tokens", "latency_ms")


class BackendError(RuntimeError):
    """Infrastructure failure talking to the model service."""

    def __init__(self, message: str, status: int | None = None, retry_after: float | None = None):
        super().__init__(message)
        self.status = status
        self.retry_after = retry_after


class ReplayMismatchError(LookupError):
    """No unconsumed transcript record matches the request."""


@dataclass(frozen=True)
class LlmRequest:
    template_id: str
    prompt: str
    temperature: float = 0.0
    max_tokens: int = 512
    model: str = "gpt-4"


@dataclass(frozen=True)
class LlmResponse:
    text: str
    prompt_tokens: int
    completion_tokens: int
    latency_ms: float


def prompt_sha256(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class TranscriptRecord:
    subtask: str
    prompt_sha256: str
    prompt: str
    response: str
    prompt_tokens: int
    completion_tokens: int
    latency_ms: float

    @classmethod
    def from_call(cls, request: LlmRequest, response: LlmResponse) -> "TranscriptRecord":
        return cls(request.template_id, prompt_sha256(request.prompt), request.prompt,
                   response.text, response.prompt_tokens, response.completion_tokens,
                   response.latency_ms)

    def to_json(self) -> str:
        return json.dumps(asdict(self), ensure_ascii=False, sort_keys=False)

    def to_response(self) -> LlmResponse:
        return LlmResponse(self.response, self.prompt_tokens, self.completion_tokens, self.latency_ms)


def read_transcript(path: str | Path) -> list[TranscriptRecord]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            data = json.loads(line)
            missing = [f for f in TRANSCRIPT_FIELDS if f not in data]
            if missing:
                raise ValueError(f"{path}:{lineno}: transcript record lacks {missing}")
            records.append(TranscriptRecord(**{f: data[f] for f in TRANSCRIPT_FIELDS}))
    return records


def write_transcript(records: Iterable[TranscriptRecord], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(rec.to_json() + "\n")


def estimate_tokens(text: str) -> int:
    """Rough count (about four characters per token) for scripted fixtures."""
    return max(1, math.ceil(len(text) / 4)) if text else 0


class Backend(Protocol):
    def complete(self, request: LlmRequest) -> LlmResponse: ...


class ChatCompletionBackend:
    """OpenAI-compatible ``/v1/chat/completions`` client with retry and an in-flight cap."""

    def __init__(self, base_url: str | None = None, api_key: str | None = None,
                 max_retries: int = 4, backoff_s: float = 1.0, timeout_s: float = 60.0,
                 max_in_flight: int = 4, client: httpx.Client | None = None,
                 sleep: Callable[[float], None] = time.sleep):
        self.base_url = (base_url or os.environ.get(BASE_URL_ENV) or "https://api.openai.com").rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV)
        self.max_retries = max_retries
        self.backoff_s = backoff_s
        self._client = client or httpx.Client(timeout=timeout_s)
        self._slots = threading.Semaphore(max_in_flight)
        self._sleep = sleep

    def _payload(self, request: LlmRequest) -> dict:
        return {
            "model": request.model,
            "messages": [{"role": "user", "content": request.prompt}],
            "temperature": request.temperature,
            "max_tokens": request.max_tokens,
        }

    def complete(self, request: LlmRequest) -> LlmResponse:
        if not self.api_key:
            raise BackendError(f"no API key; set {API_KEY_ENV}")
        url = f"{self.base_url}/v1/chat/completions"
        headers = {"Authorization": f"Bearer {self.api_key}"}
        delay = self.backoff_s
        last: BackendError | None = None
        for attempt in range(self.max_retries + 1):
            started = time.perf_counter()
            try:
                with self._slots:
                    resp = self._client.post(url, json=self._payload(request), headers=headers)
            except httpx.HTTPError as exc:
                last = BackendError(f"transport error: {exc}")
            else:
                elapsed = (time.perf_counter() - started) * 1000.0
                if resp.status_code == 200:
                    return self._parse(resp, elapsed)
                retry_after = _retry_after(resp)
                last = BackendError(f"HTTP {resp.status_code}: {resp.text[:200]}",
                                    status=resp.status_code, retry_after=retry_after)
                if resp.status_code not in (408, 409, 429) and resp.status_code < 500:
                    raise last
            if attempt < self.max_retries:
                wait = last.retry_after if last.retry_after is not None else delay
                log.warning("LLM call failed (%s); retrying in %.1fs", last, wait)
                self._sleep(wait)
                delay *= 2
        assert last is not None
        raise last

    @staticmethod
    def _parse(resp: httpx.Response, elapsed_ms: float) -> LlmResponse:
        try:
            data = resp.json()
            text = data["choices"][0]["message"]["content"] or ""
            usage = data.get("usage") or {}
        except (ValueError, KeyError, IndexError, TypeError) as exc:
            raise BackendError(f"malformed completion response: {exc}") from None
        return LlmResponse(text, int(usage.get("prompt_tokens", 0)),
                           int(usage.get("completion_tokens", 0)), elapsed_ms)


def _retry_after(resp: httpx.Response) -> float | None:
    value = resp.headers.get("retry-after")
    if value is None:
        return None
    try:
        return max(0.0, float(value))
    except ValueError:
        return None


class ReplayBackend:
    """Serves recorded responses: exact prompt hash first, else the next record of the same subtask."""

    def __init__(self, records: Sequence[TranscriptRecord], strict: bool = False):
        self.records = list(records)
        self.strict = strict
        self.consumed = [False] * len(self.records)
        self.fallbacks = 0

    @classmethod
    def from_file(cls, path: str | Path, strict: bool = False) -> "ReplayBackend":
        return cls(read_transcript(path), strict=strict)

    def complete(self, request: LlmRequest) -> LlmResponse:
        digest = prompt_sha256(request.prompt)
        free = [i for i, used in enumerate(self.consumed) if not used]
        pick = next((i for i in free if self.records[i].prompt_sha256 == digest), None)
        if pick is None and not self.strict:
            pick = next((i for i in free if self.records[i].subtask == request.template_id), None)
            if pick is not None:
                self.fallbacks += 1
        if pick is None:
            raise ReplayMismatchError(
                f"no unconsumed transcript record for subtask {request.template_id!r} "
                f"(prompt sha256 {digest[:12]})")
        self.consumed[pick] = True
        return self.records[pick].to_response()

    @property
    def remaining(self) -> int:
        return self.consumed.count(False)


class RecordingBackend:
    """Wraps a backend and appends each call to a JSON-lines transcript before returning."""

    def __init__(self, inner: Backend, sink: str | Path):
        self.inner = inner
        self.sink = Path(sink)
        self._lock = threading.Lock()
        self.sink.parent.mkdir(parents=True, exist_ok=True)
        self.sink.write_text("", encoding="utf-8")

    def complete(self, request: LlmRequest) -> LlmResponse:
        response = self.inner.complete(request)
        line = TranscriptRecord.from_call(request, response).to_json() + "\n"
        with self._lock, open(self.sink, "a", encoding="utf-8") as fh:
            fh.write(line)
            fh.flush()
            os.fsync(fh.fileno())
        return response


def record(backend: Backend, sink: str | Path) -> RecordingBackend:
    return RecordingBackend(backend, sink)


ScriptEntry = str | Callable[[LlmRequest], str]


class ScriptedBackend:
    """Answers from per-subtask queues of canned replies; used to author transcripts."""

    def __init__(self, script: Mapping[str, Sequence[ScriptEntry]], latency_ms: float = 1.0):
        self.queues = {k: list(v) for k, v in script.items()}
        self.latency_ms = latency_ms

    def complete(self, request: LlmRequest) -> LlmResponse:
        queue = self.queues.get(request.template_id)
        if not queue:
            raise ReplayMismatchError(f"script has no reply left for subtask {request.template_id!r}")
        entry = queue.pop(0)
        text = entry(request) if callable(entry) else entry
        return LlmResponse(text, estimate_tokens(request.prompt), estimate_tokens(text), self.latency_ms)

    def leftover(self) -> dict[str, int]:
        return {k: len(v) for k, v in self.queues.items() if v}
