from .backends import (API_KEY_ENV, BASE_URL_ENV, Backend, BackendError, ChatCompletionBackend,
                       LlmRequest, LlmResponse, RecordingBackend, ReplayBackend, ReplayMismatchError,
                       ScriptedBackend, TranscriptRecord, prompt_sha256, read_transcript, record,
                       write_transcript)
from .gateway import DEFAULT_MODEL, CallRecord, Gateway, Prices, cost_of
from .prompts import TEMPLATE_IDS, TEMPLATES, MissingVariableError, PromptTemplate, get_template, render_prompt


def complete(backend: Backend, request: LlmRequest) -> LlmResponse:
    return backend.complete(request)


__all__ = [
    "API_KEY_ENV", "BASE_URL_ENV", "Backend", "BackendError", "ChatCompletionBackend", "LlmRequest",
    "LlmResponse", "RecordingBackend", "ReplayBackend", "ReplayMismatchError", "ScriptedBackend",
    "TranscriptRecord", "prompt_sha256", "read_transcript", "record", "write_transcript",
    "DEFAULT_MODEL", "CallRecord", "Gateway", "Prices", "cost_of", "TEMPLATE_IDS", "TEMPLATES",
    "MissingVariableError", "PromptTemplate", "get_template", "render_prompt", "complete",
]
