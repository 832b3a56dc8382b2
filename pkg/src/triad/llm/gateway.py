"""Prompt rendering + backend call + per-call accounting."""

from __future__ import annotations

import threading
from dataclasses import asdict, dataclass
from decimal import Decimal

from .backends import Backend, LlmRequest, LlmResponse, prompt_sha256
from .prompts import get_template

DEFAULT_MODEL = "gpt-4"


@dataclass(frozen=True)
class Prices:
    prompt_price_per_1k: float = 0.0
    completion_price_per_1k: float = 0.0


def cost_of(prompt_tokens: int, completion_tokens: int, prices: Prices) -> float:
    """Exact decimal cost of the token totals, returned as float."""
    total = (Decimal(prompt_tokens) * Decimal(str(prices.prompt_price_per_1k))
             + Decimal(completion_tokens) * Decimal(str(prices.completion_price_per_1k))) / 1000
    return float(total)


@dataclass(frozen=True)
class CallRecord:
    index: int
    subtask: str
    prompt_sha256: str
    temperature: float
    prompt_tokens: int
    completion_tokens: int
    latency_ms: float

    def to_dict(self) -> dict:
        return asdict(self)


class Gateway:
    def __init__(self, backend: Backend, model: str = DEFAULT_MODEL, prices: Prices | None = None,
                 max_tokens: int = 512):
        self.backend = backend
        self.model = model
        self.prices = prices or Prices()
        self.max_tokens = max_tokens
        self.calls: list[CallRecord] = []
        self._lock = threading.Lock()

    def ask(self, template_id: str, variables: dict, n_shots: int | None = None,
            temperature: float = 0.0) -> tuple[LlmResponse, int]:
        """Render, call, and log. Returns the response and its call index."""
        template = get_template(template_id)
        if n_shots is not None:
            n_shots = min(n_shots, len(template.shots))
        prompt = template.render(variables, n_shots)
        request = LlmRequest(template_id, prompt, temperature, self.max_tokens, self.model)
        response = self.backend.complete(request)
        with self._lock:
            index = len(self.calls)
            self.calls.append(CallRecord(index, template_id, prompt_sha256(prompt), temperature,
                                         response.prompt_tokens, response.completion_tokens,
                                         response.latency_ms))
        return response, index

    def usage(self, start: int = 0) -> tuple[int, int]:
        calls = self.calls[start:]
        return sum(c.prompt_tokens for c in calls), sum(c.completion_tokens for c in calls)

    def cost(self, start: int = 0) -> float:
        return cost_of(*self.usage(start), self.prices)
