"""Advisor role: typed answers from the KB, or from the model when no query survives."""

from __future__ import annotations

import re
from decimal import Decimal, InvalidOperation

from ..config import RoleConfig
from ..kb.execute import BINDINGS, BOOLEAN, COUNT_KIND, ResultSet, execute
from ..kb.store import KbStore
from ..kb.terms import Literal
from ..llm import Gateway
from ..llm.prompts import ANSWER_BOOLEAN, ANSWER_FACT
from ..sparql import SparqlQuery
from .types import KB, LLM_FALLBACK, Answer, AnswerMismatchError, AnswerType

_TRUE = ("true", "yes")
_FALSE = ("false", "no")


def parse_boolean(text: str) -> bool | None:
    words = re.findall(r"[a-z]+", text.lower())
    if not words:
        return None
    if words[0] in _TRUE:
        return True
    if words[0] in _FALSE:
        return False
    return None


def parse_fact(text: str) -> str | None:
    line = text.strip().splitlines()[0] if text.strip() else ""
    line = line.strip().rstrip(".").strip().strip("\"'`").rstrip(".").strip()
    return line or None


def _as_int(result: ResultSet) -> int:
    rows = result.rows
    if len(rows) == 1 and len(rows[0]) == 1:
        (value,) = rows[0].values()
        if isinstance(value, Literal):
            try:
                number = Decimal(value.lexical)
            except InvalidOperation:
                number = None
            if number is not None and number == number.to_integral_value():
                return int(number)
    return len(result.values())


def answer_from_result(result: ResultSet, kind: AnswerType) -> Answer:
    """Coerce a result into the classified answer type."""
    if kind is AnswerType.BOOLEAN:
        if result.kind == BOOLEAN:
            return Answer(kind, bool(result.value), KB)
        if result.kind == COUNT_KIND:
            return Answer(kind, bool(result.value), KB)
        return Answer(kind, bool(result.rows), KB)
    if kind is AnswerType.COUNT:
        if result.kind == COUNT_KIND:
            return Answer(kind, int(result.value), KB)
        if result.kind == BINDINGS:
            return Answer(kind, _as_int(result), KB)
        raise AnswerMismatchError("ASK query cannot answer a count question")
    if result.kind == BINDINGS:
        return Answer(kind, frozenset(result.values()), KB)
    if result.kind == COUNT_KIND:
        return Answer(kind, frozenset({str(result.value)}), KB)
    raise AnswerMismatchError("ASK query cannot answer a select question")


def fallback_answer(question: str, kind: AnswerType, gateway: Gateway, cfg: RoleConfig,
                    temperature: float = 0.0) -> Answer:
    """Answer from the model's own knowledge: yes/no and single facts only."""
    if kind is AnswerType.BOOLEAN:
        response, _ = gateway.ask(ANSWER_BOOLEAN, {"question": question}, cfg.n_shots, temperature)
        value = parse_boolean(response.text)
        return Answer.abstain(kind) if value is None else Answer(kind, value, LLM_FALLBACK)
    if kind is AnswerType.SELECT:
        response, _ = gateway.ask(ANSWER_FACT, {"question": question}, cfg.n_shots, temperature)
        fact = parse_fact(response.text)
        return Answer.abstain(kind) if fact is None else Answer(kind, frozenset({fact}), LLM_FALLBACK)
    return Answer.abstain(kind)


def answer(question: str, query: SparqlQuery | None, kind: AnswerType, store: KbStore,
           gateway: Gateway, cfg: RoleConfig, temperature: float = 0.0) -> Answer:
    if query is None:
        return fallback_answer(question, kind, gateway, cfg, temperature)
    return answer_from_result(execute(store, query), kind)
