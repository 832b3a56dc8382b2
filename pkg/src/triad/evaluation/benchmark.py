"""Benchmark files: a JSON array of question items with gold answers."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from ..roles.types import AnswerType


class BenchmarkError(ValueError):
    pass


Gold = frozenset[str] | bool | int


@dataclass(frozen=True)
class BenchmarkItem:
    id: str
    question: str
    gold_answers: Gold
    answer_type: AnswerType | None = None
    gold_sparql: str | None = None
    gold_uris: frozenset[str] | None = None

    @property
    def kind(self) -> AnswerType:
        """Declared type, else inferred from the gold payload."""
        if self.answer_type is not None:
            return self.answer_type
        if isinstance(self.gold_answers, bool):
            return AnswerType.BOOLEAN
        if isinstance(self.gold_answers, int):
            return AnswerType.COUNT
        return AnswerType.SELECT

    def to_dict(self) -> dict:
        gold = self.gold_answers
        out = {"id": self.id, "question": self.question,
               "gold_answers": sorted(gold) if isinstance(gold, frozenset) else gold}
        if self.answer_type is not None:
            out["answer_type"] = "yes or no" if self.answer_type is AnswerType.BOOLEAN else self.answer_type.value
        if self.gold_sparql is not None:
            out["gold_sparql"] = self.gold_sparql
        if self.gold_uris is not None:
            out["gold_uris"] = sorted(self.gold_uris)
        return out


_KEYS = {"id", "question", "answer_type", "gold_answers", "gold_sparql", "gold_uris"}


def _item(i: int, raw: object) -> BenchmarkItem:
    def fail(msg: str) -> BenchmarkError:
        return BenchmarkError(f"item {i}: {msg}")

    if not isinstance(raw, dict):
        raise fail("must be an object")
    unknown = set(raw) - _KEYS
    if unknown:
        raise fail(f"unknown keys {sorted(unknown)}")
    for key in ("id", "question", "gold_answers"):
        if key not in raw:
            raise fail(f"missing {key!r}")
    if not isinstance(raw["id"], str) or not raw["id"]:
        raise fail("id must be a non-empty string")
    if not isinstance(raw["question"], str) or not raw["question"].strip():
        raise fail("question must be a non-empty string")

    kind = None
    if raw.get("answer_type") is not None:
        try:
            kind = AnswerType.parse(str(raw["answer_type"]))
        except ValueError:
            raise fail(f"unknown answer_type {raw['answer_type']!r}") from None

    gold = raw["gold_answers"]
    if isinstance(gold, bool):
        payload: Gold = gold
    elif isinstance(gold, int):
        payload = gold
    elif isinstance(gold, float) and gold.is_integer():
        payload = int(gold)
    elif isinstance(gold, list) and all(isinstance(g, (str, int, float)) and not isinstance(g, bool)
                                        for g in gold):
        payload = frozenset(str(g) for g in gold)
    else:
        raise fail("gold_answers must be an array of strings, a boolean or an integer")
    inferred = BenchmarkItem("", "", payload).kind
    if kind is not None and kind is not inferred:
        raise fail(f"gold_answers do not match answer_type {kind.value!r}")

    uris = raw.get("gold_uris")
    if uris is not None and not (isinstance(uris, list) and all(isinstance(u, str) for u in uris)):
        raise fail("gold_uris must be an array of strings")
    sparql = raw.get("gold_sparql")
    if sparql is not None and not isinstance(sparql, str):
        raise fail("gold_sparql must be a string")
    return BenchmarkItem(raw["id"], raw["question"], payload, kind, sparql,
                         frozenset(uris) if uris is not None else None)


def parse_benchmark(data: object) -> list[BenchmarkItem]:
    if not isinstance(data, list):
        raise BenchmarkError("benchmark must be a JSON array")
    items = [_item(i, raw) for i, raw in enumerate(data)]
    seen: dict[str, int] = {}
    for i, item in enumerate(items):
        if item.id in seen:
            raise BenchmarkError(f"item {i}: duplicate id {item.id!r} (first at item {seen[item.id]})")
        seen[item.id] = i
    return items


def load_benchmark(path: str | Path) -> list[BenchmarkItem]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise BenchmarkError(f"{path}: not valid JSON: {exc}") from None
    return parse_benchmark(data)
