"""Typed artifacts passed between the agent roles, and the failure taxonomy."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from ..index.candidate import UriCandidate

KB = "kb"
LLM_FALLBACK = "llm-fallback"
ABSTAIN = "abstain"


class AnswerType(str, Enum):
    COUNT = "count"
    SELECT = "select"
    BOOLEAN = "boolean"

    @classmethod
    def parse(cls, label: str) -> "AnswerType":
        key = label.strip().lower().strip("<>").strip()
        if key in ("yes or no", "yes/no", "boolean", "bool", "ask"):
            return cls.BOOLEAN
        return cls(key)


@dataclass(frozen=True)
class Mention:
    text: str

    @property
    def is_variable(self) -> bool:
        return self.text.startswith("?")

    @property
    def var_name(self) -> str:
        return self.text[1:] if self.is_variable else ""

    def __str__(self) -> str:
        return self.text


@dataclass(frozen=True)
class TripleMention:
    subject: Mention
    relation: Mention
    object: Mention

    def endpoints(self) -> tuple[Mention, Mention]:
        return self.subject, self.object

    def render(self) -> str:
        return f"<{self.subject}, {self.relation}, {self.object}>"

    def to_dict(self) -> dict:
        return {"subject": self.subject.text, "relation": self.relation.text, "object": self.object.text}


def explicit_entities(mentions: list[TripleMention]) -> list[str]:
    """Explicit endpoint texts in first-appearance order."""
    out: list[str] = []
    for t in mentions:
        for m in t.endpoints():
            if not m.is_variable and m.text not in out:
                out.append(m.text)
    return out


def relation_texts(mentions: list[TripleMention]) -> list[str]:
    out: list[str] = []
    for t in mentions:
        if not t.relation.is_variable and t.relation.text not in out:
            out.append(t.relation.text)
    return out


@dataclass(frozen=True)
class Answer:
    kind: AnswerType
    value: frozenset[str] | bool | int | None
    provenance: str

    @classmethod
    def abstain(cls, kind: AnswerType) -> "Answer":
        return cls(kind, frozenset() if kind is AnswerType.SELECT else None, ABSTAIN)

    @property
    def is_abstain(self) -> bool:
        return self.provenance == ABSTAIN

    def payload(self) -> list[str] | bool | int | None:
        if isinstance(self.value, frozenset):
            return sorted(self.value)
        return self.value

    def render(self) -> str:
        """Plain-text payload: ``true``/``false``, an integer, one value per line, or ``abstain``."""
        if self.is_abstain:
            return "abstain"
        if isinstance(self.value, bool):
            return "true" if self.value else "false"
        if isinstance(self.value, int):
            return str(self.value)
        return "\n".join(sorted(self.value or ()))

    def to_dict(self) -> dict:
        return {"kind": self.kind.value, "value": self.payload(), "provenance": self.provenance}


@dataclass
class Linking:
    """Per-mention candidate pools (filter or traversal output) and LLM selections."""

    pools: dict[str, list[UriCandidate]] = field(default_factory=dict)
    selected: dict[str, list[UriCandidate]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "pools": {k: [c.to_dict() for c in v] for k, v in self.pools.items()},
            "selected": {k: [c.to_dict() for c in v] for k, v in self.selected.items()},
        }


class PipelineError(Exception):
    """A method-level failure; the orchestrator degrades rather than crashing."""


class RetryableError(PipelineError):
    pass


class ExtractionError(PipelineError):
    pass


class TemplateError(RetryableError):
    pass


class StarvedMentionError(RetryableError):
    def __init__(self, mention: str, kind: str):
        self.mention = mention
        self.kind = kind
        super().__init__(f"empty {kind} candidate pool for mention {mention!r}")


class NoFeasibleQueryError(RetryableError):
    def __init__(self, message: str, candidates: list | None = None):
        super().__init__(message)
        self.candidates = candidates or []


class AnswerMismatchError(RetryableError):
    pass
