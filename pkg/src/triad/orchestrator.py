"""Four-phase pipeline: question parsing, URI linking, query construction, answer generation.

Retry policy: a retryable failure re-enters at entity selection with the filter
pool doubled and selection temperature raised; the template is regenerated on
the final attempt (or sooner if the template itself was the problem). After the
last attempt the advisor answers from the model per answer type.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from pathlib import Path

from .config import RoleConfig, TriadConfig
from .index import MentionIndex
from .kb.execute import QueryError, UnsupportedFeatureError
from .kb.store import KbStore
from .llm import Gateway
from .roles import (Answer, AnswerType, ExtractionError, Linking, QuerySelection, RetryableError,
                    TemplateError, TripleMention, answer, classify_answer_type, extract_triplets,
                    fallback_answer, generate_template, select_entities, select_query,
                    select_relations)
from .sparql import SparqlTemplate, StarvedSlotError, render

QP, UL, QC, AG = "QP", "UL", "QC", "AG"
PHASES = (QP, UL, QC, AG)
_RETRYABLE = (RetryableError, StarvedSlotError, UnsupportedFeatureError)


@dataclass
class Deps:
    store: KbStore
    index: MentionIndex
    gateway: Gateway


@dataclass
class Step:
    name: str
    phase: str
    attempt: int | None
    calls: list[int]
    latency_ms: float
    error: str = ""

    def to_dict(self, timing: bool = True) -> dict:
        out = {"name": self.name, "phase": self.phase, "attempt": self.attempt, "calls": self.calls}
        if timing:
            out["latency_ms"] = self.latency_ms
        if self.error:
            out["error"] = self.error
        return out


@dataclass
class Attempt:
    index: int
    filter_pool: int
    temperature: float
    entities: Linking | None = None
    relations: Linking | None = None
    template: str | None = None
    template_regenerated: bool = False
    candidates: list[dict] = field(default_factory=list)
    query: str | None = None
    error: str = ""

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "filter_pool": self.filter_pool,
            "temperature": self.temperature,
            "entities": self.entities.to_dict() if self.entities else None,
            "relations": self.relations.to_dict() if self.relations else None,
            "template": self.template,
            "template_regenerated": self.template_regenerated,
            "candidates": self.candidates,
            "query": self.query,
            "error": self.error,
        }


@dataclass
class PipelineResult:
    question: str
    answer: Answer
    mentions: list[TripleMention] = field(default_factory=list)
    answer_type: AnswerType | None = None
    template: str | None = None
    query: str | None = None
    attempts: list[Attempt] = field(default_factory=list)
    steps: list[Step] = field(default_factory=list)
    phase_ms: dict[str, float] = field(default_factory=lambda: {p: 0.0 for p in PHASES})
    total_ms: float = 0.0
    prompt_tokens: int = 0
    completion_tokens: int = 0
    cost: float = 0.0
    llm_calls: int = 0
    error: str = ""

    def pools(self, kind: str = "all") -> list[dict[str, set[str]]]:
        """Per-attempt pool URI sets keyed by mention (``kind`` entity/relation/all)."""
        out = []
        for a in self.attempts:
            merged: dict[str, set[str]] = {}
            for name, link in (("entity", a.entities), ("relation", a.relations)):
                if link is None or kind not in (name, "all"):
                    continue
                for mention, pool in link.pools.items():
                    merged[f"{name}:{mention}"] = {c.uri for c in pool}
            out.append(merged)
        return out

    def linked_uris(self) -> tuple[set[str], set[str]]:
        """All URIs offered in pools and all URIs selected, across attempts."""
        pooled: set[str] = set()
        chosen: set[str] = set()
        for a in self.attempts:
            for link in (a.entities, a.relations):
                if link is None:
                    continue
                pooled |= {c.uri for v in link.pools.values() for c in v}
                chosen |= {c.uri for v in link.selected.values() for c in v}
        return pooled, chosen

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "question": self.question,
            "answer": self.answer.to_dict(),
            "answer_type": self.answer_type.value if self.answer_type else None,
            "mentions": [m.to_dict() for m in self.mentions],
            "template": self.template,
            "query": self.query,
            "attempts": [a.to_dict() for a in self.attempts],
            "steps": [s.to_dict(timing) for s in self.steps],
            "llm_calls": self.llm_calls,
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
            "cost": self.cost,
            "error": self.error,
        }
        if timing:
            out["phase_ms"] = dict(self.phase_ms)
            out["total_ms"] = self.total_ms
        return out


class _Runner:
    def __init__(self, question: str, deps: Deps, cfg: RoleConfig):
        self.q = question
        self.deps = deps
        self.cfg = cfg
        self.gw = deps.gateway
        self.first_call = len(self.gw.calls)
        self.started = time.perf_counter()
        self.result = PipelineResult(question, Answer.abstain(AnswerType.SELECT))

    def step(self, name: str, phase: str, attempt: int | None, fn, *args, **kwargs):
        before = len(self.gw.calls)
        t0 = time.perf_counter()
        error = ""
        try:
            return fn(*args, **kwargs)
        except Exception as exc:
            error = f"{type(exc).__name__}: {exc}"
            raise
        finally:
            ms = (time.perf_counter() - t0) * 1000.0
            self.result.steps.append(Step(name, phase, attempt, list(range(before, len(self.gw.calls))),
                                          ms, error))
            self.result.phase_ms[phase] += ms

    def over_budget(self) -> bool:
        return time.perf_counter() - self.started > self.cfg.budget_s

    def run(self) -> PipelineResult:
        try:
            self._run()
        finally:
            r = self.result
            r.total_ms = (time.perf_counter() - self.started) * 1000.0
            r.prompt_tokens, r.completion_tokens = self.gw.usage(self.first_call)
            r.cost = self.gw.cost(self.first_call)
            r.llm_calls = len(self.gw.calls) - self.first_call
        return self.result

    def _run(self) -> None:
        r, cfg, deps = self.result, self.cfg, self.deps
        try:
            mentions = self.step("extract_triplets", QP, None, extract_triplets, self.q, self.gw, cfg)
        except ExtractionError as exc:
            r.error = str(exc)
            mentions = None
        r.mentions = mentions or []
        kind = self.step("classify_answer_type", AG, None, classify_answer_type, self.q, self.gw, cfg)
        r.answer_type = kind
        r.answer = Answer.abstain(kind)
        if mentions is None:
            r.answer = self.step("answer", AG, None, fallback_answer, self.q, kind, self.gw, cfg)
            return

        template: SparqlTemplate | None = None
        regenerate = False
        prev_entities = prev_relations = None
        for i in range(cfg.retries + 1):
            if self.over_budget():
                r.error = f"time budget of {cfg.budget_s}s exhausted"
                break
            final = i == cfg.retries
            temp = 0.0 if i == 0 else cfg.retry_temperature
            att = Attempt(i, cfg.filter_pool * 2 ** i, temp)
            r.attempts.append(att)
            if i > 0 and final and cfg.reextract_on_final:
                mentions = self.step("extract_triplets", QP, i, extract_triplets, self.q, self.gw,
                                     cfg, temp)
                r.mentions = mentions
                template = None
            try:
                ents = self.step("select_entities", UL, i, select_entities, self.q, mentions,
                                 deps.index, self.gw, cfg, att.filter_pool, temp, prev_entities)
                att.entities = prev_entities = ents
                rels = self.step("select_relations", UL, i, select_relations, self.q, mentions, ents,
                                 deps.store, deps.index, self.gw, cfg, att.filter_pool, temp,
                                 prev_relations)
                att.relations = prev_relations = rels
                if template is None or regenerate or (final and i > 0):
                    att.template_regenerated = template is not None
                    template = None
                    template = self.step("generate_template", QC, i, generate_template, self.q,
                                         mentions, self.gw, cfg, temp)
                    r.template = render(template)
                regenerate = False
                att.template = render(template)
                selection = QuerySelection()
                try:
                    self.step("select_query", QC, i, select_query, self.q, template, ents, rels,
                              deps.store, self.gw, cfg, temp, selection)
                finally:
                    att.candidates = [c.to_dict() for c in selection.candidates]
                att.query = r.query = render(selection.chosen)
                r.answer = self.step("answer", AG, i, answer, self.q, selection.chosen, kind,
                                     deps.store, self.gw, cfg)
                return
            except _RETRYABLE as exc:
                att.error = f"{type(exc).__name__}: {exc}"
                r.query = None
                if isinstance(exc, (TemplateError, UnsupportedFeatureError, StarvedSlotError)):
                    regenerate = True
            except QueryError as exc:
                att.error = f"{type(exc).__name__}: {exc}"
                r.query = None
                regenerate = True
        r.answer = self.step("answer", AG, None, fallback_answer, self.q, kind, self.gw, cfg)


def run(question: str, deps: Deps, cfg: RoleConfig | None = None) -> PipelineResult:
    """Answer one question. Only infrastructure errors (backend, replay) escape."""
    if not question.strip():
        raise ValueError("question is empty")
    return _Runner(question, deps, cfg or RoleConfig()).run()


def call_bound(n_entity_mentions: int, n_relation_mentions: int, retries: int,
               reextract_on_final: bool = False) -> int:
    """Upper bound on LLM calls for one question.

    extraction and classification (each with one re-ask), one template
    generation per attempt (each with one re-ask), one selection call per
    mention plus one query selection per attempt, and one fallback answer.
    """
    attempts = retries + 1
    bound = 2 + 2 + 2 * attempts + attempts * (n_entity_mentions + n_relation_mentions + 1) + 1
    if reextract_on_final and retries > 0:
        bound += 2
    return bound


def build_deps(config: TriadConfig, gateway: Gateway) -> Deps:
    if config.kb is None:
        raise ValueError("config does not name a kb file")
    store = KbStore.load(config.kb, strict=config.kb_strict, label_predicates=config.label_predicates)
    snapshot = config.index_snapshot
    if snapshot is not None and Path(snapshot).exists():
        index = MentionIndex.load(snapshot)
    else:
        index = MentionIndex.build(store)
    return Deps(store, index, gateway)
