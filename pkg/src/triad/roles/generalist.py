"""Generalist role: triplet extraction, template generation, answer-type classification."""

from __future__ import annotations

import logging
import re
from dataclasses import replace

from ..config import RoleConfig
from ..llm import Gateway
from ..llm.prompts import CLASSIFY, TEMPLATE, TRIPLET
from ..sparql import SparqlSyntaxError, SparqlTemplate, extract_query_text, parse
from ..sparql.ast import MentionSlot
from .types import (AnswerType, ExtractionError, Mention, TemplateError, TripleMention,
                    explicit_entities, relation_texts)

log = logging.getLogger(__name__)

_TRIPLE = re.compile(r"<([^<>]*)>")
_TYPE = re.compile(r"<\s*(count|select|yes\s+or\s+no)\s*>", re.I)
_BARE_TYPE = re.compile(r"^\W*(count|select|yes\s+or\s+no)\W*$", re.I)


def parse_triplets(text: str) -> list[TripleMention]:
    out = []
    for body in _TRIPLE.findall(text):
        parts = [p.strip() for p in body.split(",")]
        if len(parts) < 3:
            continue
        subject, relation, obj = parts[0], parts[1], ", ".join(parts[2:])
        if not (subject and relation and obj):
            continue
        out.append(TripleMention(Mention(subject), Mention(relation), Mention(obj)))
    return out


def extract_triplets(question: str, gateway: Gateway, cfg: RoleConfig,
                     temperature: float = 0.0) -> list[TripleMention]:
    if not question.strip():
        raise ValueError("question is empty")
    for attempt in range(2):
        temp = temperature if attempt == 0 else cfg.retry_temperature
        response, _ = gateway.ask(TRIPLET, {"question": question}, cfg.n_shots, temp)
        mentions = parse_triplets(response.text)
        if mentions:
            return mentions
        log.info("unparseable triplet output %r", response.text[:80])
    raise ExtractionError("no <entity, relation, entity> triple in LLM output")


def parse_answer_type(text: str) -> AnswerType | None:
    m = _TYPE.search(text) or _BARE_TYPE.search(text.strip())
    return AnswerType.parse(" ".join(m.group(1).split())) if m else None


def classify_answer_type(question: str, gateway: Gateway, cfg: RoleConfig,
                         temperature: float = 0.0) -> AnswerType:
    for attempt in range(2):
        temp = temperature if attempt == 0 else cfg.retry_temperature
        response, _ = gateway.ask(CLASSIFY, {"question": question}, cfg.n_shots, temp)
        kind = parse_answer_type(response.text)
        if kind is not None:
            return kind
    log.warning("could not classify %r; defaulting to select", question)
    return AnswerType.SELECT


def _align_slots(template: SparqlTemplate, mentions: list[TripleMention]) -> SparqlTemplate:
    """Map slot texts onto mention texts (case-insensitively); reject unknown slots."""
    known = {t.lower(): t for t in explicit_entities(mentions) + relation_texts(mentions)}
    mapping: dict[MentionSlot, MentionSlot] = {}
    for slot in template.slots():
        canon = known.get(slot.text.lower())
        if canon is None:
            raise TemplateError(f"template slot <{slot.text}> is not one of the extracted mentions")
        mapping[slot] = MentionSlot(canon, slot.role)
    if all(k == v for k, v in mapping.items()):
        return template
    patterns = tuple(type(p)(*(mapping.get(t, t) if isinstance(t, MentionSlot) else t for t in p))
                     for p in template.patterns)
    return replace(template, patterns=patterns)


def generate_template(question: str, mentions: list[TripleMention], gateway: Gateway,
                      cfg: RoleConfig, temperature: float = 0.0) -> SparqlTemplate:
    if not mentions:
        raise ValueError("no mentions to build a template from")
    triplets = " ".join(t.render() for t in mentions)
    problem = ""
    for attempt in range(2):
        temp = temperature if attempt == 0 else cfg.retry_temperature
        response, _ = gateway.ask(TEMPLATE, {"question": question, "triplets": triplets},
                                  cfg.n_shots, temp)
        try:
            template = parse(extract_query_text(response.text))
            return _align_slots(template, mentions)
        except (SparqlSyntaxError, TemplateError) as exc:
            problem = str(exc)
            log.info("template rejected: %s", problem)
    raise TemplateError(f"no usable SPARQL template: {problem}")
