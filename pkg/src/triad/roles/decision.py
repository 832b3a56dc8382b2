"""Decision-maker role: filter candidate pools, then let the LLM choose from them."""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace

from ..config import RoleConfig
from ..index import ENTITY, RELATION, LLM_SELECTED, TRAVERSAL, MentionIndex, UriCandidate, rerank
from ..kb.execute import ResultSet, UnsupportedFeatureError, execute
from ..kb.store import KbStore
from ..llm import Gateway
from ..llm.prompts import ENTITY_SELECT, QUERY_SELECT, RELATION_SELECT
from ..sparql import ASK, SparqlQuery, SparqlSyntaxError, SparqlTemplate, enumerate_candidates, parse, render
from ..sparql.parser import extract_query_text
from .types import (Linking, NoFeasibleQueryError, StarvedMentionError, TripleMention,
                    explicit_entities)

_URI = re.compile(r"https?://[^\s<>\"'`,]+")
_NUMBERED = re.compile(r"^\s*(?:\d+[.)]|[-*•])\s*")


def parse_selection(text: str, pool: list[UriCandidate], k: int) -> list[UriCandidate]:
    """Pool members named in the LLM output, in output order, at most ``k``."""
    by_uri = {c.uri: c for c in pool}
    picked: list[UriCandidate] = []
    for raw in _URI.findall(text):
        uri = raw
        # trailing punctuation may belong to the URI, e.g. Curie_(unit)
        while uri not in by_uri and uri and uri[-1] in ".;:)]}>":
            uri = uri[:-1]
        if uri in by_uri and by_uri[uri] not in picked:
            picked.append(by_uri[uri])
        if len(picked) == k:
            break
    return picked


def _merge(new: list[UriCandidate], previous: list[UriCandidate] | None) -> list[UriCandidate]:
    """Keep every earlier pool member so retries only ever widen pools."""
    if not previous:
        return new
    seen = {c.uri for c in new}
    extra = [c for c in previous if c.uri not in seen]
    if not extra:
        return new
    floor = min((c.score for c in new), default=0.0)
    # appended members must not outscore what precedes them
    tail = [replace(c, score=min(c.score, floor)) for c in extra]
    return rerank(new + tail)


def _choose(question: str, template_id: str, variables: dict, pool: list[UriCandidate], k: int,
            gateway: Gateway, cfg: RoleConfig, temperature: float) -> list[UriCandidate]:
    if len(pool) <= k:
        # every option is taken whatever the model answers
        return rerank(pool, LLM_SELECTED)
    variables = dict(variables, question=question, k=k, uris="\n".join(c.uri for c in pool))
    response, _ = gateway.ask(template_id, variables, cfg.n_shots, temperature)
    picked = parse_selection(response.text, pool, k)
    if not picked:
        picked = pool[:k]
    return rerank(picked, LLM_SELECTED)


def select_entities(question: str, mentions: list[TripleMention], index: MentionIndex,
                    gateway: Gateway, cfg: RoleConfig, filter_pool: int | None = None,
                    temperature: float = 0.0, previous: Linking | None = None) -> Linking:
    limit = filter_pool or cfg.filter_pool
    out = Linking()
    for text in explicit_entities(mentions):
        pool = index.search(text, kind=ENTITY, limit=limit)
        pool = _merge(pool, previous.pools.get(text) if previous else None)
        if not pool:
            raise StarvedMentionError(text, ENTITY)
        out.pools[text] = pool
        out.selected[text] = _choose(question, ENTITY_SELECT, {"mention": text}, pool,
                                     cfg.k_entity, gateway, cfg, temperature)
    return out


def relation_pool(relation: str, triples: list[TripleMention], entities: Linking, store: KbStore,
                  index: MentionIndex, cfg: RoleConfig, limit: int) -> list[UriCandidate]:
    """One-hop predicates around the candidate endpoints, connecting predicates first."""
    ends: list[list[str]] = [[], []]
    both_explicit = False
    for t in triples:
        if t.relation.text != relation:
            continue
        for side, m in enumerate(t.endpoints()):
            if not m.is_variable:
                ends[side] += [c.uri for c in entities.selected.get(m.text, [])]
        both_explicit |= not t.subject.is_variable and not t.object.is_variable
    if not ends[0] and not ends[1]:
        # no anchored endpoint: fall back to label search over relations
        return index.search(relation, kind=RELATION, limit=limit)

    predicates: set[str] = set()
    for uri in ends[0] + ends[1]:
        predicates |= {p for p, _ in store.neighbors(uri)}
    connecting: set[str] = set()
    if both_explicit and cfg.connect_boost:
        for a in ends[0]:
            for b in ends[1]:
                connecting |= store.connecting_predicates(a, b)
    sims = index.similarity(relation, predicates)
    boost = 1.0 + max(sims.values(), default=0.0)
    scored = sorted(((sims[p] + (boost if p in connecting else 0.0), p) for p in predicates),
                    key=lambda sp: (-sp[0], sp[1]))[:cfg.relation_pool_cap]
    return [UriCandidate(p, store.label(p), s, i, TRAVERSAL) for i, (s, p) in enumerate(scored, start=1)]


def select_relations(question: str, mentions: list[TripleMention], entities: Linking,
                     store: KbStore, index: MentionIndex, gateway: Gateway, cfg: RoleConfig,
                     filter_pool: int | None = None, temperature: float = 0.0,
                     previous: Linking | None = None) -> Linking:
    limit = filter_pool or cfg.filter_pool
    out = Linking()
    seen: list[str] = []
    for t in mentions:
        rel = t.relation.text
        if t.relation.is_variable or rel in seen:
            continue
        seen.append(rel)
        pool = relation_pool(rel, mentions, entities, store, index, cfg, limit)
        pool = _merge(pool, previous.pools.get(rel) if previous else None)
        if not pool:
            raise StarvedMentionError(rel, RELATION)
        out.pools[rel] = pool
        pair = []
        for m in t.endpoints():
            labels = [c.label for c in entities.selected.get(m.text, [])]
            pair.append(f"{m.text} ({', '.join(labels)})" if labels else m.text)
        out.selected[rel] = _choose(question, RELATION_SELECT, {"entities": "; ".join(pair)}, pool,
                                    cfg.k_relation, gateway, cfg, temperature)
    return out


@dataclass
class QueryCandidate:
    query: SparqlQuery
    text: str
    feasible: bool
    result: ResultSet | None = None
    note: str = ""

    def to_dict(self) -> dict:
        out = {"query": self.text, "feasible": self.feasible}
        if self.note:
            out["note"] = self.note
        return out


@dataclass
class QuerySelection:
    candidates: list[QueryCandidate] = field(default_factory=list)
    chosen: SparqlQuery | None = None
    llm_called: bool = False


def _normalized(text: str) -> str:
    return " ".join(_NUMBERED.sub("", text).split())


def _pick(text: str, survivors: list[QueryCandidate]) -> QueryCandidate | None:
    wanted = _normalized(text)
    for cand in survivors:
        if _normalized(cand.text) == wanted:
            return cand
    try:
        structure = parse(extract_query_text(text)).structure()
    except SparqlSyntaxError:
        structure = None
    for cand in survivors:
        if structure is not None and cand.query.structure() == structure:
            return cand
    m = re.fullmatch(r"\s*(\d+)\s*\.?\s*", text)
    if m and 1 <= int(m.group(1)) <= len(survivors):
        return survivors[int(m.group(1)) - 1]
    return None


def select_query(question: str, template: SparqlTemplate, entities: Linking, relations: Linking,
                 store: KbStore, gateway: Gateway, cfg: RoleConfig,
                 temperature: float = 0.0, selection: QuerySelection | None = None) -> QuerySelection:
    """Enumerate, execute, keep executable candidates, and pick one.

    ``selection`` (if given) is filled in place so callers keep the candidate
    verdicts even when no feasible query exists.
    """
    sel = selection if selection is not None else QuerySelection()
    queries = enumerate_candidates(template, entities.selected, relations.selected,
                                   cfg.enumeration_cap)
    for q in queries:
        result = execute(store, q)  # UnsupportedFeatureError propagates as retryable
        feasible = q.form == ASK or not result.is_empty()
        sel.candidates.append(QueryCandidate(q, render(q), feasible, result))
    survivors = [c for c in sel.candidates if c.feasible]
    if not survivors:
        raise NoFeasibleQueryError(f"none of {len(queries)} candidate queries returned results",
                                   sel.candidates)
    if len(survivors) == 1:
        sel.chosen = survivors[0].query
        return sel
    response, _ = gateway.ask(QUERY_SELECT, {"question": question,
                                             "candidates": "\n".join(c.text for c in survivors)},
                              cfg.n_shots, temperature)
    sel.llm_called = True
    picked = _pick(response.text.strip(), survivors) or survivors[0]
    sel.chosen = picked.query
    return sel


__all__ = ["parse_selection", "select_entities", "select_relations", "relation_pool",
           "select_query", "QuerySelection", "QueryCandidate", "UnsupportedFeatureError"]
