"""Slot instantiation and best-first enumeration of grounded candidate queries."""

from __future__ import annotations

import heapq
from dataclasses import replace
from typing import Mapping, Sequence

from ..index.candidate import UriCandidate
from ..kb.store import TriplePattern
from .ast import RELATION, MentionSlot, SparqlQuery, SparqlTemplate

DEFAULT_CAP = 50


class MissingSlotError(KeyError):
    def __init__(self, missing: Sequence[MentionSlot]):
        self.missing = list(missing)
        super().__init__("no URI assigned for slot(s): " + ", ".join(f"<{s.text}>" for s in self.missing))


class StarvedSlotError(ValueError):
    def __init__(self, slot: MentionSlot):
        self.slot = slot
        super().__init__(f"no candidates for {slot.role} slot <{slot.text}>")


def instantiate(template: SparqlTemplate, assignment: Mapping[MentionSlot, str]) -> SparqlQuery:
    slots = template.slots()
    missing = [s for s in slots if s not in assignment]
    if missing:
        raise MissingSlotError(missing)
    patterns = tuple(
        TriplePattern(*(assignment[t] if isinstance(t, MentionSlot) else t for t in p))
        for p in template.patterns
    )
    grounded = replace(template, patterns=patterns)
    return SparqlQuery.from_template(grounded, tuple((s, assignment[s]) for s in slots))


def _lookup(slot: MentionSlot, entity_cands, relation_cands) -> list[UriCandidate]:
    table = relation_cands if slot.role == RELATION else entity_cands
    for key in (slot, slot.text):
        if key in table:
            return sorted(table[key], key=lambda c: c.rank)
    return []


def enumerate_candidates(template: SparqlTemplate,
                         entity_cands: Mapping,
                         relation_cands: Mapping,
                         cap: int = DEFAULT_CAP) -> list[SparqlQuery]:
    """Grounded queries ordered by (sum of candidate ranks, assignment URIs), at most ``cap``.

    Candidate tables are keyed by slot text (or by :class:`MentionSlot`). The
    product is walked lazily with a heap, so only ``cap`` assignments are built.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    slots = template.slots()
    lists = []
    for slot in slots:
        cands = _lookup(slot, entity_cands, relation_cands)
        if not cands:
            raise StarvedSlotError(slot)
        lists.append(cands)

    def key(idx: tuple[int, ...]):
        return (sum(lists[k][i].rank for k, i in enumerate(idx)),
                tuple(lists[k][i].uri for k, i in enumerate(idx)), idx)

    start = (0,) * len(lists)
    heap = [key(start)]
    seen = {start}
    out: list[SparqlQuery] = []
    while heap and len(out) < cap:
        _, _, idx = heapq.heappop(heap)
        assignment = {slot: lists[k][i].uri for k, (slot, i) in enumerate(zip(slots, idx))}
        out.append(instantiate(template, assignment))
        for k in range(len(idx)):
            if idx[k] + 1 < len(lists[k]):
                nxt = idx[:k] + (idx[k] + 1,) + idx[k + 1:]
                if nxt not in seen:
                    seen.add(nxt)
                    heapq.heappush(heap, key(nxt))
    return out
