import math

import pytest
from hypothesis import given, settings, strategies as st

from triad.index import UriCandidate, rerank
from triad.sparql import (MissingSlotError, MentionSlot, StarvedSlotError, enumerate_candidates,
                          instantiate, parse, render)
from triad.sparql.ast import ENTITY, RELATION

from oracles import product_order

EX = "http://ex.org/"


def cands(prefix, n):
    return rerank(UriCandidate(f"{EX}{prefix}{i}", f"{prefix}{i}", 1.0 / (i + 1), 0) for i in range(n))


def test_instantiate_and_record_assignment():
    t = parse("SELECT ?x WHERE { <Ada> <born in> ?x }")
    a = {MentionSlot("Ada", ENTITY): f"{EX}Ada", MentionSlot("born in", RELATION): f"{EX}birthPlace"}
    q = instantiate(t, a)
    assert render(q) == f"SELECT ?x WHERE {{ <{EX}Ada> <{EX}birthPlace> ?x }}"
    assert q.assignment_map == a
    with pytest.raises(MissingSlotError):
        instantiate(t, {MentionSlot("Ada", ENTITY): f"{EX}Ada"})


def test_same_text_different_roles_are_distinct_slots():
    t = parse("SELECT ?x WHERE { <spouse> <spouse> ?x }")
    assert len(t.slots()) == 2
    qs = enumerate_candidates(t, {"spouse": cands("e", 2)}, {"spouse": cands("r", 3)})
    assert len(qs) == 6


def test_starved_slot():
    t = parse("ASK { <a> <b> <c> }")
    with pytest.raises(StarvedSlotError):
        enumerate_candidates(t, {"a": cands("e", 1), "c": []}, {"b": cands("r", 1)})


def test_order_is_rank_sum_then_uri():
    t = parse("SELECT ?x WHERE { <a> <b> ?x }")
    qs = enumerate_candidates(t, {"a": cands("e", 2)}, {"b": cands("r", 2)})
    got = [tuple(u for _, u in q.assignment) for q in qs]
    assert got == [(f"{EX}e0", f"{EX}r0"), (f"{EX}e0", f"{EX}r1"), (f"{EX}e1", f"{EX}r0"),
                   (f"{EX}e1", f"{EX}r1")]


@settings(max_examples=300, deadline=None)
@given(st.lists(st.integers(1, 6), min_size=1, max_size=4), st.integers(1, 80))
def test_counting_law_and_best_first_order(sizes, cap):
    names = [f"m{i}" for i in range(len(sizes))]
    body = " . ".join(f"?v{i} <r{i}> <{n}>" for i, n in enumerate(names))
    t = parse(f"SELECT * WHERE {{ {body} }}")
    ents = {n: cands(n, k) for n, k in zip(names, sizes)}
    rels = {f"r{i}": cands(f"r{i}x", 1) for i in range(len(sizes))}
    qs = enumerate_candidates(t, ents, rels, cap)
    assert len(qs) == min(cap, math.prod(sizes))
    assert len({render(q) for q in qs}) == len(qs)
    lists = [ents[n] if s.role == ENTITY else rels[s.text] for s in t.slots() for n in [s.text]]
    want = product_order(lists)[:len(qs)]
    got = [(sum(next(c.rank for c in lists[k] if c.uri == u) for k, (_, u) in enumerate(q.assignment)),
            tuple(u for _, u in q.assignment)) for q in qs]
    assert got == want
