import pytest

from triad.config import RoleConfig
from triad.index import LLM_SELECTED, TRAVERSAL, UriCandidate
from triad.kb.execute import ResultSet, execute
from triad.kb.terms import Literal
from triad.llm import Gateway, ScriptedBackend
from triad.roles import (ABSTAIN, KB, LLM_FALLBACK, Answer, AnswerMismatchError, AnswerType,
                         ExtractionError, Linking, Mention, NoFeasibleQueryError, StarvedMentionError,
                         TemplateError, TripleMention, answer_from_result, classify_answer_type,
                         extract_triplets, fallback_answer, generate_template, parse_selection,
                         parse_triplets, relation_pool, select_entities, select_query,
                         select_relations)
from triad.roles.advisor import parse_fact
from triad.roles.generalist import parse_answer_type
from triad.sparql import parse

from conftest import O, R

CFG = RoleConfig()


def gw(**script):
    return Gateway(ScriptedBackend({k.replace("_", "-"): v for k, v in script.items()}))


def tm(s, r, o):
    return TripleMention(Mention(s), Mention(r), Mention(o))


def test_parse_triplets():
    out = parse_triplets("<?horse, participated in, ?race> <?horse, breeder, Jacques Van't Hart>")
    assert out == [tm("?horse", "participated in", "?race"), tm("?horse", "breeder", "Jacques Van't Hart")]
    assert parse_triplets("<Paris, capital of, France, Europe>") == [tm("Paris", "capital of", "France, Europe")]
    assert parse_triplets("<a, b> nothing <, x, y>") == []


def test_extraction_reasks_once_then_fails():
    g = gw(triplet=["no idea", "<Ada Lovelace, born in, ?place>"])
    assert extract_triplets("Where was Ada born?", g, CFG) == [tm("Ada Lovelace", "born in", "?place")]
    assert [c.temperature for c in g.calls] == [0.0, CFG.retry_temperature]
    with pytest.raises(ExtractionError):
        extract_triplets("Q?", gw(triplet=["x", "y"]), CFG)


@pytest.mark.parametrize("text, kind", [
    ("<count>", AnswerType.COUNT), ("The type is <yes or no>.", AnswerType.BOOLEAN),
    ("select", AnswerType.SELECT), ("<Yes  or No>", AnswerType.BOOLEAN), ("dunno", None),
])
def test_parse_answer_type(text, kind):
    assert parse_answer_type(text) is kind


def test_classify_defaults_to_select():
    g = gw(classify=["?", "??"])
    assert classify_answer_type("Q?", g, CFG) is AnswerType.SELECT and len(g.calls) == 2


def test_template_aligns_slots_and_rejects_unknown():
    mentions = [tm("Ada Lovelace", "born in", "?place")]
    t = generate_template("Q?", mentions, gw(template=["SELECT ?place WHERE { <ada lovelace> <Born In> ?place }"]), CFG)
    assert [s.text for s in t.slots()] == ["Ada Lovelace", "born in"]
    g = gw(template=["SELECT ?x WHERE { <Ada> <born in> ?x }", "not sparql"])
    with pytest.raises(TemplateError):
        generate_template("Q?", mentions, g, CFG)
    assert len(g.calls) == 2


def pool(*names):
    return [UriCandidate(R + n, n, 1.0, i) for i, n in enumerate(names, start=1)]


def test_parse_selection_drops_hallucinations_and_respects_k():
    p = pool("Curie_(unit)", "Marie_Curie", "Pierre_Curie")
    text = f"1. {R}Made_Up\n2. {R}Curie_(unit).\n{R}Pierre_Curie\n{R}Marie_Curie"
    assert [c.uri for c in parse_selection(text, p, 2)] == [R + "Curie_(unit)", R + "Pierre_Curie"]


def test_entity_selection_calls_only_when_pool_exceeds_k(toy_index):
    g = gw()
    link = select_entities("Q?", [tm("Charles Babbage", "designer", "?m")], toy_index, g, CFG)
    assert g.calls == [] and [c.uri for c in link.selected["Charles Babbage"]] == [R + "Charles_Babbage"]
    assert link.selected["Charles Babbage"][0].source == LLM_SELECTED
    g = gw(entity_select=[f"{R}Nowhere"])
    link = select_entities("Q?", [tm("Marie Curie", "spouse", "?p")], toy_index, g, CFG)
    assert len(g.calls) == 1
    assert [c.uri for c in link.selected["Marie Curie"]] == [c.uri for c in link.pools["Marie Curie"][:2]]
    with pytest.raises(StarvedMentionError):
        select_entities("Q?", [tm("Qwxyz", "r", "?x")], toy_index, gw(), CFG)


def test_relation_pool_traversal_and_boost(toy_store, toy_index):
    mentions = [tm("Poland", "capital", "Warsaw")]
    ents = Linking(selected={"Poland": pool("Poland"), "Warsaw": pool("Warsaw")})
    rp = relation_pool("capital", mentions, ents, toy_store, toy_index, CFG, 10)
    assert rp[0].uri == O + "capital" and all(c.source == TRAVERSAL for c in rp)
    neighbours = {p for u in (R + "Poland", R + "Warsaw") for p, _ in toy_store.neighbors(u)}
    assert {c.uri for c in rp} == neighbours
    # connecting predicate beats a better text match when the boost is on
    mentions = [tm("Poland", "birth place", "Warsaw")]
    rp = relation_pool("birth place", mentions, ents, toy_store, toy_index, CFG, 10)
    assert rp[0].uri == O + "capital"
    rp = relation_pool("birth place", mentions, ents, toy_store, toy_index,
                       RoleConfig(connect_boost=False), 10)
    assert rp[0].uri == O + "birthPlace"
    # no explicit endpoint: label search over relations
    rp = relation_pool("spouse", [tm("?a", "spouse", "?b")], Linking(), toy_store, toy_index, CFG, 10)
    assert [c.uri for c in rp] == [O + "spouse"]


def test_select_relations_prompt_mentions_entity_labels(toy_store, toy_index):
    seen = []
    g = Gateway(ScriptedBackend({"relation-select": [lambda r: seen.append(r.prompt) or f"{O}capital"]}))
    ents = Linking(selected={"Poland": pool("Poland"), "Warsaw": pool("Warsaw")})
    link = select_relations("Is Warsaw the capital of Poland?", [tm("Poland", "capital", "Warsaw")], ents,
                            toy_store, toy_index, g, CFG)
    assert "Entities: Poland (Poland); Warsaw (Warsaw)" in seen[0]
    assert [c.uri for c in link.selected["capital"]] == [O + "capital"]


def _links(ent, rel):
    return Linking(selected={k: pool(*v) for k, v in ent.items()}), \
        Linking(selected={k: [UriCandidate(O + n, n, 1.0, i) for i, n in enumerate(v, 1)] for k, v in rel.items()})


def test_select_query_filters_and_picks(toy_store):
    t = parse("SELECT ?x WHERE { <Marie Curie> <spouse> ?x }")
    ents, rels = _links({"Marie Curie": ["Curie_(unit)", "Marie_Curie"]}, {"spouse": ["spouse", "award"]})
    g = gw(query_select=["garbage"])
    sel = select_query("Q?", t, ents, rels, toy_store, g, CFG)
    survivors = [c for c in sel.candidates if c.feasible]
    assert len(sel.candidates) == 4 and len(survivors) == 2
    for c in survivors:
        assert not execute(toy_store, c.query).is_empty()
    assert sel.llm_called and sel.chosen == survivors[0].query  # off-list reply -> top survivor
    g = gw(query_select=["2"])
    assert select_query("Q?", t, ents, rels, toy_store, g, CFG).chosen == survivors[1].query

    ents, rels = _links({"Marie Curie": ["Curie_(unit)"]}, {"spouse": ["spouse"]})
    with pytest.raises(NoFeasibleQueryError):
        select_query("Q?", t, ents, rels, toy_store, gw(), CFG)


def test_ask_candidates_always_survive(toy_store):
    t = parse("ASK { <Charles Babbage> <award> <Nobel> }")
    ents, rels = _links({"Charles Babbage": ["Charles_Babbage"], "Nobel": ["Nobel_Prize_in_Physics"]},
                        {"award": ["award"]})
    g = gw()
    sel = select_query("Q?", t, ents, rels, toy_store, g, CFG)
    assert sel.candidates[0].feasible and not sel.llm_called and g.calls == []


def test_answer_coercion():
    sel = ResultSet("bindings", rows=[{"x": "http://a"}, {"x": "http://b"}], variables=("x",))
    assert answer_from_result(sel, AnswerType.SELECT) == Answer(AnswerType.SELECT, frozenset({"http://a", "http://b"}), KB)
    assert answer_from_result(sel, AnswerType.COUNT).value == 2
    assert answer_from_result(sel, AnswerType.BOOLEAN).value is True
    num = ResultSet("bindings", rows=[{"n": Literal("8982000", None, "xsd:integer")}], variables=("n",))
    assert answer_from_result(num, AnswerType.COUNT).value == 8982000
    cnt = ResultSet("count", value=0)
    assert answer_from_result(cnt, AnswerType.BOOLEAN).value is False
    assert answer_from_result(cnt, AnswerType.SELECT).value == frozenset({"0"})
    with pytest.raises(AnswerMismatchError):
        answer_from_result(ResultSet("boolean", value=True), AnswerType.COUNT)


def test_fallback_answers():
    cfg = CFG
    a = fallback_answer("Q?", AnswerType.BOOLEAN, gw(answer_boolean=["True."]), cfg)
    assert (a.value, a.provenance) == (True, LLM_FALLBACK)
    a = fallback_answer("Q?", AnswerType.SELECT, gw(answer_fact=['"Pierre Curie".']), cfg)
    assert a.value == frozenset({"Pierre Curie"})
    g = gw()
    assert fallback_answer("Q?", AnswerType.COUNT, g, cfg).provenance == ABSTAIN and g.calls == []
    assert fallback_answer("Q?", AnswerType.BOOLEAN, gw(answer_boolean=["maybe"]), cfg).is_abstain
    assert parse_fact("  \n") is None


def test_answer_render():
    assert Answer(AnswerType.BOOLEAN, False, KB).render() == "false"
    assert Answer(AnswerType.COUNT, 3, KB).render() == "3"
    assert Answer(AnswerType.SELECT, frozenset({"b", "a"}), KB).render() == "a\nb"
    assert Answer.abstain(AnswerType.COUNT).render() == "abstain"
