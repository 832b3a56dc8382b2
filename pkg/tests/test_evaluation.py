import json

import pytest

from triad.config import RoleConfig
from triad.evaluation import (BenchmarkError, BenchmarkItem, canonical, evaluate, linking_recall,
                              load_benchmark, macro, normalize_text, parse_benchmark, score, set_prf)
from triad.evaluation.metrics import micro, micro_counts
from triad.llm import Gateway, Prices, ReplayBackend
from triad.orchestrator import Deps
from triad.roles import KB, Answer, AnswerType

from conftest import R, TOY
from metric_cases import CASES, expected, sel


@pytest.mark.parametrize("case", CASES, ids=[c[0] for c in CASES])
def test_metric_cases(case):
    assert tuple(score(case[1], case[2])) == expected(case)


def test_normalization_rules(toy_store):
    assert normalize_text(normalize_text(" A  b ")) == normalize_text(" A  b ") == "a b"
    assert canonical("2.0") == canonical("2") == canonical("+2.00")
    assert set_prf({R + "london"}, {R + "London"}) == (0, 0, 0)  # URIs verbatim
    # a literal matches a URI through the URI's labels, in either direction
    assert set_prf({"marie curie"}, {R + "Marie_Curie"}, toy_store) == (1, 1, 1)
    assert set_prf({R + "Marie_Curie"}, {"Marie Curie"}, toy_store) == (1, 1, 1)
    assert set_prf({"marie curie"}, {R + "Marie_Curie"}) == (0, 0, 0)


def test_symmetry():
    a, b = {"x", "Y", "z"}, {"y", "w"}
    p = set_prf(a, b)
    q = set_prf(b, a)
    assert (p.precision, p.recall, p.f1) == (q.recall, q.precision, q.f1)


def test_benchmark_schema(tmp_path):
    assert parse_benchmark([]) == []
    items = parse_benchmark([{"id": "1", "question": "Is it?", "answer_type": "yes or no", "gold_answers": True}])
    assert items[0].kind is AnswerType.BOOLEAN
    bad = [
        ([{"id": "1", "question": "q", "gold_answers": [1]}, {"id": "1", "question": "q", "gold_answers": []}], "item 1: duplicate"),
        ([{"id": "1", "question": "q"}], "item 0: missing"),
        ([{"id": "1", "question": "q", "gold_answers": True, "answer_type": "count"}], "item 0: gold"),
        ([{"id": "1", "question": "q", "gold_answers": [], "extra": 1}], "unknown keys"),
        ([{"id": "1", "question": "q", "gold_answers": {"a": 1}}], "item 0"),
        ({"id": "1"}, "array"),
    ]
    for data, msg in bad:
        with pytest.raises(BenchmarkError, match=msg):
            parse_benchmark(data)
    p = tmp_path / "b.json"
    p.write_text("{nope")
    with pytest.raises(BenchmarkError, match="JSON"):
        load_benchmark(p)


def test_toy_benchmark_census(toy_bench):
    assert len(toy_bench) == 10 and len({i.id for i in toy_bench}) == 10
    kinds = [i.kind for i in toy_bench]
    assert kinds.count(AnswerType.SELECT) >= 3 and kinds.count(AnswerType.BOOLEAN) >= 3
    assert kinds.count(AnswerType.COUNT) >= 2


def test_gold_sparql_agrees_with_gold_answers(toy_bench, toy_store):
    """The hand-written gold answers are what the gold queries return on the toy KB."""
    from triad.kb.execute import execute
    from triad.roles.advisor import answer_from_result
    from triad.sparql import parse
    for it in toy_bench:
        got = answer_from_result(execute(toy_store, parse(it.gold_sparql)), it.kind)
        assert score(got, it) == (1, 1, 1), it.id


def factory(store, index, folder="transcripts", prices=Prices(1.0, 2.0)):
    def make(item, run):
        return Deps(store, index, Gateway(ReplayBackend.from_file(TOY / folder / f"{item.id}.jsonl", strict=True),
                                          prices=prices))
    return make


def test_evaluate_toy(toy_bench, toy_store, toy_index):
    rep = evaluate(toy_bench, factory(toy_store, toy_index), RoleConfig(), store=toy_store)
    assert (rep.precision, rep.recall, rep.f1) == (1.0, 1.0, 1.0)
    assert rep.f1 == sum(i.prf.f1 for i in rep.items) / len(rep.items)
    for it in rep.items:
        assert 0 <= it.recall_selection <= it.recall_filter <= 1
    assert rep.recall_after_filter == 1.0
    table = rep.to_table()
    assert table.splitlines()[-1].startswith("macro") and "q10" in table
    d = json.loads(rep.to_json(timing=False))
    assert "phase_ms" not in d and all("total_ms" not in i for i in d["items"])


def test_evaluate_sabotaged(toy_bench, toy_store, toy_index):
    rep = evaluate(toy_bench, factory(toy_store, toy_index, "sabotaged"), RoleConfig(), store=toy_store)
    assert rep.f1 == 0.5
    assert sum(1 for i in rep.items if i.answer.is_abstain) == 5


def test_repeat_concurrency_and_micro(toy_bench, toy_store, toy_index):
    seq = evaluate(toy_bench, factory(toy_store, toy_index, "sabotaged"), RoleConfig(), repeat=2, store=toy_store)
    par = evaluate(toy_bench, factory(toy_store, toy_index, "sabotaged"), RoleConfig(), repeat=2,
                   concurrency=4, store=toy_store)
    assert len(seq.runs) == 2 and seq.f1 == 0.5
    assert seq.to_json(timing=False) == par.to_json(timing=False)
    mic = evaluate(toy_bench, factory(toy_store, toy_index, "sabotaged"), RoleConfig(), averaging="micro",
                   store=toy_store)
    assert 0 < mic.f1 < 1


def test_per_item_failure_scores_zero(toy_bench, toy_store, toy_index):
    def make(item, run):
        if item.id == "q01":
            raise OSError("transcript gone")
        return factory(toy_store, toy_index)(item, run)

    rep = evaluate(toy_bench, make, RoleConfig(), store=toy_store)
    bad = next(i for i in rep.items if i.id == "q01")
    assert bad.error and bad.prf.f1 == 0 and rep.f1 == pytest.approx(0.9, abs=1e-12)


def test_cost_totals(toy_bench, toy_store, toy_index):
    from decimal import Decimal
    rep = evaluate(toy_bench, factory(toy_store, toy_index), RoleConfig(), store=toy_store, prices=Prices(1.0, 2.0))
    assert rep.cost == (Decimal(rep.prompt_tokens) + 2 * Decimal(rep.completion_tokens)) / 1000
    assert rep.cost == sum(i.cost for i in rep.items)


def test_empty_benchmark(toy_store, toy_index):
    rep = evaluate([], factory(toy_store, toy_index), RoleConfig())
    assert rep.items == [] and rep.f1 == 0.0


def test_linking_recall_and_micro_helpers():
    assert linking_recall(frozenset({"a", "b"}), {"a"}) == 0.5
    assert linking_recall(frozenset(), set()) == 1.0
    it = BenchmarkItem("i", "q", frozenset({"a", "b"}))
    assert micro_counts(sel("a", "c"), it) == (1, 2, 2)
    assert micro([(1, 2, 2), (0, 0, 1)]) == (0.5, 1 / 3, 0.4)
    assert macro([]) == (0, 0, 0)
