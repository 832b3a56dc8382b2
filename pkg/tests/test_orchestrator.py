import pytest

from triad.authoring import load_script
from triad.config import RoleConfig
from triad.llm import Gateway, ReplayBackend, ReplayMismatchError, ScriptedBackend
from triad.orchestrator import AG, PHASES, QC, QP, UL, Deps, call_bound, run
from triad.roles import KB, LLM_FALLBACK, AnswerType
from triad.roles.types import explicit_entities, relation_texts
from triad.roles.types import ABSTAIN

from conftest import R, TOY, replay_item

SCRIPT = load_script(TOY / "script.yaml")


def scripted_run(question, script, store, index, cfg):
    backend = ScriptedBackend(script)
    gw = Gateway(backend)
    return run(question, Deps(store, index, gw), cfg), gw, backend


def check_trace(result, gw):
    ids = [i for s in result.steps for i in s.calls]
    assert sorted(ids) == list(range(len(gw.calls))) and len(ids) == len(set(ids))
    assert all(s.phase in PHASES for s in result.steps)
    assert sum(result.phase_ms.values()) <= result.total_ms + 1e-6


def check_monotone(result):
    pools = result.pools()
    for before, after in zip(pools, pools[1:]):
        for key, uris in before.items():
            assert uris <= after.get(key, set()), key


def test_first_attempt_success(toy_bench, toy_store, toy_index):
    item = next(i for i in toy_bench if i.id == "q04")
    result, gw, backend = replay_item(item, toy_store, toy_index, RoleConfig())
    assert len(result.attempts) == 1 and result.answer.provenance == KB and result.answer.value is True
    assert backend.remaining == 0
    check_trace(result, gw)


def test_second_attempt_success(toy_bench, toy_store, toy_index):
    item = next(i for i in toy_bench if i.id == "q09")
    result, gw, _ = replay_item(item, toy_store, toy_index, RoleConfig())
    assert len(result.attempts) == 2 and result.answer.provenance == KB
    assert result.attempts[0].error.startswith("NoFeasibleQueryError")
    assert result.attempts[1].filter_pool == 2 * result.attempts[0].filter_pool
    assert result.answer.value == frozenset({R + "Pierre_Curie"})
    check_trace(result, gw)
    check_monotone(result)


def test_no_retries_boolean_falls_back(toy_store, toy_index):
    script = {
        "triplet": ["<Marie Curie, spouse, ?person>"],
        "classify": ["<yes or no>"],
        "entity-select": [f"{R}Curie_(unit)"],
        "template": ["SELECT ?person WHERE { <Marie Curie> <spouse> ?person }"],
        "answer-boolean": ["True"],
    }
    result, gw, backend = scripted_run("Was Marie Curie married?", script, toy_store, toy_index,
                                       RoleConfig(retries=0))
    assert len(result.attempts) == 1
    assert result.answer.provenance == LLM_FALLBACK and result.answer.value is True
    assert backend.leftover() == {}
    check_trace(result, gw)


def always_wrong(n):
    return {
        "triplet": ["<Marie Curie, spouse, ?person>"],
        "classify": ["<select>"],
        "entity-select": [f"{R}Curie_(unit)"] * n,
        "template": ["SELECT ?person WHERE { <Marie Curie> <spouse> ?person }"] * 2,
        "relation-select": [f"{R}nothing"] * n,
        "answer-fact": ["Pierre Curie"],
    }


@pytest.mark.parametrize("retries", [0, 1, 3])
def test_retry_bound_and_monotonicity(retries, toy_store, toy_index):
    cfg = RoleConfig(retries=retries)
    result, gw, _ = scripted_run("Who is the spouse of Marie Curie?", always_wrong(retries + 1),
                                 toy_store, toy_index, cfg)
    assert len(result.attempts) == retries + 1
    assert [a.filter_pool for a in result.attempts] == [10 * 2 ** i for i in range(retries + 1)]
    assert [a.temperature for a in result.attempts] == [0.0] + [0.7] * retries
    assert result.answer.provenance == LLM_FALLBACK
    check_trace(result, gw)
    check_monotone(result)
    # the template is regenerated on the final attempt when there was more than one
    n_templates = sum(1 for c in gw.calls if c.subtask == "template")
    assert n_templates == (2 if retries > 0 else 1)
    assert result.attempts[-1].template_regenerated == (retries > 0)
    mentions = result.mentions
    assert len(gw.calls) <= call_bound(len(explicit_entities(mentions)), len(relation_texts(mentions)), retries)


@pytest.mark.parametrize("retries", [0, 1, 3])
def test_toy_items_respect_bounds(retries, toy_bench, toy_store, toy_index):
    cfg = RoleConfig(retries=retries)
    for item in toy_bench:
        script = dict(SCRIPT[item.id], template=SCRIPT[item.id]["template"] * 2,
                      **{"answer-fact": ["x"], "answer-boolean": ["True"]})
        result, gw, _ = scripted_run(item.question, script, toy_store, toy_index, cfg)
        assert 1 <= len(result.attempts) <= retries + 1
        m = result.mentions
        assert result.llm_calls <= call_bound(len(explicit_entities(m)), len(relation_texts(m)), retries)
        check_trace(result, gw)
        check_monotone(result)


def test_extraction_failure_goes_straight_to_fallback(toy_store, toy_index):
    script = {"triplet": ["nothing", "still nothing"], "classify": ["<count>"]}
    result, gw, _ = scripted_run("How many?", script, toy_store, toy_index, RoleConfig())
    assert result.attempts == [] and result.answer.provenance == ABSTAIN
    assert result.answer.kind is AnswerType.COUNT and result.error
    check_trace(result, gw)


def test_budget_exhaustion(toy_store, toy_index):
    script = always_wrong(4)
    result, _, _ = scripted_run("Who is the spouse of Marie Curie?", script, toy_store, toy_index,
                                RoleConfig(budget_s=1e-9))
    assert result.attempts == [] and "budget" in result.error
    assert result.answer.provenance == LLM_FALLBACK


def test_reextract_on_final(toy_store, toy_index):
    script = always_wrong(2)
    script["triplet"] = script["triplet"] * 2
    result, gw, _ = scripted_run("Who is the spouse of Marie Curie?", script, toy_store, toy_index,
                                 RoleConfig(retries=1, reextract_on_final=True))
    assert sum(1 for c in gw.calls if c.subtask == "triplet") == 2
    assert [s.phase for s in result.steps if s.name == "extract_triplets"] == [QP, QP]


def test_infrastructure_errors_escape(toy_store, toy_index):
    gw = Gateway(ReplayBackend([], strict=True))
    with pytest.raises(ReplayMismatchError):
        run("Where was Ada Lovelace born?", Deps(toy_store, toy_index, gw), RoleConfig())
    with pytest.raises(ValueError):
        run("  ", Deps(toy_store, toy_index, gw), RoleConfig())


def test_trace_export_is_json_ready(toy_bench, toy_store, toy_index):
    import json
    item = next(i for i in toy_bench if i.id == "q10")
    result, _, _ = replay_item(item, toy_store, toy_index, RoleConfig())
    d = result.to_dict(timing=False)
    assert "phase_ms" not in d and all("latency_ms" not in s for s in d["steps"])
    assert {s["phase"] for s in d["steps"]} == {QP, UL, QC, AG}
    json.dumps(d)
    assert d["attempts"][0]["candidates"][0]["feasible"] is False
