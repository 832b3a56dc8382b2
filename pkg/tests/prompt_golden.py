"""Golden prompt fixtures: the variables the golden files were filled with."""

from pathlib import Path

from triad.llm.prompts import TEMPLATE_IDS, TRIPLET, get_template, normalize_whitespace, render_prompt

GOLDEN_DIR = Path(__file__).parent / "golden" / "prompts"
QUESTION = "Who founded the city of Hollywood?"
VARS = {
    "question": QUESTION,
    "triplets": "<Hollywood, founder, ?person>",
    "k": 2,
    "mention": "Hollywood",
    "entities": "Hollywood (Hollywood); ?person",
    "candidates": "SELECT ?person WHERE { <http://example.org/Hollywood> <http://example.org/founder> ?person }\n"
                  "SELECT ?person WHERE { <http://example.org/Hollywood> <http://example.org/leader> ?person }",
}
URIS = {
    "entity-select": "http://example.org/Hollywood\nhttp://example.org/Hollywood_Park\nhttp://example.org/Hollywood_Bowl",
    "relation-select": "http://example.org/founder\nhttp://example.org/foundingYear\nhttp://example.org/leader",
}


def rendered(template_id: str) -> str:
    t = get_template(template_id)
    values = dict(VARS, uris=URIS.get(template_id, ""))
    return render_prompt(t, {k: values[k] for k in t.variables}, 3 if template_id == TRIPLET else 0)


def golden(template_id: str) -> str:
    return (GOLDEN_DIR / f"{template_id}.txt").read_text(encoding="utf-8")


def matches(template_id: str) -> bool:
    return normalize_whitespace(rendered(template_id)) == normalize_whitespace(golden(template_id))


__all__ = ["TEMPLATE_IDS", "rendered", "golden", "matches"]
