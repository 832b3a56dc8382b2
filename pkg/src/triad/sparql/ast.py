"""AST for the supported SPARQL subset and its canonical single-line rendering."""

from __future__ import annotations

from dataclasses import dataclass, field, fields, replace
from typing import NamedTuple, Union

from ..kb.store import TriplePattern
from ..kb.terms import Literal, Term, Var, to_ntriples

SELECT = "SELECT"
ASK = "ASK"
COUNT = "COUNT"
FORMS = (SELECT, ASK, COUNT)

ENTITY = "entity"
RELATION = "relation"


class MentionSlot(NamedTuple):
    """An angle-bracketed mention awaiting a URI; ``role`` follows its position."""

    text: str
    role: str = ENTITY

    def __str__(self) -> str:
        return f"<{self.text}>"


SlotTerm = Union[Term, Var, MentionSlot]


@dataclass(frozen=True)
class Feature:
    """A parsed construct outside the executable subset, kept verbatim."""

    keyword: str
    text: str
    inner: bool


@dataclass(frozen=True)
class SparqlTemplate:
    form: str
    patterns: tuple[TriplePattern, ...]
    distinct: bool = False
    # variable names; empty means '*'
    projection: tuple[str, ...] = ()
    count_alias: str | None = None
    features: tuple[Feature, ...] = ()
    raw: str = field(default="", compare=False)

    def slots(self) -> list[MentionSlot]:
        out: list[MentionSlot] = []
        for pattern in self.patterns:
            for t in pattern:
                if isinstance(t, MentionSlot) and t not in out:
                    out.append(t)
        return out

    def variables(self) -> list[str]:
        out: list[str] = []
        for pattern in self.patterns:
            for name in pattern.variables():
                if name not in out:
                    out.append(name)
        return out

    @property
    def unsupported(self) -> tuple[Feature, ...]:
        return self.features

    def structure(self) -> tuple:
        """Structural identity, ignoring raw text and instantiation records."""
        return (self.form, self.patterns, self.distinct, self.projection,
                self.count_alias, self.features)

    def render(self) -> str:
        return render(self)

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class SparqlQuery(SparqlTemplate):
    """A template with every slot bound to a URI."""

    assignment: tuple[tuple[MentionSlot, str], ...] = field(default=(), compare=False)

    @property
    def assignment_map(self) -> dict[MentionSlot, str]:
        return dict(self.assignment)

    @classmethod
    def from_template(cls, template: SparqlTemplate,
                      assignment: tuple[tuple[MentionSlot, str], ...] = ()) -> "SparqlQuery":
        if template.slots():
            raise ValueError("template still contains mention slots")
        values = {f.name: getattr(template, f.name) for f in fields(SparqlTemplate)}
        return cls(**values, assignment=assignment)

    def as_template(self) -> SparqlTemplate:
        values = {f.name: getattr(self, f.name) for f in fields(SparqlTemplate)}
        return SparqlTemplate(**values)


def render_term(term: SlotTerm) -> str:
    if isinstance(term, Var):
        return f"?{term.name}"
    if isinstance(term, MentionSlot):
        return f"<{term.text}>"
    if isinstance(term, Literal):
        return to_ntriples(term)
    return f"<{term}>"


def render_pattern(pattern: TriplePattern) -> str:
    return " ".join(render_term(t) for t in pattern)


def render(q: SparqlTemplate) -> str:
    """Canonical single-line serialization; ``parse(render(q))`` is structurally ``q``."""
    body = " . ".join(render_pattern(p) for p in q.patterns)
    inner = [f.text for f in q.features if f.inner]
    group = " ".join([body] + inner)
    where = f"WHERE {{ {group} }}"
    outer = " ".join(f.text for f in q.features if not f.inner)
    if q.form == ASK:
        head = "ASK"
    elif q.form == COUNT:
        target = f"?{q.projection[0]}" if q.projection else "*"
        distinct = "DISTINCT " if q.distinct else ""
        head = f"SELECT (COUNT({distinct}{target}) AS ?{q.count_alias or 'count'})"
    else:
        proj = " ".join(f"?{v}" for v in q.projection) if q.projection else "*"
        head = f"SELECT {'DISTINCT ' if q.distinct else ''}{proj}"
    return f"{head} {where} {outer}".rstrip()


def with_raw(template: SparqlTemplate, raw: str) -> SparqlTemplate:
    return replace(template, raw=raw)
