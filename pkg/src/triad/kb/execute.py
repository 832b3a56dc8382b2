"""Evaluation of grounded SELECT / ASK / COUNT queries against a :class:`KbStore`."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .store import KbStore, TriplePattern
from .terms import Term, Var, term_value
from ..sparql.ast import ASK, COUNT, MentionSlot, SparqlTemplate

BINDINGS = "bindings"
BOOLEAN = "boolean"
COUNT_KIND = "count"


class QueryError(ValueError):
    pass


class UnsupportedFeatureError(QueryError):
    """The query parsed but uses constructs outside the executable subset."""

    def __init__(self, keywords: list[str]):
        self.keywords = keywords
        super().__init__("unsupported SPARQL feature(s): " + ", ".join(keywords))


class UnboundVariableError(QueryError):
    pass


class UngroundedQueryError(QueryError):
    pass


@dataclass
class ResultSet:
    kind: str
    rows: list[dict[str, Term]] = field(default_factory=list)
    value: bool | int | None = None
    variables: tuple[str, ...] = ()

    def is_empty(self) -> bool:
        if self.kind == BINDINGS:
            return not self.rows
        if self.kind == COUNT_KIND:
            return not self.value
        return False

    def values(self) -> list[str]:
        """Distinct answer strings across all projected columns, sorted."""
        return sorted({term_value(v) for row in self.rows for v in row.values()})


def _solve(store: KbStore, patterns: tuple[TriplePattern, ...]) -> tuple[list[str], np.ndarray]:
    """Join the patterns left to right; returns (variables, solution id matrix)."""
    names: list[str] = []
    for p in patterns:
        for n in p.variables():
            if n not in names:
                names.append(n)
    col = {n: i for i, n in enumerate(names)}
    sols = np.full((1, len(names)), -1, dtype=np.int64)
    for pattern in patterns:
        const: list[int | None] = []
        for t in pattern:
            if isinstance(t, Var):
                const.append(None)
            else:
                tid = store.term_id(t)
                if tid is None:
                    return names, np.empty((0, len(names)), dtype=np.int64)
                const.append(tid)
        chunks = []
        for row in sols:
            ids = tuple(c if c is not None else (int(row[col[t.name]]) if row[col[t.name]] >= 0 else None)
                        for c, t in zip(const, pattern))
            hits = store.match_ids(ids)
            for pos, t in enumerate(pattern):
                if isinstance(t, Var):
                    for later in range(pos + 1, 3):
                        if pattern[later] == t:
                            hits = hits[hits[:, pos] == hits[:, later]]
            if not len(hits):
                continue
            block = np.repeat(row[None, :], len(hits), axis=0)
            for pos, t in enumerate(pattern):
                if isinstance(t, Var):
                    block[:, col[t.name]] = hits[:, pos]
            chunks.append(block)
        if not chunks:
            return names, np.empty((0, len(names)), dtype=np.int64)
        sols = np.concatenate(chunks)
    return names, sols


def _sorted_rows(ids: np.ndarray) -> np.ndarray:
    if len(ids) == 0 or ids.shape[1] == 0:
        return ids
    order = np.lexsort(tuple(ids[:, k] for k in reversed(range(ids.shape[1]))))
    return ids[order]


def execute(store: KbStore, query: SparqlTemplate) -> ResultSet:
    if any(isinstance(t, MentionSlot) for p in query.patterns for t in p):
        raise UngroundedQueryError("query still contains mention slots")
    if query.features:
        raise UnsupportedFeatureError([f.keyword for f in query.features])
    present = set(query.variables())
    wanted = query.projection
    missing = [v for v in wanted if v not in present]
    if missing:
        raise UnboundVariableError("projected variable(s) not bound by any pattern: "
                                   + ", ".join(f"?{v}" for v in missing))
    names, sols = _solve(store, query.patterns)

    if query.form == ASK:
        return ResultSet(BOOLEAN, value=bool(len(sols)))
    if query.form == COUNT:
        if wanted:
            column = sols[:, names.index(wanted[0])]
            n = len(np.unique(column)) if query.distinct else len(column)
        else:
            n = len(np.unique(sols, axis=0)) if query.distinct and len(sols) else len(sols)
        return ResultSet(COUNT_KIND, value=int(n), variables=(query.count_alias or "count",))

    proj = list(wanted) if wanted else names
    ids = sols[:, [names.index(v) for v in proj]] if proj else np.empty((len(sols), 0), np.int64)
    if query.distinct and len(ids):
        ids = np.unique(ids, axis=0)
    ids = _sorted_rows(ids)
    terms = store.terms
    rows = [{v: terms[r[k]] for k, v in enumerate(proj)} for r in ids]
    return ResultSet(BINDINGS, rows=rows, variables=tuple(proj))
