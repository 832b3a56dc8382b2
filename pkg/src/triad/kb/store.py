"""Immutable in-memory triple store over interned term ids.

Terms are interned in lexicographic order, so sorting ids sorts values. Each
permutation index (spo, pos, osp) is a triple of sorted, contiguous int64
column arrays; prefix lookups are successive binary-search narrowings (a
numba kernel, or ``np.searchsorted`` when ``TRIAD_DISABLE_JIT`` is set).
"""

from __future__ import annotations

from pathlib import Path
from typing import Iterable, Iterator, NamedTuple, Union

import numpy as np

from .._jit import JIT_DISABLED, njit
from .ntriples import ParseStats, read_ntriples
from .terms import RDFS_LABEL, Literal, Term, Triple, Var, local_name, term_key

PatternTerm = Union[Term, Var]

# column order of each permutation, expressed as positions in (s, p, o)
PERMUTATIONS = {"spo": (0, 1, 2), "pos": (1, 2, 0), "osp": (2, 0, 1)}
OUTGOING = "outgoing"
INCOMING = "incoming"


@njit(cache=True, nogil=True)
def _prefix_range_jit(c0, c1, c2, key, depth):
    lo, hi = 0, c0.shape[0]
    for k in range(depth):
        col = c0 if k == 0 else (c1 if k == 1 else c2)
        v = key[k]
        a, b = lo, hi
        while a < b:  # leftmost index with col >= v
            m = (a + b) >> 1
            if col[m] < v:
                a = m + 1
            else:
                b = m
        start = a
        b = hi
        while a < b:  # leftmost index with col > v
            m = (a + b) >> 1
            if col[m] <= v:
                a = m + 1
            else:
                b = m
        lo, hi = start, a
        if lo == hi:
            break
    return lo, hi


def _prefix_range_numpy(c0, c1, c2, key, depth):
    lo, hi = 0, len(c0)
    for k, col in enumerate((c0, c1, c2)[:depth]):
        part = col[lo:hi]
        lo, hi = lo + int(np.searchsorted(part, key[k], "left")), lo + int(np.searchsorted(part, key[k], "right"))
    return lo, hi


def prefix_range(cols, key, depth: int, use_jit: bool | None = None) -> tuple[int, int]:
    """Half-open row range of a sorted permutation index whose first ``depth`` columns equal ``key``."""
    use_jit = (not JIT_DISABLED) if use_jit is None else use_jit
    fn = _prefix_range_jit if use_jit else _prefix_range_numpy
    return fn(cols[0], cols[1], cols[2], np.asarray(key, dtype=np.int64), depth)


class TriplePattern(NamedTuple):
    subject: PatternTerm
    predicate: PatternTerm
    object: PatternTerm

    def variables(self) -> list[str]:
        seen: list[str] = []
        for t in self:
            if isinstance(t, Var) and t.name not in seen:
                seen.append(t.name)
        return seen


class KbStore:
    def __init__(self, triples: Iterable[Triple] = (),
                 label_predicates: Iterable[str] = (RDFS_LABEL,)):
        triples = list(triples)
        self.label_predicates = frozenset(label_predicates)
        vocab = {t for tr in triples for t in tr}
        self.terms: list[Term] = sorted(vocab, key=term_key)
        self._ids: dict[Term, int] = {t: i for i, t in enumerate(self.terms)}

        if triples:
            rows = np.array([[self._ids[t] for t in tr] for tr in triples], dtype=np.int64)
            rows = np.unique(rows, axis=0)
        else:
            rows = np.empty((0, 3), dtype=np.int64)
        self._indexes: dict[str, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}
        for name, perm in PERMUTATIONS.items():
            cols = rows[:, perm]
            order = np.lexsort((cols[:, 2], cols[:, 1], cols[:, 0]))
            columns = tuple(np.ascontiguousarray(cols[order, k]) for k in range(3))
            for c in columns:
                c.setflags(write=False)
            self._indexes[name] = columns

        self.predicates = frozenset(self.terms[i] for i in np.unique(rows[:, 1]))
        self.subjects = frozenset(self.terms[i] for i in np.unique(rows[:, 0]))
        self.labels = self._build_labels(rows)

    def _build_labels(self, rows: np.ndarray) -> dict[str, frozenset[str]]:
        labels: dict[str, set[str]] = {}
        for s, p, o in rows:
            subj, pred, obj = self.terms[s], self.terms[p], self.terms[o]
            if pred in self.label_predicates and isinstance(obj, Literal):
                labels.setdefault(subj, set()).add(obj.lexical)
            for uri in (subj, pred, obj):
                if isinstance(uri, str):
                    labels.setdefault(uri, set()).add(local_name(uri))
        return {uri: frozenset(v) for uri, v in labels.items()}

    @classmethod
    def load(cls, path: str | Path, strict: bool = True,
             label_predicates: Iterable[str] = (RDFS_LABEL,),
             stats: ParseStats | None = None) -> "KbStore":
        return cls(read_ntriples(path, strict=strict, stats=stats), label_predicates)

    def __len__(self) -> int:
        return len(self._indexes["spo"][0])

    def __contains__(self, triple: Triple) -> bool:
        return bool(self.match(TriplePattern(*triple)))

    def __iter__(self) -> Iterator[Triple]:
        s, p, o = self._indexes["spo"]
        for i in range(len(s)):
            yield Triple(self.terms[s[i]], self.terms[p[i]], self.terms[o[i]])

    def term_id(self, term: Term) -> int | None:
        return self._ids.get(term)

    def labels_of(self, uri: str) -> frozenset[str]:
        return self.labels.get(uri, frozenset())

    def label(self, uri: str) -> str:
        """Preferred display label: smallest explicit label, else the local name."""
        fallback = local_name(uri)
        explicit = sorted(self.labels_of(uri) - {fallback})
        return explicit[0] if explicit else fallback

    def choose_driver(self, bound: tuple[bool, bool, bool]) -> str:
        for name, perm in PERMUTATIONS.items():
            n = sum(bound)
            if all(bound[perm[k]] for k in range(n)):
                return name
        return "spo"

    def match_ids(self, ids: tuple[int | None, int | None, int | None],
                  driver: str | None = None) -> np.ndarray:
        """Rows ``(n, 3)`` in s, p, o order matching the bound ids (``None`` = wildcard)."""
        bound = tuple(i is not None for i in ids)
        driver = driver or self.choose_driver(bound)
        perm = PERMUTATIONS[driver]
        cols = self._indexes[driver]
        key = [0, 0, 0]
        depth = 0
        for k in range(3):
            value = ids[perm[k]]
            if value is None:
                break
            key[k] = value
            depth += 1
        lo, hi = prefix_range(cols, key, depth)
        block = np.stack([c[lo:hi] for c in cols], axis=1) if hi > lo else np.empty((0, 3), np.int64)
        for k in range(depth, 3):
            value = ids[perm[k]]
            if value is not None:
                block = block[block[:, k] == value]
        out = np.empty_like(block)
        out[:, list(perm)] = block
        return out

    def match(self, pattern: TriplePattern, driver: str | None = None) -> list[dict[str, Term]]:
        """All bindings of the pattern's variables, sorted by bound values."""
        ids: list[int | None] = []
        for t in pattern:
            if isinstance(t, Var):
                ids.append(None)
                continue
            tid = self._ids.get(t)
            if tid is None:
                return []
            ids.append(tid)
        rows = self.match_ids(tuple(ids), driver=driver)
        names = pattern.variables()
        first = {}
        for pos, t in enumerate(pattern):
            if isinstance(t, Var):
                if t.name in first:
                    rows = rows[rows[:, pos] == rows[:, first[t.name]]]
                else:
                    first[t.name] = pos
        if not names:
            return [{}] if len(rows) else []
        cols = [rows[:, first[n]] for n in names]
        if len(rows):
            order = np.lexsort(tuple(reversed(cols)))
            cols = [c[order] for c in cols]
        terms = self.terms
        return [{n: terms[c[i]] for n, c in zip(names, cols)} for i in range(len(rows))]

    def neighbors(self, uri: str) -> set[tuple[str, str]]:
        """Predicates on edges incident to ``uri``, tagged with direction."""
        tid = self._ids.get(uri)
        if tid is None:
            return set()
        out = self.match_ids((tid, None, None))[:, 1]
        inc = self.match_ids((None, None, tid))[:, 1]
        return ({(self.terms[p], OUTGOING) for p in np.unique(out)}
                | {(self.terms[p], INCOMING) for p in np.unique(inc)})

    def connecting_predicates(self, a: str, b: str) -> set[str]:
        """Predicates on edges between ``a`` and ``b`` in either direction."""
        ia, ib = self._ids.get(a), self._ids.get(b)
        if ia is None or ib is None:
            return set()
        rows = np.concatenate([self.match_ids((ia, None, ib)), self.match_ids((ib, None, ia))])
        return {self.terms[p] for p in np.unique(rows[:, 1])}


def load_ntriples(path: str | Path, strict: bool = True,
                  label_predicates: Iterable[str] = (RDFS_LABEL,),
                  stats: ParseStats | None = None) -> KbStore:
    return KbStore.load(path, strict=strict, label_predicates=label_predicates, stats=stats)


def match(store: KbStore, pattern: TriplePattern) -> list[dict[str, Term]]:
    return store.match(pattern)


def neighbors(store: KbStore, uri: str) -> set[tuple[str, str]]:
    return store.neighbors(uri)
