"""Full-text index over KB labels used to filter entity and relation URIs."""

from __future__ import annotations

import json
from collections import Counter
from pathlib import Path
from typing import Iterable

import numpy as np

from ..kb.store import KbStore
from . import bm25
from .candidate import TEXT_FILTER, UriCandidate
from .text import normalize, normalize_tokens

ENTITY = "entity"
RELATION = "relation"
DEFAULT_POOL = 10
SNAPSHOT_VERSION = 1


class MentionIndex:
    """BM25 over normalized label tokens plus a dominating exact-label bonus.

    One document per (URI, label). A URI's score is the best score over its
    labels; results are ranked by score, ties broken by URI.
    """

    def __init__(self, docs: Iterable[tuple[str, str, str]] = (), k1: float = bm25.K1,
                 b: float = bm25.B):
        self.docs: list[tuple[str, str, str]] = sorted(set(docs))
        self.k1, self.b = k1, b
        tokenized = [normalize_tokens(label) for _, label, _ in self.docs]
        self.normalized = [" ".join(toks) for toks in tokenized]
        self.vocab: dict[str, int] = {t: i for i, t in enumerate(sorted({t for ts in tokenized for t in ts}))}

        postings: list[list[tuple[int, int]]] = [[] for _ in self.vocab]
        for d, toks in enumerate(tokenized):
            for tok, tf in sorted(Counter(toks).items()):
                postings[self.vocab[tok]].append((d, tf))
        sizes = np.array([len(p) for p in postings], dtype=np.int64)
        self.indptr = np.concatenate([[0], np.cumsum(sizes)]).astype(np.int64)
        flat = [x for p in postings for x in p]
        self.post_docs = np.array([d for d, _ in flat], dtype=np.int64)
        self.post_tfs = np.array([tf for _, tf in flat], dtype=np.float64)
        self.doc_len = np.array([len(t) for t in tokenized], dtype=np.float64)
        self.avgdl = float(self.doc_len.mean()) if len(self.docs) and self.doc_len.mean() > 0 else 1.0
        self.idf = bm25.idf(len(self.docs), sizes.astype(np.float64))
        self.kinds = np.array([kind == RELATION for _, _, kind in self.docs], dtype=bool)
        self._uris = sorted({u for u, _, _ in self.docs})

    @classmethod
    def build(cls, store: KbStore) -> "MentionIndex":
        docs = []
        for uri, labels in store.labels.items():
            kind = RELATION if uri in store.predicates else ENTITY
            docs.extend((uri, label, kind) for label in labels)
        return cls(docs)

    def __len__(self) -> int:
        return len(self._uris)

    def counts(self) -> dict[str, int]:
        by_kind: dict[str, set[str]] = {ENTITY: set(), RELATION: set()}
        for uri, _, kind in self.docs:
            by_kind[kind].add(uri)
        return {k: len(v) for k, v in by_kind.items()}

    def _doc_scores(self, mention: str, use_jit: bool | None = None) -> np.ndarray:
        tokens = normalize_tokens(mention)
        query = np.array([self.vocab[t] for t in tokens if t in self.vocab], dtype=np.int64)
        scores = bm25.accumulate(query, self.indptr, self.post_docs, self.post_tfs, self.doc_len,
                                 self.avgdl, self.idf, self.k1, self.b, use_jit=use_jit)
        if tokens and len(query) == len(tokens):
            target = " ".join(tokens)
            bonus = 1.0 + float(self.idf[query].sum()) * (self.k1 + 1.0)
            exact = np.fromiter((n == target for n in self.normalized), dtype=bool, count=len(self.docs))
            scores = scores + bonus * exact
        return scores

    def search(self, mention: str, kind: str | None = None, limit: int = DEFAULT_POOL,
               use_jit: bool | None = None) -> list[UriCandidate]:
        if limit < 1:
            raise ValueError("limit must be >= 1")
        if not self.docs or mention.strip().startswith("?"):
            return []
        scores = self._doc_scores(mention, use_jit=use_jit)
        mask = scores > 0
        if kind is not None:
            mask &= self.kinds if kind == RELATION else ~self.kinds
        best: dict[str, tuple[float, str]] = {}
        for d in np.flatnonzero(mask):
            uri, label, _ = self.docs[d]
            s = float(scores[d])
            cur = best.get(uri)
            if cur is None or s > cur[0] or (s == cur[0] and label < cur[1]):
                best[uri] = (s, label)
        ranked = sorted(best.items(), key=lambda kv: (-kv[1][0], kv[0]))[:limit]
        return [UriCandidate(uri, label, score, rank, TEXT_FILTER)
                for rank, (uri, (score, label)) in enumerate(ranked, start=1)]

    def similarity(self, mention: str, uris: Iterable[str]) -> dict[str, float]:
        """Best label score of each given URI against the mention (0.0 if unindexed)."""
        scores = self._doc_scores(mention) if self.docs else np.zeros(0)
        wanted = set(uris)
        out = {u: 0.0 for u in wanted}
        for d, (uri, _, _) in enumerate(self.docs):
            if uri in wanted:
                out[uri] = max(out[uri], float(scores[d]))
        return out

    _ARRAYS = ("indptr", "post_docs", "post_tfs", "doc_len", "idf", "kinds")

    def save(self, path: str | Path) -> None:
        """Write postings and statistics so :meth:`load` skips tokenization."""
        meta = {"version": SNAPSHOT_VERSION, "k1": self.k1, "b": self.b, "avgdl": self.avgdl,
                "docs": self.docs, "normalized": self.normalized, "vocab": sorted(self.vocab, key=self.vocab.get)}
        arrays = {name: getattr(self, name) for name in self._ARRAYS}
        with open(path, "wb") as fh:
            np.savez(fh, meta=np.array(json.dumps(meta)), **arrays)

    @classmethod
    def load(cls, path: str | Path) -> "MentionIndex":
        with np.load(path, allow_pickle=False) as data:
            meta = json.loads(str(data["meta"]))
            if meta.get("version") != SNAPSHOT_VERSION:
                raise ValueError(f"unsupported index snapshot version {meta.get('version')!r}")
            self = cls.__new__(cls)
            for name in cls._ARRAYS:
                setattr(self, name, data[name])
        self.k1, self.b, self.avgdl = meta["k1"], meta["b"], meta["avgdl"]
        self.docs = [tuple(d) for d in meta["docs"]]
        self.normalized = meta["normalized"]
        self.vocab = {t: i for i, t in enumerate(meta["vocab"])}
        self._uris = sorted({u for u, _, _ in self.docs})
        return self


def build(store: KbStore) -> MentionIndex:
    return MentionIndex.build(store)


def search(index: MentionIndex, mention: str, kind: str | None = None,
           limit: int = DEFAULT_POOL) -> list[UriCandidate]:
    return index.search(mention, kind=kind, limit=limit)


__all__ = ["ENTITY", "RELATION", "DEFAULT_POOL", "MentionIndex", "build", "search", "normalize"]
