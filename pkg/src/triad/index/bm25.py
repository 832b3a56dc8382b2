"""BM25 accumulation over CSR postings, with a numba kernel and a numpy twin."""

from __future__ import annotations

import numpy as np

from .._jit import JIT_DISABLED, njit

K1 = 1.2
B = 0.75


def idf(n_docs: int, df: np.ndarray) -> np.ndarray:
    # Lucene's non-negative variant
    return np.log1p((n_docs - df + 0.5) / (df + 0.5))


@njit(cache=True, nogil=True)
def _accumulate_jit_into(scores, query, indptr, docs, tfs, doc_len, avgdl, weights, k1, b):
    for qi in range(query.shape[0]):
        q = query[qi]
        w = weights[q]
        for j in range(indptr[q], indptr[q + 1]):
            d = docs[j]
            tf = tfs[j]
            norm = k1 * (1.0 - b + b * doc_len[d] / avgdl)
            scores[d] += w * tf * (k1 + 1.0) / (tf + norm)
    return scores


def _accumulate_jit(query, indptr, docs, tfs, doc_len, avgdl, weights, k1, b):
    # numpy's calloc-backed zeros beat numba's eager fill on large indexes
    scores = np.zeros(doc_len.shape[0])
    return _accumulate_jit_into(scores, query, indptr, docs, tfs, doc_len, avgdl, weights, k1, b)


def _accumulate_numpy(query, indptr, docs, tfs, doc_len, avgdl, weights, k1, b):
    n = doc_len.shape[0]
    if query.size == 0:
        return np.zeros(n)
    starts, stops = indptr[query], indptr[query + 1]
    sizes = stops - starts
    if sizes.sum() == 0:
        return np.zeros(n)
    offsets = np.repeat(stops - sizes.cumsum(), sizes) + np.arange(sizes.sum())
    d = docs[offsets]
    tf = tfs[offsets]
    w = np.repeat(weights[query], sizes)
    norm = k1 * (1.0 - b + b * doc_len[d] / avgdl)
    return np.bincount(d, weights=w * tf * (k1 + 1.0) / (tf + norm), minlength=n)


def accumulate(query, indptr, docs, tfs, doc_len, avgdl, weights, k1=K1, b=B, use_jit=None):
    """BM25 score of every document for the query term ids (repeats count repeatedly)."""
    use_jit = (not JIT_DISABLED) if use_jit is None else use_jit
    fn = _accumulate_jit if use_jit else _accumulate_numpy
    return fn(np.asarray(query, dtype=np.int64), indptr, docs, tfs, doc_len,
              float(avgdl), weights, float(k1), float(b))
