"""Compare the numba kernels against their numpy twins.

    python3 benchmarks/bench_kernels.py [--docs N] [--triples N] [--repeat N]

Builds a synthetic label index and triple store, checks that both kernel
flavours give the same answers, and prints the median time per call.
"""

from __future__ import annotations

import argparse
import statistics
import time

import numpy as np

from triad.index import bm25
from triad.kb.store import prefix_range


def _median_us(fn, repeat: int) -> float:
    fn()  # warm up (and compile, for the jit path)
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times) * 1e6


def bench_bm25(rng, n_docs: int, vocab: int, repeat: int) -> tuple[float, float]:
    lengths = rng.integers(1, 6, n_docs)
    tokens = rng.integers(0, vocab, lengths.sum())
    doc_of = np.repeat(np.arange(n_docs), lengths)
    doc_len = lengths.astype(np.float64)
    pairs, tf = np.unique(np.stack([tokens, doc_of], 1), axis=0, return_counts=True)
    indptr = np.searchsorted(pairs[:, 0], np.arange(vocab + 1)).astype(np.int64)
    docs = pairs[:, 1].astype(np.int64)
    tfs = tf.astype(np.float64)
    df = np.diff(indptr)
    weights = bm25.idf(n_docs, df)
    avgdl = doc_len.mean()
    queries = [rng.integers(0, vocab, 3) for _ in range(64)]

    def run(use_jit):
        return lambda: [bm25.accumulate(q, indptr, docs, tfs, doc_len, avgdl, weights,
                                        use_jit=use_jit) for q in queries]

    for q in queries[:8]:
        a = bm25.accumulate(q, indptr, docs, tfs, doc_len, avgdl, weights, use_jit=True)
        b = bm25.accumulate(q, indptr, docs, tfs, doc_len, avgdl, weights, use_jit=False)
        assert np.allclose(a, b)
    return _median_us(run(True), repeat) / len(queries), _median_us(run(False), repeat) / len(queries)


def bench_prefix(rng, n_triples: int, repeat: int) -> tuple[float, float]:
    n_terms = max(8, n_triples // 4)
    rows = np.unique(rng.integers(0, n_terms, (n_triples, 3)), axis=0)
    cols = tuple(np.ascontiguousarray(rows[:, k]) for k in range(3))
    keys = [(rows[i, 0], rows[i, 1], 0) for i in rng.integers(0, len(rows), 256)]

    def run(use_jit):
        return lambda: [prefix_range(cols, k, 2, use_jit=use_jit) for k in keys]

    for k in keys[:16]:
        assert tuple(map(int, prefix_range(cols, k, 2, use_jit=True))) == prefix_range(cols, k, 2, use_jit=False)
    return _median_us(run(True), repeat) / len(keys), _median_us(run(False), repeat) / len(keys)


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--docs", type=int, default=200_000)
    ap.add_argument("--vocab", type=int, default=20_000)
    ap.add_argument("--triples", type=int, default=1_000_000)
    ap.add_argument("--repeat", type=int, default=15)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<28}{'jit us/call':>14}{'numpy us/call':>16}{'speedup':>10}")
    for name, (j, n) in (
        (f"bm25 ({args.docs} docs)", bench_bm25(rng, args.docs, args.vocab, args.repeat)),
        (f"prefix range ({args.triples} rows)", bench_prefix(rng, args.triples, args.repeat)),
    ):
        print(f"{name:<28}{j:>14.2f}{n:>16.2f}{n / j:>9.1f}x")


if __name__ == "__main__":
    main()
