"""Independent reference implementations used to check the optimized code paths.

Each oracle is deliberately naive: nested loops and plain Python containers,
no numpy and nothing shared with the package beyond the data types.
"""

from __future__ import annotations

import itertools
import math
from collections import Counter

from triad.kb.terms import Literal, Var, term_key


def _is_var(t) -> bool:
    return isinstance(t, Var)


def bgp_solutions(triples: set, patterns) -> list[dict]:
    """Every assignment of the query variables to store terms satisfying all patterns."""
    names = []
    for p in patterns:
        for t in p:
            if _is_var(t) and t.name not in names:
                names.append(t.name)
    domain = sorted({x for tr in triples for x in tr}, key=term_key)
    out = []
    for values in itertools.product(domain, repeat=len(names)):
        env = dict(zip(names, values))
        ground = [tuple(env[t.name] if _is_var(t) else t for t in p) for p in patterns]
        if all(g in triples for g in ground):
            out.append(env)
    return out


def brute_execute(triples: set, form: str, patterns, projection=(), distinct=False):
    """('boolean', bool) | ('count', int) | ('rows', sorted list of tuples)."""
    sols = bgp_solutions(triples, patterns)
    if form == "ASK":
        return ("boolean", bool(sols))
    if form == "COUNT":
        if projection:
            vals = [s[projection[0]] for s in sols]
            return ("count", len(set(vals)) if distinct else len(vals))
        if distinct:
            return ("count", len({tuple(sorted(s.items())) for s in sols}))
        return ("count", len(sols))
    names = list(projection) if projection else sorted({n for s in sols for n in s},
                                                        key=lambda n: _first_seen(patterns, n))
    rows = [tuple(s[n] for n in names) for s in sols]
    if distinct:
        rows = list(set(rows))
    return ("rows", sorted(rows, key=lambda r: tuple(term_key(x) for x in r)))


def _first_seen(patterns, name):
    i = 0
    for p in patterns:
        for t in p:
            if _is_var(t):
                if t.name == name:
                    return i
                i += 1
    return i


def bm25_reference(docs: list[list[str]], query: list[str], k1=1.2, b=0.75) -> list[float]:
    """Textbook BM25 with the log(1 + (N - df + .5)/(df + .5)) idf; repeated query terms add up."""
    n = len(docs)
    avgdl = sum(len(d) for d in docs) / n if n else 1.0
    if avgdl == 0:
        avgdl = 1.0
    df = Counter(t for d in docs for t in set(d))
    out = []
    for d in docs:
        tf = Counter(d)
        s = 0.0
        for q in query:
            if tf[q] == 0:
                continue
            idf = math.log(1 + (n - df[q] + 0.5) / (df[q] + 0.5))
            s += idf * tf[q] * (k1 + 1) / (tf[q] + k1 * (1 - b + b * len(d) / avgdl))
        out.append(s)
    return out


def product_order(lists):
    """All index tuples ordered by (sum of ranks, uri tuple): the full sort the heap must agree with."""
    combos = itertools.product(*[range(len(l)) for l in lists])
    keyed = [(sum(lists[k][i].rank for k, i in enumerate(idx)),
              tuple(lists[k][i].uri for k, i in enumerate(idx))) for idx in combos]
    return sorted(keyed)


__all__ = ["bgp_solutions", "brute_execute", "bm25_reference", "product_order", "Literal"]
