"""Per-question precision / recall / F1 with answer normalization."""

from __future__ import annotations

import math
import re
import unicodedata
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from typing import NamedTuple

from ..kb.store import KbStore
from ..kb.terms import is_absolute_uri
from ..roles.types import Answer, AnswerType
from .benchmark import BenchmarkItem


class Prf(NamedTuple):
    precision: float
    recall: float
    f1: float


PERFECT = Prf(1.0, 1.0, 1.0)
ZERO = Prf(0.0, 0.0, 0.0)


def normalize_text(text: str) -> str:
    """Case-folded, NFC, whitespace collapsed. Idempotent."""
    return " ".join(unicodedata.normalize("NFC", text).casefold().split())


_NUMBER = re.compile(r"[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?")


def canonical(value: str) -> tuple[str, object]:
    """Comparison key: URIs verbatim, numerals by value, everything else normalized text."""
    if is_absolute_uri(value):
        return ("uri", value)
    text = normalize_text(value)
    if _NUMBER.fullmatch(text):
        try:
            return ("num", Decimal(text).normalize())
        except InvalidOperation:
            pass
    return ("text", text)


def _matches(a: tuple[str, object], b: tuple[str, object], store: KbStore | None) -> bool:
    if a == b:
        return True
    if store is None or (a[0] == "uri") == (b[0] == "uri"):
        return False
    uri, lit = (a, b) if a[0] == "uri" else (b, a)
    return any(canonical(label) == lit for label in store.labels_of(uri[1]))


def f1(p, r):
    return 0 * p if p + r == 0 else 2 * p * r / (p + r)


def set_prf(pred: frozenset[str] | set[str], gold: frozenset[str] | set[str],
            store: KbStore | None = None) -> Prf:
    """Set P/R/F1. A prediction counts as correct if it matches any gold member, and vice versa."""
    p_keys = {canonical(v) for v in pred}
    g_keys = {canonical(v) for v in gold}
    if not p_keys and not g_keys:
        return PERFECT
    if not p_keys or not g_keys:
        return ZERO
    hit_p = sum(1 for a in p_keys if any(_matches(a, b, store) for b in g_keys))
    hit_g = sum(1 for b in g_keys if any(_matches(a, b, store) for a in p_keys))
    # exact rational arithmetic, rounded once
    p, r = Fraction(hit_p, len(p_keys)), Fraction(hit_g, len(g_keys))
    return Prf(float(p), float(r), float(f1(p, r)))


def _gold_as_set(gold: object) -> frozenset[str]:
    if isinstance(gold, bool):
        return frozenset({"true" if gold else "false"})
    if isinstance(gold, int):
        return frozenset({str(gold)})
    return frozenset(gold)


def score(pred: Answer, item: BenchmarkItem, store: KbStore | None = None) -> Prf:
    """Score one answer. Abstaining counts as an empty prediction."""
    gold = item.gold_answers
    if isinstance(gold, bool) or isinstance(gold, int):
        if pred.is_abstain or pred.value is None:
            return ZERO
        if isinstance(gold, bool):
            return PERFECT if isinstance(pred.value, bool) and pred.value == gold else ZERO
        if isinstance(pred.value, bool):
            return ZERO
        if isinstance(pred.value, int):
            return PERFECT if pred.value == gold else ZERO
        # a set answer to a count question is right only if it names the number
        return PERFECT if set_prf(pred.value, _gold_as_set(gold)) == PERFECT else ZERO
    if pred.is_abstain or pred.value is None:
        return PERFECT if not gold else ZERO
    if isinstance(pred.value, frozenset):
        return set_prf(pred.value, gold, store)
    return set_prf(_gold_as_set(pred.value), gold, store)


def macro(scores: list[Prf]) -> Prf:
    """Mean of per-item P, R and F1 (F1 is not recomputed from the means)."""
    if not scores:
        return ZERO
    n = len(scores)
    return Prf(math.fsum(s.precision for s in scores) / n, math.fsum(s.recall for s in scores) / n,
               math.fsum(s.f1 for s in scores) / n)


def micro(counts: list[tuple[int, int, int]]) -> Prf:
    """Pooled P/R/F1 from per-item (hits, predicted, gold) counts."""
    hp = sum(c[0] for c in counts)
    npred = sum(c[1] for c in counts)
    ngold = sum(c[2] for c in counts)
    p = Fraction(hp, npred) if npred else Fraction(int(ngold == 0))
    r = Fraction(hp, ngold) if ngold else Fraction(int(npred == 0))
    return Prf(float(p), float(r), float(f1(p, r)))


def micro_counts(pred: Answer, item: BenchmarkItem, store: KbStore | None = None) -> tuple[int, int, int]:
    """Counts for micro averaging; typed (boolean/count) items contribute one unit each side."""
    gold = item.gold_answers
    if isinstance(gold, (bool, int)):
        hit = score(pred, item, store) == PERFECT
        return (int(hit), 0 if pred.is_abstain else 1, 1)
    if pred.is_abstain or pred.value is None:
        return (0, 0, len(gold))
    values = pred.value if isinstance(pred.value, frozenset) else _gold_as_set(pred.value)
    p_keys = {canonical(v) for v in values}
    g_keys = {canonical(v) for v in gold}
    hit = sum(1 for a in p_keys if any(_matches(a, b, store) for b in g_keys))
    return (hit, len(p_keys), len(g_keys))


def linking_recall(gold_uris: frozenset[str], offered: set[str]) -> float:
    if not gold_uris:
        return 1.0
    return len(gold_uris & offered) / len(gold_uris)


__all__ = ["Prf", "PERFECT", "ZERO", "normalize_text", "canonical", "set_prf", "score", "macro",
           "micro", "micro_counts", "linking_recall", "f1", "AnswerType"]
