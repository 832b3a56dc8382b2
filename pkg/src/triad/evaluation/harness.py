"""Run the pipeline over a benchmark and aggregate scores, linking recall, cost and latency."""

from __future__ import annotations

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from decimal import Decimal
from typing import Callable

from ..config import RoleConfig
from ..kb.store import KbStore
from ..llm.gateway import Prices
from ..orchestrator import PHASES, Deps, PipelineResult, run
from ..roles.types import Answer
from .benchmark import BenchmarkItem
from .metrics import Prf, ZERO, linking_recall, macro, micro, micro_counts, score

log = logging.getLogger(__name__)

MACRO, MICRO = "macro", "micro"
DepsFactory = Callable[[BenchmarkItem, int], Deps]


@dataclass
class ItemResult:
    id: str
    run: int
    answer: Answer | None
    prf: Prf
    counts: tuple[int, int, int] = (0, 0, 0)
    prompt_tokens: int = 0
    completion_tokens: int = 0
    cost: Decimal = Decimal(0)
    llm_calls: int = 0
    attempts: int = 0
    phase_ms: dict[str, float] = field(default_factory=dict)
    total_ms: float = 0.0
    recall_filter: float | None = None
    recall_selection: float | None = None
    error: str = ""
    trace: PipelineResult | None = None

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "id": self.id,
            "run": self.run,
            "answer": self.answer.to_dict() if self.answer else None,
            "precision": self.prf.precision,
            "recall": self.prf.recall,
            "f1": self.prf.f1,
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
            "cost": str(self.cost),
            "llm_calls": self.llm_calls,
            "attempts": self.attempts,
            "recall_after_filter": self.recall_filter,
            "recall_after_selection": self.recall_selection,
        }
        if self.error:
            out["error"] = self.error
        if timing:
            out["phase_ms"] = dict(self.phase_ms)
            out["total_ms"] = self.total_ms
        return out


@dataclass
class EvalReport:
    items: list[ItemResult]
    runs: list[Prf]
    scores: Prf
    averaging: str
    prompt_tokens: int
    completion_tokens: int
    cost: Decimal
    recall_after_filter: float | None
    recall_after_selection: float | None
    phase_ms: dict[str, float]
    config: dict

    @property
    def precision(self) -> float:
        return self.scores.precision

    @property
    def recall(self) -> float:
        return self.scores.recall

    @property
    def f1(self) -> float:
        return self.scores.f1

    def summary_line(self) -> str:
        return f"P={self.precision:.3f} R={self.recall:.3f} F1={self.f1:.3f}"

    def to_dict(self, timing: bool = True) -> dict:
        out = {
            "averaging": self.averaging,
            "n_items": len({i.id for i in self.items}),
            "n_runs": len(self.runs),
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
            "runs": [{"precision": r.precision, "recall": r.recall, "f1": r.f1} for r in self.runs],
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
            "cost": str(self.cost),
            "recall_after_filter": self.recall_after_filter,
            "recall_after_selection": self.recall_after_selection,
            "config": self.config,
            "items": [i.to_dict(timing) for i in self.items],
        }
        if timing:
            out["phase_ms"] = dict(self.phase_ms)
        return out

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), indent=2, sort_keys=True) + "\n"

    def to_table(self) -> str:
        """Aligned plain-text table: one row per item and run, then the aggregate row."""
        header = ["id", "run", "P", "R", "F1", "calls", "tokens", "cost", "answer"]
        rows = [header]
        for it in self.items:
            shown = it.answer.render().replace("\n", "; ") if it.answer else "error"
            rows.append([it.id, str(it.run), f"{it.prf.precision:.3f}", f"{it.prf.recall:.3f}",
                         f"{it.prf.f1:.3f}", str(it.llm_calls),
                         str(it.prompt_tokens + it.completion_tokens), str(it.cost), shown[:40]])
        rows.append([self.averaging, "-", f"{self.precision:.3f}", f"{self.recall:.3f}", f"{self.f1:.3f}",
                     str(sum(i.llm_calls for i in self.items)),
                     str(self.prompt_tokens + self.completion_tokens), str(self.cost), ""])
        widths = [max(len(r[c]) for r in rows) for c in range(len(header))]
        lines = ["  ".join(cell.ljust(w) for cell, w in zip(r, widths)).rstrip() for r in rows]
        lines.insert(1, "  ".join("-" * w for w in widths))
        return "\n".join(lines) + "\n"


def _exact_cost(pt: int, ct: int, prices: Prices) -> Decimal:
    return (Decimal(pt) * Decimal(str(prices.prompt_price_per_1k))
            + Decimal(ct) * Decimal(str(prices.completion_price_per_1k))) / 1000


def _one(item: BenchmarkItem, run_index: int, make_deps: DepsFactory, cfg: RoleConfig,
         store: KbStore | None) -> ItemResult:
    try:
        deps = make_deps(item, run_index)
        result = run(item.question, deps, cfg)
    except Exception as exc:  # infrastructure failure: score zero, keep going
        log.warning("item %s failed: %s", item.id, exc)
        return ItemResult(item.id, run_index, None, ZERO, (0, 0, _gold_size(item)),
                          error=f"{type(exc).__name__}: {exc}")
    scoring_store = store if store is not None else deps.store
    prf = score(result.answer, item, scoring_store)
    out = ItemResult(item.id, run_index, result.answer, prf,
                     micro_counts(result.answer, item, scoring_store),
                     result.prompt_tokens, result.completion_tokens,
                     _exact_cost(result.prompt_tokens, result.completion_tokens, deps.gateway.prices),
                     result.llm_calls, len(result.attempts), dict(result.phase_ms), result.total_ms,
                     trace=result)
    if item.gold_uris is not None:
        pooled, chosen = result.linked_uris()
        out.recall_filter = linking_recall(item.gold_uris, pooled)
        out.recall_selection = linking_recall(item.gold_uris, chosen & pooled)
    return out


def _gold_size(item: BenchmarkItem) -> int:
    gold = item.gold_answers
    return len(gold) if isinstance(gold, frozenset) else 1


def _mean(values: list[float]) -> float | None:
    return sum(values) / len(values) if values else None


def evaluate(benchmark: list[BenchmarkItem], make_deps: DepsFactory, cfg: RoleConfig | None = None,
             repeat: int = 1, concurrency: int = 1, averaging: str = MACRO,
             store: KbStore | None = None, prices: Prices | None = None,
             config_snapshot: dict | None = None) -> EvalReport:
    """Score every item ``repeat`` times; the headline numbers are the mean over runs.

    ``make_deps(item, run)`` supplies per-item dependencies, typically a fresh
    gateway over that item's transcript.
    """
    if averaging not in (MACRO, MICRO):
        raise ValueError(f"averaging must be {MACRO!r} or {MICRO!r}")
    if repeat < 1:
        raise ValueError("repeat must be at least 1")
    cfg = cfg or RoleConfig()
    jobs = [(item, r) for r in range(repeat) for item in benchmark]
    if concurrency > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=concurrency) as pool:
            items = list(pool.map(lambda j: _one(j[0], j[1], make_deps, cfg, store), jobs))
    else:
        items = [_one(item, r, make_deps, cfg, store) for item, r in jobs]

    runs = []
    for r in range(repeat):
        mine = [i for i in items if i.run == r]
        runs.append(macro([i.prf for i in mine]) if averaging == MACRO else micro([i.counts for i in mine]))
    scores = macro(runs) if runs and benchmark else ZERO
    if repeat == 1 and runs:
        scores = runs[0]

    pt = sum(i.prompt_tokens for i in items)
    ct = sum(i.completion_tokens for i in items)
    cost = _exact_cost(pt, ct, prices) if prices is not None else sum((i.cost for i in items), Decimal(0))
    answered = [i for i in items if not i.error]
    phase = {p: (_mean([i.phase_ms.get(p, 0.0) for i in answered]) or 0.0) for p in PHASES}
    return EvalReport(
        items=items,
        runs=runs,
        scores=scores,
        averaging=averaging,
        prompt_tokens=pt,
        completion_tokens=ct,
        cost=cost,
        recall_after_filter=_mean([i.recall_filter for i in items if i.recall_filter is not None]),
        recall_after_selection=_mean([i.recall_selection for i in items
                                      if i.recall_selection is not None]),
        phase_ms=phase,
        config=config_snapshot if config_snapshot is not None else cfg.model_dump(mode="json"),
    )
