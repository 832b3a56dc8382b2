"""Render canned model replies into replayable transcripts.

A script maps benchmark ids to per-subtask reply queues. Each item runs through
the real pipeline against a scripted backend wrapped in a recorder, so the
transcripts carry the exact prompts (and hashes) the pipeline produces.

    python3 -m triad.authoring --config CONFIG --benchmark B --script S [--overlay O] --out DIR
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path

import yaml

from .config import TriadConfig, load_config
from .evaluation.benchmark import BenchmarkItem, load_benchmark
from .evaluation.metrics import PERFECT, score
from .llm import Gateway, Prices, RecordingBackend, ScriptedBackend
from .orchestrator import Deps, PipelineResult, run
from .kb.store import KbStore
from .index import MentionIndex


@dataclass
class Authored:
    item: BenchmarkItem
    result: PipelineResult
    leftover: dict[str, int]

    @property
    def correct(self) -> bool:
        return score(self.result.answer, self.item) == PERFECT


def load_script(path: str | Path, overlay: str | Path | None = None) -> dict[str, dict[str, list[str]]]:
    items = dict((yaml.safe_load(Path(path).read_text(encoding="utf-8")) or {}).get("items") or {})
    if overlay is not None:
        items.update((yaml.safe_load(Path(overlay).read_text(encoding="utf-8")) or {}).get("items") or {})
    return {k: {sub: [str(r) for r in replies] for sub, replies in v.items()} for k, v in items.items()}


def author(config: TriadConfig, benchmark: list[BenchmarkItem], script: dict, out_dir: str | Path,
           store: KbStore | None = None, index: MentionIndex | None = None) -> list[Authored]:
    out_dir = Path(out_dir)
    store = store or KbStore.load(config.kb, label_predicates=config.label_predicates)
    index = index or MentionIndex.build(store)
    p = config.price_for()
    prices = Prices(p.prompt_price_per_1k, p.completion_price_per_1k)
    done = []
    for item in benchmark:
        if item.id not in script:
            raise KeyError(f"script has no entry for item {item.id!r}")
        scripted = ScriptedBackend(script[item.id])
        backend = RecordingBackend(scripted, out_dir / f"{item.id}.jsonl")
        gateway = Gateway(backend, config.backend.model, prices, config.backend.max_tokens)
        result = run(item.question, Deps(store, index, gateway), config.roles)
        done.append(Authored(item, result, scripted.leftover()))
    return done


def main(argv: list[str] | None = None) -> int:
    ap = argparse.ArgumentParser(prog="triad-author", description=__doc__.splitlines()[0])
    ap.add_argument("--config", required=True)
    ap.add_argument("--benchmark", required=True)
    ap.add_argument("--script", required=True)
    ap.add_argument("--overlay")
    ap.add_argument("--out", required=True)
    args = ap.parse_args(argv)
    config = load_config(args.config)
    done = author(config, load_benchmark(args.benchmark), load_script(args.script, args.overlay), args.out)
    status = 0
    for a in done:
        note = "" if not a.leftover else f" unused replies {a.leftover}"
        print(f"{a.item.id}\tattempts={len(a.result.attempts)}\t{a.result.answer.provenance}\t"
              f"{'ok' if a.correct else 'WRONG'}{note}")
        status |= bool(a.leftover)
    return status


if __name__ == "__main__":
    sys.exit(main())
