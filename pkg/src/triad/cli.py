"""``triad`` command line: load, ask, eval, replay-check.

Exit codes: 0 success (an abstained answer included), 1 user or data error,
2 infrastructure error (backend unreachable, transcript missing or exhausted).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import ConfigError, TriadConfig, load_config
from .evaluation import BenchmarkError, evaluate, load_benchmark
from .index import MentionIndex
from .kb.ntriples import NTriplesError, ParseStats
from .kb.store import KbStore
from .llm import (BackendError, ChatCompletionBackend, Gateway, Prices, RecordingBackend, ReplayBackend,
                  ReplayMismatchError)
from .orchestrator import Deps, run

log = logging.getLogger("triad")

OK, USER_ERROR, INFRA_ERROR = 0, 1, 2


class Infra(Exception):
    """Raised inside commands for failures that map to exit code 2."""


def _die(msg: str, code: int) -> int:
    print(f"triad: {msg}", file=sys.stderr)
    return code


def _config(args) -> TriadConfig:
    cfg = load_config(args.config) if args.config else TriadConfig()
    updates = {}
    if getattr(args, "kb", None):
        updates["kb"] = Path(args.kb)
    if getattr(args, "model", None):
        updates["backend"] = cfg.backend.model_copy(update={"model": args.model})
    return cfg.model_copy(update=updates) if updates else cfg


def _prices(cfg: TriadConfig) -> Prices:
    p = cfg.price_for()
    return Prices(p.prompt_price_per_1k, p.completion_price_per_1k)


def _store_and_index(cfg: TriadConfig) -> tuple[KbStore, MentionIndex]:
    if cfg.kb is None:
        raise ConfigError("no kb path (set 'kb' in the config or pass --kb)")
    store = KbStore.load(cfg.kb, strict=cfg.kb_strict, label_predicates=cfg.label_predicates)
    snap = cfg.index_snapshot
    index = MentionIndex.load(snap) if snap is not None and Path(snap).exists() else MentionIndex.build(store)
    return store, index


def _live(cfg: TriadConfig) -> ChatCompletionBackend:
    b = cfg.backend
    return ChatCompletionBackend(b.base_url, max_retries=b.max_retries, timeout_s=b.timeout_s,
                                 max_in_flight=b.max_in_flight)


def _replay(path: Path, strict: bool) -> ReplayBackend:
    if not path.is_file():
        raise Infra(f"transcript not found: {path}")
    return ReplayBackend.from_file(path, strict=strict)


def cmd_load(args) -> int:
    stats = ParseStats()
    store = KbStore.load(args.kb, strict=not args.lenient, stats=stats)
    index = MentionIndex.build(store)
    if args.snapshot:
        index.save(args.snapshot)
    n_labels = sum(len(v) for v in store.labels.values())
    print(f"{len(store)} triples, {n_labels} labels")
    if stats.skipped:
        print(f"skipped {stats.skipped} malformed line(s)", file=sys.stderr)
    return OK


def cmd_ask(args) -> int:
    cfg = _config(args)
    strict = args.strict or cfg.backend.strict_replay
    if args.replay:
        backend = _replay(Path(args.replay), strict)
    elif cfg.backend.kind == "replay" and not args.record:
        if cfg.backend.transcript is None:
            raise ConfigError("backend.kind is replay but no transcript is configured")
        backend = _replay(cfg.backend.transcript, strict)
    else:
        backend = _live(cfg)
    if args.record:
        backend = RecordingBackend(backend, args.record)
    store, index = _store_and_index(cfg)
    gateway = Gateway(backend, cfg.backend.model, _prices(cfg), cfg.backend.max_tokens)
    result = run(args.question, Deps(store, index, gateway), cfg.roles)
    if args.trace:
        Path(args.trace).write_text(json.dumps(result.to_dict(), indent=2) + "\n", encoding="utf-8")
    print(result.answer.render())
    return OK


def cmd_eval(args) -> int:
    cfg = _config(args)
    bench = load_benchmark(args.benchmark)
    replay_dir = Path(args.replay) if args.replay else None
    if replay_dir is None and cfg.backend.kind == "replay" and not args.record:
        raise ConfigError("backend.kind is replay: pass --replay DIR with one <id>.jsonl per item")
    if replay_dir is not None and not replay_dir.is_dir():
        raise Infra(f"transcript directory not found: {replay_dir}")
    store, index = _store_and_index(cfg)
    prices = _prices(cfg)
    strict = args.strict or cfg.backend.strict_replay
    live = None if replay_dir is not None else _live(cfg)

    def make_deps(item, run_index):
        if replay_dir is not None:
            backend = _replay(replay_dir / f"{item.id}.jsonl", strict)
        else:
            backend = live
        if args.record:
            suffix = "" if run_index == 0 else f".run{run_index}"
            backend = RecordingBackend(backend, Path(args.record) / f"{item.id}{suffix}.jsonl")
        return Deps(store, index, Gateway(backend, cfg.backend.model, prices, cfg.backend.max_tokens))

    repeat = args.repeat or cfg.eval.repeat
    report = evaluate(bench, make_deps, cfg.roles, repeat=repeat,
                      concurrency=args.concurrency or cfg.eval.concurrency,
                      averaging=args.averaging or cfg.eval.averaging, store=store, prices=prices,
                      config_snapshot=cfg.model_dump(mode="json", exclude={"kb", "index_snapshot"}) | {
                          "backend": cfg.backend.model_dump(mode="json", exclude={"transcript"})})
    timing = not args.no_timing
    if args.report:
        Path(args.report).write_text(report.to_json(timing), encoding="utf-8")
    if args.table:
        Path(args.table).write_text(report.to_table(), encoding="utf-8")
    if args.traces:
        out = Path(args.traces)
        out.mkdir(parents=True, exist_ok=True)
        for it in report.items:
            if it.trace is not None:
                name = it.id if it.run == 0 else f"{it.id}.run{it.run}"
                (out / f"{name}.json").write_text(
                    json.dumps(it.trace.to_dict(timing), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    for it in report.items:
        if it.error:
            print(f"item {it.id}: {it.error}", file=sys.stderr)
    print(report.summary_line())
    return OK


def cmd_replay_check(args) -> int:
    """Strict replay: every request must hit a record by hash, and every record must be used."""
    cfg = _config(args)
    if args.benchmark:
        if not args.replay or not Path(args.replay).is_dir():
            raise Infra(f"transcript directory not found: {args.replay}")
        jobs = [(item.question, Path(args.replay) / f"{item.id}.jsonl") for item in load_benchmark(args.benchmark)]
    elif args.question and args.replay:
        jobs = [(args.question, Path(args.replay))]
    else:
        raise ConfigError("replay-check needs --question with --replay FILE, or --benchmark with --replay DIR")
    store, index = _store_and_index(cfg)
    bad = 0
    for question, path in jobs:
        backend = _replay(path, strict=True)
        try:
            run(question, Deps(store, index, Gateway(backend, cfg.backend.model)), cfg.roles)
        except ReplayMismatchError as exc:
            print(f"{path.name}: {exc}", file=sys.stderr)
            bad += 1
            continue
        if backend.remaining:
            print(f"{path.name}: {backend.remaining} record(s) never requested", file=sys.stderr)
            bad += 1
            continue
        print(f"{path.name}: ok ({len(backend.records)} records)")
    return OK if not bad else USER_ERROR


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="triad", description="Knowledge-base question answering with LLM roles.")
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("load", help="parse a KB, build the mention index, optionally snapshot it")
    p.add_argument("--kb", required=True)
    p.add_argument("--snapshot")
    p.add_argument("--lenient", action="store_true", help="skip malformed lines instead of failing")
    p.set_defaults(func=cmd_load)

    def common(p):
        p.add_argument("--config")
        p.add_argument("--kb", help="override the config's kb path")
        p.add_argument("--model", help="override the config's model tag")
        p.add_argument("--strict", action="store_true", help="replay by prompt hash only")

    p = sub.add_parser("ask", help="answer one question")
    p.add_argument("--question", required=True)
    common(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--record", help="append every model call to this transcript")
    g.add_argument("--replay", help="serve model calls from this transcript")
    p.add_argument("--trace", help="write the full pipeline trace as JSON")
    p.set_defaults(func=cmd_ask)

    p = sub.add_parser("eval", help="score a benchmark")
    p.add_argument("--benchmark", required=True)
    common(p)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--replay", help="directory of <id>.jsonl transcripts")
    g.add_argument("--record", help="directory to record <id>.jsonl transcripts into")
    p.add_argument("--report", help="write the JSON report here")
    p.add_argument("--table", help="write the plain-text table here")
    p.add_argument("--traces", help="directory for per-item trace JSON")
    p.add_argument("--repeat", type=int, help="runs per item (mean of runs is reported)")
    p.add_argument("--concurrency", type=int)
    p.add_argument("--averaging", choices=["macro", "micro"])
    p.add_argument("--no-timing", action="store_true", help="omit wall-clock fields from outputs")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("replay-check", help="verify transcripts replay exactly")
    common(p)
    p.add_argument("--question")
    p.add_argument("--benchmark")
    p.add_argument("--replay", required=True, help="transcript file, or directory with --benchmark")
    p.set_defaults(func=cmd_replay_check)
    return ap


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse exits 2 on usage errors; those are user errors here
        return OK if exc.code == 0 else USER_ERROR
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "repeat", None) is not None and args.repeat < 1:
        return _die("--repeat must be at least 1", USER_ERROR)
    try:
        return args.func(args)
    except (Infra, BackendError, ReplayMismatchError) as exc:
        return _die(str(exc), INFRA_ERROR)
    except NTriplesError as exc:
        return _die(str(exc), USER_ERROR)
    except (ConfigError, BenchmarkError, ValueError, KeyError) as exc:
        return _die(str(exc), USER_ERROR)
    except OSError as exc:
        return _die(f"{exc.filename or ''}: {exc.strerror or exc}", USER_ERROR)


if __name__ == "__main__":
    sys.exit(main())
