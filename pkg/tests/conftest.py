from __future__ import annotations

import shutil
from pathlib import Path

import pytest

from triad.config import load_config
from triad.evaluation import load_benchmark
from triad.index import MentionIndex
from triad.kb.store import KbStore
from triad.llm import Gateway, Prices, ReplayBackend
from triad.orchestrator import Deps, run

TOY = Path(__file__).resolve().parents[1] / "src" / "triad" / "data" / "toy"
R = "http://toy.example.org/resource/"
O = "http://toy.example.org/ontology/"


@pytest.fixture(scope="session")
def toy_dir() -> Path:
    return TOY


@pytest.fixture(scope="session")
def toy_config():
    return load_config(TOY / "config.yaml")


@pytest.fixture(scope="session")
def toy_store() -> KbStore:
    return KbStore.load(TOY / "toy.nt")


@pytest.fixture(scope="session")
def toy_index(toy_store) -> MentionIndex:
    return MentionIndex.build(toy_store)


@pytest.fixture(scope="session")
def toy_bench():
    return load_benchmark(TOY / "benchmark.json")


@pytest.fixture
def toy_copy(tmp_path) -> Path:
    """A writable copy of the toy fixture directory."""
    dst = tmp_path / "toy"
    shutil.copytree(TOY, dst, ignore=shutil.ignore_patterns("*.npz"))
    return dst


def replay_item(item, store, index, cfg, transcripts="transcripts", prices=None, strict=True):
    backend = ReplayBackend.from_file(TOY / transcripts / f"{item.id}.jsonl", strict=strict)
    gateway = Gateway(backend, "gpt-4", prices or Prices())
    result = run(item.question, Deps(store, index, gateway), cfg)
    return result, gateway, backend


# acceptance lines, filled by test_acceptance and echoed at the end of the run
ACCEPTANCE: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
