import filecmp

from triad.authoring import author, load_script, main
from triad.config import load_config
from triad.evaluation import load_benchmark

from conftest import TOY


def test_transcripts_regenerate_byte_for_byte(tmp_path, toy_store, toy_index):
    cfg = load_config(TOY / "config.yaml")
    bench = load_benchmark(TOY / "benchmark.json")
    for folder, overlay in (("transcripts", None), ("sabotaged", TOY / "sabotage.yaml")):
        out = tmp_path / folder
        done = author(cfg, bench, load_script(TOY / "script.yaml", overlay), out, toy_store, toy_index)
        assert all(not a.leftover for a in done)
        for item in bench:
            name = f"{item.id}.jsonl"
            assert filecmp.cmp(out / name, TOY / folder / name, shallow=False), name
    assert sum(a.correct for a in done) == 5


def test_authoring_cli(tmp_path, capsys):
    code = main(["--config", str(TOY / "config.yaml"), "--benchmark", str(TOY / "benchmark.json"),
                 "--script", str(TOY / "script.yaml"), "--out", str(tmp_path)])
    out = capsys.readouterr().out
    assert code == 0 and out.count("\tok") == 10
