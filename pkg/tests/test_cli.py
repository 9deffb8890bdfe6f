"""命令行：子命令、JSON Lines 管道与退出码"""
import json
import shutil
import textwrap

import pytest

from cli import EXIT_FAIL, EXIT_PASS, EXIT_USAGE, main
from conftest import ROOT
from module import haar_measure
from module.codec import decode_tuple, encode_tuple
from module.coset_space import equivalent


@pytest.fixture
def workdir(tmp_path, fresh_config, monkeypatch):
    monkeypatch.delenv("PI_SEED", raising=False)
    monkeypatch.delenv("PI_THREADS", raising=False)
    shutil.copy(ROOT / "suites.yaml", tmp_path / "suites.yaml")
    (tmp_path / "config.yaml").write_text(textwrap.dedent(f"""
        logging:
          level: WARNING
        sampling:
          seed: "${{PI_SEED}}"
        verify:
          config_file: suites.yaml
          suites_path: {ROOT / "suites"}
    """), encoding="utf-8")
    return tmp_path


def run(workdir, *argv):
    return main([argv[0], "--config", str(workdir / "config.yaml"), *argv[1:]])


def lines(path):
    return [json.loads(line) for line in path.read_text(encoding="utf-8").splitlines() if line.strip()]


def test_sample_is_deterministic(workdir, capsys):
    assert run(workdir, "sample", "--n", "4", "--samples", "3", "--seed", "11") == EXIT_PASS
    first = capsys.readouterr().out
    assert run(workdir, "sample", "--n", "4", "--samples", "3", "--seed", "11") == EXIT_PASS
    assert capsys.readouterr().out == first
    records = [json.loads(line) for line in first.splitlines()]
    assert len(records) == 3 and all(r["n"] == 4 for r in records)


def test_seed_from_environment(workdir, capsys, monkeypatch):
    monkeypatch.setenv("PI_SEED", "11")
    assert run(workdir, "sample", "--n", "4", "--samples", "3") == EXIT_PASS
    from_env = capsys.readouterr().out
    assert run(workdir, "sample", "--n", "4", "--samples", "3", "--seed", "11") == EXIT_PASS
    assert capsys.readouterr().out == from_env


def test_zero_samples_is_empty_output(workdir, capsys):
    assert run(workdir, "sample", "--n", "3", "--samples", "0", "--seed", "1") == EXIT_PASS
    assert capsys.readouterr().out == ""


def test_usage_errors(workdir, capsys):
    assert run(workdir, "sample", "--n", "1", "--seed", "1") == EXIT_USAGE
    assert run(workdir, "sample", "--n", "3") == EXIT_USAGE
    assert "PI_SEED" in capsys.readouterr().err


def test_zeta_then_reconstruct_stays_in_coset(workdir):
    tuples, forms, rebuilt = workdir / "t.jsonl", workdir / "z.jsonl", workdir / "r.jsonl"
    assert run(workdir, "sample", "--n", "5", "--samples", "5", "--seed", "3", "--out", str(tuples)) == EXIT_PASS
    assert run(workdir, "zeta", "--input", str(tuples), "--out", str(forms)) == EXIT_PASS
    assert all(r["sheet"] in (-1, 1) for r in lines(forms))
    assert run(workdir, "reconstruct", "--input", str(forms), "--out", str(rebuilt)) == EXIT_PASS
    for a, b in zip(lines(tuples), lines(rebuilt)):
        assert equivalent(decode_tuple(a), decode_tuple(b))


def test_canonicalize_and_coordinates(workdir):
    tuples, out = workdir / "t.jsonl", workdir / "c.jsonl"
    run(workdir, "sample", "--n", "4", "--samples", "2", "--seed", "3", "--out", str(tuples))
    assert run(workdir, "canonicalize", "--input", str(tuples), "--out", str(out)) == EXIT_PASS
    for a, b in zip(lines(tuples), lines(out)):
        assert equivalent(decode_tuple(a), decode_tuple(b))
    assert run(workdir, "canonicalize", "--coordinates", "--input", str(tuples), "--out", str(out)) == EXIT_PASS
    assert set(lines(out)[0]) == {"phi", "x", "y", "theta"}


def test_act_on_tuples_and_forms(workdir, tuples):
    t = tuples(5)[0]
    src = workdir / "in.jsonl"
    src.write_text(json.dumps(encode_tuple(t)) + "\n", encoding="utf-8")
    forms, moved, moved_forms = workdir / "z.jsonl", workdir / "a.jsonl", workdir / "b.jsonl"
    run(workdir, "zeta", "--input", str(src), "--out", str(forms))
    assert run(workdir, "act", "--word", "s1 inv:3", "--input", str(src), "--out", str(moved)) == EXIT_PASS
    assert run(workdir, "act", "--word", "s1 inv:3", "--branch", "oracle", "--input", str(forms), "--out", str(moved_forms)) == EXIT_PASS
    zeta_of_moved = workdir / "zm.jsonl"
    run(workdir, "zeta", "--input", str(moved), "--out", str(zeta_of_moved))
    want, got = lines(zeta_of_moved)[0], lines(moved_forms)[0]
    assert got["sheet"] == want["sheet"]
    assert max(abs(a - b) for a, b in zip(got["upper"], want["upper"])) < 1e-8


def test_malformed_word_and_bad_index(workdir, tuples, capsys):
    src = workdir / "in.jsonl"
    src.write_text(json.dumps(encode_tuple(tuples(4)[0])) + "\n", encoding="utf-8")
    assert run(workdir, "act", "--word", "qzx", "--input", str(src)) == EXIT_USAGE
    assert run(workdir, "act", "--word", "s7", "--input", str(src)) == EXIT_USAGE


def test_malformed_input_reports_line(workdir, capsys):
    src = workdir / "in.jsonl"
    src.write_text('{"n": 2, "elements": [[1,0,0,0],[0,1,0,0]]}\nnot json\n', encoding="utf-8")
    assert run(workdir, "zeta", "--input", str(src)) == EXIT_USAGE
    assert "第 2 行" in capsys.readouterr().err


def test_polygon(workdir, capsys):
    assert run(workdir, "polygon", "--theta", "1.0,1.2,1.4,1.3", "--samples", "2", "--word", "s1 s1", "--seed", "4") == EXIT_PASS
    records = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert len(records) == 2
    for r in records:
        assert r["word"] == "s1 s1"
        assert r["image"]["theta"] == pytest.approx(r["polygon"]["theta"], abs=1e-10)
    assert run(workdir, "polygon", "--theta", "1.0,1.2,1.4,1.3", "--word", "s1", "--seed", "4") == EXIT_USAGE
    assert run(workdir, "polygon", "--theta", "1.0,1.2,1.4,1.3", "--word", "s1", "--any-braid", "--seed", "4") == EXIT_PASS


def test_suites_listing(workdir, capsys):
    assert run(workdir, "suites") == EXIT_PASS
    names = {json.loads(line)["name"] for line in capsys.readouterr().out.splitlines()}
    assert {"haar-n3", "kernel", "polygon-pure"} <= names


def test_verify_small_suites(workdir, capsys):
    assert run(workdir, "verify", "kernel", "braid-relations", "--samples", "5", "--seed", "2", "-q") == EXIT_PASS
    records = [json.loads(line) for line in capsys.readouterr().out.splitlines()]
    assert [r["suite"] for r in records] == ["kernel", "braid-relations"]
    assert all(r["passed"] for r in records)


def test_verify_exit_codes(workdir, capsys):
    assert run(workdir, "verify", "nope", "--seed", "1") == EXIT_USAGE
    assert run(workdir, "verify", "kernel") == EXIT_USAGE
    assert run(workdir, "verify", "haar-n3", "--samples", "100", "--seed", "1", "-q") == EXIT_USAGE
    assert run(workdir, "verify", "haar-n3", "--samples", "200000", "--seed", "3", "--param", "power=0.5",
               "--param", "bins=6", "-q") == EXIT_FAIL


def test_verify_uses_configured_chunk_size(workdir, capsys, monkeypatch):
    config = workdir / "config.yaml"
    config.write_text(config.read_text(encoding="utf-8").replace("sampling:\n", "sampling:\n  chunk_size: 2500\n"),
                      encoding="utf-8")
    seen = []
    original = haar_measure.chunks
    monkeypatch.setattr(haar_measure, "chunks", lambda total, chunk_size: seen.append(chunk_size) or original(total, chunk_size))
    code = run(workdir, "verify", "haar-branch", "--samples", "20000", "--seed", "1", "--param", "n=5", "-q")
    assert code in (EXIT_PASS, EXIT_FAIL)
    assert seen and set(seen) == {2500}
