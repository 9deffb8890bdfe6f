"""检验套件插件的发现、加载与运行"""
import textwrap

import pytest

from module import haar_measure
from module.montecarlo import DEFAULT_CHUNK
from module.suite_manager import SuiteManager, suite_manager


@pytest.fixture
def manager():
    saved = (dict(suite_manager.modules), suite_manager.suites_path, dict(suite_manager.defaults))
    suite_manager.modules.clear()
    yield suite_manager
    suite_manager.modules, suite_manager.suites_path, suite_manager.defaults = saved


def test_singleton():
    assert SuiteManager() is suite_manager


def test_discovers_bundled_suites(manager):
    assert manager.discover() == ["actions", "haar", "polygon"]
    names = manager.load_all()
    assert names == sorted([
        "actions-oracle", "artin", "braid-relations", "haar-branch", "haar-n3", "haar-n4", "haar-su2", "kernel", "polygon-pure",
    ])


def test_list_suites_carries_definitions_and_defaults(manager):
    manager.load_all()
    manager.set_defaults({"kernel": {"trials": 3}})
    entry = next(e for e in manager.list_suites() if e["name"] == "kernel")
    assert entry["module"] == "actions"
    assert entry["defaults"] == {"trials": 3}
    assert entry["description"]
    assert "trials" in entry["parameters"]


def test_run_merges_defaults_under_params(manager):
    manager.load_all()
    manager.set_defaults({"kernel": {"n": [3], "trials": 4}})
    result = manager.run_sync("kernel", seed=1, trials=None)
    assert result["success"] and result["passed"]
    assert result["report"]["trials"] == 4
    result = manager.run_sync("kernel", seed=1, trials=2)
    assert result["report"]["trials"] == 2


def test_failures_become_error_results(manager):
    manager.load_all()
    result = manager.run_sync("haar-n3", samples=100, seed=1)
    assert result["success"] is False
    assert result["exit_code"] == 2


def test_unknown_suite(manager):
    manager.load_all()
    assert manager.find("nope") is None
    with pytest.raises(ValueError):
        manager.run_sync("nope", seed=1)


def test_plugins_from_other_directory(manager, tmp_path):
    (tmp_path / "extra.py").write_text(textwrap.dedent("""
        def echo(seed=0, **params):
            return {"success": True, "passed": True, "seed": seed}

        SUITES = {"echo": echo}
        SUITE_DEFINITIONS = [{"name": "echo", "description": "回显"}]
    """), encoding="utf-8")
    (tmp_path / "broken.py").write_text("raise RuntimeError('boom')\n", encoding="utf-8")
    (tmp_path / "_private.py").write_text("SUITES = {'hidden': None}\n", encoding="utf-8")
    manager.set_suites_path(str(tmp_path))
    assert manager.discover() == ["broken", "extra"]
    assert manager.load_all() == ["echo"]
    assert manager.run_sync("echo", seed=5)["seed"] == 5
    assert not manager.load_module("missing")


def test_chunk_size_reaches_sampling_suites(manager, monkeypatch):
    seen = []
    original = haar_measure.chunks

    def recording(total, chunk_size=DEFAULT_CHUNK):
        seen.append(chunk_size)
        return original(total, chunk_size)

    monkeypatch.setattr(haar_measure, "chunks", recording)
    manager.load_all()
    result = manager.run_sync("haar-branch", samples=20_000, n=5, seed=1, chunk_size=2_500)
    assert result["success"]
    assert seen and set(seen) == {2_500}
