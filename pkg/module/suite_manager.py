"""
检验套件插件管理：扫描 suites/*.py，每个文件导出 register_suites() / SUITES 与 SUITE_DEFINITIONS
"""
import sys
import asyncio
import importlib.util
import logging
from pathlib import Path
from threading import Lock
from typing import Any, Callable, Dict, List, Optional

from module.errors import SpectralError

logger = logging.getLogger(__name__)


class SuiteModule:
    def __init__(self, name: str, module_path: Path):
        self.name = name
        self.module_path = module_path
        self.module = None
        self.suites: Dict[str, Callable] = {}
        self.definitions: List[Dict[str, Any]] = []
        self.loaded = False

    def load(self) -> bool:
        try:
            module_name = f"suite_{self.name}"
            if module_name in sys.modules:
                del sys.modules[module_name]
            spec = importlib.util.spec_from_file_location(module_name, self.module_path)
            self.module = importlib.util.module_from_spec(spec)
            sys.modules[module_name] = self.module
            spec.loader.exec_module(self.module)
            if hasattr(self.module, "register_suites"):
                self.suites = self.module.register_suites()
            elif hasattr(self.module, "SUITES"):
                self.suites = self.module.SUITES
            self.definitions = list(getattr(self.module, "SUITE_DEFINITIONS", []))
            self.loaded = True
            logger.info(f"检验套件已加载: {self.name} -> {list(self.suites)}")
            return True
        except Exception as e:
            logger.error(f"检验套件加载失败 {self.name}: {e}")
            return False


class SuiteManager:
    _instance = None
    _lock = Lock()

    def __new__(cls):
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
                    cls._instance._initialized = False
        return cls._instance

    def __init__(self):
        if getattr(self, "_initialized", False):
            return
        self.modules: Dict[str, SuiteModule] = {}
        self.suites_path = Path(__file__).resolve().parent.parent / "suites"
        self.defaults: Dict[str, Dict[str, Any]] = {}
        self._initialized = True

    def set_suites_path(self, path: str) -> None:
        self.suites_path = Path(path)

    def set_defaults(self, defaults: Dict[str, Dict[str, Any]]) -> None:
        self.defaults = dict(defaults or {})

    def discover(self) -> List[str]:
        if not self.suites_path.exists():
            return []
        return sorted(p.stem for p in self.suites_path.glob("*.py") if not p.name.startswith("_"))

    def load_all(self) -> List[str]:
        for name in self.discover():
            if name not in self.modules:
                self.load_module(name)
        return self.names()

    def load_module(self, name: str) -> bool:
        module_path = self.suites_path / f"{name}.py"
        if not module_path.exists():
            logger.error(f"检验套件文件不存在: {module_path}")
            return False
        module = SuiteModule(name, module_path)
        if module.load():
            self.modules[name] = module
            return True
        return False

    def names(self) -> List[str]:
        return sorted(s for m in self.modules.values() for s in m.suites)

    def find(self, suite: str) -> Optional[Callable]:
        for module in self.modules.values():
            if suite in module.suites:
                return module.suites[suite]
        return None

    def list_suites(self) -> List[Dict[str, Any]]:
        out = []
        for module in self.modules.values():
            definitions = {d["name"]: d for d in module.definitions}
            for suite in module.suites:
                entry = {"name": suite, "module": module.name, "defaults": self.defaults.get(suite, {})}
                if suite in definitions:
                    entry["description"] = definitions[suite].get("description", "")
                    entry["parameters"] = definitions[suite].get("parameters", {})
                out.append(entry)
        return sorted(out, key=lambda e: e["name"])

    async def run(self, suite: str, **params) -> Dict[str, Any]:
        func = self.find(suite)
        if func is None:
            raise ValueError(f"检验套件不存在: {suite}（可用: {', '.join(self.names())}）")
        merged = {**self.defaults.get(suite, {}), **{k: v for k, v in params.items() if v is not None}}
        logger.info(f"运行检验套件 {suite}: {merged}")
        if asyncio.iscoroutinefunction(func):
            return await func(**merged)
        return func(**merged)

    def run_sync(self, suite: str, **params) -> Dict[str, Any]:
        return asyncio.run(self.run(suite, **params))


def suite_result(report) -> Dict[str, Any]:
    """把报告包装成套件的统一返回格式"""
    return {"success": True, "passed": report.passed, "report": report.to_dict()}


def suite_error(error: Exception) -> Dict[str, Any]:
    exit_code = error.exit_code if isinstance(error, SpectralError) else 2
    logger.error(f"检验套件执行失败: {error}")
    return {"success": False, "passed": False, "error": str(error), "exit_code": exit_code}


suite_manager = SuiteManager()
