import os
import re
import yaml
import logging
from pathlib import Path
from typing import Any, Dict, Optional
from threading import Lock

logger = logging.getLogger(__name__)

DEFAULT_NUMERICS = {
    "unit_tol": 1e-12,
    "rank_tol": 1e-9,
    "equiv_tol": 1e-8,
    "borderline_tol": 1e-6,
    "radicand_tol": 1e-9,
    "discriminant_tol": 1e-9,
}

DEFAULT_SAMPLING = {"seed": None, "threads": 1, "chunk_size": 100_000}


def expand_env_vars(obj: Any) -> Any:
    if isinstance(obj, str):
        pattern = r'\$\{([^}]+)\}'

        def replace_env(match):
            env_var = match.group(1)
            default = None
            if ':-' in env_var:
                env_var, default = env_var.split(':-', 1)
            return os.environ.get(env_var, default or match.group(0))
        return re.sub(pattern, replace_env, obj)
    elif isinstance(obj, dict):
        return {k: expand_env_vars(v) for k, v in obj.items()}
    elif isinstance(obj, list):
        return [expand_env_vars(item) for item in obj]
    return obj


def _number(value: Any) -> Any:
    """环境变量展开后得到的是字符串，这里转回数值；无法转换（如未设置的 ${VAR}）返回 None"""
    if value is None or isinstance(value, (int, float)):
        return value
    text = str(value).strip()
    if not text or text.startswith("${"):
        return None
    try:
        return int(text)
    except ValueError:
        try:
            return float(text)
        except ValueError:
            return None


class ConfigManager:
    _instance = None
    _lock = Lock()

    def __new__(cls, config_path: str = "config.yaml"):
        if cls._instance is None:
            with cls._lock:
                if cls._instance is None:
                    cls._instance = super().__new__(cls)
                    cls._instance._initialized = False
        return cls._instance

    def __init__(self, config_path: str = "config.yaml"):
        if getattr(self, '_initialized', False):
            return
        self.config_path = Path(config_path)
        self._config: Dict[str, Any] = {}
        self._callbacks = []
        self._initialized = True
        self.reload()

    @classmethod
    def reset(cls) -> None:
        with cls._lock:
            cls._instance = None

    def _load_verify_config(self) -> Dict[str, Any]:
        """从 suites.yaml（或 verify.config_file 指定路径）加载各套件默认参数，合并到 config['verify']"""
        verify_section = self._config.get("verify") or {}
        config_file = verify_section.get("config_file")
        if not config_file:
            return verify_section
        suites_path = self.config_path.parent / config_file
        if not suites_path.exists():
            logger.warning(f"套件配置文件不存在: {suites_path}，使用 config 内 verify 配置")
            return verify_section
        try:
            with open(suites_path, "r", encoding="utf-8") as f:
                loaded = expand_env_vars(yaml.safe_load(f) or {})
            suites = {**(loaded.get("suites") or {}), **(verify_section.get("suites") or {})}
            return {
                "default_suites": verify_section.get("default_suites") or loaded.get("default_suites", []),
                "suites_path": verify_section.get("suites_path", "suites"),
                "suites": suites,
                **{k: v for k, v in verify_section.items() if k not in ("suites", "config_file", "default_suites", "suites_path")},
            }
        except Exception as e:
            logger.error(f"加载套件配置失败 {suites_path}: {e}")
            return verify_section

    def reload(self) -> None:
        try:
            with open(self.config_path, 'r', encoding='utf-8') as f:
                raw_config = yaml.safe_load(f) or {}
            self._config = expand_env_vars(raw_config)
            if self._config.get("verify"):
                self._config["verify"] = self._load_verify_config()
            logger.info(f"配置已加载: {self.config_path}")
            for callback in self._callbacks:
                try:
                    callback(self._config)
                except Exception as e:
                    logger.error(f"配置回调执行失败: {e}")
        except Exception as e:
            logger.error(f"配置加载失败: {e}")
            raise

    def get_config(self) -> Dict[str, Any]:
        return self._config.copy()

    def get(self, key: str, default: Any = None) -> Any:
        keys = key.split('.')
        value = self._config
        for k in keys:
            if isinstance(value, dict):
                value = value.get(k)
            else:
                return default
            if value is None:
                return default
        return value

    def register_callback(self, callback) -> None:
        self._callbacks.append(callback)

    @property
    def numerics(self) -> Dict[str, float]:
        section = self._config.get('numerics') or {}
        merged = dict(DEFAULT_NUMERICS)
        for key, value in section.items():
            number = _number(value)
            if number is not None:
                merged[key] = float(number)
        return merged

    @property
    def sampling(self) -> Dict[str, Any]:
        section = self._config.get('sampling') or {}
        merged = dict(DEFAULT_SAMPLING)
        for key, value in section.items():
            merged[key] = _number(value)
        for key, default in DEFAULT_SAMPLING.items():
            if merged.get(key) is None:
                merged[key] = default
        return merged

    @property
    def verify(self) -> Dict[str, Any]:
        return self._config.get('verify', {})

    def suite_defaults(self, name: Optional[str] = None) -> Dict[str, Any]:
        suites = self.verify.get("suites") or {}
        return dict(suites.get(name) or {}) if name else dict(suites)


def apply_numerics(numerics: Dict[str, float]) -> None:
    """把 numerics 配置写入各模块的容差常量（运行时读取）"""
    from module import coset_space, group_actions, su2_core

    su2_core.UNIT_TOL = coset_space.UNIT_TOL = numerics["unit_tol"]
    coset_space.RANK_TOL = numerics["rank_tol"]
    coset_space.EQUIV_TOL = numerics["equiv_tol"]
    coset_space.BORDERLINE_TOL = numerics["borderline_tol"]
    coset_space.DISCRIMINANT_TOL = numerics["discriminant_tol"]
    group_actions.RADICAND_TOL = numerics["radicand_tol"]
    logger.debug(f"数值容差: {numerics}")
