"""群作用检验套件：actions-oracle、braid-relations、kernel、artin"""
import asyncio
import logging
from typing import Any, Dict, List, Optional

from module.group_actions import (
    artin_check,
    random_braid_word,
    verify_actions_oracle,
    verify_braid_relations,
    verify_kernel_element,
)
from module.montecarlo import derive_rng
from module.reports import CheckReport
from module.suite_manager import suite_error, suite_result

logger = logging.getLogger(__name__)


def _oracle_sync(n: int, trials: int, seed: int, tol: float) -> Dict[str, Any]:
    try:
        return suite_result(verify_actions_oracle(n, trials, derive_rng(seed, 0), tol))
    except Exception as e:
        return suite_error(e)


def _relations_sync(n: int, trials: int, seed: int) -> Dict[str, Any]:
    try:
        return suite_result(verify_braid_relations(n, trials, derive_rng(seed, 0)))
    except Exception as e:
        return suite_error(e)


def _kernel_sync(ns: List[int], trials: int, seed: int) -> Dict[str, Any]:
    try:
        merged = CheckReport("kernel", trials * len(ns), details={"n": ns})
        for index, n in enumerate(ns):
            report = verify_kernel_element(n, trials, derive_rng(seed, index))
            merged.failures.extend({**f, "n": n} for f in report.failures)
            merged.details[f"word_n{n}"] = report.details["word"]
        return suite_result(merged)
    except Exception as e:
        return suite_error(e)


def _artin_sync(n: int, words: int, max_length: int, trials: int, seed: int, word: Optional[str]) -> Dict[str, Any]:
    try:
        if word is not None:
            return suite_result(artin_check(word, n, trials, derive_rng(seed, 0)))
        rng = derive_rng(seed, 0)
        merged = CheckReport("artin", words * trials, details={"n": n, "words": words})
        for index in range(words):
            w = random_braid_word(n, int(rng.integers(1, max_length + 1)), rng)
            report = artin_check(w, n, trials, derive_rng(seed, index + 1))
            merged.failures.extend({**f, "word": str(w)} for f in report.failures)
        return suite_result(merged)
    except Exception as e:
        return suite_error(e)


async def actions_oracle(n: int = 5, trials: int = 10_000, seed: int = 0, tol: float = 1e-8, **_) -> Dict[str, Any]:
    return await asyncio.to_thread(_oracle_sync, int(n), int(trials), int(seed), float(tol))


async def braid_relations(n: int = 5, trials: int = 1000, seed: int = 0, **_) -> Dict[str, Any]:
    return await asyncio.to_thread(_relations_sync, int(n), int(trials), int(seed))


async def kernel(n: Any = (3, 4), trials: int = 100, seed: int = 0, **_) -> Dict[str, Any]:
    ns = [int(x) for x in (n if isinstance(n, (list, tuple)) else [n])]
    return await asyncio.to_thread(_kernel_sync, ns, int(trials), int(seed))


async def artin(n: int = 5, words: int = 50, max_length: int = 10, trials: int = 5, seed: int = 0,
                word: Optional[str] = None, **_) -> Dict[str, Any]:
    return await asyncio.to_thread(_artin_sync, int(n), int(words), int(max_length), int(trials), int(seed), word)


def register_suites() -> Dict[str, Any]:
    return {
        "actions-oracle": actions_oracle,
        "braid-relations": braid_relations,
        "kernel": kernel,
        "artin": artin,
    }


def get_suite_definitions() -> List[Dict[str, Any]]:
    return [
        {"name": "actions-oracle", "description": "闭式作用与 ζ∘act_tuple 逐项一致（1e-8），并统计 θ 规则分支一致率（单线程）",
         "parameters": {"n": {"type": "integer"}, "trials": {"type": "integer"}, "seed": {"type": "integer"}, "tol": {"type": "number"}}},
        {"name": "braid-relations", "description": "σ_iσ_{i+1}σ_i = σ_{i+1}σ_iσ_{i+1} 与 |i−j| ≥ 2 时的交换关系（单线程）",
         "parameters": {"n": {"type": "integer"}, "trials": {"type": "integer"}, "seed": {"type": "integer"}}},
        {"name": "kernel", "description": "((σ1…σ_{k−1})…σ1)² 在 Π(n) 上平凡作用（单线程）",
         "parameters": {"n": {"type": "array", "items": {"type": "integer"}}, "trials": {"type": "integer"}, "seed": {"type": "integer"}}},
        {"name": "artin", "description": "辫子词的共轭-置换条件与乘积不变（单线程）",
         "parameters": {"n": {"type": "integer"}, "words": {"type": "integer"}, "max_length": {"type": "integer"},
                        "trials": {"type": "integer"}, "seed": {"type": "integer"}, "word": {"type": "string"}}},
    ]


SUITES = register_suites()
SUITE_DEFINITIONS = get_suite_definitions()
