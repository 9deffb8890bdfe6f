"""闭折线检验套件：polygon-pure"""
import asyncio
import logging
from typing import Any, Dict, List

from module.montecarlo import derive_rng
from module.polygon import verify_pure_braid
from module.suite_manager import suite_error, suite_result

logger = logging.getLogger(__name__)


def _pure_sync(trials: int, seed: int, sides: int, word_length: int) -> Dict[str, Any]:
    try:
        return suite_result(verify_pure_braid(trials, derive_rng(seed, 0), sides, word_length))
    except Exception as e:
        return suite_error(e)


async def polygon_pure(trials: int = 100, seed: int = 0, sides: int = 5, word_length: int = 6, **_) -> Dict[str, Any]:
    return await asyncio.to_thread(_pure_sync, int(trials), int(seed), int(sides), int(word_length))


def register_suites() -> Dict[str, Any]:
    return {"polygon-pure": polygon_pure}


def get_suite_definitions() -> List[Dict[str, Any]]:
    return [
        {"name": "polygon-pure", "description": "纯辫子保持每条边长（1e-10）与闭合（1e-9）（单线程）",
         "parameters": {"trials": {"type": "integer"}, "seed": {"type": "integer"}, "sides": {"type": "integer"},
                        "word_length": {"type": "integer"}}},
    ]


SUITES = register_suites()
SUITE_DEFINITIONS = get_suite_definitions()
