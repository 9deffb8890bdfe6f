"""Haar 测度检验套件：haar-n3、haar-n4、haar-branch、haar-su2"""
import asyncio
import logging
from typing import Any, Dict, List, Optional

from module.haar_measure import (
    DEFAULT_N4_OBSERVABLES,
    DEFAULT_POOL,
    observable_from_dict,
    verify_branch_equiprobability,
    verify_haar_su2,
    verify_uniform_n3,
    verify_weighted_n4,
    weighted_n3_sampler,
    write_histogram_csv,
)
from module.montecarlo import DEFAULT_CHUNK, derive_rng
from module.suite_manager import suite_error, suite_result

logger = logging.getLogger(__name__)


def _uniform_n3_sync(samples: int, seed: int, threads: int, chunk_size: int, bins: int, power: float,
                     csv_path: Optional[str]) -> Dict[str, Any]:
    try:
        sampler = weighted_n3_sampler(power) if power else None
        report = verify_uniform_n3(samples, bins, seed=seed, threads=threads, sampler=sampler, chunk_size=chunk_size)
        if csv_path:
            report.details["csv"] = str(write_histogram_csv(report, csv_path))
        report.details.pop("histogram", None)
        return suite_result(report)
    except Exception as e:
        return suite_error(e)


def _weighted_n4_sync(samples: int, seed: int, threads: int, chunk_size: int, points: int, tol: float,
                      observables: Optional[List[Dict[str, Any]]], normalizer_samples: int, pool: int) -> Dict[str, Any]:
    try:
        funcs = [observable_from_dict(o) for o in observables] if observables else DEFAULT_N4_OBSERVABLES
        return suite_result(verify_weighted_n4(
            samples, funcs, points, seed=seed, threads=threads, tolerance=tol,
            normalizer_samples=normalizer_samples, pool=pool, chunk_size=chunk_size,
        ))
    except Exception as e:
        return suite_error(e)


def _branch_sync(samples: int, seed: int, threads: int, chunk_size: int, n: int) -> Dict[str, Any]:
    try:
        return suite_result(verify_branch_equiprobability(samples, n=n, seed=seed, threads=threads, chunk_size=chunk_size))
    except Exception as e:
        return suite_error(e)


def _su2_sync(samples: int, seed: int, alpha: float) -> Dict[str, Any]:
    try:
        return suite_result(verify_haar_su2(samples, derive_rng(seed, 0), alpha=alpha))
    except Exception as e:
        return suite_error(e)


async def haar_n3(samples: int = 1_000_000, seed: int = 0, threads: int = 1, chunk_size: int = DEFAULT_CHUNK,
                  bins: int = 10, power: float = 0.0, csv_path: Optional[str] = None, **_) -> Dict[str, Any]:
    return await asyncio.to_thread(_uniform_n3_sync, int(samples), int(seed), int(threads), int(chunk_size),
                                   int(bins), float(power), csv_path)


async def haar_n4(samples: int = 10_000_000, seed: int = 0, threads: int = 1, chunk_size: int = DEFAULT_CHUNK,
                  points: int = 12, tol: float = 0.02, observables: Optional[List[Dict[str, Any]]] = None,
                  normalizer_samples: int = 4_000_000, pool: int = DEFAULT_POOL, **_) -> Dict[str, Any]:
    return await asyncio.to_thread(_weighted_n4_sync, int(samples), int(seed), int(threads), int(chunk_size),
                                   int(points), float(tol), observables, int(normalizer_samples), int(pool))


async def haar_branch(samples: int = 100_000, seed: int = 0, threads: int = 1, chunk_size: int = DEFAULT_CHUNK,
                      n: int = 6, **_) -> Dict[str, Any]:
    return await asyncio.to_thread(_branch_sync, int(samples), int(seed), int(threads), int(chunk_size), int(n))


async def haar_su2(samples: int = 100_000, seed: int = 0, alpha: float = 1e-3, **_) -> Dict[str, Any]:
    return await asyncio.to_thread(_su2_sync, int(samples), int(seed), float(alpha))


def register_suites() -> Dict[str, Any]:
    return {
        "haar-n3": haar_n3,
        "haar-n4": haar_n4,
        "haar-branch": haar_branch,
        "haar-su2": haar_su2,
    }


def get_suite_definitions() -> List[Dict[str, Any]]:
    common = {"samples": {"type": "integer"}, "seed": {"type": "integer"}, "threads": {"type": "integer"},
              "chunk_size": {"type": "integer", "description": "每块样本数（sampling.chunk_size）"}}
    return [
        {"name": "haar-n3", "description": "(s12, s13, s23) 在半正定体上均匀：两样本 χ²，3σ；power > 0 为 det^power 反例",
         "parameters": {**common, "bins": {"type": "integer", "description": "每轴格数"}, "power": {"type": "number"},
                        "csv_path": {"type": "string", "description": "直方图 CSV 输出路径"}}},
        {"name": "haar-n4", "description": "n = 4 的 det^{-1/2} 密度：Monte Carlo 与中点求积的相对误差",
         "parameters": {**common, "points": {"type": "integer"}, "tol": {"type": "number"},
                        "observables": {"type": "array", "description": "[{kind: box|bump, lower: [6], upper: [6]}]"},
                        "normalizer_samples": {"type": "integer"},
                        "pool": {"type": "integer", "description": "每次抽取的元素个数，取全部 4 元子组平均"}}},
        {"name": "haar-branch", "description": "s_45、s_46 的根标签等概率且独立",
         "parameters": {**common, "n": {"type": "integer", "enum": [5, 6]}}},
        {"name": "haar-su2", "description": "单个 Haar 元素的特征角、a 与 arg b 的分布（单线程）",
         "parameters": {"samples": {"type": "integer"}, "seed": {"type": "integer"}, "alpha": {"type": "number"}}},
    ]


SUITES = register_suites()
SUITE_DEFINITIONS = get_suite_definitions()
