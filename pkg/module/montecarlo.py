"""
Monte Carlo 并行工具：按 (master_seed, worker_index) 派生随机数流，分块计数后求和合并

threads = 1 时只有 worker 0，同一 master_seed 下结果逐位可复现。
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar("T")

DEFAULT_CHUNK = 100_000


def derive_rng(master_seed: int, worker_index: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=int(master_seed), spawn_key=(int(worker_index),)))


def split_counts(total: int, workers: int) -> List[int]:
    if workers < 1:
        raise ValueError(f"workers 必须 ≥ 1，得到 {workers}")
    base, rest = divmod(int(total), workers)
    return [base + (1 if i < rest else 0) for i in range(workers)]


def chunks(total: int, chunk_size: int = DEFAULT_CHUNK):
    done = 0
    while done < total:
        size = min(chunk_size, total - done)
        yield size
        done += size


def run_workers(
    worker: Callable[[int, np.random.Generator], T],
    total: int,
    master_seed: int,
    threads: int = 1,
) -> List[T]:
    """把 total 个样本分给 threads 个 worker，每个 worker 拿到自己的 Generator"""
    counts = split_counts(total, max(1, int(threads)))
    rngs = [derive_rng(master_seed, i) for i in range(len(counts))]
    if len(counts) == 1:
        return [worker(counts[0], rngs[0])]
    logger.info(f"并行采样: {total} 个样本分给 {len(counts)} 个线程")
    with ThreadPoolExecutor(max_workers=len(counts)) as pool:
        futures = [pool.submit(worker, c, r) for c, r in zip(counts, rngs)]
        return [f.result() for f in futures]


def sum_arrays(parts: List[np.ndarray]) -> np.ndarray:
    total: Optional[np.ndarray] = None
    for part in parts:
        total = np.array(part, copy=True) if total is None else total + part
    return total
