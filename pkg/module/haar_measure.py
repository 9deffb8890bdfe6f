"""
Haar 测度在谱形式坐标下的径向部分：闭式密度、采样与统计检验

- n = 3：(s12, s13, s23) 在半正定体上均匀分布；
- n = 4：六个非对角元的密度 ∝ det(Δ)^{-1/2}；
- n ≥ 4：自由坐标 {s12, s13, s23} ∪ {s1j, s2j, s3j} 的密度为各 det(Δ_j)^{-1/2} 之积，
  Δ_j 为行列 {1,2,3,j} 上的 4×4 子矩阵；
- s_4j (j ≥ 5) 在小行列式二次方程的两个根之间等概率选取，且彼此独立。

采样一律通过 Haar 元组经 ζ 前推，密度只用于检验。归一化常数用 Monte Carlo 估计并缓存。
"""
import csv
import math
import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from module.coset_space import CosetTuple, SpectralForm, quadratic_roots_batch, rank_threshold
from module.errors import InsufficientSamples, NotInDomain
from module.montecarlo import DEFAULT_CHUNK, chunks, derive_rng, run_workers, sum_arrays
from module.reports import GofReport
from module.su2_core import eigen_angle_batch, haar_batch

logger = logging.getLogger(__name__)

MIN_SAMPLES = 10_000
MIN_EXPECTED = 20
BOUNDARY_TOL = 1e-14
PSD_TOL = 1e-12
ROOT_SHELL = 1e-6
SIGMA_LIMIT = 3.0

Sampler = Callable[[int, np.random.Generator], np.ndarray]


@dataclass(frozen=True)
class DensityValue:
    value: float
    log_value: float

    @classmethod
    def of(cls, value: float) -> "DensityValue":
        if value == 0.0:
            return cls.zero()
        return cls(float(value), math.log(value))

    @classmethod
    def from_log(cls, log_value: float) -> "DensityValue":
        return cls(math.exp(log_value), float(log_value))

    @classmethod
    def zero(cls) -> "DensityValue":
        return cls(0.0, -math.inf)

    @classmethod
    def infinite(cls) -> "DensityValue":
        return cls(math.inf, math.inf)

    @property
    def is_infinite(self) -> bool:
        return math.isinf(self.value)

    def to_dict(self) -> Dict:
        return {"value": self.value, "log_value": self.log_value}


# ---------- 采样 ----------

def sample_tuple(n: int, rng: np.random.Generator) -> CosetTuple:
    if n < 2:
        raise ValueError(f"n 必须 ≥ 2，得到 {n}")
    return CosetTuple.from_array(haar_batch(rng, (n,)))


def sample_forms(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """count 个 Haar 元组的谱形式矩阵，形状 (count, n, n)"""
    v = haar_batch(rng, (count, n))
    return v @ np.swapaxes(v, -1, -2)


def haar_n3_sampler(count: int, rng: np.random.Generator) -> np.ndarray:
    s = sample_forms(3, count, rng)
    return np.stack([s[:, 0, 1], s[:, 0, 2], s[:, 1, 2]], axis=-1)


def det3_unit(a, b, c):
    return 1.0 + 2.0 * a * b * c - a * a - b * b - c * c


def uniform_n3_sampler(count: int, rng: np.random.Generator) -> np.ndarray:
    """半正定体上的均匀分布：立方体 [-1,1]³ 上拒绝采样"""
    return weighted_n3_sampler(0.0)(count, rng)


def weighted_n3_sampler(power: float) -> Sampler:
    """密度 ∝ det^power 的采样器（power > 0 时作为反例）"""

    def sampler(count: int, rng: np.random.Generator) -> np.ndarray:
        out, have = [], 0
        while have < count:
            batch = rng.uniform(-1.0, 1.0, size=(max(2 * (count - have), 1024), 3))
            det = det3_unit(batch[:, 0], batch[:, 1], batch[:, 2])
            keep = det >= 0.0
            if power:
                keep &= rng.uniform(size=len(batch)) < np.clip(det, 0.0, 1.0) ** power
            batch = batch[keep]
            out.append(batch)
            have += len(batch)
        return np.concatenate(out)[:count]

    return sampler


# ---------- 闭式密度 ----------

def density_n3(s12: float, s13: float, s23: float) -> DensityValue:
    if max(abs(s12), abs(s13), abs(s23)) > 1.0 + PSD_TOL:
        return DensityValue.zero()
    return DensityValue.of(1.0) if det3_unit(s12, s13, s23) >= -PSD_TOL else DensityValue.zero()


def _log_det_factor(minor: np.ndarray, label: str) -> Optional[float]:
    """det^{-1/2} 的对数；边界上返回 None 表示 +∞"""
    if np.linalg.eigvalsh(minor)[0] < -rank_threshold(minor.shape[0]):
        raise NotInDomain(f"{label} 不是半正定矩阵")
    det = float(np.linalg.det(minor))
    if det <= BOUNDARY_TOL:
        return None
    return -0.5 * math.log(det)


def density_n4(f: SpectralForm) -> DensityValue:
    if f.n != 4:
        raise ValueError(f"density_n4 需要 n = 4，得到 {f.n}")
    log_value = _log_det_factor(f.matrix, "Δ")
    return DensityValue.infinite() if log_value is None else DensityValue.from_log(log_value)


def sequential_density(f: SpectralForm) -> DensityValue:
    if f.n < 4:
        raise ValueError(f"sequential_density 需要 n ≥ 4，得到 {f.n}")
    m = f.matrix
    if density_n3(m[0, 1], m[0, 2], m[1, 2]).value == 0.0:
        return DensityValue.zero()
    total, infinite = 0.0, False
    for j in range(3, f.n):
        idx = [0, 1, 2, j]
        log_value = _log_det_factor(m[np.ix_(idx, idx)], f"Δ_{j + 1}")
        if log_value is None:
            infinite = True
        else:
            total += log_value
    return DensityValue.infinite() if infinite else DensityValue.from_log(total)


def free_coordinates(matrices: np.ndarray) -> np.ndarray:
    """(…, n, n) → (…, 3 + 3(n−3))：s12, s13, s23 后接各 j ≥ 4 的 s1j, s2j, s3j"""
    n = matrices.shape[-1]
    cols = [matrices[..., 0, 1], matrices[..., 0, 2], matrices[..., 1, 2]]
    for j in range(3, n):
        cols += [matrices[..., 0, j], matrices[..., 1, j], matrices[..., 2, j]]
    return np.stack(cols, axis=-1)


def _minors_from_free(points: np.ndarray, n: int) -> np.ndarray:
    """自由坐标 → 各 Δ_j，形状 (…, n−3, 4, 4)"""
    lead = points.shape[:-1]
    minors = np.broadcast_to(np.eye(4), lead + (n - 3, 4, 4)).copy()
    for pos, (i, j) in enumerate([(0, 1), (0, 2), (1, 2)]):
        minors[..., i, j] = minors[..., j, i] = points[..., None, pos]
    for k in range(n - 3):
        for r in range(3):
            minors[..., k, r, 3] = minors[..., k, 3, r] = points[..., 3 + 3 * k + r]
    return minors


def _inverse_density_batch(minors: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """返回 (是否在定义域内, 1/sequential_density)"""
    eig = np.linalg.eigvalsh(minors)
    inside = np.all(eig[..., 0] >= 0.0, axis=-1)
    det = np.clip(np.linalg.det(minors), 0.0, None)
    return inside, np.prod(np.sqrt(det), axis=-1)


@lru_cache(maxsize=32)
def normalizer(n: int, samples: int = 2_000_000, seed: int = 0) -> float:
    """∫ sequential_density 在自由坐标定义域上的积分（n = 3 时为半正定体体积）

    Z = vol(D) / E_Haar[1/density]，vol(D) 在立方体上均匀采样估计。
    """
    if n < 3:
        raise ValueError(f"n 必须 ≥ 3，得到 {n}")
    rng = derive_rng(seed, 0)
    dim = 3 + 3 * (n - 3)
    inside_count, inverse_sum = 0, 0.0
    for size in chunks(samples):
        cube = rng.uniform(-1.0, 1.0, size=(size, dim))
        if n == 3:
            inside_count += int(np.sum(det3_unit(cube[:, 0], cube[:, 1], cube[:, 2]) >= 0.0))
        else:
            inside, _ = _inverse_density_batch(_minors_from_free(cube, n))
            inside_count += int(np.sum(inside))
        if n > 3:
            forms = sample_forms(n, size, rng)
            _, inv = _inverse_density_batch(_minors_from_free(free_coordinates(forms), n))
            inverse_sum += float(np.sum(inv))
    volume = 2.0 ** dim * inside_count / samples
    z = volume if n == 3 else volume / (inverse_sum / samples)
    logger.info(f"归一化常数 n={n}: {z:.6g}（{samples} 个样本）")
    return z


# ---------- 检验 ----------

def _check_count(sample_count: int, minimum: int = MIN_SAMPLES) -> None:
    if sample_count < minimum:
        raise InsufficientSamples(f"样本数 {sample_count} < {minimum}")


def merge_bins(observed: np.ndarray, reference: np.ndarray, ratio: float) -> Tuple[np.ndarray, np.ndarray, List[List[int]]]:
    """按顺序合并期望数 < MIN_EXPECTED 的格子；ratio = n_obs / (n_obs + n_ref)"""
    groups, current, acc = [], [], 0.0
    for idx in np.flatnonzero(observed + reference):
        current.append(int(idx))
        acc += (observed[idx] + reference[idx]) * ratio
        if acc >= MIN_EXPECTED:
            groups.append(current)
            current, acc = [], 0.0
    if current:
        if groups:
            groups[-1].extend(current)
        else:
            groups.append(current)
    obs = np.array([observed[g].sum() for g in groups], dtype=float)
    ref = np.array([reference[g].sum() for g in groups], dtype=float)
    return obs, ref, groups


def two_sample_chi2(observed: np.ndarray, reference: np.ndarray) -> Tuple[float, int]:
    n1, n2 = observed.sum(), reference.sum()
    k1, k2 = math.sqrt(n2 / n1), math.sqrt(n1 / n2)
    stat = float(np.sum((k1 * observed - k2 * reference) ** 2 / (observed + reference)))
    return stat, len(observed) - 1


def _histogram_worker(sampler: Sampler, edges: List[np.ndarray], chunk_size: int):
    def worker(count: int, rng: np.random.Generator) -> np.ndarray:
        hist = np.zeros([len(e) - 1 for e in edges])
        for size in chunks(count, chunk_size):
            hist += np.histogramdd(sampler(size, rng), bins=edges)[0]
        return hist

    return worker


def verify_uniform_n3(
    sample_count: int,
    bins: int = 10,
    rng: Optional[np.random.Generator] = None,
    *,
    seed: int = 0,
    threads: int = 1,
    sampler: Optional[Sampler] = None,
    reference_count: Optional[int] = None,
    chunk_size: int = DEFAULT_CHUNK,
) -> GofReport:
    """(s12, s13, s23) 的直方图与半正定体上均匀参考样本做两样本 χ² 检验

    bins 为每个坐标轴上的格数；rng 给出时覆盖 seed（只用于参考样本的派生种子）。
    """
    _check_count(sample_count)
    sampler = sampler or haar_n3_sampler
    reference_count = reference_count or sample_count
    if rng is not None:
        seed = int(rng.integers(0, 2 ** 62))
    edges = [np.linspace(-1.0, 1.0, bins + 1)] * 3
    observed = sum_arrays(run_workers(_histogram_worker(sampler, edges, chunk_size), sample_count, seed, threads)).ravel()
    reference = _histogram_worker(uniform_n3_sampler, edges, chunk_size)(reference_count, derive_rng(seed, 1_000_003)).ravel()
    ratio = sample_count / (sample_count + reference_count)
    obs, ref, groups = merge_bins(observed, reference, ratio)
    stat, df = two_sample_chi2(obs, ref)
    sigma = (stat - df) / math.sqrt(2.0 * df)
    histogram = [
        {"bin_id": i, "expected": float((o + r) * ratio), "observed": int(o)}
        for i, (o, r) in enumerate(zip(obs, ref))
    ]
    logger.info(f"n=3 均匀性: χ²={stat:.1f}, df={df}, σ={sigma:.2f}")
    return GofReport(
        statistic="chi2", value=stat, sample_count=sample_count,
        bins={"per_axis": bins, "raw": bins ** 3, "merged": len(groups), "df": df},
        sigma=sigma, threshold=SIGMA_LIMIT, passed=abs(sigma) <= SIGMA_LIMIT,
        details={"reference_count": reference_count, "histogram": histogram},
    )


def write_histogram_csv(report: GofReport, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=["bin_id", "expected", "observed"])
        writer.writeheader()
        writer.writerows(report.details.get("histogram", []))
    return path


N4_AXES = ("s12", "s13", "s14", "s23", "s24", "s34")
N4_INDEX = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]


@dataclass(frozen=True)
class BoxIndicator:
    """六维盒子的示性函数，坐标顺序 N4_AXES"""
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __call__(self, points: np.ndarray) -> np.ndarray:
        return np.all((points >= self.lower) & (points <= self.upper), axis=-1).astype(float)

    @property
    def support(self) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
        return self.lower, self.upper

    def to_dict(self) -> Dict:
        return {"kind": "box", "lower": list(self.lower), "upper": list(self.upper)}


@dataclass(frozen=True)
class Bump:
    """盒内 ∏cos²(π·(x−c)/w)，盒外为 0：连续且支撑在内部"""
    lower: Tuple[float, ...]
    upper: Tuple[float, ...]

    def __call__(self, points: np.ndarray) -> np.ndarray:
        lo, hi = np.asarray(self.lower), np.asarray(self.upper)
        centre, width = (lo + hi) / 2.0, hi - lo
        inside = np.all((points >= lo) & (points <= hi), axis=-1)
        value = np.prod(np.cos(np.pi * (points - centre) / width) ** 2, axis=-1)
        return np.where(inside, value, 0.0)

    @property
    def support(self) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
        return self.lower, self.upper

    def to_dict(self) -> Dict:
        return {"kind": "bump", "lower": list(self.lower), "upper": list(self.upper)}


def observable_from_dict(data: Dict):
    kind = data.get("kind", "box")
    cls = {"box": BoxIndicator, "bump": Bump}.get(kind)
    if cls is None:
        raise ValueError(f"未知的检验函数类型: {kind}")
    return cls(tuple(float(x) for x in data["lower"]), tuple(float(x) for x in data["upper"]))


DEFAULT_N4_OBSERVABLES = (
    BoxIndicator((-0.3,) * 6, (0.3,) * 6),
    BoxIndicator((0.0, -0.3, -0.3, -0.3, -0.3, -0.3), (0.3,) * 6),
    BoxIndicator((-0.3,) * 6, (0.3, 0.3, 0.3, 0.3, 0.3, 0.0)),
)

# 每次抽取 DEFAULT_POOL 个 Haar 元素，其全部 4 元子组各给出一个 Π(4) 样本
DEFAULT_POOL = 6


def subset_pairs(pool: int) -> Tuple[np.ndarray, np.ndarray]:
    """pool 元组的全部 4 元子组在 (pool, pool) 谱形式中的 N4_AXES 下标，形状 (C(pool,4), 6)"""
    rows, cols = [], []
    for quad in combinations(range(pool), 4):
        rows.append([quad[i] for i, _ in N4_INDEX])
        cols.append([quad[j] for _, j in N4_INDEX])
    return np.array(rows), np.array(cols)


def _points_to_forms(points: np.ndarray) -> np.ndarray:
    forms = np.broadcast_to(np.eye(4), points.shape[:-1] + (4, 4)).copy()
    for pos, (i, j) in enumerate(N4_INDEX):
        forms[..., i, j] = forms[..., j, i] = points[..., pos]
    return forms


def quadrature_n4(observable, points_per_axis: int = 12) -> float:
    """张量中点公式计算 ∫ f·det^{-1/2}；支撑盒必须整体位于半正定体内部"""
    lower, upper = (np.asarray(x, dtype=float) for x in observable.support)
    width = (upper - lower) / points_per_axis
    axes = [lower[k] + width[k] * (np.arange(points_per_axis) + 0.5) for k in range(6)]
    cell = float(np.prod(width))
    total = 0.0
    for first in axes[0]:
        grid = np.stack(np.meshgrid(*([np.array([first])] + axes[1:]), indexing="ij"), axis=-1).reshape(-1, 6)
        det = np.linalg.det(_points_to_forms(grid))
        if np.any(det <= 0.0):
            raise NotInDomain("检验函数的支撑越出了半正定体内部")
        total += float(np.sum(observable(grid) / np.sqrt(det)))
    return total * cell


def verify_weighted_n4(
    sample_count: int,
    observables: Sequence = DEFAULT_N4_OBSERVABLES,
    points_per_axis: int = 12,
    rng: Optional[np.random.Generator] = None,
    *,
    seed: int = 0,
    threads: int = 1,
    tolerance: float = 0.02,
    normalizer_samples: int = 4_000_000,
    pool: int = DEFAULT_POOL,
    chunk_size: int = DEFAULT_CHUNK,
) -> GofReport:
    """Haar 下的 Monte Carlo 期望 E[f(ζ)] 与 ∫ f·det^{-1/2} / Z 比较，报告最大相对误差

    每次抽取 pool 个 Haar 元素，f 在其全部 C(pool, 4) 个 4 元子组上取平均作为一次观测
    （pool = 4 即逐个元组）；标准误按各次观测计算。任一检验函数的相对标准误超过
    tolerance / 3 时样本量不足以判定，抛出 InsufficientSamples。
    """
    _check_count(sample_count)
    if pool < 4:
        raise ValueError(f"pool 必须 ≥ 4，得到 {pool}")
    if rng is not None:
        seed = int(rng.integers(0, 2 ** 62))
    observables = list(observables)
    rows, cols = subset_pairs(pool)
    step = max(1_000, chunk_size // len(rows))

    def worker(count: int, wrng: np.random.Generator) -> np.ndarray:
        acc = np.zeros((len(observables), 2))
        for size in chunks(count, step):
            forms = sample_forms(pool, size, wrng)
            points = forms[:, rows, cols]
            for k, f in enumerate(observables):
                values = f(points).mean(axis=-1)
                acc[k] += (values.sum(), (values ** 2).sum())
        return acc

    sums = sum_arrays(run_workers(worker, sample_count, seed, threads))
    z = normalizer(4, normalizer_samples, seed)
    results, worst, unresolved = [], 0.0, []
    for k, f in enumerate(observables):
        mean = sums[k, 0] / sample_count
        stderr = math.sqrt(max(sums[k, 1] / sample_count - mean ** 2, 0.0) / sample_count)
        relative_stderr = stderr / mean if mean > 0.0 else math.inf
        predicted = quadrature_n4(f, points_per_axis) / z
        rel = abs(mean - predicted) / predicted
        worst = max(worst, rel)
        if relative_stderr > tolerance / 3.0:
            unresolved.append(k)
        results.append({"observable": f.to_dict(), "monte_carlo": mean, "stderr": stderr,
                        "relative_stderr": relative_stderr, "predicted": predicted, "relative_error": rel})
        logger.info(f"n=4 加权检验 #{k}: MC={mean:.5g}±{relative_stderr:.2%} 预测={predicted:.5g} 相对误差={rel:.3%}")
    if unresolved:
        raise InsufficientSamples(
            f"检验函数 {unresolved} 的相对标准误超过 {tolerance / 3.0:.2%}，{sample_count} 次抽取不足以判定 {tolerance:.0%} 容差"
        )
    return GofReport(
        statistic="relative_error", value=worst, sample_count=sample_count,
        bins={"quadrature_points_per_axis": points_per_axis, "pool": pool, "subsets_per_draw": len(rows)},
        threshold=tolerance, passed=worst <= tolerance, details={"normalizer": z, "observables": results},
    )


def branch_labels_batch(matrices: np.ndarray, j: int) -> Tuple[np.ndarray, np.ndarray]:
    """s_4j 是小行列式 {1,2,3,4,j} 二次方程的较大根（1）还是较小根（0）；第二项标记远离重根的样本"""
    idx = [0, 1, 2, 3, j - 1]
    minors = matrices[..., idx, :][..., :, idx]
    lo, hi = quadratic_roots_batch(minors)
    actual = matrices[..., 3, j - 1]
    labels = (np.abs(actual - hi) < np.abs(actual - lo)).astype(int)
    return labels, (hi - lo) > ROOT_SHELL


def branch_label(f: SpectralForm, j: int) -> int:
    labels, _ = branch_labels_batch(f.matrix[None], j)
    return int(labels[0])


def verify_branch_equiprobability(
    sample_count: int,
    rng: Optional[np.random.Generator] = None,
    *,
    n: int = 6,
    seed: int = 0,
    threads: int = 1,
    chunk_size: int = DEFAULT_CHUNK,
) -> GofReport:
    """s_45、s_46 的根标签：边际 1/2（二项 3σ）与 2×2 独立性 χ²（3σ）；n = 5 只检验边际"""
    _check_count(sample_count)
    if n not in (5, 6):
        raise ValueError(f"分支检验只支持 n = 5 或 6，得到 {n}")
    if rng is not None:
        seed = int(rng.integers(0, 2 ** 62))

    def worker(count: int, wrng: np.random.Generator) -> np.ndarray:
        table = np.zeros((2, 2) if n == 6 else (2,))
        for size in chunks(count, chunk_size):
            forms = sample_forms(n, size, wrng)
            l5, ok5 = branch_labels_batch(forms, 5)
            if n == 5:
                table += np.bincount(l5[ok5], minlength=2)
            else:
                l6, ok6 = branch_labels_batch(forms, 6)
                ok = ok5 & ok6
                np.add.at(table, (l5[ok], l6[ok]), 1)
        return table

    table = sum_arrays(run_workers(worker, sample_count, seed, threads))
    used = int(table.sum())
    marginals = [table] if n == 5 else [table.sum(axis=1), table.sum(axis=0)]
    z_scores = [float((m[1] - used / 2.0) / math.sqrt(used / 4.0)) for m in marginals]
    details = {"table": table.tolist(), "used": used, "excluded": sample_count - used, "marginal_z": z_scores}
    worst = max(abs(z) for z in z_scores)
    value = worst
    if n == 6:
        stat, p_value, dof, _ = stats.chi2_contingency(table, correction=False)
        indep_sigma = (stat - dof) / math.sqrt(2.0 * dof)
        details.update({"independence_chi2": float(stat), "independence_p": float(p_value),
                        "independence_sigma": float(indep_sigma)})
        worst = max(worst, float(indep_sigma))
        value = float(stat)
    logger.info(f"分支等概率检验 n={n}: {details}")
    return GofReport(
        statistic="branch_labels", value=value, sample_count=sample_count,
        bins={"labels": 2, "variables": n - 4}, sigma=worst, threshold=SIGMA_LIMIT,
        passed=worst <= SIGMA_LIMIT, details=details,
    )


def eigen_angle_cdf(phi):
    """密度 (2/π)sin²φ 在 [0, π] 上的分布函数"""
    phi = np.asarray(phi, dtype=float)
    return (phi - np.sin(phi) * np.cos(phi)) / np.pi


def verify_haar_su2(
    sample_count: int,
    rng: Optional[np.random.Generator] = None,
    *,
    seed: int = 0,
    alpha: float = 1e-3,
    bins: int = 10,
) -> GofReport:
    """单个 Haar 元素：特征角 KS 检验、(|a|², arg a) 的 χ²、arg b 的 KS 检验"""
    _check_count(sample_count)
    rng = rng or derive_rng(seed, 0)
    g = haar_batch(rng, (sample_count,))
    phi = eigen_angle_batch(g)
    ks = stats.kstest(phi, eigen_angle_cdf)
    mod_a = g[:, 0] ** 2 + g[:, 1] ** 2
    arg_a = (np.arctan2(g[:, 1], g[:, 0]) + np.pi) / (2.0 * np.pi)
    arg_b = (np.arctan2(g[:, 3], g[:, 2]) + np.pi) / (2.0 * np.pi)
    hist, _, _ = np.histogram2d(mod_a, arg_a, bins=bins, range=[[0.0, 1.0], [0.0, 1.0]])
    disc = stats.chisquare(hist.ravel())
    ks_b = stats.kstest(arg_b, "uniform")
    p_min = float(min(ks.pvalue, disc.pvalue, ks_b.pvalue))
    return GofReport(
        statistic="ks_eigen_angle", value=float(ks.statistic), sample_count=sample_count,
        bins={"disc_grid": [bins, bins]}, p_value=p_min, threshold=alpha, passed=p_min >= alpha,
        details={
            "eigen_angle": {"D": float(ks.statistic), "p": float(ks.pvalue)},
            "a_disc": {"chi2": float(disc.statistic), "p": float(disc.pvalue)},
            "arg_b": {"D": float(ks_b.statistic), "p": float(ks_b.pvalue)},
        },
    )
