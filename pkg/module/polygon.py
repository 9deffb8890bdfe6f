"""
S³ 上边长固定的闭折线 X(θ) 及纯辫子作用

折线 A₁A₂…A_mA₁ 与共轭元组 (r₁, …, r_m) 对应：A₁ = 1，A_{k+1} = A_k·r_k，
r₁·r₂·…·r_m = 1，第 k 条边长等于 r_k 的特征角 θ_k。
"""
import json
import math
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from module.coset_space import CosetTuple, equivalent
from module.errors import NotClosed, NotPure, Unsamplable
from module.group_actions import BraidSigma, GroupWord, act_tuple, underlying_permutation
from module.reports import CheckReport
from module.su2_core import (
    IDENTITY,
    UnitQuaternion,
    angular_distance,
    axis_angle_batch,
    compose,
    eigen_angle,
    inverse,
    random_axes,
    unstack,
)

logger = logging.getLogger(__name__)

CLOSURE_TOL = 1e-9
SIDE_TOL = 1e-9
DEFAULT_ATTEMPTS = 200


@dataclass(frozen=True)
class SphericalPolygon:
    vertices: Tuple[UnitQuaternion, ...]
    side_lengths: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "side_lengths", tuple(float(x) for x in self.side_lengths))
        m = len(self.vertices)
        if m < 2 or len(self.side_lengths) != m:
            raise ValueError(f"顶点数 {m} 与边数 {len(self.side_lengths)} 不符")
        if angular_distance(self.vertices[0], IDENTITY) > SIDE_TOL:
            raise ValueError("A₁ 必须是单位元")
        for k in range(m):
            d = angular_distance(self.vertices[k], self.vertices[(k + 1) % m])
            if abs(d - self.side_lengths[k]) > SIDE_TOL:
                raise ValueError(f"第 {k + 1} 条边长 {d!r} ≠ θ = {self.side_lengths[k]!r}")

    @property
    def size(self) -> int:
        return len(self.vertices)

    def to_dict(self) -> Dict:
        return {"theta": list(self.side_lengths), "vertices": [v.as_list() for v in self.vertices]}

    @classmethod
    def from_dict(cls, data: Dict) -> "SphericalPolygon":
        vertices = unstack(np.asarray(data["vertices"], dtype=float))
        return cls(tuple(vertices), tuple(data["theta"]))


def to_json(p: SphericalPolygon) -> str:
    return json.dumps(p.to_dict(), ensure_ascii=False)


def from_json(text: str) -> SphericalPolygon:
    return SphericalPolygon.from_dict(json.loads(text))


def _product(elements: Sequence[UnitQuaternion]) -> UnitQuaternion:
    out = IDENTITY
    for g in elements:
        out = compose(out, g)
    return out


def from_conjugacy_tuple(r: Sequence[UnitQuaternion]) -> SphericalPolygon:
    r = list(r)
    if len(r) < 2:
        raise ValueError(f"至少需要 2 个元素，得到 {len(r)}")
    closure = float(np.max(np.abs(_product(r).vector - IDENTITY.vector)))
    if closure > CLOSURE_TOL:
        raise NotClosed(f"r₁⋯r_m 偏离单位元 {closure:.3e}")
    vertices = [IDENTITY]
    for g in r[:-1]:
        vertices.append(compose(vertices[-1], g))
    sides = [eigen_angle(g) for g in r]
    return SphericalPolygon(tuple(vertices), tuple(sides))


def conjugacy_tuple(p: SphericalPolygon) -> List[UnitQuaternion]:
    """边的差 r_k = A_k⁻¹·A_{k+1}（A_{m+1} = A₁）"""
    v = p.vertices
    return [compose(inverse(v[k]), v[(k + 1) % len(v)]) for k in range(len(v))]


def _orthonormal_complement(basis: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """与 basis 各行正交的随机单位向量"""
    while True:
        w = rng.standard_normal(4)
        for e in basis:
            w = w - np.dot(w, e) * e
        norm = np.linalg.norm(w)
        if norm > 1e-8:
            return w / norm


def _close_last_two(prefix: UnitQuaternion, theta_a: float, theta_b: float, rng: np.random.Generator) -> Optional[Tuple[UnitQuaternion, UnitQuaternion]]:
    """已知 P = r₁⋯r_{m−2}，求 r_{m−1}、r_m 使 P·r_{m−1}·r_m = 1

    A_m = Y 需满足 d(P, Y) = θ_{m−1}、d(Y, 1) = θ_m；Y 在两个约束的交集上随机选取。
    无解（球面三角不等式不成立）时返回 None。
    """
    e0 = IDENTITY.vector
    pv = prefix.vector
    cos_alpha = float(np.clip(pv[0], -1.0, 1.0))
    ortho = pv - cos_alpha * e0
    sin_alpha = float(np.linalg.norm(ortho))
    if sin_alpha < 1e-9:
        return None
    e1 = ortho / sin_alpha
    y0 = math.cos(theta_b)
    y1 = (math.cos(theta_a) - y0 * cos_alpha) / sin_alpha
    rest = 1.0 - y0 * y0 - y1 * y1
    if rest < 0.0:
        return None
    w = _orthonormal_complement(np.stack([e0, e1]), rng)
    y = UnitQuaternion.from_vector(y0 * e0 + y1 * e1 + math.sqrt(rest) * w, renormalize=True)
    return compose(inverse(prefix), y), inverse(y)


def sample_closed(theta: Sequence[float], rng: np.random.Generator, max_attempts: int = DEFAULT_ATTEMPTS) -> SphericalPolygon:
    """前 m−2 个元素按给定特征角、随机轴抽取，最后两个解析求出使折线闭合"""
    theta = [float(x) for x in theta]
    m = len(theta)
    if m < 3:
        raise ValueError(f"至少需要 3 条边，得到 {m}")
    if any(not 0.0 < x < math.pi for x in theta):
        raise ValueError("每条边长需在 (0, π) 内")
    for attempt in range(1, max_attempts + 1):
        heads = unstack(axis_angle_batch(random_axes(rng, (m - 2,)), np.asarray(theta[:m - 2])))
        closed = _close_last_two(_product(heads), theta[m - 2], theta[m - 1], rng)
        if closed is None:
            continue
        r = heads + list(closed)
        try:
            polygon = from_conjugacy_tuple(r)
        except (NotClosed, ValueError) as e:
            logger.debug(f"第 {attempt} 次尝试闭合失败: {e}")
            continue
        logger.debug(f"第 {attempt} 次尝试得到闭折线")
        return polygon
    raise Unsamplable(f"{max_attempts} 次尝试均未闭合，X(θ) 可能为空: θ = {theta}")


def pure_braid_act(p: SphericalPolygon, w: Union[GroupWord, str]) -> SphericalPolygon:
    """纯辫子经共轭元组作用；边长逐条保持"""
    if isinstance(w, str):
        w = GroupWord.parse(w)
    if not w.is_braid:
        raise NotPure(f"{w} 含非辫子生成元")
    r = conjugacy_tuple(p)
    n = len(r) + 1
    xi = underlying_permutation(w, n)
    if xi != list(range(2, n + 1)):
        raise NotPure(f"{w} 的置换非平凡: {xi}")
    image = act_tuple(CosetTuple((IDENTITY,) + tuple(r)), w)
    return from_conjugacy_tuple(image.elements[1:])


def braid_act(p: SphericalPolygon, w: Union[GroupWord, str]) -> SphericalPolygon:
    """任意辫子：边长按词的置换重排"""
    if isinstance(w, str):
        w = GroupWord.parse(w)
    if not w.is_braid:
        raise NotPure(f"{w} 含非辫子生成元")
    r = conjugacy_tuple(p)
    image = act_tuple(CosetTuple((IDENTITY,) + tuple(r)), w)
    return from_conjugacy_tuple(image.elements[1:])


def polygons_equivalent(p: SphericalPolygon, q: SphericalPolygon) -> bool:
    """顶点元组 (1, A₂, …) 的 ζ 与叶标记相同即视为同一点"""
    if p.size != q.size:
        return False
    return equivalent(CosetTuple(p.vertices), CosetTuple(q.vertices))


def random_pure_word(n: int, length: int, rng: np.random.Generator) -> GroupWord:
    """随机纯辫子：若干个 (w σ_k² w⁻¹) 的乘积"""
    tokens: List[BraidSigma] = []
    while len(tokens) < length:
        k = int(rng.integers(1, n - 1))
        conj = [BraidSigma(int(j), int(e)) for j, e in zip(rng.integers(1, n - 1, size=2), rng.choice([-1, 1], size=2))]
        inverse_conj = [BraidSigma(t.k, -t.exponent) for t in reversed(conj)]
        e = int(rng.choice([-1, 1]))
        tokens += conj + [BraidSigma(k, e), BraidSigma(k, e)] + inverse_conj
    return GroupWord(tuple(tokens))


def verify_pure_braid(trials: int, rng: Optional[np.random.Generator] = None, sides: int = 5, word_length: int = 6) -> CheckReport:
    """随机闭折线上作用随机纯辫子：每条边长保持在 1e−10 内，闭合保持在 1e−9 内"""
    rng = rng or np.random.default_rng(0)
    report = CheckReport("polygon-pure", trials, details={"sides": sides, "word_length": word_length})
    moved = 0
    for trial in range(trials):
        while True:
            theta = rng.uniform(0.5, 2.5, size=sides)
            try:
                p = sample_closed(theta, rng)
                break
            except Unsamplable:
                logger.debug(f"θ = {theta} 无法闭合，重新抽取")
        w = random_pure_word(sides + 1, word_length, rng)
        q = pure_braid_act(p, w)
        err = float(np.max(np.abs(np.subtract(q.side_lengths, p.side_lengths))))
        if err > 1e-10:
            report.fail(trial, "边长改变", error=err, word=str(w))
        closure = float(np.max(np.abs(_product(conjugacy_tuple(q)).vector - IDENTITY.vector)))
        if closure > CLOSURE_TOL:
            report.fail(trial, "闭合被破坏", error=closure, word=str(w))
        if not polygons_equivalent(p, q):
            moved += 1
    report.details["moved"] = moved
    return report
