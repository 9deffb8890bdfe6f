"""
SU(2) ≅ 单位四元数 ≅ S³ 上的基本运算

元素按 (a_re, a_im, b_re, b_im) 存储，对应矩阵 [[a, b], [-conj(b), conj(a)]]，
行列式恒为 1，不单独校验。批量函数作用在形如 (..., 4) 的 numpy 数组上，
供 Monte Carlo 使用；UnitQuaternion 是单个元素的不可变包装。
"""
import math
import logging
from dataclasses import dataclass
from typing import Iterable, List, Sequence

import numpy as np

from module.errors import NumericalDrift

logger = logging.getLogger(__name__)

UNIT_TOL = 1e-12
CLAMP_TOL = 1e-12


def clamp_cosine(c, tol: float = CLAMP_TOL):
    """把 arccos 的参数截断到 [-1, 1]；超出 tol 视为逻辑错误"""
    arr = np.asarray(c, dtype=float)
    overshoot = np.abs(arr) - 1.0
    if np.any(overshoot > tol):
        raise NumericalDrift(f"arccos 参数越界 {float(np.max(overshoot)):.3e} > {tol:.0e}")
    return np.clip(arr, -1.0, 1.0)


# ---------- 批量运算（numpy，最后一维为 4） ----------

def _split(x: np.ndarray):
    x = np.asarray(x, dtype=float)
    return x[..., 0] + 1j * x[..., 1], x[..., 2] + 1j * x[..., 3]


def _join(a, b) -> np.ndarray:
    return np.stack([a.real, a.imag, b.real, b.imag], axis=-1)


def normalize_batch(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x / np.linalg.norm(x, axis=-1, keepdims=True)


def compose_batch(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    a1, b1 = _split(x)
    a2, b2 = _split(y)
    return normalize_batch(_join(a1 * a2 - b1 * np.conj(b2), a1 * b2 + b1 * np.conj(a2)))


def inverse_batch(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    return x * np.array([1.0, -1.0, -1.0, -1.0])


def transpose_batch(x: np.ndarray) -> np.ndarray:
    # (a, b) -> (a, -conj(b))：R⁴ 中的反射 (x, y, u, v) -> (x, y, -u, v)
    x = np.asarray(x, dtype=float)
    return x * np.array([1.0, 1.0, -1.0, 1.0])


def inner_batch(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return np.sum(np.asarray(x, dtype=float) * np.asarray(y, dtype=float), axis=-1)


def eigen_angle_batch(x: np.ndarray) -> np.ndarray:
    return np.arccos(clamp_cosine(np.asarray(x, dtype=float)[..., 0]))


def haar_batch(rng: np.random.Generator, shape=()) -> np.ndarray:
    """S³ 上的均匀分布：4 个独立标准正态归一化，无拒绝步骤"""
    if isinstance(shape, int):
        shape = (shape,)
    return normalize_batch(rng.standard_normal(tuple(shape) + (4,)))


def axis_angle_batch(axes: np.ndarray, phi) -> np.ndarray:
    """特征角为 phi、旋转轴为单位向量 axes 的元素：cos φ + sin φ·(u₁i + u₂j + u₃k)"""
    axes = np.asarray(axes, dtype=float)
    axes = axes / np.linalg.norm(axes, axis=-1, keepdims=True)
    phi = np.asarray(phi, dtype=float)
    c, s = np.cos(phi), np.sin(phi)
    return np.concatenate([c[..., None] * np.ones_like(axes[..., :1]), s[..., None] * axes], axis=-1)


def random_axes(rng: np.random.Generator, shape=()) -> np.ndarray:
    if isinstance(shape, int):
        shape = (shape,)
    return normalize_batch(rng.standard_normal(tuple(shape) + (3,)))


# ---------- 单个元素 ----------

@dataclass(frozen=True)
class UnitQuaternion:
    a_re: float
    a_im: float
    b_re: float
    b_im: float

    def __post_init__(self):
        norm2 = self.a_re ** 2 + self.a_im ** 2 + self.b_re ** 2 + self.b_im ** 2
        if abs(norm2 - 1.0) > UNIT_TOL:
            raise NumericalDrift(f"非单位四元数: |a|²+|b|² = {norm2!r}")

    @classmethod
    def from_vector(cls, v: Iterable[float], renormalize: bool = False) -> "UnitQuaternion":
        v = np.asarray(list(v) if not isinstance(v, np.ndarray) else v, dtype=float)
        if v.shape != (4,):
            raise ValueError(f"需要 4 个分量，得到形状 {v.shape}")
        if renormalize:
            v = v / np.linalg.norm(v)
        return cls(float(v[0]), float(v[1]), float(v[2]), float(v[3]))

    @classmethod
    def from_complex(cls, a: complex, b: complex, renormalize: bool = False) -> "UnitQuaternion":
        return cls.from_vector([a.real, a.imag, b.real, b.imag], renormalize=renormalize)

    @classmethod
    def from_matrix(cls, m) -> "UnitQuaternion":
        m = np.asarray(m, dtype=complex)
        return cls.from_complex(complex(m[0, 0]), complex(m[0, 1]), renormalize=True)

    @classmethod
    def identity(cls) -> "UnitQuaternion":
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def diag(cls, phi: float) -> "UnitQuaternion":
        """diag(e^{iφ}, e^{-iφ})"""
        return cls(math.cos(phi), math.sin(phi), 0.0, 0.0)

    @classmethod
    def from_axis_angle(cls, axis: Sequence[float], phi: float) -> "UnitQuaternion":
        return cls.from_vector(axis_angle_batch(np.asarray(axis, dtype=float), phi), renormalize=True)

    @property
    def a(self) -> complex:
        return complex(self.a_re, self.a_im)

    @property
    def b(self) -> complex:
        return complex(self.b_re, self.b_im)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.a_re, self.a_im, self.b_re, self.b_im])

    def as_matrix(self) -> np.ndarray:
        a, b = self.a, self.b
        return np.array([[a, b], [-b.conjugate(), a.conjugate()]])

    def as_list(self) -> List[float]:
        return [self.a_re, self.a_im, self.b_re, self.b_im]

    def is_central(self, tol: float = 1e-12) -> bool:
        return abs(self.a_im) <= tol and abs(self.b_re) <= tol and abs(self.b_im) <= tol

    def __mul__(self, other: "UnitQuaternion") -> "UnitQuaternion":
        return compose(self, other)

    def __neg__(self) -> "UnitQuaternion":
        return UnitQuaternion(-self.a_re, -self.a_im, -self.b_re, -self.b_im)


IDENTITY = UnitQuaternion.identity()


def compose(g: UnitQuaternion, h: UnitQuaternion) -> UnitQuaternion:
    """矩阵乘积 g·h，结果重新归一化（唯一做归一化的运算）"""
    a1, b1, a2, b2 = g.a, g.b, h.a, h.b
    a = a1 * a2 - b1 * b2.conjugate()
    b = a1 * b2 + b1 * a2.conjugate()
    norm = math.sqrt(abs(a) ** 2 + abs(b) ** 2)
    return UnitQuaternion(a.real / norm, a.imag / norm, b.real / norm, b.imag / norm)


def inverse(g: UnitQuaternion) -> UnitQuaternion:
    return UnitQuaternion(g.a_re, -g.a_im, -g.b_re, -g.b_im)


def transpose(g: UnitQuaternion) -> UnitQuaternion:
    return UnitQuaternion(g.a_re, g.a_im, -g.b_re, g.b_im)


def conjugate(g: UnitQuaternion, h: UnitQuaternion) -> UnitQuaternion:
    """h g h⁻¹"""
    return compose(compose(h, g), inverse(h))


def eigen_angle(g: UnitQuaternion) -> float:
    """特征值 e^{±iφ} 的 φ ∈ [0, π]，tr g = 2cos φ"""
    return float(np.arccos(clamp_cosine(g.a_re)))


def inner(g: UnitQuaternion, h: UnitQuaternion) -> float:
    return g.a_re * h.a_re + g.a_im * h.a_im + g.b_re * h.b_re + g.b_im * h.b_im


def angular_distance(g: UnitQuaternion, h: UnitQuaternion) -> float:
    return float(np.arccos(clamp_cosine(inner(g, h))))


def haar_sample(rng: np.random.Generator) -> UnitQuaternion:
    return UnitQuaternion.from_vector(haar_batch(rng), renormalize=True)


def stack(elements: Sequence[UnitQuaternion]) -> np.ndarray:
    return np.array([g.as_list() for g in elements], dtype=float).reshape(-1, 4)


def unstack(array: np.ndarray) -> List[UnitQuaternion]:
    return [UnitQuaternion.from_vector(row, renormalize=True) for row in np.asarray(array, dtype=float).reshape(-1, 4)]
