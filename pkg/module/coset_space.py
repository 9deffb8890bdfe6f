"""
双陪集空间 Π(n) = K\\G(n)/K：元组、规范代表元、谱形式 ζ、叶标记、重建与秩 4 补全

约定：
- 谱形式矩阵 s_ij = inner(g_i, g_j)，即 R⁴ 中的 Gram 矩阵；
- 叶标记 sheet 为按字典序第一个线性无关四元组的行列式符号，秩 ≤ 3 时为 0；
- 对外接口中的下标一律从 1 开始。
"""
import math
import logging
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from module.errors import (
    AmbiguousBranch,
    Borderline,
    ComplexRoots,
    DegenerateQuadratic,
    DegenerateTuple,
    InconsistentCompletion,
    InconsistentSigns,
    InvalidForm,
    RankAmbiguous,
    RankDegenerate,
)
from module.su2_core import (
    IDENTITY,
    UNIT_TOL,
    UnitQuaternion,
    clamp_cosine,
    compose,
    inverse,
    stack,
    transpose,
    unstack,
)

logger = logging.getLogger(__name__)

RANK_TOL = 1e-9          # 乘以 n
ENTRY_TOL = 1e-12
EQUIV_TOL = 1e-8
BORDERLINE_TOL = 1e-6
CENTRAL_TOL = 1e-12
COORD_TOL = 1e-12
SIGN_TOL = 1e-8
DISCRIMINANT_TOL = 1e-9


def rank_threshold(n: int) -> float:
    return RANK_TOL * n


# ---------- 数据类型 ----------

@dataclass(frozen=True)
class CosetTuple:
    elements: Tuple[UnitQuaternion, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(self.elements))
        if len(self.elements) < 2:
            raise ValueError(f"元组长度必须 ≥ 2，得到 {len(self.elements)}")

    @classmethod
    def from_array(cls, array) -> "CosetTuple":
        return cls(tuple(unstack(array)))

    @property
    def n(self) -> int:
        return len(self.elements)

    @property
    def normalized(self) -> bool:
        g = self.elements[0]
        return float(np.max(np.abs(g.vector - IDENTITY.vector))) <= UNIT_TOL

    @property
    def array(self) -> np.ndarray:
        return stack(self.elements)

    def transpose(self) -> "CosetTuple":
        return CosetTuple(tuple(transpose(g) for g in self.elements))

    def translate(self, h: UnitQuaternion, q: UnitQuaternion) -> "CosetTuple":
        return CosetTuple(tuple(compose(compose(h, g), q) for g in self.elements))

    def __len__(self) -> int:
        return len(self.elements)

    def __getitem__(self, index):
        return self.elements[index]

    def __iter__(self):
        return iter(self.elements)


@dataclass(frozen=True)
class SpectralForm:
    """单位对角对称矩阵，只存上三角（按行展开）"""
    n: int
    upper: Tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "upper", tuple(float(x) for x in self.upper))
        if self.n < 2:
            raise ValueError(f"谱形式阶数必须 ≥ 2，得到 {self.n}")
        if len(self.upper) != self.n * (self.n - 1) // 2:
            raise ValueError(f"上三角长度 {len(self.upper)} 与 n={self.n} 不符")

    @classmethod
    def from_matrix(cls, matrix) -> "SpectralForm":
        m = np.asarray(matrix, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ValueError(f"需要方阵，得到形状 {m.shape}")
        iu = np.triu_indices(m.shape[0], k=1)
        return cls(m.shape[0], tuple(m[iu]))

    @property
    def matrix(self) -> np.ndarray:
        m = np.eye(self.n)
        iu = np.triu_indices(self.n, k=1)
        m[iu] = self.upper
        m[(iu[1], iu[0])] = self.upper
        return m

    def entry(self, i: int, j: int) -> float:
        return float(self.matrix[i - 1, j - 1])

    def distance(self, other: "SpectralForm") -> float:
        if self.n != other.n:
            raise ValueError(f"阶数不同: {self.n} != {other.n}")
        if not self.upper:
            return 0.0
        return float(np.max(np.abs(np.subtract(self.upper, other.upper))))


@dataclass(frozen=True)
class SheetedForm:
    form: SpectralForm
    sheet: int

    def __post_init__(self):
        if self.sheet not in (-1, 0, 1):
            raise ValueError(f"sheet 只能是 -1/0/+1，得到 {self.sheet}")


@dataclass(frozen=True)
class CanonicalCoordinates:
    phi: float
    x: Tuple[float, ...]
    y: Tuple[float, ...]
    theta: Tuple[float, ...]

    def __post_init__(self):
        for name in ("x", "y", "theta"):
            object.__setattr__(self, name, tuple(float(v) for v in getattr(self, name)))
        if not (len(self.x) == len(self.y) == len(self.theta)):
            raise ValueError("x、y、theta 长度必须一致")
        for xj, yj in zip(self.x, self.y):
            if xj * xj + yj * yj > 1.0 + COORD_TOL:
                raise ValueError(f"x²+y² = {xj * xj + yj * yj!r} > 1")


@dataclass
class ValidationReport:
    n: int
    min_eigenvalue: float
    fifth_eigenvalue: float
    diagonal_deviation: float
    max_abs_entry: float
    rank: int
    passed: bool
    failures: List[str] = field(default_factory=list)

    def to_dict(self) -> Dict:
        return {
            "n": self.n, "min_eigenvalue": self.min_eigenvalue, "fifth_eigenvalue": self.fifth_eigenvalue,
            "diagonal_deviation": self.diagonal_deviation, "max_abs_entry": self.max_abs_entry,
            "rank": self.rank, "passed": self.passed, "failures": list(self.failures),
        }


@dataclass(frozen=True)
class CanonicalFrame:
    """canonicalize 的完整结果：代表元、所用共轭元 c（代表元 = c·r_j·c⁻¹）与退化信息"""
    tuple: CosetTuple
    conjugator: UnitQuaternion
    pivot: Optional[int]
    reference: Optional[int]
    degenerate: bool


# ---------- 基本运算 ----------

def _as_matrix(f: Union[SpectralForm, np.ndarray]) -> np.ndarray:
    return f.matrix if isinstance(f, SpectralForm) else np.asarray(f, dtype=float)


def numerical_rank(matrix: np.ndarray, n: Optional[int] = None) -> int:
    eig = np.linalg.eigvalsh(np.asarray(matrix, dtype=float))
    return int(np.sum(eig > rank_threshold(n or matrix.shape[0])))


def normalize_leading(t: CosetTuple) -> CosetTuple:
    """(g₁, …, gₙ) ∼ (1, g₁⁻¹g₂, …, g₁⁻¹gₙ)"""
    head = inverse(t[0])
    return CosetTuple((IDENTITY,) + tuple(compose(head, g) for g in t.elements[1:]))


def spectral_form(t: CosetTuple) -> SpectralForm:
    v = t.array
    return SpectralForm.from_matrix(v @ v.T)


def _quadruple_sign(vectors: np.ndarray) -> Tuple[int, Optional[Tuple[int, ...]]]:
    n = vectors.shape[0]
    gram = vectors @ vectors.T
    if n < 4 or numerical_rank(gram, n) < 4:
        return 0, None
    tol = rank_threshold(n)
    best, best_quad = 0.0, None
    for quad in combinations(range(n), 4):
        idx = list(quad)
        if np.linalg.eigvalsh(gram[np.ix_(idx, idx)])[0] > tol:
            return int(np.sign(np.linalg.det(vectors[idx]))), quad
        det = abs(np.linalg.det(vectors[idx]))
        if det > best:
            best, best_quad = det, quad
    logger.debug(f"没有严格无关的四元组，退而使用行列式最大的 {best_quad}")
    return int(np.sign(np.linalg.det(vectors[list(best_quad)]))), best_quad


def sheet(t: CosetTuple) -> int:
    return _quadruple_sign(t.array)[0]


def sheet_of_vectors(vectors: np.ndarray) -> int:
    return _quadruple_sign(np.asarray(vectors, dtype=float))[0]


def oriented_volume(t: CosetTuple, i: int, j: int, k: int, l: int) -> float:
    """det[v_i v_j v_k v_l]，其平方等于对应的 4×4 Gram 主子式"""
    return float(np.linalg.det(t.array[[i - 1, j - 1, k - 1, l - 1]]))


def sheeted(t: CosetTuple) -> SheetedForm:
    return SheetedForm(spectral_form(t), sheet(t))


def validate_form(f: Union[SpectralForm, np.ndarray]) -> ValidationReport:
    m = _as_matrix(f)
    n = m.shape[0]
    failures = []
    tol = rank_threshold(n)
    asym = float(np.max(np.abs(m - m.T))) if n else 0.0
    if asym > ENTRY_TOL:
        failures.append(f"矩阵不对称: {asym:.3e}")
    eig = np.sort(np.linalg.eigvalsh((m + m.T) / 2))[::-1]
    min_eig = float(eig[-1])
    fifth = float(eig[4]) if n >= 5 else 0.0
    diag_dev = float(np.max(np.abs(np.diag(m) - 1.0)))
    off = m[~np.eye(n, dtype=bool)]
    max_abs = float(np.max(np.abs(off))) if off.size else 0.0
    if min_eig < -tol:
        failures.append(f"非半正定: 最小特征值 {min_eig:.3e}")
    if fifth > tol:
        failures.append(f"秩大于 4: 第五特征值 {fifth:.3e}")
    if diag_dev > 0.0 and not isinstance(f, SpectralForm):
        failures.append(f"对角线偏离 1: {diag_dev:.3e}")
    if max_abs > 1.0 + ENTRY_TOL:
        failures.append(f"|s_ij| 超过 1: {max_abs!r}")
    return ValidationReport(
        n=n, min_eigenvalue=min_eig, fifth_eigenvalue=fifth, diagonal_deviation=diag_dev,
        max_abs_entry=max_abs, rank=int(np.sum(eig > tol)), passed=not failures, failures=failures,
    )


def factor_form(f: SpectralForm) -> Tuple[np.ndarray, int]:
    """Gram 分解：返回 n×4 单位行向量及数值秩，方向尚未按叶标记调整"""
    report = validate_form(f)
    if not report.passed:
        raise InvalidForm("; ".join(report.failures))
    n = f.n
    tol = rank_threshold(n)
    eig, vecs = np.linalg.eigh(f.matrix)
    order = np.argsort(eig)[::-1]
    eig, vecs = eig[order], vecs[:, order]
    lam = np.zeros(4)
    k = min(4, n)
    lam[:k] = eig[:k]
    basis = np.zeros((n, 4))
    basis[:, :k] = vecs[:, :k]
    if n >= 5 and 0.01 * tol <= eig[4] and eig[3] <= 100 * tol:
        raise RankAmbiguous(f"第 4、5 特征值 {eig[3]:.3e}, {eig[4]:.3e} 都在阈值带内")
    rank = int(np.sum(lam > tol))
    lam[rank:] = 0.0
    vectors = basis * np.sqrt(np.clip(lam, 0.0, None))
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    return vectors, rank


def oriented_vectors(sf: SheetedForm) -> np.ndarray:
    vectors, rank = factor_form(sf.form)
    if rank >= 4:
        if sf.sheet == 0:
            raise InvalidForm("秩 4 的谱形式需要 sheet = ±1")
        if sheet_of_vectors(vectors) != sf.sheet:
            vectors[:, 3] = -vectors[:, 3]
    elif sf.sheet != 0:
        raise InvalidForm(f"秩 {rank} 的谱形式 sheet 必须为 0，得到 {sf.sheet}")
    return vectors


def reconstruct(sf: SheetedForm) -> CosetTuple:
    """由 (ζ, sheet) 重建一个代表元；v = (v₁,v₂,v₃,v₄) 对应 a = v₁+iv₂, b = v₃+iv₄"""
    return normalize_leading(CosetTuple.from_array(oriented_vectors(sf)))


def equivalent(t1: CosetTuple, t2: CosetTuple, tol: Optional[float] = None, borderline: Optional[float] = None) -> bool:
    tol = EQUIV_TOL if tol is None else tol
    borderline = BORDERLINE_TOL if borderline is None else borderline
    if t1.n != t2.n:
        raise ValueError(f"元组长度不同: {t1.n} != {t2.n}")
    dist = spectral_form(t1).distance(spectral_form(t2))
    if dist <= tol:
        return sheet(t1) == sheet(t2)
    if dist < borderline:
        warnings.warn(Borderline(f"ζ 距离 {dist:.3e} 处于容差边界"), stacklevel=2)
    return False


# ---------- 规范代表元 ----------

def _rotation_to_i(w: np.ndarray) -> UnitQuaternion:
    """共轭元 c，使 c·(w 方向纯四元数)·c⁻¹ 指向 +i"""
    u = w / np.linalg.norm(w)
    target = np.array([1.0, 0.0, 0.0])
    d = float(np.dot(u, target))
    if d < -1.0 + 1e-12:
        return UnitQuaternion(0.0, 0.0, 1.0, 0.0)
    axis = np.cross(u, target)
    return UnitQuaternion.from_vector([1.0 + d, axis[0], axis[1], axis[2]], renormalize=True)


def _conj(c: UnitQuaternion, g: UnitQuaternion) -> UnitQuaternion:
    return compose(compose(c, g), inverse(c))


def canonical_frame(t: CosetTuple) -> CanonicalFrame:
    if t.n < 3:
        raise ValueError(f"规范化需要 n ≥ 3，得到 {t.n}")
    r = normalize_leading(t)
    elements = list(r.elements)
    pivot = next((j for j in range(1, t.n) if not elements[j].is_central(CENTRAL_TOL)), None)
    if pivot is None:
        warnings.warn(DegenerateTuple("所有元素都是中心元，原样返回"), stacklevel=2)
        return CanonicalFrame(r, IDENTITY, None, None, True)
    degenerate = pivot != 1
    if degenerate:
        logger.warning(f"g_2 为中心元，改用 g_{pivot + 1} 对角化")
    c = _rotation_to_i(elements[pivot].vector[1:])
    rotated = [_conj(c, g) for g in elements]
    candidates = [j for j in range(1, t.n) if j != pivot]
    reference = next((j for j in candidates if abs(rotated[j].b) > CENTRAL_TOL), None)
    if reference is None:
        out = CosetTuple(rotated)
        if candidates:
            warnings.warn(DegenerateTuple("所有元素都可同时对角化"), stacklevel=2)
        return CanonicalFrame(out, c, pivot + 1, None, True)
    if candidates and reference != candidates[0]:
        degenerate = True
        logger.warning(f"g_{candidates[0] + 1} 的 b 为 0，改用 g_{reference + 1} 固定相位")
    alpha = -math.atan2(rotated[reference].b_im, rotated[reference].b_re) / 2.0
    d = UnitQuaternion.diag(alpha)
    c = compose(d, c)
    out = CosetTuple(tuple(_conj(d, g) for g in rotated))
    if degenerate:
        warnings.warn(DegenerateTuple(f"非一般位置：主元 g_{pivot + 1}，相位参考 g_{reference + 1}"), stacklevel=2)
    return CanonicalFrame(out, c, pivot + 1, reference + 1, degenerate)


def canonicalize(t: CosetTuple) -> CosetTuple:
    """(1, diag(e^{iφ}, e^{-iφ}), g₃, …)，φ ∈ [0, π]，g₃ 的 b 为非负实数"""
    return canonical_frame(t).tuple


def transpose_conjugator(g2: UnitQuaternion, g3: UnitQuaternion) -> UnitQuaternion:
    """h 使 h⁻¹g₂h = g₂ᵗ 且 h⁻¹g₃h = g₃ᵗ（元组已规范化，g₁ = 1）"""
    frame = canonical_frame(CosetTuple((IDENTITY, g2, g3)))
    c = frame.conjugator
    h0 = UnitQuaternion(0.0, 1.0, 0.0, 0.0)
    return compose(compose(inverse(c), h0), inverse(transpose(c)))


def reflect_slot(t: CosetTuple, j: int) -> CosetTuple:
    """把 g_j 换成 h g_jᵗ h⁻¹：关于 span(1, g₂, g₃) 的反射，交换小行列式二次方程的两根"""
    r = normalize_leading(t)
    if not 4 <= j <= r.n:
        raise IndexError(f"位置 {j} 超出 4..{r.n}")
    h = transpose_conjugator(r[1], r[2])
    elements = list(r.elements)
    elements[j - 1] = _conj(h, transpose(elements[j - 1]))
    return CosetTuple(elements)


# ---------- 坐标 ----------

def _wrap(angle: float) -> float:
    wrapped = math.remainder(angle, 2.0 * math.pi)
    return math.pi if wrapped <= -math.pi else wrapped


def to_coordinates(t: CosetTuple) -> CanonicalCoordinates:
    if t.n < 3:
        raise ValueError(f"坐标需要 n ≥ 3，得到 {t.n}")
    g1, g2 = t[0], t[1]
    if not t.normalized or abs(g2.b) > 1e-10 or g2.a_im < -1e-10:
        raise ValueError("元组不是规范形式：需要 g₁ = 1，g₂ = diag(e^{iφ}, e^{-iφ})，φ ∈ [0, π]")
    phi = float(np.arccos(clamp_cosine(g2.a_re)))
    x, y, theta = [], [], []
    degenerate = False
    for g in t.elements[2:]:
        x.append(g.a_re)
        y.append(g.a_im)
        if 1.0 - (g.a_re ** 2 + g.a_im ** 2) <= COORD_TOL:
            degenerate = True
            theta.append(0.0)
        else:
            theta.append(math.atan2(g.b_im, g.b_re))
    if degenerate:
        warnings.warn(DegenerateTuple("存在 x²+y² = 1 的元素，θ 无定义，置为 0"), stacklevel=2)
    shift = theta[0]
    return CanonicalCoordinates(phi, x, y, tuple(_wrap(th - shift) for th in theta))


def from_coordinates(c: CanonicalCoordinates) -> CosetTuple:
    elements = [IDENTITY, UnitQuaternion.diag(c.phi)]
    for xj, yj, th in zip(c.x, c.y, c.theta):
        rho = math.sqrt(max(0.0, 1.0 - xj * xj - yj * yj))
        elements.append(UnitQuaternion.from_vector([xj, yj, rho * math.cos(th), rho * math.sin(th)], renormalize=True))
    return CosetTuple(elements)


def _det3(m: np.ndarray, i: int, j: int) -> float:
    """det[[1, p, q_i], [p, 1, r_i], [q_j, r_j, t_ij]]，i、j 为矩阵下标（0 起）"""
    rows = [0, 1, j]
    cols = [0, 1, i]
    return float(np.linalg.det(m[np.ix_(rows, cols)]))


def theta_cosines(f: Union[SpectralForm, np.ndarray]) -> np.ndarray:
    """cos(θ_i − θ_j) 矩阵（下标对应 g₃, g₄, …）"""
    m = _as_matrix(f)
    n = m.shape[0]
    idx = range(2, n)
    norms = {}
    for j in idx:
        d = _det3(m, j, j)
        if d <= COORD_TOL:
            raise RankDegenerate(f"g_{j + 1} 的 3×3 行列式 {d:.3e} 不为正，θ 无定义")
        norms[j] = math.sqrt(d)
    cos = np.ones((n - 2, n - 2))
    for i in idx:
        for j in idx:
            if i != j:
                cos[i - 2, j - 2] = _det3(m, i, j) / (norms[i] * norms[j])
    return cos


def coordinates_from_form(f: SpectralForm, signs: Sequence[int]) -> CanonicalCoordinates:
    """由谱形式反解 (φ, x, y, θ)；signs[k] 为 θ_{k+2} − θ₁ 的符号，θ₁ = 0"""
    m = f.matrix
    n = f.n
    if n < 3:
        raise ValueError(f"坐标需要 n ≥ 3，得到 {n}")
    p = m[0, 1]
    if 1.0 - p * p <= COORD_TOL:
        raise RankDegenerate(f"1 − p² = {1.0 - p * p:.3e}，g₂ 为中心元")
    signs = list(signs)
    if len(signs) != n - 3:
        raise ValueError(f"需要 {n - 3} 个符号，得到 {len(signs)}")
    if any(s not in (-1, 1) for s in signs):
        raise ValueError("符号只能是 ±1")
    root = math.sqrt(1.0 - p * p)
    x = tuple(m[0, 2:])
    y = tuple((m[1, j] - m[0, j] * p) / root for j in range(2, n))
    cos = theta_cosines(m)
    alpha = np.arccos(clamp_cosine(np.clip(cos[0], -1.0 - 1e-13, 1.0 + 1e-13)))
    theta = [0.0] + [s * a for s, a in zip(signs, alpha[1:])]
    for i in range(len(theta)):
        for j in range(i + 1, len(theta)):
            err = abs(math.cos(theta[i] - theta[j]) - cos[i, j])
            if err > SIGN_TOL:
                raise InconsistentSigns(f"θ_{i + 1} − θ_{j + 1} 不一致，误差 {err:.3e}")
    return CanonicalCoordinates(float(np.arccos(clamp_cosine(p))), x, y, tuple(_wrap(th) for th in theta))


def resolve_signs(f: SpectralForm, target_sheet: int) -> List[int]:
    """与给定叶标记一致的 θ 差符号组（只有两组整体相反的可选）"""
    n = f.n
    if n <= 3:
        return []
    cos = theta_cosines(f)
    alpha = np.arccos(np.clip(cos[0], -1.0, 1.0))
    signs = [1] * (n - 3)
    pivot = next((k for k in range(1, n - 2) if math.sin(alpha[k]) > 1e-6), None)
    if pivot is not None:
        for k in range(1, n - 2):
            if k == pivot:
                continue
            plus = abs(math.cos(alpha[pivot] - alpha[k]) - cos[pivot, k])
            minus = abs(math.cos(alpha[pivot] + alpha[k]) - cos[pivot, k])
            signs[k - 1] = 1 if plus <= minus else -1
    coords = coordinates_from_form(f, signs)
    if target_sheet != 0 and sheet(from_coordinates(coords)) != target_sheet:
        signs = [-s for s in signs]
    return signs


# ---------- 小行列式二次方程与秩 4 补全 ----------

def quadratic_coefficients(minors: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """对 (..., 5, 5) 矩阵，把 (3, 4) 位置视为变量 x，返回 det = A x² + B x + C 的系数"""
    minors = np.array(minors, dtype=float, copy=True)
    values = []
    for x in (-1.0, 0.0, 1.0):
        minors[..., 3, 4] = x
        minors[..., 4, 3] = x
        values.append(np.linalg.det(minors))
    d_minus, d_zero, d_plus = values
    return (d_plus + d_minus) / 2.0 - d_zero, (d_plus - d_minus) / 2.0, d_zero


def quadratic_roots_batch(minors: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """批量版本，判别式在容差内截断为 0，不发告警"""
    a, b, c = quadratic_coefficients(minors)
    with np.errstate(divide="ignore", invalid="ignore"):
        centre = -b / (2.0 * a)
        disc = centre ** 2 - c / a
        root = np.sqrt(np.clip(disc, 0.0, None))
    return centre - root, centre + root


def solve_minor_quadratic(f: Union[SpectralForm, np.ndarray], i: int, j: int) -> Tuple[float, float]:
    """行列 {1,2,3,i,j} 上的 5×5 小行列式为零，解出 s_ij 的两个根（升序）"""
    m = _as_matrix(f)
    n = m.shape[0]
    if not (4 <= i <= n and 4 <= j <= n and i != j):
        raise IndexError(f"(i, j) = ({i}, {j}) 需在 4..{n} 且互不相同")
    idx = [0, 1, 2, i - 1, j - 1]
    minor = np.array(m[np.ix_(idx, idx)], dtype=float)
    minor[3, 4] = minor[4, 3] = 0.0
    if np.isnan(minor).any():
        raise InvalidForm(f"行列 {{1,2,3,{i},{j}}} 上除 s_{i}{j} 外还有未知项")
    a, b, c = (float(v) for v in quadratic_coefficients(minor))
    if abs(a) <= ENTRY_TOL:
        if abs(b) <= ENTRY_TOL:
            raise RankDegenerate("二次方程的二次项与一次项同时退化")
        warnings.warn(DegenerateQuadratic(f"二次项系数 {a:.3e} ≈ 0，按一次方程求解"), stacklevel=2)
        root = -c / b
        return root, root
    centre = -b / (2.0 * a)
    disc = centre * centre - c / a
    if disc < -DISCRIMINANT_TOL:
        raise ComplexRoots(f"判别式 {disc:.3e} < 0，部分数据不一致")
    radius = math.sqrt(max(disc, 0.0))
    return centre - radius, centre + radius


def _tail_magnitude(matrix: np.ndarray) -> float:
    eig = np.sort(np.abs(np.linalg.eigvalsh(matrix)))[::-1]
    return float(eig[4]) if eig.size > 4 else 0.0


def complete_form(rows, branches: Optional[Dict[Tuple[int, int], int]] = None) -> SpectralForm:
    """由前四行补全为秩 4 谱形式；每个 s_ij (5 ≤ i < j) 取使扩展矩阵最接近秩 4 的根"""
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[0] != 4:
        raise ValueError(f"需要 4×n 的前四行数据，得到形状 {rows.shape}")
    n = rows.shape[1]
    if n < 4:
        raise ValueError(f"n 必须 ≥ 4，得到 {n}")
    m = np.full((n, n), np.nan)
    m[:4, :] = rows
    m[:, :4] = rows.T
    np.fill_diagonal(m, 1.0)
    top = m[:4, :4]
    tol = rank_threshold(n)
    if np.linalg.eigvalsh(top)[0] <= tol:
        raise RankDegenerate("前 4×4 块的秩不足 4，补全不唯一")
    branches = branches or {}
    for i in range(5, n + 1):
        for j in range(i + 1, n + 1):
            roots = solve_minor_quadratic(m, i, j)
            grown_idx = [0, 1, 2, 3, i - 1, j - 1]
            scores = []
            for root in roots:
                grown = m[np.ix_(grown_idx, grown_idx)].copy()
                grown[4, 5] = grown[5, 4] = root
                scores.append(_tail_magnitude(grown))
            if abs(roots[1] - roots[0]) > 1e-9 and max(scores) <= tol:
                if (i, j) not in branches:
                    raise AmbiguousBranch(f"s_{i}{j} 的两个根都满足秩 4，需要显式分支")
                choice = roots[branches[(i, j)]]
            else:
                choice = roots[int(np.argmin(scores))]
            m[i - 1, j - 1] = m[j - 1, i - 1] = choice
    form = SpectralForm.from_matrix(m)
    report = validate_form(form)
    if not report.passed:
        raise InconsistentCompletion("; ".join(report.failures))
    return form


def complete_from_three_rows(rows, branches: Sequence[int]) -> SpectralForm:
    """前三行 + 每列一个分支选择（0 取小根，1 取大根）确定第四行，再补全"""
    rows = np.asarray(rows, dtype=float)
    if rows.ndim != 2 or rows.shape[0] != 3:
        raise ValueError(f"需要 3×n 的前三行数据，得到形状 {rows.shape}")
    n = rows.shape[1]
    if len(branches) != n - 4:
        raise ValueError(f"需要 {n - 4} 个分支选择，得到 {len(branches)}")
    m = np.full((n, n), np.nan)
    m[:3, :] = rows
    m[:, :3] = rows.T
    np.fill_diagonal(m, 1.0)
    for j, branch in zip(range(5, n + 1), branches):
        roots = solve_minor_quadratic(m, 4, j)
        m[3, j - 1] = m[j - 1, 3] = roots[branch]
    return complete_form(m[:4, :])
