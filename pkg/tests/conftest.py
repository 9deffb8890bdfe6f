import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT))

from module.config_manager import ConfigManager
from module.coset_space import CosetTuple
from module.haar_measure import sample_tuple
from module.su2_core import UnitQuaternion


@pytest.fixture
def rng():
    return np.random.default_rng(20240101)


@pytest.fixture
def tuples(rng):
    """固定种子的 Haar 元组工厂"""
    def make(n: int, count: int = 1):
        return [sample_tuple(n, rng) for _ in range(count)]
    return make


@pytest.fixture
def fresh_config():
    ConfigManager.reset()
    yield
    ConfigManager.reset()


def _to_quaternion(v):
    return UnitQuaternion.from_vector(v, renormalize=True)


quaternions = (
    st.lists(st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False), min_size=4, max_size=4)
    .filter(lambda v: sum(x * x for x in v) > 0.01)
    .map(_to_quaternion)
)


def real_b_tuple(rng, n):
    """所有 b_j 为实数：向量落在三维子空间，秩 ≤ 3"""
    rows = rng.standard_normal((n, 4))
    rows[:, 3] = 0.0
    return CosetTuple.from_array(rows)
