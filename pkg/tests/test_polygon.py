"""S³ 闭折线与纯辫子作用"""
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from module.errors import NotClosed, NotPure, Unsamplable
from module.polygon import (
    SphericalPolygon,
    braid_act,
    conjugacy_tuple,
    from_conjugacy_tuple,
    from_json,
    polygons_equivalent,
    pure_braid_act,
    random_pure_word,
    sample_closed,
    to_json,
    verify_pure_braid,
)
from module.group_actions import underlying_permutation
from module.su2_core import IDENTITY, compose, eigen_angle, haar_sample


def _closure(p):
    out = IDENTITY
    for g in conjugacy_tuple(p):
        out = compose(out, g)
    return float(np.max(np.abs(out.vector - IDENTITY.vector)))


class TestSampling:
    @pytest.mark.parametrize("theta", [(1.0, 1.2, 1.4), (0.8, 1.0, 1.3, 1.6), (1.0, 1.0, 1.0, 1.0, 1.0)])
    def test_sample_has_prescribed_sides_and_closes(self, theta, rng):
        p = sample_closed(theta, rng)
        assert p.size == len(theta)
        assert_allclose(p.side_lengths, theta, atol=1e-10)
        assert _closure(p) < 1e-9
        assert_allclose([eigen_angle(r) for r in conjugacy_tuple(p)], theta, atol=1e-9)

    def test_triangle_inequality_violation_is_unsamplable(self, rng):
        with pytest.raises(Unsamplable):
            sample_closed((0.2, 0.2, 2.0), rng, max_attempts=20)

    @pytest.mark.parametrize("theta", [(1.0, 1.0), (0.0, 1.0, 1.0), (1.0, math.pi, 1.0)])
    def test_rejects_bad_side_lengths(self, theta, rng):
        with pytest.raises(ValueError):
            sample_closed(theta, rng)

    def test_open_chain_is_rejected(self, rng):
        with pytest.raises(NotClosed):
            from_conjugacy_tuple([haar_sample(rng), haar_sample(rng), haar_sample(rng)])

    def test_vertices_must_match_sides(self, rng):
        p = sample_closed((1.0, 1.2, 1.4), rng)
        with pytest.raises(ValueError):
            SphericalPolygon(p.vertices, (1.0, 1.2, 1.5))

    def test_json_roundtrip(self, rng):
        p = sample_closed((0.9, 1.1, 1.3, 1.5), rng)
        q = from_json(to_json(p))
        assert q.side_lengths == p.side_lengths
        assert_allclose(np.array([v.vector for v in q.vertices]), np.array([v.vector for v in p.vertices]), atol=1e-15)


class TestBraids:
    def test_pure_braid_keeps_every_side(self, rng):
        theta = (0.9, 1.1, 1.3, 1.5, 1.2)
        p = sample_closed(theta, rng)
        for _ in range(10):
            w = random_pure_word(6, 4, rng)
            q = pure_braid_act(p, w)
            assert_allclose(q.side_lengths, p.side_lengths, atol=1e-10)
            assert _closure(q) < 1e-9

    def test_random_pure_word_has_trivial_permutation(self, rng):
        for _ in range(10):
            assert underlying_permutation(random_pure_word(6, 3, rng), 6) == [2, 3, 4, 5, 6]

    def test_non_pure_braid_is_rejected(self, rng):
        p = sample_closed((1.0, 1.2, 1.4, 1.1), rng)
        with pytest.raises(NotPure):
            pure_braid_act(p, "s1")
        with pytest.raises(NotPure):
            pure_braid_act(p, "inv:2")

    def test_any_braid_permutes_sides(self, rng):
        theta = (0.9, 1.1, 1.3, 1.5)
        p = sample_closed(theta, rng)
        q = braid_act(p, "s1")
        assert_allclose(q.side_lengths, (1.1, 0.9, 1.3, 1.5), atol=1e-10)
        assert _closure(q) < 1e-9

    def test_full_twist_on_triangle_is_trivial(self, rng):
        p = sample_closed((1.0, 1.2, 1.4), rng)
        assert polygons_equivalent(pure_braid_act(p, "s1 s1"), p)

    def test_pure_braid_moves_quadrilateral(self, rng):
        p = sample_closed((1.0, 1.2, 1.4, 1.3), rng)
        q = pure_braid_act(p, "s1 s1")
        assert_allclose(q.side_lengths, p.side_lengths, atol=1e-10)
        assert not polygons_equivalent(q, p)

    def test_polygons_of_different_size_differ(self, rng):
        assert not polygons_equivalent(sample_closed((1.0, 1.2, 1.4), rng), sample_closed((1.0, 1.2, 1.4, 1.3), rng))

    def test_pure_braid_harness(self, rng):
        report = verify_pure_braid(20, rng)
        assert report.passed, report.to_dict()
        assert report.details["moved"] > 0
