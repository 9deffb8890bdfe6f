"""Haar 测度的径向部分：闭式密度与统计检验"""
import csv
import itertools
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from module.coset_space import SpectralForm, spectral_form
from module.errors import InsufficientSamples, NotInDomain
from module.haar_measure import (
    DEFAULT_N4_OBSERVABLES,
    MIN_EXPECTED,
    N4_INDEX,
    BoxIndicator,
    Bump,
    DensityValue,
    branch_label,
    density_n3,
    density_n4,
    eigen_angle_cdf,
    merge_bins,
    normalizer,
    observable_from_dict,
    quadrature_n4,
    sample_forms,
    sequential_density,
    subset_pairs,
    verify_branch_equiprobability,
    verify_haar_su2,
    verify_uniform_n3,
    verify_weighted_n4,
    weighted_n3_sampler,
    write_histogram_csv,
)


class TestDensities:
    def test_n3_density_is_indicator_of_psd_body(self):
        assert density_n3(0.0, 0.0, 0.0).value == 1.0
        assert density_n3(0.9, 0.9, -0.9).value == 0.0
        assert density_n3(1.5, 0.0, 0.0).value == 0.0

    def test_n4_density_at_identity(self):
        d = density_n4(SpectralForm.from_matrix(np.eye(4)))
        assert d.value == pytest.approx(1.0)
        assert d.log_value == pytest.approx(0.0)

    def test_n4_density_blows_up_on_boundary(self):
        boundary = np.eye(4)
        boundary[0, 1] = boundary[1, 0] = 1.0
        assert density_n4(SpectralForm.from_matrix(boundary)).is_infinite

    def test_n4_density_rejects_non_psd(self):
        bad = np.eye(4)
        bad[0, 1] = bad[1, 0] = bad[0, 2] = bad[2, 0] = 0.9
        bad[1, 2] = bad[2, 1] = -0.9
        with pytest.raises(NotInDomain):
            density_n4(SpectralForm.from_matrix(bad))

    def test_sequential_density_reduces_to_n4(self, tuples):
        for t in tuples(4, 5):
            f = spectral_form(t)
            assert sequential_density(f).log_value == pytest.approx(density_n4(f).log_value, abs=1e-9)

    def test_sequential_density_is_product_over_columns(self, tuples):
        f = spectral_form(tuples(6)[0])
        m = f.matrix
        expected = 1.0
        for j in range(3, 6):
            idx = [0, 1, 2, j]
            expected /= math.sqrt(np.linalg.det(m[np.ix_(idx, idx)]))
        assert sequential_density(f).value == pytest.approx(expected, rel=1e-9)

    def test_sequential_density_ignores_order_of_later_columns(self, tuples):
        for t in tuples(6, 5):
            m = spectral_form(t).matrix
            base = sequential_density(SpectralForm.from_matrix(m)).log_value
            for tail in itertools.permutations([3, 4, 5]):
                order = [0, 1, 2, *tail]
                moved = SpectralForm.from_matrix(m[np.ix_(order, order)])
                assert sequential_density(moved).log_value == pytest.approx(base, abs=1e-9)

    def test_density_value_helpers(self):
        assert DensityValue.zero().log_value == -math.inf
        assert DensityValue.of(0.0) == DensityValue.zero()
        assert DensityValue.infinite().to_dict() == {"value": math.inf, "log_value": math.inf}


class TestSampling:
    def test_forms_shape_and_diagonal(self, rng):
        forms = sample_forms(5, 100, rng)
        assert forms.shape == (100, 5, 5)
        assert_allclose(np.diagonal(forms, axis1=1, axis2=2), 1.0, atol=1e-12)

    def test_normalizer_n3_is_elliptope_volume(self):
        assert normalizer(3, 200_000, 11) == pytest.approx(math.pi ** 2 / 2.0, abs=0.05)

    def test_eigen_angle_cdf_endpoints(self):
        assert eigen_angle_cdf(0.0) == 0.0
        assert eigen_angle_cdf(math.pi) == pytest.approx(1.0)
        assert eigen_angle_cdf(math.pi / 2) == pytest.approx(0.5)


class TestUniformN3:
    def test_haar_pushforward_is_uniform(self):
        report = verify_uniform_n3(50_000, bins=6, seed=3)
        assert report.passed, report.to_dict()
        assert report.bins["merged"] <= 6 ** 3

    def test_weighted_control_is_rejected(self):
        report = verify_uniform_n3(200_000, bins=6, seed=3, sampler=weighted_n3_sampler(0.5))
        assert not report.passed
        assert report.sigma > 3.0

    def test_same_seed_same_statistic(self):
        a = verify_uniform_n3(20_000, bins=5, seed=9)
        b = verify_uniform_n3(20_000, bins=5, seed=9)
        assert a.value == b.value

    def test_threads_are_reproducible(self):
        a = verify_uniform_n3(20_000, bins=5, seed=9, threads=3)
        b = verify_uniform_n3(20_000, bins=5, seed=9, threads=3)
        assert a.value == b.value

    def test_requires_enough_samples(self):
        with pytest.raises(InsufficientSamples):
            verify_uniform_n3(100, seed=1)

    def test_merged_bins_have_enough_expectation(self):
        observed = np.array([0, 3, 50, 1, 0, 40, 2, 2])
        reference = np.array([1, 2, 45, 0, 0, 38, 1, 3])
        obs, ref, groups = merge_bins(observed, reference, 0.5)
        assert obs.sum() == observed.sum()
        assert ref.sum() == reference.sum()
        assert all((o + r) * 0.5 >= MIN_EXPECTED for o, r in zip(obs[:-1], ref[:-1]))
        assert sorted(i for g in groups for i in g) == [0, 1, 2, 3, 5, 6, 7]

    def test_histogram_csv(self, tmp_path):
        report = verify_uniform_n3(20_000, bins=4, seed=5)
        path = write_histogram_csv(report, tmp_path / "n3.csv")
        with open(path, encoding="utf-8") as f:
            rows = list(csv.DictReader(f))
        assert set(rows[0]) == {"bin_id", "expected", "observed"}
        assert sum(int(r["observed"]) for r in rows) == 20_000


class TestWeightedN4:
    def test_quadrature_of_small_box_near_identity(self):
        box = BoxIndicator((-0.05,) * 6, (0.05,) * 6)
        assert quadrature_n4(box, 6) == pytest.approx(0.1 ** 6, rel=0.01)

    def test_quadrature_rejects_boxes_touching_the_boundary(self):
        with pytest.raises(NotInDomain):
            quadrature_n4(BoxIndicator((-0.99,) * 6, (0.99,) * 6), 4)

    def test_observable_from_dict(self):
        bump = observable_from_dict({"kind": "bump", "lower": [-0.1] * 6, "upper": [0.1] * 6})
        assert isinstance(bump, Bump)
        assert bump(np.zeros((1, 6)))[0] == pytest.approx(1.0)
        assert bump(np.full((1, 6), 0.2))[0] == 0.0
        with pytest.raises(ValueError):
            observable_from_dict({"kind": "ring", "lower": [0] * 6, "upper": [1] * 6})

    def test_default_boxes_keep_a_margin_from_the_boundary(self):
        for box in DEFAULT_N4_OBSERVABLES:
            corners = np.array(list(itertools.product(*zip(box.lower, box.upper))))
            forms = np.broadcast_to(np.eye(4), (len(corners), 4, 4)).copy()
            for pos, (i, j) in enumerate(N4_INDEX):
                forms[:, i, j] = forms[:, j, i] = corners[:, pos]
            assert np.linalg.eigvalsh(forms)[:, 0].min() >= 0.1 - 1e-12
            assert quadrature_n4(box, 4) > 0.0

    def test_subset_pairs(self):
        rows, cols = subset_pairs(4)
        assert rows.tolist() == [[i for i, _ in N4_INDEX]]
        assert cols.tolist() == [[j for _, j in N4_INDEX]]
        rows, cols = subset_pairs(6)
        assert rows.shape == cols.shape == (15, 6)
        assert np.all(rows < cols)

    def test_monte_carlo_matches_quadrature(self):
        report = verify_weighted_n4(1_000_000, DEFAULT_N4_OBSERVABLES[:1], 8, seed=17, tolerance=0.05,
                                    normalizer_samples=1_000_000)
        assert report.bins["subsets_per_draw"] == 15
        for entry in report.details["observables"]:
            assert entry["relative_stderr"] <= 0.05 / 3.0
            assert abs(entry["monte_carlo"] - entry["predicted"]) <= 5.0 * entry["stderr"] + 0.01 * entry["predicted"]

    def test_pooled_and_single_estimates_agree(self):
        box = DEFAULT_N4_OBSERVABLES[:1]
        single = verify_weighted_n4(400_000, box, 4, seed=5, pool=4, tolerance=0.2, normalizer_samples=200_000)
        pooled = verify_weighted_n4(400_000, box, 4, seed=5, pool=6, tolerance=0.2, normalizer_samples=200_000)
        a, b = single.details["observables"][0], pooled.details["observables"][0]
        assert b["stderr"] < a["stderr"]
        assert abs(a["monte_carlo"] - b["monte_carlo"]) <= 5.0 * math.hypot(a["stderr"], b["stderr"])

    def test_unresolved_observable_is_insufficient(self):
        tiny = BoxIndicator((-0.02,) * 6, (0.02,) * 6)
        with pytest.raises(InsufficientSamples):
            verify_weighted_n4(20_000, [tiny], 4, seed=1, normalizer_samples=100_000)

    @pytest.mark.slow
    @pytest.mark.parametrize("seed", [0, 1, 2, 17])
    def test_acceptance_size(self, seed):
        report = verify_weighted_n4(10_000_000, seed=seed)
        assert report.passed, report.to_dict()


class TestBranches:
    def test_label_values(self, tuples):
        for t in tuples(6, 10):
            f = spectral_form(t)
            assert branch_label(f, 5) in (0, 1)
            assert branch_label(f, 6) in (0, 1)

    def test_labels_are_fair_and_independent(self):
        report = verify_branch_equiprobability(40_000, seed=21)
        assert report.passed, report.to_dict()
        assert report.details["used"] + report.details["excluded"] == 40_000
        assert "independence_chi2" in report.details

    def test_n5_checks_marginal_only(self):
        report = verify_branch_equiprobability(20_000, n=5, seed=21)
        assert report.passed
        assert "independence_chi2" not in report.details

    def test_rejects_other_n(self):
        with pytest.raises(ValueError):
            verify_branch_equiprobability(20_000, n=7, seed=1)


class TestHaarSU2:
    def test_single_element_laws(self):
        report = verify_haar_su2(50_000, seed=4)
        assert report.passed, report.to_dict()
        assert set(report.details) == {"eigen_angle", "a_disc", "arg_b"}

    @pytest.mark.slow
    def test_acceptance_size(self):
        assert verify_haar_su2(100_000, seed=4).passed
