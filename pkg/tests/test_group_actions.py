"""Nielsen 生成元与辫群作用：矩阵路径、闭式路径与群关系"""
import warnings

import numpy as np
import pytest
from numpy.testing import assert_allclose

from conftest import real_b_tuple
from module.coset_space import equivalent, normalize_leading, reconstruct, sheet, sheeted, spectral_form
from module import group_actions
from module.errors import DegeneracyWarning, RankDegenerate, RankDegenerateFallback, WordSyntaxError
from module.group_actions import (
    BraidSigma,
    GroupWord,
    Invert,
    LeftMultiply,
    Permute,
    act_form,
    act_sheeted_oracle,
    act_tuple,
    artin_check,
    braid_word,
    form_braid,
    form_braid_general,
    form_invert,
    form_invert_sheeted,
    form_left_multiply,
    form_permute,
    kernel_word,
    parse_token,
    random_braid_word,
    sign_rule_decisions,
    theta_volume_signs,
    underlying_permutation,
    verify_actions_oracle,
    verify_braid_relations,
    verify_commutation,
    verify_kernel_element,
)
from module.su2_core import compose, haar_sample, inverse


@pytest.fixture(autouse=True)
def quiet_fallbacks():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegeneracyWarning)
        yield


class TestWords:
    def test_parse_and_print(self):
        w = GroupWord.parse("s1 s2^-1 inv:3 lmul:2,4 perm:3,2,4")
        assert w.tokens == (BraidSigma(1, 1), BraidSigma(2, -1), Invert(3), LeftMultiply(2, 4), Permute((3, 2, 4)))
        assert GroupWord.parse(str(w)) == w
        assert not w.is_braid
        assert braid_word(1, -2).is_braid

    @pytest.mark.parametrize("text", ["qzx", "s", "inv:", "lmul:2", "perm:", "s1^2"])
    def test_malformed_tokens(self, text):
        with pytest.raises(WordSyntaxError):
            parse_token(text)

    def test_out_of_range_tokens(self, tuples):
        t = tuples(4)[0]
        for text in ("s3", "inv:1", "lmul:2,2", "perm:2,3", "inv:5"):
            with pytest.raises(IndexError):
                act_tuple(t, text)

    def test_kernel_word(self):
        assert str(kernel_word(3)) == "s1 s1"
        assert str(kernel_word(4)) == "s1 s2 s1 s1 s2 s1"

    def test_underlying_permutation(self):
        assert underlying_permutation(braid_word(1), 4) == [3, 2, 4]
        assert underlying_permutation(braid_word(1, 1), 4) == [2, 3, 4]
        assert underlying_permutation(GroupWord.parse("lmul:2,3"), 4) is None


class TestMatrixPath:
    def test_sigma_conjugates_and_swaps(self, tuples):
        t = normalize_leading(tuples(4)[0])
        out = act_tuple(t, "s1")
        x, y = t[1], t[2]
        assert_allclose(out[1].vector, compose(compose(x, y), inverse(x)).vector, atol=1e-12)
        assert_allclose(out[2].vector, x.vector, atol=1e-12)

    def test_sigma_inverse_undoes_sigma(self, tuples):
        for t in tuples(5, 10):
            t = normalize_leading(t)
            assert_allclose(act_tuple(t, "s2 s2^-1").array, t.array, atol=1e-12)
            assert_allclose(act_tuple(t, "s2^-1 s2").array, t.array, atol=1e-12)

    def test_action_is_well_defined_on_cosets(self, tuples, rng):
        for t in tuples(5, 10):
            moved = t.translate(haar_sample(rng), haar_sample(rng))
            for word in ("s1 s3^-1", "inv:2 lmul:3,4", "perm:5,2,4,3"):
                assert equivalent(act_tuple(t, word), act_tuple(moved, word))

    def test_invert_is_an_involution(self, tuples):
        t = tuples(4)[0]
        assert equivalent(act_tuple(t, "inv:2 inv:2"), t)

    def test_empty_word_is_identity(self, tuples):
        t = tuples(4)[0]
        assert equivalent(act_tuple(t, ""), t)


class TestClosedForms:
    def test_invert_matches_oracle(self, tuples):
        for t in tuples(5, 20):
            for k in range(2, 6):
                want = spectral_form(act_tuple(t, GroupWord((Invert(k),))))
                assert form_invert(spectral_form(t), k).distance(want) < 1e-12

    def test_invert_sheeted_tracks_sheet(self, tuples):
        for t in tuples(5, 10):
            image = act_tuple(t, "inv:2")
            assert form_invert_sheeted(sheeted(t)).sheet == sheet(image)

    def test_permute_matches_oracle(self, tuples):
        for t in tuples(5, 10):
            out = form_permute(sheeted(t), (4, 2, 5, 3))
            image = act_tuple(t, "perm:4,2,5,3")
            assert out.form.distance(spectral_form(image)) < 1e-12
            assert out.sheet == sheet(image)

    @pytest.mark.parametrize("branch", ["theta", "oracle"])
    def test_left_multiply_matches_oracle(self, tuples, branch):
        for t in tuples(5, 50):
            for j, k in ((2, 3), (3, 5), (5, 2)):
                image = act_tuple(t, GroupWord((LeftMultiply(j, k),)))
                got = form_left_multiply(sheeted(t), j, k, branch)
                assert got.form.distance(spectral_form(image)) < 1e-8
                assert got.sheet == sheet(image)

    @pytest.mark.parametrize("branch", ["theta", "oracle"])
    def test_braid_general_matches_oracle(self, tuples, branch):
        for t in tuples(5, 50):
            for k in (1, 2, 3):
                for e in (1, -1):
                    image = act_tuple(t, GroupWord((BraidSigma(k, e),)))
                    got = form_braid_general(sheeted(t), k, e, branch)
                    assert got.form.distance(spectral_form(image)) < 1e-8

    @pytest.mark.parametrize("branch", ["theta", "oracle"])
    def test_braid_relabelled_matches_oracle(self, tuples, branch):
        for t in tuples(5, 50):
            for k in (1, 2, 3):
                for e in (1, -1):
                    image = act_tuple(t, GroupWord((BraidSigma(k, e),)))
                    got = form_braid(sheeted(t), k, e, branch)
                    assert got.form.distance(spectral_form(image)) < 1e-8
                    assert got.sheet == sheet(image)

    def test_closed_forms_work_beyond_n5(self, tuples):
        for t in tuples(7, 10):
            word = GroupWord.parse("s4 lmul:6,3 s2^-1 inv:7")
            assert act_form(sheeted(t), word).form.distance(spectral_form(act_tuple(t, word))) < 1e-7

    def test_theta_signs_cover_other_positions(self, tuples):
        sf = sheeted(tuples(6)[0])
        signs = theta_volume_signs(sf, 2, 3)
        assert set(signs) == {4, 5, 6}
        assert set(signs.values()) <= {-1, 1}

    def test_sheet_zero_falls_back_to_oracle(self, rng):
        t = real_b_tuple(rng, 5)
        sf = sheeted(t)
        assert sf.sheet == 0
        with pytest.warns(RankDegenerateFallback):
            got = form_left_multiply(sf, 2, 3)
        assert got.form.distance(spectral_form(act_tuple(t, "lmul:2,3"))) < 1e-8

    def test_oracle_path_roundtrips(self, tuples):
        t = tuples(5)[0]
        out = act_sheeted_oracle(sheeted(t), "s1 inv:3")
        assert equivalent(reconstruct(out), act_tuple(t, "s1 inv:3"))

    def test_unknown_branch_mode(self, tuples):
        with pytest.raises(ValueError):
            form_left_multiply(sheeted(tuples(5)[0]), branch="guess")


class TestRelations:
    def test_braid_relations_on_pi5(self, rng):
        report = verify_braid_relations(5, 50, rng)
        assert report.passed, report.to_dict()

    def test_adjacent_generators_do_not_commute(self, rng):
        report = verify_commutation(5, 1, 2, 10, rng)
        assert len(report.failures) == 10

    def test_far_generators_commute(self, rng):
        assert verify_commutation(5, 1, 3, 20, rng).passed

    @pytest.mark.parametrize("n", [3, 4])
    def test_kernel_element_acts_trivially(self, n, rng):
        report = verify_kernel_element(n, 50, rng)
        assert report.passed, report.to_dict()

    def test_artin_conditions_for_random_words(self, rng):
        for _ in range(10):
            w = random_braid_word(5, int(rng.integers(1, 11)), rng)
            report = artin_check(w, 5, 3, rng)
            assert report.passed, report.to_dict()

    def test_artin_rejects_left_multiplication(self, rng):
        report = artin_check("lmul:2,3", 4, 3, rng)
        assert not report.passed

    def test_actions_oracle_harness(self, rng):
        report = verify_actions_oracle(5, 30, rng)
        assert report.passed, report.to_dict()
        details = report.details
        assert details["sign_rule_agreement"] >= 0.999
        assert details["sign_rule_decisions"] + details["sign_rule_excluded"] == 30 * 14
        assert details["sign_rule_fallbacks"] == 0

    def test_sign_decisions_follow_the_realized_branch(self, tuples):
        for t in map(normalize_leading, tuples(5, 20)):
            sf = sheeted(t)
            for token in (LeftMultiply(2, 3), BraidSigma(2, 1), BraidSigma(3, -1)):
                expected = spectral_form(act_tuple(t, GroupWord((token,)))).matrix
                decisions = sign_rule_decisions(sf, token, expected)
                assert len(decisions) == 2
                for d in decisions:
                    if abs(d.sine) > 1e-6:
                        assert d.rule == d.realized, (str(token), d)

    def test_sign_decisions_need_a_radical(self, tuples):
        sf = sheeted(tuples(5)[0])
        with pytest.raises(ValueError):
            sign_rule_decisions(sf, Invert(2), sf.form.matrix)

    def test_fallbacks_do_not_count_as_agreement(self, rng, monkeypatch):
        def unavailable(sf, c, t):
            raise RankDegenerate("θ 无定义")

        monkeypatch.setattr(group_actions, "theta_sines", unavailable)
        report = verify_actions_oracle(5, 3, rng)
        assert report.details["sign_rule_fallbacks"] == 3 * 7
        assert report.details["sign_rule_decisions"] == 0
        assert report.details["sign_rule_agreement"] is None
        assert not report.passed

    def test_near_zero_sines_are_excluded(self, rng, monkeypatch):
        original = group_actions.theta_sines
        monkeypatch.setattr(group_actions, "theta_sines",
                            lambda sf, c, t: {z: 1e-9 for z in original(sf, c, t)})
        report = verify_actions_oracle(5, 2, rng)
        assert report.details["sign_rule_excluded"] == 2 * 14
        assert report.details["sign_rule_decisions"] == 0
        assert not report.passed


    @pytest.mark.slow
    def test_actions_oracle_acceptance_size(self):
        assert verify_actions_oracle(5, 10_000, np.random.default_rng(1)).passed
