"""Brute-force enumeration, censuses, and the probabilistic inequalities."""

from fractions import Fraction

import mpmath
import pytest
from mpmath.libmp import to_rational

from treerank.enumeration import (
    SizeLimitError,
    census,
    check_inequalities,
    enumerate_trees,
    plane_multiplicity_total,
    weighted_onechild_mean,
)
from treerank.series import tree_counts
from treerank.variety import TreeVariety

NP = TreeVariety.NONPLANE
PL = TreeVariety.PLANE


class TestEnumeration:
    def test_figure_counts(self):
        assert sum(1 for _ in enumerate_trees(NP, 4)) == 5
        assert sum(1 for _ in enumerate_trees(PL, 3)) == 3
        assert sum(1 for _ in enumerate_trees(PL, 5)) == 39

    @pytest.mark.parametrize("variety", [NP, PL])
    def test_counts_match_series(self, variety):
        counts = tree_counts(variety, 8)
        for n in range(1, 9):
            assert sum(1 for _ in enumerate_trees(variety, n)) == counts[n]

    @pytest.mark.parametrize("variety", [NP, PL])
    def test_no_duplicates(self, variety):
        for n in range(1, 8):
            trees = [t.as_tuple() for t in enumerate_trees(variety, n)]
            assert len(set(trees)) == len(trees)

    def test_plane_sibling_order_distinct(self):
        texts = {t.to_text() for t in enumerate_trees(PL, 3)}
        assert texts == {"3(2(1))", "3(1)(2)", "3(2)(1)"}

    def test_nonplane_canonical_child_order(self):
        texts = {t.to_text() for t in enumerate_trees(NP, 3)}
        assert texts == {"3(2(1))", "3(1)(2)"}

    def test_structure_invariants(self):
        for variety in (NP, PL):
            for tree in enumerate_trees(variety, 6):
                parents = tree.parent_array()
                assert tree.root_label == 6
                assert parents[6] == 0
                for label in range(1, 6):
                    assert parents[label] > label
                for label in range(1, 7):
                    assert len(tree.children(label)) <= 2

    def test_size_limit_refusal_quotes_count(self):
        with pytest.raises(SizeLimitError) as err:
            list(enumerate_trees(NP, 11, limit=10))
        assert "50521" in str(err.value) or str(tree_counts(NP, 11)[11]) in str(err.value)
        assert "exactly" in str(err.value)

    def test_bad_size(self):
        with pytest.raises(ValueError):
            list(enumerate_trees(NP, 0))


class TestCensus:
    def test_subtree_size_probabilities_n3(self):
        cen = census(NP, 3)
        assert cen.size_prob(1) == Fraction(1, 2)
        assert cen.size_prob(2) == Fraction(1, 6)
        assert cen.size_prob(3) == Fraction(1, 3)

    def test_rank_totals_n6(self):
        cen = census(NP, 6)
        assert cen.rank_totals[0] == 155
        assert cen.rank_totals[1] == 135
        plane = census(PL, 6)
        assert plane.rank_totals[0] == 513
        assert plane.rank_totals[1] == 435

    @pytest.mark.parametrize("variety", [NP, PL])
    def test_internal_identities(self, variety):
        for n in range(1, 8):
            cen = census(variety, n)
            pairs = n * cen.tree_count
            assert sum(cen.rank_totals) == pairs
            assert sum(cen.size_totals) == pairs
            assert cen.rank_totals[0] == cen.leaf_total == cen.size_totals[1]
            assert cen.leaf_total - cen.two_child_total == cen.tree_count
            assert sum(cen.root_rank_counts) == cen.tree_count
            for k in range(n):
                assert sum(v for (kk, _), v in cen.joint_totals.items() if kk == k) \
                    == cen.rank_totals[k]
            for r in range(1, n + 1):
                assert sum(v for (_, rr), v in cen.joint_totals.items() if rr == r) \
                    == cen.size_totals[r]

    def test_mean_one_child_n3(self):
        assert census(NP, 3).mean_one_child == Fraction(1)

    def test_sqrt_size_mean_n2(self):
        enc = census(NP, 2).sqrt_size_mean(20)
        with mpmath.workdps(40):
            truth = Fraction(*to_rational(((1 + mpmath.sqrt(2)) / 2)._mpf_))
        assert enc.contains(truth)


class TestPlaneWeights:
    def test_weighted_mean_matches_plane_census(self):
        for n in range(1, 8):
            assert weighted_onechild_mean(n) == census(PL, n).mean_one_child

    def test_single_vertex(self):
        assert weighted_onechild_mean(1) == 0

    def test_multiplicity_total_is_plane_count(self):
        counts = tree_counts(PL, 8)
        for n in range(1, 9):
            assert plane_multiplicity_total(n) == counts[n]


class TestInequalities:
    @pytest.mark.parametrize("variety", [NP, PL])
    def test_all_hold_small_sizes(self, variety):
        for n in range(1, 9):
            report = check_inequalities(variety, n)
            assert report.all_hold, [c.name for c in report.failures()]

    def test_check_names_present(self):
        report = check_inequalities(NP, 5)
        names = {c.name for c in report.checks}
        assert "expected-leaves>=n/4" in names
        assert "expected-one-child<=n/2" in names
        assert "sqrt-subtree-mean<=100-90/sqrt(n)" in names
        assert "root-one-child-ratio" in names
        assert "plane-mean-one-child<=nonplane" in names
        assert any(name.startswith("tail-Pr") for name in names)

    def test_plane_versus_nonplane_mean_n4(self):
        m4 = weighted_onechild_mean(4)
        M4 = census(NP, 4).mean_one_child
        assert m4 <= M4

    def test_root_ratio_decreasing(self):
        counts = tree_counts(NP, 10)
        ratios = [Fraction(counts[n - 1], counts[n]) for n in range(3, 11)]
        assert ratios[0] == Fraction(1, 2)
        assert all(a > b for a, b in zip(ratios, ratios[1:]))
