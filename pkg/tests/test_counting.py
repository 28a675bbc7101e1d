"""Root-rank dynamic program and the recurrence-driven count sequences."""

import io
from fractions import Fraction

import pytest

from treerank.counting import (
    joint_vertex_counts,
    rank_vertex_counts,
    root_rank_counts,
    size_vertex_counts,
)
from treerank.enumeration import census
from treerank.series import EgfSeries, base_series, tree_counts
from treerank.variety import TreeVariety

NP = TreeVariety.NONPLANE
PL = TreeVariety.PLANE


class TestRootRankTable:
    def test_small_nonplane_entries(self):
        table = root_rank_counts(NP, 8)
        assert table.count(0, 1) == 1
        assert table.count(0, 2) == 0
        assert table.count(1, 2) == 1
        assert table.count(1, 3) == 1
        assert table.count(1, 4) == 3
        assert table.count(5, 4) == 0  # rank needs a leaf path below the root

    @pytest.mark.parametrize("variety", [NP, PL])
    def test_row_sums_are_tree_counts(self, variety):
        table = root_rank_counts(variety, 14)
        counts = tree_counts(variety, 14)
        for i in range(1, 15):
            assert table.row_sum(i) == counts[i]

    @pytest.mark.parametrize("variety", [NP, PL])
    def test_matches_census_root_ranks(self, variety):
        table = root_rank_counts(variety, 8)
        for n in range(1, 8):
            cen = census(variety, n)
            for k in range(n):
                assert table.count(k, n) == cen.root_rank_counts[k]

    def test_rank_one_correction_closed_form(self):
        # d/dz sum_i t[1][i] z^i/i!  must equal  z E(z) - z^2/2.
        order = 20
        table = root_rank_counts(NP, order)
        got = table.correction_series(1, order).derivative()
        e = base_series(NP, order)
        z_e = EgfSeries([Fraction(0)] + list(e.coeffs[:-1]))
        expected = (z_e - EgfSeries.monomial(2, order, Fraction(1, 2))).truncate(order - 1)
        assert got == expected

    def test_with_entry_breaks_row_sum(self):
        table = root_rank_counts(NP, 6)
        broken = table.with_entry(1, 3, 999)
        assert broken.row_sum(3) != tree_counts(NP, 6)[3]

    def test_validation(self):
        table = root_rank_counts(NP, 6)
        with pytest.raises(ValueError):
            table.count(-1, 3)
        with pytest.raises(ValueError):
            table.count(0, 0)
        with pytest.raises(ValueError):
            table.count(0, 7)


class TestCountSequences:
    def test_nonplane_rank_zero(self):
        seq = rank_vertex_counts(NP, 0, 6)
        assert list(seq.counts) == [0, 1, 1, 3, 9, 35, 155]

    def test_nonplane_rank_one(self):
        seq = rank_vertex_counts(NP, 1, 6)
        assert list(seq.counts) == [0, 0, 1, 2, 8, 30, 135]

    def test_plane_rank_tables(self):
        k0 = rank_vertex_counts(PL, 0, 10)
        assert list(k0.counts) == [0, 1, 1, 5, 17, 93, 513, 3477, 25569, 212733, 1929393]
        k1 = rank_vertex_counts(PL, 1, 10)
        assert list(k1.counts) == [0, 0, 1, 3, 15, 75, 435, 2883, 21447, 177435, 1613835]

    def test_leaf_identity_through_order(self):
        order = 40
        seq = rank_vertex_counts(NP, 0, order)
        e = tree_counts(NP, order + 1)
        for n in range(order):
            assert seq.counts[n] == (n + 1) * e[n] - e[n + 1]

    def test_size_probabilities_n3(self):
        assert size_vertex_counts(NP, 1, 3).prob(3) == Fraction(1, 2)
        assert size_vertex_counts(NP, 2, 3).prob(3) == Fraction(1, 6)
        assert size_vertex_counts(NP, 3, 3).prob(3) == Fraction(1, 3)

    def test_size_one_equals_rank_zero(self):
        for variety in (NP, PL):
            assert size_vertex_counts(variety, 1, 12).counts == \
                rank_vertex_counts(variety, 0, 12).counts

    def test_joint_degenerate_cases(self):
        for variety in (NP, PL):
            assert joint_vertex_counts(variety, 0, 1, 10).counts == \
                size_vertex_counts(variety, 1, 10).counts
            assert all(c == 0 for c in joint_vertex_counts(variety, 0, 2, 10).counts)

    @pytest.mark.parametrize("variety", [NP, PL])
    def test_census_equivalence(self, variety):
        table = root_rank_counts(variety, 7)
        for n in range(1, 8):
            cen = census(variety, n)
            for k in range(n):
                assert rank_vertex_counts(variety, k, n, table).counts[n] == \
                    cen.rank_totals[k]
            for r in range(1, n + 1):
                assert size_vertex_counts(variety, r, n).counts[n] == cen.size_totals[r]
                for k in range(r):
                    assert joint_vertex_counts(variety, k, r, n, table).counts[n] == \
                        cen.joint_totals.get((k, r), 0)

    @pytest.mark.parametrize("variety", [NP, PL])
    def test_joint_marginals(self, variety):
        order = 10
        table = root_rank_counts(variety, order)
        for k in (0, 1, 2):
            rank_seq = rank_vertex_counts(variety, k, order, table)
            sums = [0] * (order + 1)
            for i in range(1, order + 1):
                joint = joint_vertex_counts(variety, k, i, order, table)
                for n in range(order + 1):
                    sums[n] += joint.counts[n]
            assert sums == list(rank_seq.counts)
        for r in (1, 2, 3):
            size_seq = size_vertex_counts(variety, r, order)
            sums = [0] * (order + 1)
            for k in range(r):
                joint = joint_vertex_counts(variety, k, r, order, table)
                for n in range(order + 1):
                    sums[n] += joint.counts[n]
            assert sums == list(size_seq.counts)

    def test_probability_normalizations(self):
        seq = rank_vertex_counts(NP, 0, 6)
        assert seq.prob(6) == Fraction(155, 6 * 61)
        assert seq.prob_next(6) == Fraction(155, 7 * 61)
        with pytest.raises(ValueError):
            seq.prob(0)

    @pytest.mark.parametrize("variety", [NP, PL])
    def test_probabilities_partition_unity(self, variety):
        order = 9
        table = root_rank_counts(variety, order)
        for n in (1, 4, 7, 9):
            by_rank = [rank_vertex_counts(variety, k, order, table).prob(n)
                       for k in range(n)]
            by_size = [size_vertex_counts(variety, r, order).prob(n)
                       for r in range(1, n + 1)]
            assert all(0 <= p <= 1 for p in by_rank + by_size)
            assert sum(by_rank) == 1
            assert sum(by_size) == 1

    def test_validation(self):
        with pytest.raises(ValueError):
            rank_vertex_counts(NP, -1, 5)
        with pytest.raises(ValueError):
            size_vertex_counts(NP, 0, 5)
        with pytest.raises(ValueError):
            joint_vertex_counts(NP, 0, 0, 5)


class TestCsvExport:
    def test_schema_and_zero_row(self):
        seq = rank_vertex_counts(NP, 0, 4)
        rows = seq.csv_rows(digits=6)
        assert rows[0] == ["n", "count", "prob_numerator", "prob_denominator", "prob_decimal"]
        assert rows[1] == ["0", "0", "", "", ""]
        assert rows[4] == ["3", "3", "1", "2", "0.500000"]

    def test_write_csv(self):
        buffer = io.StringIO()
        rank_vertex_counts(NP, 0, 3).write_csv(buffer, digits=4)
        lines = buffer.getvalue().strip().split("\n")
        assert lines[0] == "n,count,prob_numerator,prob_denominator,prob_decimal"
        assert lines[-1] == "3,3,1,2,0.5000"
