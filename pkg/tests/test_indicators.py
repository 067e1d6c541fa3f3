import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nmipf import MarginTargets, expected_hh, kl_divergence, liu_lu, liu_lu_generalized, odds_ratio
from nmipf.errors import (
    DegenerateMarginError,
    DimensionError,
    NegativeAssociationError,
    SupportError,
    ZeroCellError,
)
from nmipf.indicators import int_part
from nmipf.tables import AggregationCut

from oracles import aggregate_loops, kl_free_cell, liu_lu_loops


class TestOddsRatio:
    @pytest.mark.parametrize(
        "cells, expected",
        [([[500, 500], [100, 900]], 9.0), ([[4, 6], [6, 9]], 1.0), ([[1, 2], [3, 4]], 2 / 3)],
    )
    def test_examples(self, cells, expected):
        assert odds_ratio(cells) == pytest.approx(expected, rel=1e-15)

    def test_zero_cell(self):
        with pytest.raises(ZeroCellError):
            odds_ratio([[0, 1], [1, 1]])

    def test_not_2x2(self):
        with pytest.raises(DimensionError):
            odds_ratio(np.ones((3, 3)))

    @settings(max_examples=200, deadline=None)
    @given(
        st.lists(st.floats(0.01, 1e4), min_size=4, max_size=4),
        st.floats(0.01, 100),
        st.integers(0, 3),
    )
    def test_invariant_under_line_scaling(self, cells, k, which):
        z = np.array(cells).reshape(2, 2)
        s = z.copy()
        if which < 2:
            s[which] *= k
        else:
            s[:, which - 2] *= k
        assert odds_ratio(s) == pytest.approx(odds_ratio(z), rel=1e-12)


class TestExpectedHH:
    @pytest.mark.parametrize(
        "rows, cols, expected",
        [((1000, 1000), (600, 1400), 700), ((1200, 800), (600, 1400), 560), ((1, 1), (1, 1), 0)],
    )
    def test_examples(self, rows, cols, expected):
        assert expected_hh(MarginTargets(rows, cols)) == expected

    def test_floor_not_round(self):
        # R = 2 * 2 / 3 = 1.33 and R = 2 * 5 / 6 = 1.67 both give 1
        assert expected_hh(MarginTargets((1, 2), (1, 2))) == 1
        assert expected_hh(MarginTargets((4, 2), (1, 5))) == 1

    def test_int_part_snaps_rounding_noise(self):
        assert int_part(559.9999999999999) == 560
        assert int_part(559.5) == 559
        assert int_part(3.0) == 3


class TestLiuLu:
    def test_worked_source(self):
        v = liu_lu([[500, 500], [100, 900]])
        assert v.value == pytest.approx(2 / 3, abs=1e-15)
        assert (v.numerator, v.denominator, v.expected_hh) == (200, 300, 700)

    def test_worked_nm_output(self):
        v = liu_lu([[520, 680], [80, 720]])
        assert v.value == pytest.approx(2 / 3, abs=1e-15)
        assert (v.numerator, v.denominator, v.expected_hh) == (160, 240, 560)

    def test_independence_is_zero(self):
        assert liu_lu([[4, 6], [6, 9]]).value == 0.0

    def test_perfect_sorting_is_one(self):
        assert liu_lu([[5, 0], [2, 3]]).value == 1.0

    def test_negative_association(self):
        with pytest.raises(NegativeAssociationError):
            liu_lu([[1, 9], [9, 1]])

    def test_degenerate(self):
        # all mass in H,H: int(R) equals the maximum, so the range is empty
        with pytest.raises(DegenerateMarginError):
            liu_lu([[0, 0], [0, 5]])

    @settings(max_examples=300, deadline=None)
    @given(st.lists(st.integers(0, 60), min_size=4, max_size=4))
    def test_matches_loop_oracle_and_bounds(self, cells):
        a = [cells[:2], cells[2:]]
        if sum(cells) == 0:
            return
        try:
            v = liu_lu(a)
        except (NegativeAssociationError, DegenerateMarginError):
            return
        assert v.value == pytest.approx(liu_lu_loops(a), abs=1e-15)
        assert 0.0 <= v.value <= 1.0
        rh, ch = a[1][0] + a[1][1], a[0][1] + a[1][1]
        assert (v.value == 1.0) == (a[1][1] == min(rh, ch))
        assert (v.value == 0.0) == (a[1][1] == v.expected_hh)


class TestGeneralized:
    def test_2x2_equals_scalar(self):
        z = [[500, 500], [100, 900]]
        m = liu_lu_generalized(z)
        assert m.shape == (1, 1)
        assert m[0, 0] == liu_lu(z)
        assert m.as_array()[0, 0] == pytest.approx(2 / 3)

    def test_banded_3x3(self):
        z = np.full((3, 3), 1.0) + np.diag([2.0, 2.0, 2.0])
        m = liu_lu_generalized(z)
        expected = [[liu_lu_loops(aggregate_loops(z.tolist(), i, j)) for j in (1, 2)] for i in (1, 2)]
        # frozen from the loop oracle: every cut of this table gives 1/2
        np.testing.assert_allclose(expected, [[0.5, 0.5], [0.5, 0.5]])
        np.testing.assert_allclose(m.as_array(), expected, atol=1e-15)
        assert m[AggregationCut(2, 1)].value == pytest.approx(0.5)

    def test_error_carries_cut(self):
        z = [[1, 1, 9], [1, 5, 1], [9, 1, 1]]
        with pytest.raises(NegativeAssociationError) as info:
            liu_lu_generalized(z)
        assert info.value.cut is not None
        assert "cut" in str(info.value)

    def test_shape(self):
        z = np.ones((4, 3)) + np.eye(4, 3) * 5
        assert liu_lu_generalized(z).shape == (3, 2)


class TestKL:
    def test_identical(self):
        p = np.array([[0.1, 0.2], [0.3, 0.4]])
        assert kl_divergence(p, p) == 0.0

    def test_hand_value(self):
        p = [[0.5, 0], [0, 0.5]]
        q = [[0.25, 0.25], [0.25, 0.25]]
        assert kl_divergence(p, q) == pytest.approx(math.log(2), abs=1e-12)

    def test_normalize_flag(self):
        assert kl_divergence([[1, 0], [0, 1]], [[1, 1], [1, 1]], normalize=True) == pytest.approx(math.log(2))
        with pytest.raises(ValueError):
            kl_divergence([[1, 0], [0, 1]], [[1, 1], [1, 1]])

    def test_support_violation(self):
        with pytest.raises(SupportError):
            kl_divergence([[0.5, 0.5], [0, 0]], [[1.0, 0], [0, 0]])

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            kl_divergence(np.full((2, 2), 0.25), np.full((3, 3), 1 / 9))

    def test_gibbs_and_identity(self):
        rng = np.random.default_rng(7)
        for _ in range(500):
            p = rng.dirichlet(np.ones(6)).reshape(2, 3)
            q = rng.dirichlet(np.ones(6)).reshape(2, 3)
            assert kl_divergence(p, q) >= 0
            assert kl_divergence(p, p) == pytest.approx(0.0, abs=1e-15)
            assert kl_divergence(p, q) > 0

    def test_convex_in_free_cell(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            q = rng.dirichlet(np.ones(4)).reshape(2, 2)
            p = rng.dirichlet(np.ones(4)).reshape(2, 2)
            row_a, col_t, col_c = p[0].sum(), p[:, 0].sum(), p[:, 1].sum()
            _, kl = kl_free_cell(q, row_a, col_t, col_c)
            lo, hi = max(0.0, row_a - col_c), min(row_a, col_t)
            xs = np.linspace(lo, hi, 203)[1:-1]
            vals = np.array([kl(x) for x in xs])
            second = vals[:-2] - 2 * vals[1:-1] + vals[2:]
            assert np.all(second >= -1e-12)
