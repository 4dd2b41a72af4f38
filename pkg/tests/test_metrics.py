import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from figtab.metrics import (
    MatchResult,
    Tolerance,
    UndefinedMetric,
    best_column_rmsf1,
    recall,
    rmsf1,
    value_match,
)
from oracles import oracle_max_matching, oracle_rmsf1, random_matrix

TOL = Tolerance()


class TestValueMatch:
    def test_boundary_inclusive(self):
        assert value_match(10.5, 10.0, TOL) is True
        assert value_match(10.6, 10.0, TOL) is False

    def test_zero_ground_truth(self):
        assert value_match(0.0, 0.0, TOL) is True
        assert value_match(1e-10, 0.0, TOL) is True
        assert value_match(0.01, 0.0, TOL) is False

    def test_negative_values(self):
        assert value_match(-10.4, -10.0, TOL) is True
        assert value_match(-10.6, -10.0, TOL) is False
        assert value_match(10.0, -10.0, TOL) is False

    def test_invalid_tolerance(self):
        with pytest.raises(ValueError):
            Tolerance(relative=0.0)


class TestRecall:
    def test_mixed_match(self):
        # brute force over all one-to-one assignments gives max matching 2
        assert oracle_max_matching([10.3, 19.5, 100.0], [10.0, 20.0, 30.0], TOL) == 2
        assert recall([10.3, 19.5, 100.0], [10.0, 20.0, 30.0], TOL) == pytest.approx(2 / 3)

    def test_identity(self):
        assert recall([1.0, 2.0, 3.0], [1.0, 2.0, 3.0], TOL) == 1.0

    def test_duplicate_gt_consumed_once(self):
        assert oracle_max_matching([5.0], [5.0, 5.0], TOL) == 1
        assert recall([5.0], [5.0, 5.0], TOL) == 0.5

    def test_duplicate_pred_consumed_once(self):
        assert recall([5.0, 5.0], [5.0], TOL) == 1.0

    def test_empty_gt_undefined(self):
        with pytest.raises(UndefinedMetric):
            recall([1.0], [], TOL)

    def test_empty_pred(self):
        assert recall([], [1.0, 2.0], TOL) == 0.0

    def test_matches_oracle_on_random_multisets(self):
        rng = random.Random(20260811)
        for _ in range(300):
            pred = [rng.choice((1.0, 2.0, 3.0)) * (1 + rng.uniform(-0.02, 0.02))
                    for _ in range(rng.randint(0, 6))]
            gt = [rng.choice((1.0, 2.0, 3.0)) * (1 + rng.uniform(-0.02, 0.02))
                  for _ in range(rng.randint(1, 6))]
            assert recall(pred, gt, TOL) == oracle_max_matching(pred, gt, TOL) / len(gt)

    def test_monotone_in_added_gt_value(self):
        rng = random.Random(7)
        for _ in range(200):
            pred = [rng.choice((1.0, 2.0)) for _ in range(rng.randint(0, 5))]
            gt = [rng.choice((1.0, 2.0)) for _ in range(rng.randint(1, 5))]
            extra = rng.choice((1.0, 2.0, 9.0))
            before = recall(pred, gt, TOL) * len(gt)
            after = recall(pred, gt + [extra], TOL) * (len(gt) + 1)
            assert after - before in (0.0, 1.0)
            if after == before:  # unmatched addition cannot raise the rate
                assert after / (len(gt) + 1) <= before / len(gt) + 1e-12


class TestRmsf1:
    def test_identity_matrix(self):
        m = [[1.0, 2.0], [3.0, 4.0]]
        res = rmsf1(m, m, TOL)
        assert res.precision == res.recall == res.f1 == 1.0

    def test_column_permutation_invariant(self):
        pred = [[3.0, 4.0], [1.0, 2.0]]
        gt = [[1.0, 2.0], [3.0, 4.0]]
        assert rmsf1(pred, gt, TOL).f1 == 1.0

    def test_single_column_subset(self):
        res = rmsf1([[1.0, 2.0]], [[1.0, 2.0, 3.0]], TOL)
        assert res.precision == 1.0
        assert res.recall == pytest.approx(2 / 3)
        assert res.f1 == pytest.approx(0.8)

    def test_no_numeric_gt_undefined(self):
        with pytest.raises(UndefinedMetric):
            rmsf1([[1.0]], [[None, None]], TOL)

    def test_empty_pred_scores_zero(self):
        res = rmsf1([], [[1.0]], TOL)
        assert res.f1 == 0.0 and res.precision == 0.0 and res.recall == 0.0

    def test_non_numeric_cells_excluded(self):
        pred = [[1.0, None], [None, 2.0]]
        gt = [[1.0], [2.0]]
        res = rmsf1(pred, gt, TOL)
        assert res.precision == 1.0 and res.recall == 1.0

    def test_matched_pairs_are_one_to_one(self):
        rng = random.Random(3)
        for _ in range(100):
            pred, gt = random_matrix(rng), random_matrix(rng)
            if not any(v is not None for c in gt for v in c):
                continue
            res = rmsf1(pred, gt, TOL)
            left = [p for p, _ in res.matched_pairs]
            right = [g for _, g in res.matched_pairs]
            assert len(set(left)) == len(left)
            assert len(set(right)) == len(right)

    def test_oracle_equivalence_random(self):
        rng = random.Random(99)
        for _ in range(250):
            pred, gt = random_matrix(rng), random_matrix(rng)
            if not any(v is not None for c in gt for v in c):
                continue
            res = rmsf1(pred, gt, TOL)
            precision, rec, f1 = oracle_rmsf1(pred, gt, TOL)
            assert res.precision == precision
            assert res.recall == rec
            assert res.f1 == f1

    def test_recall_equals_rmsf1_recall_single_column(self):
        rng = random.Random(42)
        for _ in range(200):
            pred = [v for v in random_matrix(rng, max_cols=1)[0] if v is not None]
            gt = [v for v in random_matrix(rng, max_cols=1)[0] if v is not None]
            if not gt:
                continue
            assert recall(pred, gt, TOL) == rmsf1([pred], [gt], TOL).recall

    def test_row_consistent_variant_never_exceeds_default(self):
        rng = random.Random(15)
        for _ in range(150):
            pred, gt = random_matrix(rng), random_matrix(rng)
            if not any(v is not None for c in gt for v in c):
                continue
            loose = rmsf1(pred, gt, TOL)
            strict = rmsf1(pred, gt, TOL, row_consistent=True)
            assert strict.f1 <= loose.f1 + 1e-12

    def test_row_consistent_identity(self):
        m = [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0]]
        assert rmsf1(m, m, TOL, row_consistent=True).f1 == 1.0


@st.composite
def matrices(draw):
    n_cols = draw(st.integers(1, 4))
    n_rows = draw(st.integers(1, 4))
    cols = []
    for _ in range(n_cols):
        cols.append(
            draw(
                st.lists(
                    st.one_of(st.none(), st.sampled_from((1.0, 2.0, 3.0))),
                    min_size=n_rows,
                    max_size=n_rows,
                )
            )
        )
    return cols


class TestRmsf1Properties:
    @settings(max_examples=200, deadline=None)
    @given(matrices(), matrices(), st.randoms(use_true_random=False))
    def test_permutation_invariance(self, pred, gt, rng):
        if not any(v is not None for c in gt for v in c):
            return
        base = rmsf1(pred, gt, TOL).f1
        shuffled_cols = list(pred)
        rng.shuffle(shuffled_cols)
        permuted = []
        for col in shuffled_cols:
            col = list(col)
            rng.shuffle(col)
            permuted.append(col)
        assert rmsf1(permuted, gt, TOL).f1 == base

    @settings(max_examples=200, deadline=None)
    @given(matrices(), matrices())
    def test_f1_bounds(self, pred, gt):
        if not any(v is not None for c in gt for v in c):
            return
        res = rmsf1(pred, gt, TOL)
        assert 0.0 <= res.f1 <= 1.0
        assert (res.f1 == 0.0) == (len(res.matched_pairs) == 0)


class TestBestColumn:
    def test_picks_best_column(self):
        pred = [[2020.0, 2021.0, 2022.0], [5.0, 7.0, 9.0]]
        gt = [5.0, 7.0, 9.0]
        res = best_column_rmsf1(pred, gt, TOL)
        assert res.f1 == 1.0

    def test_single_column_equals_rmsf1(self):
        pred = [[5.0, 7.0]]
        gt = [5.0, 7.0, 11.0]
        assert best_column_rmsf1(pred, gt, TOL).f1 == rmsf1(pred, [gt], TOL).f1

    def test_disjoint_values_zero(self):
        res = best_column_rmsf1([[1.0], [2.0]], [50.0], TOL)
        assert res.f1 == 0.0

    def test_equals_max_over_columns(self):
        rng = random.Random(31)
        for _ in range(200):
            pred = random_matrix(rng)
            gt = [v for v in random_matrix(rng, max_cols=1)[0]]
            if not any(v is not None for v in gt):
                continue
            best = best_column_rmsf1(pred, gt, TOL)
            per_col = [rmsf1([c], [gt], TOL).f1 for c in pred]
            assert best.f1 == max(per_col)

    def test_empty_series_undefined(self):
        with pytest.raises(UndefinedMetric):
            best_column_rmsf1([[1.0]], [None], TOL)

    def test_no_columns_rejected(self):
        with pytest.raises(ValueError):
            best_column_rmsf1([], [1.0], TOL)
