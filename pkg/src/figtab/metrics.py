"""Chart-extraction accuracy metrics.

Two scores over numeric cell values:

* ``recall`` -- fraction of ground-truth values recovered, matching
  values one-to-one under a relative tolerance (5% by default).
* ``rmsf1`` -- F1 over numeric cells where predicted columns are put in
  optimal one-to-one correspondence with ground-truth columns, so column
  (and row) order never affects the score.

``best_column_rmsf1`` covers single-series ground truth: score every
predicted column on its own and keep the best.

Matrices are column-major: a list of columns, each a list of cell values
where ``None`` marks a non-numeric cell. Non-numeric cells are excluded
from every numerator and denominator.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .assignment import max_bipartite_matching, max_weight_assignment

Column = Sequence[Optional[float]]
Matrix = Sequence[Column]


class UndefinedMetric(ValueError):
    """Raised when a score has no defined value (e.g. empty ground truth)."""


@dataclass(frozen=True)
class Tolerance:
    """Relative matching tolerance with an absolute fallback at zero.

    A prediction matches ground truth g != 0 when |pred - g| <= relative * |g|
    (boundary inclusive). Relative tolerance is undefined at g = 0, so a
    ground-truth zero matches only |pred| <= zero_epsilon.
    """

    relative: float = 0.05
    zero_epsilon: float = 1e-9

    def __post_init__(self) -> None:
        if self.relative <= 0:
            raise ValueError("relative tolerance must be > 0")


@dataclass
class MatchResult:
    matched_pairs: list[tuple[tuple[int, int], tuple[int, int]]] = field(default_factory=list)
    precision: float = 0.0
    recall: float = 0.0
    f1: float = 0.0


def value_match(pred: float, gt: float, tol: Tolerance) -> bool:
    if gt == 0:
        return abs(pred) <= tol.zero_epsilon
    return abs(pred - gt) <= tol.relative * abs(gt)


def _f1(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def recall(
    pred_values: Sequence[float],
    gt_values: Sequence[float],
    tol: Tolerance = Tolerance(),
) -> float:
    """Recovered fraction of ground-truth values under one-to-one matching.

    Both arguments are multisets: each predicted value can account for at
    most one ground-truth value and vice versa.
    """
    if not gt_values:
        raise UndefinedMetric("recall undefined for empty ground truth")
    pairs = max_bipartite_matching(
        len(pred_values),
        len(gt_values),
        lambda i, j: value_match(pred_values[i], gt_values[j], tol),
    )
    return len(pairs) / len(gt_values)


def _numeric_entries(col: Column) -> list[tuple[int, float]]:
    return [(r, v) for r, v in enumerate(col) if v is not None]


def _column_pair_matching(
    pred_col: Column, gt_col: Column, tol: Tolerance
) -> list[tuple[int, int]]:
    """Max-cardinality row matching within one column pair.

    Returns (pred_row, gt_row) pairs over the original row indices.
    """
    pred = _numeric_entries(pred_col)
    gt = _numeric_entries(gt_col)
    pairs = max_bipartite_matching(
        len(pred), len(gt), lambda i, j: value_match(pred[i][1], gt[j][1], tol)
    )
    return [(pred[i][0], gt[j][0]) for i, j in pairs]


def _count_numeric(matrix: Matrix) -> int:
    return sum(1 for col in matrix for v in col if v is not None)


def rmsf1(
    pred: Matrix,
    gt: Matrix,
    tol: Tolerance = Tolerance(),
    row_consistent: bool = False,
) -> MatchResult:
    """Permutation-invariant F1 between two numeric matrices.

    Predicted columns are assigned one-to-one to ground-truth columns by
    the assignment maximizing total matched cells, where each column
    pair's score is its own max-cardinality value matching. Matched
    pairs are reported as ((pred_col, pred_row), (gt_col, gt_row)).

    ``row_consistent`` switches to the stricter whole-row variant: after
    the same column assignment, a single row correspondence is chosen
    (again optimally) and a cell only counts when its row partner agrees
    across all assigned columns. Off by default; the per-column variant
    is the metric used everywhere else in this package.
    """
    gt_n = _count_numeric(gt)
    if gt_n == 0:
        raise UndefinedMetric("rmsf1 undefined: ground truth has no numeric cells")
    pred_n = _count_numeric(pred)

    if pred_n == 0:
        return MatchResult([], 0.0, 0.0, 0.0)

    scores = [
        [len(_column_pair_matching(pc, gc, tol)) for gc in gt] for pc in pred
    ]
    _, col_pairs = max_weight_assignment(scores)

    matched_pairs: list[tuple[tuple[int, int], tuple[int, int]]] = []
    if row_consistent:
        matched_pairs = _row_consistent_pairs(pred, gt, col_pairs, tol)
    else:
        for ci, cj in col_pairs:
            for rp, rg in _column_pair_matching(pred[ci], gt[cj], tol):
                matched_pairs.append(((ci, rp), (cj, rg)))

    matched = len(matched_pairs)
    precision = matched / pred_n
    rec = matched / gt_n
    return MatchResult(matched_pairs, precision, rec, _f1(precision, rec))


def _row_consistent_pairs(
    pred: Matrix,
    gt: Matrix,
    col_pairs: list[tuple[int, int]],
    tol: Tolerance,
) -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Single row correspondence shared by all assigned column pairs."""
    n_pred_rows = max((len(c) for c in pred), default=0)
    n_gt_rows = max((len(c) for c in gt), default=0)
    if n_pred_rows == 0 or n_gt_rows == 0 or not col_pairs:
        return []

    def row_score(rp: int, rg: int) -> int:
        count = 0
        for ci, cj in col_pairs:
            pv = pred[ci][rp] if rp < len(pred[ci]) else None
            gv = gt[cj][rg] if rg < len(gt[cj]) else None
            if pv is not None and gv is not None and value_match(pv, gv, tol):
                count += 1
        return count

    scores = [[row_score(rp, rg) for rg in range(n_gt_rows)] for rp in range(n_pred_rows)]
    _, row_pairs = max_weight_assignment(scores)
    pairs: list[tuple[tuple[int, int], tuple[int, int]]] = []
    for rp, rg in row_pairs:
        for ci, cj in col_pairs:
            pv = pred[ci][rp] if rp < len(pred[ci]) else None
            gv = gt[cj][rg] if rg < len(gt[cj]) else None
            if pv is not None and gv is not None and value_match(pv, gv, tol):
                pairs.append(((ci, rp), (cj, rg)))
    return pairs


def best_column_rmsf1(
    pred: Matrix,
    gt_series: Sequence[Optional[float]],
    tol: Tolerance = Tolerance(),
) -> MatchResult:
    """Best single-column score against a one-series ground truth.

    Scores each predicted column as a 1-column matrix against the series
    and returns the maximum-f1 result (lowest column index on ties).
    """
    if not pred:
        raise ValueError("best_column_rmsf1 requires at least one predicted column")
    if not any(v is not None for v in gt_series):
        raise UndefinedMetric("best_column_rmsf1 undefined: empty ground-truth series")
    best: MatchResult | None = None
    for col in pred:
        result = rmsf1([col], [gt_series], tol)
        if best is None or result.f1 > best.f1:
            best = result
    assert best is not None
    return best
