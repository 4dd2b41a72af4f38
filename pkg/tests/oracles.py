"""Brute-force reference implementations used to validate the metrics.

Everything here enumerates exhaustively and stays independent of the
production code paths it checks. Only usable for small inputs.
"""

from __future__ import annotations

import itertools
import random
from typing import Optional, Sequence

from figtab.metrics import Tolerance, value_match

Column = Sequence[Optional[float]]
Matrix = Sequence[Column]


def oracle_max_matching(
    pred_values: Sequence[float],
    gt_values: Sequence[float],
    tol: Tolerance,
) -> int:
    """Maximum one-to-one match count by trying every pairing."""

    def best(i: int, used: tuple[bool, ...]) -> int:
        if i == len(pred_values):
            return 0
        top = best(i + 1, used)  # leave pred i unmatched
        for j, gv in enumerate(gt_values):
            if used[j] or not value_match(pred_values[i], gv, tol):
                continue
            marked = used[:j] + (True,) + used[j + 1 :]
            top = max(top, 1 + best(i + 1, marked))
        return top

    return best(0, tuple(False for _ in gt_values))


def _numeric(col: Column) -> list[float]:
    return [v for v in col if v is not None]


def oracle_pair_score(pred_col: Column, gt_col: Column, tol: Tolerance) -> int:
    return oracle_max_matching(_numeric(pred_col), _numeric(gt_col), tol)


def oracle_rmsf1(
    pred: Matrix, gt: Matrix, tol: Tolerance
) -> tuple[float, float, float]:
    """(precision, recall, f1) by enumerating every column assignment."""
    pred_n = sum(len(_numeric(c)) for c in pred)
    gt_n = sum(len(_numeric(c)) for c in gt)
    assert gt_n > 0, "oracle caller must ensure nonempty ground truth"

    scores = [[oracle_pair_score(pc, gc, tol) for gc in gt] for pc in pred]
    best = 0
    np_, ng = len(pred), len(gt)
    if np_ and ng:
        if np_ <= ng:
            for combo in itertools.permutations(range(ng), np_):
                best = max(best, sum(scores[i][j] for i, j in enumerate(combo)))
        else:
            for combo in itertools.permutations(range(np_), ng):
                best = max(best, sum(scores[i][j] for j, i in enumerate(combo)))

    precision = best / pred_n if pred_n else 0.0
    rec = best / gt_n
    f1 = 0.0 if precision + rec == 0 else 2 * precision * rec / (precision + rec)
    return precision, rec, f1


def random_matrix(
    rng: random.Random,
    max_cols: int = 5,
    max_rows: int = 5,
    none_prob: float = 0.15,
) -> list[list[Optional[float]]]:
    """Random column-major matrix tuned so ~50% of value pairs match.

    Values come from a two-symbol alphabet {1, 2} with sub-tolerance
    jitter: same-symbol pairs always match at 5% relative tolerance,
    cross-symbol pairs never do, so any (pred, gt) cell pair matches
    with probability one half.
    """
    n_cols = rng.randint(1, max_cols)
    n_rows = rng.randint(1, max_rows)
    matrix: list[list[Optional[float]]] = []
    for _ in range(n_cols):
        col: list[Optional[float]] = []
        for _ in range(n_rows):
            if rng.random() < none_prob:
                col.append(None)
            else:
                base = rng.choice((1.0, 2.0))
                col.append(base * (1.0 + rng.uniform(-0.02, 0.02)))
        matrix.append(col)
    return matrix
