"""Bipartite matching and assignment solvers used by the table metrics.

Both solvers are exact. Greedy matching is deliberately absent: the
metrics are defined in terms of optimal matchings, and a greedy
substitute breaks their equivalence with brute-force enumeration.
"""

from __future__ import annotations

from typing import Callable, Sequence

_INF = float("inf")


def max_bipartite_matching(
    n_left: int,
    n_right: int,
    has_edge: Callable[[int, int], bool],
) -> list[tuple[int, int]]:
    """Maximum-cardinality matching via Kuhn's augmenting paths.

    Returns matched (left, right) index pairs, sorted by left index.
    Deterministic: augmenting always scans right vertices in ascending
    order, so equal-cardinality solutions resolve the same way.
    """
    adj: list[list[int]] = [
        [j for j in range(n_right) if has_edge(i, j)] for i in range(n_left)
    ]
    match_right = [-1] * n_right

    def try_augment(i: int, seen: list[bool]) -> bool:
        for j in adj[i]:
            if seen[j]:
                continue
            seen[j] = True
            if match_right[j] == -1 or try_augment(match_right[j], seen):
                match_right[j] = i
                return True
        return False

    for i in range(n_left):
        try_augment(i, [False] * n_right)

    pairs = [(i, j) for j, i in enumerate(match_right) if i != -1]
    pairs.sort()
    return pairs


def _hungarian(cost: Sequence[Sequence[float]]) -> list[int]:
    """Minimum-cost assignment for an n x m cost matrix with n <= m.

    Classic potentials formulation, O(n^2 m). Returns row_for_col where
    row_for_col[j] is the assigned row for column j, or -1.
    """
    n = len(cost)
    m = len(cost[0])
    u = [0.0] * (n + 1)
    v = [0.0] * (m + 1)
    p = [0] * (m + 1)  # p[j] = row (1-based) assigned to column j
    way = [0] * (m + 1)
    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = [_INF] * (m + 1)
        used = [False] * (m + 1)
        while True:
            used[j0] = True
            i0 = p[j0]
            delta = _INF
            j1 = 0
            row = cost[i0 - 1]
            for j in range(1, m + 1):
                if used[j]:
                    continue
                cur = row[j - 1] - u[i0] - v[j]
                if cur < minv[j]:
                    minv[j] = cur
                    way[j] = j0
                if minv[j] < delta:
                    delta = minv[j]
                    j1 = j
            for j in range(m + 1):
                if used[j]:
                    u[p[j]] += delta
                    v[j] -= delta
                else:
                    minv[j] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1
    row_for_col = [-1] * m
    for j in range(1, m + 1):
        if p[j] != 0:
            row_for_col[j - 1] = p[j] - 1
    return row_for_col


def max_weight_assignment(
    scores: Sequence[Sequence[float]],
) -> tuple[float, list[tuple[int, int]]]:
    """Maximum-total-weight one-to-one assignment (Hungarian method).

    ``scores`` is rectangular (rows x cols, weights >= 0). Returns the
    optimal total and the assigned (row, col) pairs. Zero-weight pairs
    are left unassigned, and ties between equally optimal assignments
    are broken toward the lowest column index per row, in row order.
    """
    n_rows = len(scores)
    n_cols = len(scores[0]) if n_rows else 0
    if n_rows == 0 or n_cols == 0:
        return 0.0, []

    def solve_value(rows: list[int], cols: list[int]) -> float:
        if not rows or not cols:
            return 0.0
        # maximize by negating; pad so the row side is the smaller one
        if len(rows) <= len(cols):
            cost = [[-scores[i][j] for j in cols] for i in rows]
        else:
            cost = [[-scores[i][j] for i in rows] for j in cols]
        assigned = _hungarian(cost)
        total = 0.0
        for cj, ri in enumerate(assigned):
            if ri != -1:
                total -= cost[ri][cj]
        return total

    all_rows = list(range(n_rows))
    all_cols = list(range(n_cols))
    best_total = solve_value(all_rows, all_cols)

    # Lexicographic refinement: commit each row in order to the lowest
    # column that still allows the optimal total. Scores here are small
    # integer match counts, so the equality test below is exact.
    pairs: list[tuple[int, int]] = []
    committed = 0.0
    free_cols = all_cols[:]
    remaining_rows = all_rows[:]
    for i in all_rows:
        remaining_rows.remove(i)
        chosen = -1
        for j in free_cols:
            if scores[i][j] <= 0:
                continue
            rest = solve_value(remaining_rows, [c for c in free_cols if c != j])
            if committed + scores[i][j] + rest == best_total:
                chosen = j
                break
        if chosen == -1:
            continue
        committed += scores[i][chosen]
        free_cols.remove(chosen)
        pairs.append((i, chosen))
    return best_total, pairs
