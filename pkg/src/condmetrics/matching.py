"""Alignment of discovered (unlabelled-condition) classes to real classes.

The assignment maximizes the total average prediction probability.  The core
solver is scipy's linear_sum_assignment run as min-cost on the complemented
matrix (max(value) - value); ties between equally scoring permutations are
broken toward the lexicographically smallest mapping so repeated runs agree.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidInputError
from .metrics import as_label_vector, as_probability_matrix, class_index_lists


@dataclass(frozen=True)
class ClassAssignment:
    """mapping[c] = real class paired with conditioned class c; score = total value."""

    mapping: np.ndarray
    score: float

    def __post_init__(self):
        mapping = np.asarray(self.mapping, dtype=np.int64)
        if mapping.ndim != 1 or sorted(mapping.tolist()) != list(range(mapping.size)):
            raise InvalidInputError("mapping must be a permutation of [0, K)")
        object.__setattr__(self, "mapping", mapping)


def average_class_probabilities(probs, conds) -> np.ndarray:
    """K x K matrix: row c = mean prediction distribution of conditioned class c."""
    p = as_probability_matrix(probs)
    k = p.shape[1]
    y = as_label_vector(conds, k, n=p.shape[0])
    idx = class_index_lists(y, k, min_count=1, side="conditioned")
    return np.stack([p[i].mean(axis=0) for i in idx])


def _assignment_score(value: np.ndarray, mapping: np.ndarray) -> float:
    return float(value[np.arange(value.shape[0]), mapping].sum())


def _solve_max(value: np.ndarray) -> np.ndarray:
    cost = float(value.max()) - value
    _, cols = linear_sum_assignment(cost)
    return cols


def _lex_smallest_optimal(value: np.ndarray, best: float) -> np.ndarray:
    """Lexicographically smallest mapping attaining the optimal score.

    Fixes one row at a time to its smallest feasible column, re-solving the
    remaining subproblem to confirm the optimum is still reachable.
    """
    k = value.shape[0]
    tol = 1e-9 * (1.0 + abs(best))
    available = list(range(k))
    mapping = np.empty(k, dtype=np.int64)
    prefix = 0.0
    for row in range(k):
        rest_rows = list(range(row + 1, k))
        for col in available:
            candidate = prefix + float(value[row, col])
            if rest_rows:
                rest_cols = [c for c in available if c != col]
                sub = value[np.ix_(rest_rows, rest_cols)]
                candidate += _assignment_score(sub, _solve_max(sub))
            if candidate >= best - tol:
                mapping[row] = col
                prefix += float(value[row, col])
                available.remove(col)
                break
        else:  # pragma: no cover - unreachable: the optimum is always feasible
            raise AssertionError("no feasible column reaches the optimal score")
    return mapping


def hungarian_max(value) -> ClassAssignment:
    """Optimal (not greedy) assignment maximizing the total selected value."""
    v = np.asarray(value, dtype=np.float64)
    if v.ndim != 2 or v.shape[0] != v.shape[1]:
        raise InvalidInputError(f"value matrix must be square, got shape {v.shape}")
    if v.size == 0:
        raise InvalidInputError("value matrix is empty")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError("value matrix contains non-finite entries")
    best = _assignment_score(v, _solve_max(v))
    mapping = _lex_smallest_optimal(v, best)
    return ClassAssignment(mapping=mapping, score=_assignment_score(v, mapping))


def align_discovered(probs, conds) -> ClassAssignment:
    """Pair conditioned classes with real classes via average prediction mass."""
    return hungarian_max(average_class_probabilities(probs, conds))
