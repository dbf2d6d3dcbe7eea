import itertools

import numpy as np
import pytest

from condmetrics import (
    InvalidInputError,
    align_discovered,
    average_class_probabilities,
    hungarian_max,
)
from condmetrics.synth import dirichlet_rows, rng_for


def brute_force_max(value):
    k = value.shape[0]
    best_score, best_perm = -np.inf, None
    for perm in itertools.permutations(range(k)):
        score = float(value[np.arange(k), list(perm)].sum())
        if score > best_score:
            best_score, best_perm = score, perm
    return best_score, best_perm


class TestAverageClassProbabilities:
    def test_one_hot_per_class_is_identity(self):
        probs = np.eye(3)
        conds = np.arange(3)
        assert np.allclose(average_class_probabilities(probs, conds), np.eye(3))

    def test_two_rows_average(self):
        probs = np.array([[1.0, 0.0], [0.0, 1.0], [0.0, 1.0]])
        conds = np.array([0, 0, 1])
        avg = average_class_probabilities(probs, conds)
        assert np.allclose(avg[0], [0.5, 0.5])
        assert np.allclose(avg[1], [0.0, 1.0])

    def test_rows_sum_to_one(self):
        probs = dirichlet_rows([0.7, 1.3, 2.0], 60, seed=1)
        conds = rng_for(2).integers(0, 3, 60).astype(np.int64)
        conds[:3] = [0, 1, 2]
        avg = average_class_probabilities(probs, conds)
        assert np.allclose(avg.sum(axis=1), 1.0, atol=1e-6)
        for c in range(3):
            assert np.allclose(avg[c], probs[conds == c].mean(axis=0), atol=1e-12)

    def test_empty_conditioned_class_rejected(self):
        probs = np.full((2, 3), 1.0 / 3.0)
        with pytest.raises(InvalidInputError, match="class 1"):
            average_class_probabilities(probs, np.array([0, 2]))


class TestHungarianMax:
    def test_identity_matrix(self):
        result = hungarian_max(np.eye(4))
        assert np.array_equal(result.mapping, np.arange(4))
        assert result.score == 4.0

    def test_anti_diagonal(self):
        result = hungarian_max(np.fliplr(np.eye(5)))
        assert np.array_equal(result.mapping, np.arange(5)[::-1])
        assert result.score == 5.0

    def test_matches_brute_force_on_seeded_matrices(self):
        for seed in range(100):
            value = rng_for(4000 + seed).uniform(0.0, 1.0, (4, 4))
            result = hungarian_max(value)
            best_score, _ = brute_force_max(value)
            assert result.score == best_score

    def test_constant_tie_breaks_lexicographically(self):
        result = hungarian_max(np.ones((4, 4)))
        assert np.array_equal(result.mapping, np.arange(4))

    def test_row_and_column_shifts_preserve_argmax(self):
        for seed in range(20):
            rng = rng_for(600 + seed)
            value = rng.uniform(0.0, 1.0, (5, 5))
            base = hungarian_max(value).mapping
            shifted = value + rng.uniform(-3, 3, (5, 1))  # per-row constants
            shifted = shifted + rng.uniform(-3, 3, (1, 5))  # per-column constants
            assert np.array_equal(hungarian_max(shifted).mapping, base)

    def test_rejects_bad_input(self):
        with pytest.raises(InvalidInputError):
            hungarian_max(np.zeros((2, 3)))
        with pytest.raises(InvalidInputError):
            hungarian_max(np.array([[np.inf, 0.0], [0.0, 1.0]]))


class TestAlignDiscovered:
    @staticmethod
    def _clustered(k, shift, noise, seed, n_per_class=40):
        # cluster c predicts class (c + shift) % k with 1-noise of the mass
        rng = rng_for(seed)
        rows, conds = [], []
        for c in range(k):
            target = (c + shift) % k
            for _ in range(n_per_class):
                row = rng.uniform(0.0, noise, k)
                row[target] += 1.0
                rows.append(row / row.sum())
                conds.append(c)
        return np.asarray(rows), np.asarray(conds, dtype=np.int64)

    def test_identity_clusters(self):
        probs, conds = self._clustered(4, shift=0, noise=0.0, seed=1)
        assert np.array_equal(align_discovered(probs, conds).mapping, np.arange(4))

    def test_shifted_clusters_recover_cycle(self):
        k = 5
        probs, conds = self._clustered(k, shift=1, noise=0.0, seed=2)
        assert np.array_equal(
            align_discovered(probs, conds).mapping, (np.arange(k) + 1) % k)

    def test_noisy_clusters_match_brute_force(self):
        for k in range(2, 7):
            probs, conds = self._clustered(k, shift=k // 2, noise=0.25, seed=30 + k)
            result = align_discovered(probs, conds)
            value = average_class_probabilities(probs, conds)
            best_score, best_perm = brute_force_max(value)
            assert result.score == best_score
            assert np.array_equal(result.mapping, (np.arange(k) + k // 2) % k)
            assert np.array_equal(result.mapping, np.asarray(best_perm))
