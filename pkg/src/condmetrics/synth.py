"""Seeded synthetic datasets: Gaussian mixtures, analytic counterexamples,
label noising, and staged mode collapse.

All randomness flows from one explicit 64-bit seed through numpy's PCG64.
Independent pieces (collapse steps, sweep points) draw from
``SeedSequence(seed, spawn_key=(index,))`` so they are reproducible and
order-independent.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError
from .gaussian import EIG_TOL
from .metrics import ClassConditionalStats, class_conditional_from_moments

TWO_PI = 2.0 * math.pi


def rng_for(seed: int, *key: int) -> np.random.Generator:
    """PCG64 generator for (seed, key...); the documented derivation rule."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(x) for x in key))
    return np.random.default_rng(ss)


# ---------------------------------------------------------------------------
# Gaussian mixtures


@dataclass(frozen=True)
class MixtureSpec:
    """Per-class means, covariances (diagonal vectors accepted), and counts."""

    means: np.ndarray
    covs: np.ndarray
    counts: np.ndarray
    seed: int = 0

    def __post_init__(self):
        means = np.atleast_2d(np.asarray(self.means, dtype=np.float64))
        k, d = means.shape
        covs_in = [np.asarray(c, dtype=np.float64) for c in self.covs]
        if len(covs_in) != k:
            raise InvalidInputError(f"expected {k} covariances, got {len(covs_in)}")
        covs = np.empty((k, d, d))
        for c, cov in enumerate(covs_in):
            if cov.ndim == 1:
                if cov.size != d:
                    raise InvalidInputError(f"diagonal covariance {c} has wrong length")
                cov = np.diag(cov)
            if cov.shape != (d, d):
                raise InvalidInputError(f"covariance {c} has shape {cov.shape}, expected ({d}, {d})")
            cov = 0.5 * (cov + cov.T)
            w = np.linalg.eigvalsh(cov)
            if float(w[0]) < -EIG_TOL * max(1.0, float(np.abs(w).max())):
                raise InvalidInputError(f"covariance {c} is not PSD")
            covs[c] = cov
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (k,) or np.any(counts < 2):
            raise InvalidInputError("each class needs a sample count >= 2")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "covs", covs)
        object.__setattr__(self, "counts", counts)

    @property
    def k(self) -> int:
        return self.means.shape[0]

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    def population_stats(self, weighting_counts: bool = True) -> ClassConditionalStats:
        """Analytic class-conditional statistics of the mixture."""
        priors = self.counts / self.counts.sum() if weighting_counts else (
            np.full(self.k, 1.0 / self.k))
        return class_conditional_from_moments(self.means, self.covs, priors)


def _psd_factor(cov: np.ndarray) -> np.ndarray:
    # Eigen factor L with L L^T = cov; unlike Cholesky it accepts singular covs.
    w, v = np.linalg.eigh(cov)
    return v * np.sqrt(np.clip(w, 0.0, None))


def gen_mixture(spec: MixtureSpec) -> tuple[np.ndarray, np.ndarray]:
    """Draw the mixture: class-blocked features and matching labels."""
    rng = rng_for(spec.seed)
    blocks = []
    for c in range(spec.k):
        z = rng.standard_normal((int(spec.counts[c]), spec.dim))
        blocks.append(z @ _psd_factor(spec.covs[c]).T + spec.means[c])
    features = np.concatenate(blocks, axis=0)
    labels = np.repeat(np.arange(spec.k, dtype=np.int64), spec.counts)
    return features, labels


def gen_rings(
    radii, radial_sigma: float, n_per_class: int, seed: int,
    *, fixed_angle: float | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Concentric 2-D rings: radius R_c plus Gaussian jitter, uniform angle.

    ``fixed_angle`` pins every angle (test hook).  Qualitative illustration
    only; per-axis class variance is (R^2 + sigma^2) / 2 and per-class means
    tend to the origin.
    """
    radii = np.asarray(radii, dtype=np.float64).reshape(-1)
    if radii.size < 1 or np.any(radii <= 0):
        raise InvalidInputError("radii must be positive")
    if radial_sigma < 0:
        raise InvalidInputError("radial_sigma must be >= 0")
    if n_per_class < 1:
        raise InvalidInputError("n_per_class must be >= 1")
    rng = rng_for(seed)
    blocks = []
    for radius in radii:
        r = radius + rng.normal(0.0, radial_sigma, n_per_class) if radial_sigma > 0 \
            else np.full(n_per_class, radius)
        theta = np.full(n_per_class, float(fixed_angle)) if fixed_angle is not None \
            else rng.uniform(0.0, TWO_PI, n_per_class)
        blocks.append(np.column_stack([r * np.cos(theta), r * np.sin(theta)]))
    features = np.concatenate(blocks, axis=0)
    labels = np.repeat(np.arange(radii.size, dtype=np.int64), n_per_class)
    return features, labels


# ---------------------------------------------------------------------------
# analytic constructions


class LabeledPair(NamedTuple):
    real_features: np.ndarray
    real_labels: np.ndarray
    gen_features: np.ndarray
    gen_labels: np.ndarray


_MATCHED_A_MEANS = np.array([[-1.0, 0.0], [1.0, 0.0]])
_MATCHED_A_COVS = [np.diag([1.0, 1.0]), np.diag([1.0, 3.0])]
_MATCHED_B_MEANS = np.array([[0.0, -1.0], [0.0, 1.0]])
_MATCHED_B_COVS = [np.diag([2.0, 1.0]), np.diag([2.0, 1.0])]


def matched_moments_population() -> tuple[ClassConditionalStats, ClassConditionalStats]:
    """Population statistics of the matched-moment pair.

    Both mixtures have mean (0, 0) and covariance diag(2, 2), so their
    unconditional Fréchet distance is zero even though every per-class
    statistic differs.
    """
    half = np.array([0.5, 0.5])
    a = class_conditional_from_moments(_MATCHED_A_MEANS, _MATCHED_A_COVS, half)
    b = class_conditional_from_moments(_MATCHED_B_MEANS, _MATCHED_B_COVS, half)
    return a, b


def gen_matched_moments(seed: int, n_per_class: int) -> LabeledPair:
    """Sample the matched-moment pair (A as 'real', B as 'generated')."""
    if n_per_class < 2:
        raise InvalidInputError("n_per_class must be >= 2")
    sides = []
    for side, (means, covs) in enumerate(
        [(_MATCHED_A_MEANS, _MATCHED_A_COVS), (_MATCHED_B_MEANS, _MATCHED_B_COVS)]
    ):
        rng = rng_for(seed, side)
        blocks = [
            rng.standard_normal((n_per_class, 2)) @ _psd_factor(covs[c]).T + means[c]
            for c in range(2)
        ]
        sides.append(np.concatenate(blocks, axis=0))
    labels = np.repeat(np.arange(2, dtype=np.int64), n_per_class)
    return LabeledPair(sides[0], labels.copy(), sides[1], labels.copy())


def tightness_population(sigma) -> ClassConditionalStats:
    """Population statistics of one side of the bound-tightness construction."""
    s = np.asarray(sigma, dtype=np.float64).reshape(-1)
    if s.size != 2 or np.any(s < 0):
        raise InvalidInputError("sigma must be two non-negative reals")
    means = np.array([[1.0, 1.0], [1.0, 1.0]])
    covs = [np.diag([0.0, s[0] ** 2]), np.diag([s[1] ** 2, 0.0])]
    return class_conditional_from_moments(means, covs, np.array([0.5, 0.5]))


def gen_tightness_case(
    sigma_real, sigma_gen, n_per_class: int, seed: int
) -> LabeledPair:
    """Sample the construction where fid = bcfid + wcfid holds with equality.

    Class 0 rows are (1, 1 + eps), class 1 rows are (1 + eps, 1), with eps
    zero-mean normal of the per-class sigma.  All class means are (1, 1), so
    the between-class part vanishes and the within-class part carries the
    whole distance.
    """
    if n_per_class < 2:
        raise InvalidInputError("n_per_class must be >= 2")
    sides = []
    labels = np.repeat(np.arange(2, dtype=np.int64), n_per_class)
    for side, sigma in enumerate((sigma_real, sigma_gen)):
        s = np.asarray(sigma, dtype=np.float64).reshape(-1)
        if s.size != 2 or np.any(s < 0):
            raise InvalidInputError("sigma must be two non-negative reals")
        rng = rng_for(seed, side)
        class0 = np.column_stack([
            np.ones(n_per_class),
            1.0 + rng.normal(0.0, s[0], n_per_class) if s[0] > 0 else np.ones(n_per_class),
        ])
        class1 = np.column_stack([
            1.0 + rng.normal(0.0, s[1], n_per_class) if s[1] > 0 else np.ones(n_per_class),
            np.ones(n_per_class),
        ])
        sides.append(np.concatenate([class0, class1], axis=0))
    return LabeledPair(sides[0], labels.copy(), sides[1], labels.copy())


# ---------------------------------------------------------------------------
# degradations


def label_noise(labels, p: float, seed: int) -> np.ndarray:
    """Randomly permute the labels of a floor(p*N)-sized subset.

    Permuting (rather than resampling) preserves the label multiset exactly,
    so per-class counts never change.  p=0 is the identity; p=1 permutes all.
    """
    if not 0.0 <= p <= 1.0:
        raise InvalidInputError(f"noise fraction must be in [0, 1], got {p}")
    y = np.asarray(labels)
    if y.ndim != 1 or not np.issubdtype(y.dtype, np.integer):
        raise InvalidInputError("labels must be a 1-D integer vector")
    y = y.astype(np.int64)
    n_sel = int(math.floor(p * y.size))
    if n_sel < 2:
        return y.copy()
    rng = rng_for(seed)
    idx = rng.choice(y.size, size=n_sel, replace=False)
    out = y.copy()
    out[idx] = out[idx][rng.permutation(n_sel)]
    return out


@dataclass(frozen=True)
class CollapseSchedule:
    """Staged shrinking of per-class sample pools to simulate mode collapse."""

    steps: int = 11
    shrink_factor: float = 2.0 / 3.0
    per_class_sample: int = 100
    collapsed_classes: tuple[int, ...] = (0,)

    def __post_init__(self):
        if self.steps < 1:
            raise InvalidInputError("steps must be >= 1")
        if not 0.0 < self.shrink_factor < 1.0:
            raise InvalidInputError("shrink_factor must be in (0, 1)")
        if self.per_class_sample < 1:
            raise InvalidInputError("per_class_sample must be >= 1")
        object.__setattr__(
            self, "collapsed_classes", tuple(int(c) for c in self.collapsed_classes))


def collapse_pool_sizes(initial: int, schedule: CollapseSchedule) -> list[int]:
    """Deterministic collapsed-pool size per step: ceil(shrink * previous)."""
    sizes = [int(initial)]
    for _ in range(schedule.steps - 1):
        sizes.append(math.ceil(schedule.shrink_factor * sizes[-1]))
    return sizes


def mode_collapse_indices(
    labels, k: int, schedule: CollapseSchedule, seed: int
) -> list[np.ndarray]:
    """Row indices of each step's emitted dataset.

    Step 0 draws from the full pools.  Before each later step, every collapsed
    class's pool is subsampled (without replacement) to ceil(shrink * size).
    Each step then draws ``per_class_sample`` rows per class from the current
    pool, switching to with-replacement once a pool is smaller than the draw.
    """
    y = np.asarray(labels)
    if y.ndim != 1 or not np.issubdtype(y.dtype, np.integer):
        raise InvalidInputError("labels must be a 1-D integer vector")
    pools = {c: np.flatnonzero(y == c) for c in range(k)}
    for c in schedule.collapsed_classes:
        if not 0 <= c < k:
            raise InvalidInputError(f"collapsed class {c} outside [0, {k})")
        if pools[c].size == 0:
            raise InvalidInputError(f"collapsed class {c} has no samples")
    for c in range(k):
        if pools[c].size == 0:
            raise InvalidInputError(f"class {c} has no samples")
    size_by_class = {
        c: collapse_pool_sizes(pools[c].size, schedule)
        for c in schedule.collapsed_classes
    }
    steps = []
    for step in range(schedule.steps):
        rng = rng_for(seed, step)
        if step > 0:
            for c in schedule.collapsed_classes:
                pools[c] = np.sort(
                    rng.choice(pools[c], size=size_by_class[c][step], replace=False))
        picks = []
        for c in range(k):
            pool = pools[c]
            replace = pool.size < schedule.per_class_sample
            picks.append(rng.choice(pool, size=schedule.per_class_sample, replace=replace))
        steps.append(np.concatenate(picks))
    return steps


def mode_collapse_run(
    features, labels, schedule: CollapseSchedule, seed: int
) -> list[tuple[np.ndarray, np.ndarray]]:
    """Emit the per-step (features, labels) datasets of a collapse simulation."""
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    if x.ndim != 2 or x.shape[0] != y.size:
        raise InvalidInputError("features and labels must have matching row counts")
    k = int(y.max()) + 1
    return [(x[idx], y[idx].astype(np.int64))
            for idx in mode_collapse_indices(y, k, schedule, seed)]


def dirichlet_rows(alpha, n: int, seed: int) -> np.ndarray:
    """n seeded Dirichlet(alpha) rows; valid probability rows by construction."""
    a = np.asarray(alpha, dtype=np.float64).reshape(-1)
    if a.size < 2 or np.any(a <= 0):
        raise InvalidInputError("alpha must have length >= 2 with positive entries")
    if n < 1:
        raise InvalidInputError("n must be >= 1")
    return rng_for(seed).dirichlet(a, size=n)
