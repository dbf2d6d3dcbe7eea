"""Gaussian population statistics and the Fréchet distance between Gaussians.

The covariance estimator uses the population divisor N (not N-1) so that the
pooled covariance of a labelled dataset decomposes exactly into its
between-class and within-class parts; the conditional-metric bound tests rely
on that identity holding to machine precision.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, NotPSDError

# Negative eigenvalues within -EIG_TOL * max(1, scale) are round-off and get
# clamped to zero; anything lower is treated as genuinely non-PSD input.
EIG_TOL = 1e-8


def as_feature_matrix(features) -> np.ndarray:
    """Validate and return an N x d float64 feature matrix (N, d >= 1, finite)."""
    x = np.asarray(features, dtype=np.float64)
    if x.ndim != 2:
        raise InvalidInputError(f"feature matrix must be 2-D, got shape {x.shape}")
    n, d = x.shape
    if n < 1 or d < 1:
        raise InvalidInputError(f"feature matrix must be non-empty, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("feature matrix contains non-finite entries")
    return x


def _check_psd(cov: np.ndarray, *, context: str = "matrix") -> None:
    w = np.linalg.eigvalsh(cov)
    floor = -EIG_TOL * max(1.0, float(w[-1]))
    if float(w[0]) < floor:
        raise NotPSDError(
            f"{context} has eigenvalue {float(w[0]):.6e} below the PSD floor {floor:.6e}"
        )


@dataclass(frozen=True)
class GaussianStats:
    """Mean vector and population covariance of one (sub)population.

    The covariance is symmetrized on construction and must be PSD up to the
    round-off floor; ``count`` records how many samples produced the estimate
    (0 for analytically constructed statistics).
    """

    mean: np.ndarray
    cov: np.ndarray
    count: int = 0

    def __post_init__(self):
        mean = np.asarray(self.mean, dtype=np.float64).reshape(-1)
        cov = np.asarray(self.cov, dtype=np.float64)
        if mean.size < 1:
            raise InvalidInputError("mean vector must be non-empty")
        if cov.shape != (mean.size, mean.size):
            raise InvalidInputError(
                f"covariance shape {cov.shape} does not match mean length {mean.size}"
            )
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(cov))):
            raise InvalidInputError("Gaussian statistics contain non-finite entries")
        cov = 0.5 * (cov + cov.T)
        _check_psd(cov, context="covariance")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "cov", cov)

    @property
    def dim(self) -> int:
        return self.mean.size


def estimate_gaussian(features) -> GaussianStats:
    """Estimate mean and population covariance (divisor N) from sample rows."""
    x = as_feature_matrix(features)
    n = x.shape[0]
    mean = x.mean(axis=0)
    centred = x - mean
    cov = centred.T @ centred / n
    return GaussianStats(mean=mean, cov=cov, count=n)


def sqrtm_psd(m) -> np.ndarray:
    """Symmetric PSD square root via the symmetric eigendecomposition.

    Returns V diag(sqrt(max(w, 0))) V^T.  Eigenvalues within
    -EIG_TOL * max(1, spectral radius) of zero are clamped; lower ones raise
    :class:`NotPSDError`.  Input asymmetry beyond round-off is rejected.
    """
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError("matrix contains non-finite entries")
    scale = float(np.abs(a).max()) if a.size else 0.0
    asym = float(np.abs(a - a.T).max())
    if asym > 1e-8 * (1.0 + scale):
        raise InvalidInputError(
            f"matrix is not symmetric: max |a - a^T| = {asym:.6e}"
        )
    a = 0.5 * (a + a.T)
    w, v = np.linalg.eigh(a)
    radius = float(np.abs(w).max()) if w.size else 0.0
    floor = -EIG_TOL * max(1.0, radius)
    if float(w[0]) < floor:
        raise NotPSDError(
            f"matrix has eigenvalue {float(w[0]):.6e} below the PSD floor {floor:.6e}"
        )
    root = (v * np.sqrt(np.clip(w, 0.0, None))) @ v.T
    return 0.5 * (root + root.T)


def frechet_distance_raw(a: GaussianStats, b: GaussianStats) -> float:
    """Fréchet distance before the final clamp to zero (round-off can dip below)."""
    if a.dim != b.dim:
        raise InvalidInputError(
            f"dimension mismatch: {a.dim} vs {b.dim}"
        )
    delta = a.mean - b.mean
    a_half = sqrtm_psd(a.cov)
    b_half = sqrtm_psd(b.cov)
    # Tr((S1^1/2 S2 S1^1/2)^1/2) equals the nuclear norm of S1^1/2 S2^1/2;
    # the SVD route reads the root eigenvalues off directly instead of
    # recovering them from their squares, which would square the condition
    # number and break the self-distance and symmetry tolerances.
    cross = float(np.linalg.svd(a_half @ b_half, compute_uv=False).sum())
    return (
        float(delta @ delta)
        + float(np.trace(a.cov))
        + float(np.trace(b.cov))
        - 2.0 * cross
    )


def frechet_distance(a: GaussianStats, b: GaussianStats) -> float:
    """Squared Fréchet (2-Wasserstein) distance between two Gaussians.

    The trace cross-term uses only symmetric PSD intermediates (the two
    covariance square roots), never the nonsymmetric product S1 S2.  The
    result is clamped to be non-negative.
    """
    return max(frechet_distance_raw(a, b), 0.0)
