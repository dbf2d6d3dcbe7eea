"""Unconditional and class-conditional generation metrics.

Score families
--------------
* Probability-based: ``inception_score`` plus its between-class (``bcis``)
  and within-class (``wcis``) components.  With empirical class weights the
  three satisfy ``log IS = log BCIS + log WCIS`` exactly, because the mean
  sample-to-marginal KL splits into a between-class KL plus the class-weighted
  within-class KL.
* Feature-based: ``fid`` plus its between-class (``bcfid``) and within-class
  (``wcfid``) components.  With population covariances and empirical class
  weights, ``fid <= bcfid + wcfid`` holds up to round-off.

Class weights default to empirical frequencies ("empirical"); passing
``weighting="uniform"`` averages classes with equal weight instead, which is
also meaningful for unbalanced data but forfeits the exact identities above.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ._parallel import ordered_map
from .errors import InvalidInputError
from .gaussian import (
    GaussianStats,
    as_feature_matrix,
    estimate_gaussian,
    frechet_distance,
)

# Probabilities are floored here and rows renormalized before any log, so
# hard one-hot rows stay finite; the perturbation is < 1e-10 relative.
PROB_FLOOR = 1e-12

WEIGHTINGS = ("empirical", "uniform")


# ---------------------------------------------------------------------------
# input validation


def as_probability_matrix(probs) -> np.ndarray:
    """Validate an N x K probability matrix (entries in [0,1], rows sum to 1)."""
    p = np.asarray(probs, dtype=np.float64)
    if p.ndim != 2:
        raise InvalidInputError(f"probability matrix must be 2-D, got shape {p.shape}")
    n, k = p.shape
    if n < 1:
        raise InvalidInputError("probability matrix has no rows")
    if k < 2:
        raise InvalidInputError(f"probability matrix needs at least 2 classes, got {k}")
    if not np.all(np.isfinite(p)):
        raise InvalidInputError("probability matrix contains non-finite entries")
    if float(p.min()) < -1e-9 or float(p.max()) > 1.0 + 1e-9:
        bad = int(np.argmax((p < -1e-9) | (p > 1.0 + 1e-9), axis=None) // k)
        raise InvalidInputError(f"probability entries outside [0, 1] at row {bad}")
    sums = p.sum(axis=1)
    off = np.abs(sums - 1.0)
    if float(off.max()) > 1e-6:
        bad = int(np.argmax(off))
        raise InvalidInputError(
            f"probability row {bad} sums to {sums[bad]:.9f}, expected 1 within 1e-6"
        )
    return np.clip(p, 0.0, 1.0)


def as_label_vector(labels, k: int | None, *, n: int | None = None) -> np.ndarray:
    """Validate a vector of class indices in [0, k); k=None skips the upper bound."""
    y = np.asarray(labels)
    if y.ndim != 1:
        raise InvalidInputError(f"label vector must be 1-D, got shape {y.shape}")
    if y.size < 1:
        raise InvalidInputError("label vector is empty")
    if not np.issubdtype(y.dtype, np.integer):
        yf = np.asarray(labels, dtype=np.float64)
        if not np.all(np.isfinite(yf)) or np.any(yf != np.floor(yf)):
            raise InvalidInputError("labels must be integers")
        y = yf.astype(np.int64)
    else:
        y = y.astype(np.int64)
    if y.min() < 0:
        raise InvalidInputError(f"labels must be non-negative, got {y.min()}")
    if k is not None:
        if k < 1:
            raise InvalidInputError(f"class count must be >= 1, got {k}")
        if y.max() >= k:
            raise InvalidInputError(
                f"labels must lie in [0, {k}), got values up to {y.max()}"
            )
    if n is not None and y.size != n:
        raise InvalidInputError(f"label count {y.size} does not match row count {n}")
    return y


def class_index_lists(
    labels: np.ndarray, k: int, *, min_count: int = 1, side: str = ""
) -> list[np.ndarray]:
    """Per-class row indices; raises naming any class smaller than min_count."""
    where = side and f" on the {side} side" or ""
    out = []
    for c in range(k):
        idx = np.flatnonzero(labels == c)
        if idx.size < min_count:
            need = "no samples" if min_count == 1 else f"{idx.size} sample(s), needs >= {min_count}"
            raise InvalidInputError(f"class {c} has {need}{where}")
        out.append(idx)
    return out


def class_priors(counts: np.ndarray, weighting: str = "empirical") -> np.ndarray:
    counts = np.asarray(counts, dtype=np.float64)
    if weighting == "empirical":
        return counts / counts.sum()
    if weighting == "uniform":
        return np.full(counts.size, 1.0 / counts.size)
    raise InvalidInputError(f"unknown weighting {weighting!r}, expected one of {WEIGHTINGS}")


# ---------------------------------------------------------------------------
# probability-based scores


def _clean_rows(p: np.ndarray) -> np.ndarray:
    q = np.clip(p, PROB_FLOOR, None)
    return q / q.sum(axis=1, keepdims=True)


def _kl_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Row-wise KL(p_i || q) for strictly positive p rows and q."""
    return np.sum(p * (np.log(p) - np.log(q)), axis=1)


def inception_score(probs) -> float:
    """exp of the mean KL from each predicted distribution to their average.

    Equals exp of the mutual information between samples and predicted
    labels at the empirical level; always in [1, K].
    """
    p = _clean_rows(as_probability_matrix(probs))
    marginal = p.mean(axis=0)
    return float(np.exp(np.mean(_kl_rows(p, marginal))))


def _class_setup(probs, labels, weighting: str, class_count: int | None):
    # Conditioned classes live in their own index space: usually it matches
    # the probability columns, but e.g. one condition covering several
    # predicted classes is legal.  Every conditioned class must be non-empty.
    p = as_probability_matrix(probs)
    y = as_label_vector(labels, None, n=p.shape[0])
    k_cond = int(y.max()) + 1 if class_count is None else int(class_count)
    if y.max() >= k_cond:
        raise InvalidInputError(
            f"labels reach class {y.max()} but class_count is {k_cond}")
    idx = class_index_lists(y, k_cond, min_count=1, side="conditioned")
    clean = _clean_rows(p)
    averages = np.stack([clean[i].mean(axis=0) for i in idx])
    counts = np.array([i.size for i in idx])
    priors = class_priors(counts, weighting)
    return clean, idx, averages, priors


def bcis(probs, labels, weighting: str = "empirical",
         class_count: int | None = None) -> float:
    """Between-class score: inception score of the per-class average distributions."""
    _, _, averages, priors = _class_setup(probs, labels, weighting, class_count)
    marginal = priors @ averages
    return float(np.exp(priors @ _kl_rows(averages, marginal)))


def wcis(probs, labels, weighting: str = "empirical",
         class_count: int | None = None) -> float:
    """Within-class score: exp of the class-weighted mean within-class KL."""
    clean, idx, averages, priors = _class_setup(probs, labels, weighting, class_count)
    per = np.array(
        [float(np.mean(_kl_rows(clean[i], averages[c]))) for c, i in enumerate(idx)]
    )
    return float(np.exp(priors @ per))


def per_class_is(probs, labels, class_count: int | None = None) -> np.ndarray:
    """Per-class within-class score; class weights combine these into wcis."""
    clean, idx, averages, _ = _class_setup(probs, labels, "empirical", class_count)
    return np.array(
        [float(np.exp(np.mean(_kl_rows(clean[i], averages[c])))) for c, i in enumerate(idx)]
    )


def accuracy(probs, labels) -> tuple[float, np.ndarray]:
    """Fraction of rows whose argmax matches the conditioned label.

    Argmax ties break to the lowest class index.  Also returns the per-class
    vector; classes with no members get NaN.
    """
    p = as_probability_matrix(probs)
    k = p.shape[1]
    y = as_label_vector(labels, k, n=p.shape[0])
    hits = np.argmax(p, axis=1) == y
    per = np.full(k, np.nan)
    for c in range(k):
        members = y == c
        if members.any():
            per[c] = float(hits[members].mean())
    return float(hits.mean()), per


# ---------------------------------------------------------------------------
# feature-based scores


@dataclass(frozen=True)
class ClassConditionalStats:
    """Per-class Gaussians, the Gaussian over class means, and class weights.

    With empirical weights, ``between.mean`` equals the pooled mean and the
    pooled covariance equals ``between.cov + sum_c priors[c] * per_class[c].cov``
    (law of total covariance, exact for population covariances).
    """

    per_class: tuple[GaussianStats, ...]
    between: GaussianStats
    priors: np.ndarray

    @property
    def k(self) -> int:
        return len(self.per_class)

    @property
    def dim(self) -> int:
        return self.between.dim


def class_conditional_stats(
    features,
    labels,
    k: int,
    *,
    weighting: str = "empirical",
    min_count: int = 1,
    side: str = "",
) -> ClassConditionalStats:
    """Estimate per-class and between-class Gaussian statistics from samples."""
    x = as_feature_matrix(features)
    y = as_label_vector(labels, k, n=x.shape[0])
    idx = class_index_lists(y, k, min_count=min_count, side=side)
    per_class = tuple(estimate_gaussian(x[i]) for i in idx)
    counts = np.array([i.size for i in idx])
    priors = class_priors(counts, weighting)
    return class_conditional_from_moments(
        np.stack([s.mean for s in per_class]),
        [s.cov for s in per_class],
        priors,
        counts=counts,
    )


def class_conditional_from_moments(
    means, covs, priors, *, counts=None
) -> ClassConditionalStats:
    """Build ClassConditionalStats from explicit per-class moments.

    Useful for population-level checks where the moments are known
    analytically rather than estimated from samples.
    """
    means = np.asarray(means, dtype=np.float64)
    priors = np.asarray(priors, dtype=np.float64)
    if means.ndim != 2 or means.shape[0] != priors.size:
        raise InvalidInputError("means must be a K x d matrix matching the priors")
    if np.any(priors < 0) or abs(float(priors.sum()) - 1.0) > 1e-9:
        raise InvalidInputError("priors must be non-negative and sum to 1")
    k = priors.size
    if counts is None:
        counts = np.zeros(k, dtype=np.int64)
    per_class = tuple(
        GaussianStats(means[c], np.asarray(covs[c], dtype=np.float64), int(counts[c]))
        for c in range(k)
    )
    mu_b = priors @ means
    centred = means - mu_b
    sigma_b = (centred * priors[:, None]).T @ centred
    between = GaussianStats(mu_b, sigma_b, count=int(np.sum(counts)))
    return ClassConditionalStats(per_class=per_class, between=between, priors=priors)


def pooled_gaussian(stats: ClassConditionalStats) -> GaussianStats:
    """Pooled Gaussian via the law of total covariance."""
    cov = stats.between.cov + sum(
        p * s.cov for p, s in zip(stats.priors, stats.per_class)
    )
    count = sum(s.count for s in stats.per_class)
    return GaussianStats(stats.between.mean, cov, count=count)


def _resolve_mapping(pairing, k: int) -> np.ndarray:
    if pairing is None:
        return np.arange(k, dtype=np.int64)
    mapping = getattr(pairing, "mapping", pairing)
    mapping = np.asarray(mapping, dtype=np.int64)
    if mapping.shape != (k,) or sorted(mapping.tolist()) != list(range(k)):
        raise InvalidInputError(f"pairing must be a permutation of [0, {k})")
    return mapping


def fid(real_features, gen_features) -> float:
    """Fréchet distance between the Gaussian fits of two feature populations."""
    return frechet_distance(estimate_gaussian(real_features), estimate_gaussian(gen_features))


def bcfid_from_stats(real: ClassConditionalStats, gen: ClassConditionalStats) -> float:
    if real.k != gen.k:
        raise InvalidInputError(f"class count mismatch: {real.k} vs {gen.k}")
    return frechet_distance(real.between, gen.between)


def wcfid_from_stats(
    real: ClassConditionalStats,
    gen: ClassConditionalStats,
    pairing=None,
) -> tuple[float, np.ndarray]:
    """Class-weighted mean per-class Fréchet distance, plus the per-class vector.

    ``pairing[c]`` names the real class compared against conditioned class c;
    weights are the real-side priors of the paired classes.
    """
    if real.k != gen.k:
        raise InvalidInputError(f"class count mismatch: {real.k} vs {gen.k}")
    mapping = _resolve_mapping(pairing, real.k)
    pairs = [(real.per_class[mapping[c]], gen.per_class[c]) for c in range(real.k)]
    per = np.array(ordered_map(lambda ab: frechet_distance(*ab), pairs))
    weights = real.priors[mapping]
    return float(weights @ per), per


def bcfid(
    real_features, real_labels, gen_features, gen_labels, k: int,
    *, weighting: str = "empirical",
) -> float:
    """Fréchet distance between the real and generated class-mean distributions."""
    real = class_conditional_stats(
        real_features, real_labels, k, weighting=weighting, side="real")
    gen = class_conditional_stats(
        gen_features, gen_labels, k, weighting=weighting, side="generated")
    return bcfid_from_stats(real, gen)


def wcfid(
    real_features, real_labels, gen_features, gen_labels, k: int,
    *, pairing=None, weighting: str = "empirical",
) -> tuple[float, np.ndarray]:
    """Class-weighted mean of per-class Fréchet distances (needs >= 2 per class)."""
    real = class_conditional_stats(
        real_features, real_labels, k, weighting=weighting, min_count=2, side="real")
    gen = class_conditional_stats(
        gen_features, gen_labels, k, weighting=weighting, min_count=2, side="generated")
    return wcfid_from_stats(real, gen, pairing)


def cfid_sum(
    real_features, real_labels, gen_features, gen_labels, k: int,
    *, pairing=None, weighting: str = "empirical",
) -> float:
    """bcfid + wcfid: a single conditional score that upper-bounds fid."""
    real = class_conditional_stats(
        real_features, real_labels, k, weighting=weighting, min_count=2, side="real")
    gen = class_conditional_stats(
        gen_features, gen_labels, k, weighting=weighting, min_count=2, side="generated")
    return bcfid_from_stats(real, gen) + wcfid_from_stats(real, gen, pairing)[0]


# ---------------------------------------------------------------------------
# reporting


@dataclass
class MetricReport:
    """All scalar metrics plus per-class component vectors.

    ``None`` marks a metric whose inputs were not provided.  ``dims_used`` is
    the per-dimension normalization divisor: the subset size under the
    subsampled protocol, otherwise the full feature dimension (full-dimension
    scores are reported raw, not divided).
    """

    is_: float | None = None
    bcis: float | None = None
    wcis: float | None = None
    fid: float | None = None
    bcfid: float | None = None
    wcfid: float | None = None
    cfid_sum: float | None = None
    accuracy: float | None = None
    per_class_fid: np.ndarray | None = None
    per_class_is: np.ndarray | None = None
    per_class_accuracy: np.ndarray | None = None
    dims_used: int | None = None
    pairing: str = "identity"
    seed: int = 0
    warnings: list[str] = field(default_factory=list)


def subsampled_fid_suite(
    real_features,
    real_labels,
    gen_features,
    gen_labels,
    subset_size: int,
    trials: int,
    seed: int,
    *,
    k: int | None = None,
    pairing=None,
    weighting: str = "empirical",
    pairing_label: str = "identity",
) -> MetricReport:
    """Feature-subsampled, per-dimension-normalized FID family.

    Each trial draws ``subset_size`` distinct feature indices (shared by the
    real and generated sides and by fid/bcfid/wcfid), computes the scores on
    the column-restricted matrices, and divides them by ``subset_size``; the
    report holds the mean over trials.  Labels may be omitted to subsample
    the unconditional fid alone.
    """
    rf = as_feature_matrix(real_features)
    gf = as_feature_matrix(gen_features)
    if rf.shape[1] != gf.shape[1]:
        raise InvalidInputError(
            f"feature dimension mismatch: {rf.shape[1]} vs {gf.shape[1]}")
    d = rf.shape[1]
    if not 1 <= subset_size <= d:
        raise InvalidInputError(f"subset_size must be in [1, {d}], got {subset_size}")
    if trials < 1:
        raise InvalidInputError(f"trials must be >= 1, got {trials}")
    with_classes = real_labels is not None and gen_labels is not None
    if with_classes and k is None:
        raise InvalidInputError("k is required when labels are provided")

    rng = np.random.default_rng(np.random.SeedSequence(int(seed)))
    index_sets = [np.sort(rng.choice(d, size=subset_size, replace=False))
                  for _ in range(trials)]

    mapping = _resolve_mapping(pairing, k) if with_classes else None

    def one_trial(cols: np.ndarray):
        r, g = rf[:, cols], gf[:, cols]
        f = fid(r, g)
        if not with_classes:
            return f, None, None, None
        rs = class_conditional_stats(
            r, real_labels, k, weighting=weighting, min_count=2, side="real")
        gs = class_conditional_stats(
            g, gen_labels, k, weighting=weighting, min_count=2, side="generated")
        b = bcfid_from_stats(rs, gs)
        w, per = wcfid_from_stats(rs, gs, mapping)
        return f, b, w, per

    results = ordered_map(one_trial, index_sets)
    scale = float(subset_size)
    fid_mean = float(np.mean([r[0] for r in results])) / scale
    report = MetricReport(
        fid=fid_mean, dims_used=subset_size, pairing=pairing_label, seed=int(seed))
    if with_classes:
        report.bcfid = float(np.mean([r[1] for r in results])) / scale
        report.wcfid = float(np.mean([r[2] for r in results])) / scale
        report.cfid_sum = report.bcfid + report.wcfid
        report.per_class_fid = np.mean([r[3] for r in results], axis=0) / scale
    return report
