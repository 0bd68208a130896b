"""Post-release denoising of Gaussian-perturbed vectors.

All estimators here are post-processing: they see only the released vector
and its noise scale, never the dataset, so they cannot weaken the privacy
guarantee of the release.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .mechanism import Release


class DenoiserKind(enum.Enum):
    BAYES_GAUSSIAN_PRIOR = "BayesGaussianPrior"
    JAMES_STEIN = "JamesStein"
    SOFT_THRESHOLD = "SoftThreshold"


@dataclass(frozen=True)
class DenoiserChoice:
    """A validated estimator selection, dispatchable onto any release.

    w2 belongs to the Gaussian-prior estimator (required there) and
    threshold to soft-thresholding (optional there); neither is accepted
    with any other kind.
    """

    kind: DenoiserKind
    w2: float | None = None
    threshold: float | None = None

    def __post_init__(self) -> None:
        if not isinstance(self.kind, DenoiserKind):
            try:
                object.__setattr__(self, "kind", DenoiserKind(self.kind))
            except ValueError:
                raise DomainError(f"kind must be a DenoiserKind, got {self.kind!r}") from None
        if self.kind is DenoiserKind.BAYES_GAUSSIAN_PRIOR:
            if self.w2 is None or not math.isfinite(self.w2) or self.w2 <= 0.0:
                raise DomainError(
                    f"the Gaussian-prior estimator needs w2 finite and > 0, got {self.w2!r}"
                )
        elif self.w2 is not None:
            raise DomainError(f"w2 only applies to {DenoiserKind.BAYES_GAUSSIAN_PRIOR}")
        if self.threshold is not None:
            if self.kind is not DenoiserKind.SOFT_THRESHOLD:
                raise DomainError(f"threshold only applies to {DenoiserKind.SOFT_THRESHOLD}")
            if not math.isfinite(self.threshold) or self.threshold <= 0.0:
                raise DomainError(
                    f"explicit threshold must be finite and > 0, got {self.threshold!r}"
                )

    def apply(self, release: Release) -> np.ndarray:
        if self.kind is DenoiserKind.BAYES_GAUSSIAN_PRIOR:
            return denoise_bayes_gaussian_prior(release, self.w2)
        if self.kind is DenoiserKind.JAMES_STEIN:
            return denoise_james_stein(release)
        return denoise_soft_threshold(release, self.threshold)


def denoise_bayes_gaussian_prior(release: Release, w2: float) -> np.ndarray:
    """Posterior-mean shrinkage under an iid centered Gaussian prior.

    Each coordinate is scaled by w2 / (w2 + sigma**2), the posterior mean
    weight when the true values have prior variance w2.  A noise-free
    release is returned unchanged.
    """
    w2 = float(w2)
    if not math.isfinite(w2) or w2 <= 0.0:
        raise DomainError(f"prior variance w2 must be finite and > 0, got {w2!r}")
    if release.sigma == 0.0:
        return release.values.copy()
    weight = w2 / (w2 + release.sigma**2)
    return weight * release.values


def bayes_risk(d: int, w2: float, sigma: float) -> float:
    """Expected squared error of the posterior-mean estimate, d*w2*s2/(s2+w2)."""
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d!r}")
    if not w2 > 0.0 or not sigma > 0.0:
        raise DomainError("bayes_risk needs w2 > 0 and sigma > 0")
    s2 = sigma * sigma
    return d * w2 * s2 / (s2 + w2)


def denoise_james_stein(release: Release, positive_part: bool = False) -> np.ndarray:
    """Shrink toward the origin by 1 - (d-2) sigma**2 / ||y||**2.

    Requires dimension at least 3 and a nonzero released vector.  The plain
    factor may be negative when the vector is small against the noise;
    ``positive_part`` clips it at 0 instead.
    """
    d = release.d
    if d < 3:
        raise DomainError(f"James-Stein shrinkage needs dimension >= 3, got d={d}")
    norm_sq = float(release.values @ release.values)
    if norm_sq == 0.0:
        raise DomainError("James-Stein shrinkage is undefined on the zero vector")
    factor = 1.0 - (d - 2) * release.sigma**2 / norm_sq
    if positive_part:
        factor = max(0.0, factor)
    return factor * release.values


def james_stein_mse(d: int, w2: float, sigma: float) -> float:
    """Expected squared error of plain James-Stein shrinkage under an iid
    Gaussian signal of per-coordinate variance w2.

    Exact for d >= 3: Stein's identity gives d*s2 - (d-2)**2 * s2**2 times
    E[1 / ||y||**2], and the marginal norm is (w2 + s2) times a chi-square
    with d degrees of freedom, whose reciprocal has mean 1/(d-2).
    """
    if d < 3:
        raise DomainError(f"James-Stein MSE needs d >= 3, got {d!r}")
    if not w2 > 0.0 or not sigma > 0.0:
        raise DomainError("james_stein_mse needs w2 > 0 and sigma > 0")
    s2 = sigma * sigma
    return d * s2 - (d - 2) * s2 * s2 / (w2 + s2)


def default_threshold(sigma: float, d: int) -> float:
    """Universal threshold sigma * sqrt(2 ln d); zero when d = 1."""
    if not math.isfinite(sigma) or sigma < 0.0:
        raise DomainError(f"sigma must be finite and >= 0, got {sigma!r}")
    if d < 1:
        raise DomainError(f"d must be >= 1, got {d!r}")
    return sigma * math.sqrt(2.0 * math.log(d))


def denoise_soft_threshold(release: Release, threshold: float | None = None) -> np.ndarray:
    """Soft thresholding: sign(y) * max(0, |y| - threshold), elementwise.

    Without an explicit threshold the universal level
    sigma * sqrt(2 ln d) is used (zero for both d = 1 and sigma = 0, in
    which case the release passes through unchanged).  An explicit
    threshold must be strictly positive.
    """
    if threshold is None:
        threshold = default_threshold(release.sigma, release.d)
    else:
        threshold = float(threshold)
        if not math.isfinite(threshold) or threshold <= 0.0:
            raise DomainError(f"explicit threshold must be finite and > 0, got {threshold!r}")
    values = release.values
    return np.sign(values) * np.maximum(np.abs(values) - threshold, 0.0)


def estimate_mse(truth: np.ndarray, estimates: list[np.ndarray]) -> float:
    """Mean squared L2 error of a batch of estimates against one truth."""
    truth = np.asarray(truth, dtype=float)
    if truth.ndim != 1:
        raise DomainError(f"truth must be a flat vector, got shape {truth.shape}")
    if len(estimates) == 0:
        raise DomainError("estimate_mse needs at least one estimate")
    total = 0.0
    for est in estimates:
        est = np.asarray(est, dtype=float)
        if est.shape != truth.shape:
            raise DomainError(f"estimate shape {est.shape} does not match truth {truth.shape}")
        diff = est - truth
        total += float(diff @ diff)
    return total / len(estimates)

