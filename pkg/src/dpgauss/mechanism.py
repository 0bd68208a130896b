"""Vector queries and their noisy releases.

Two query families are built in: the column mean of a numeric matrix whose
rows have L-infinity diameter at most 1, and the normalized histogram of a
label vector.  Sensitivities are with respect to replacing one record.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .calibrate import SensitivityProfile
from .errors import DomainError


class QueryKind(enum.Enum):
    MEAN = "Mean"
    HISTOGRAM = "Histogram"


class Mechanism(enum.Enum):
    ANALYTIC_GAUSSIAN = "AnalyticGaussian"
    CLASSICAL_GAUSSIAN = "ClassicalGaussian"
    LAPLACE = "Laplace"
    NO_NOISE = "NoNoise"


@dataclass(frozen=True)
class QuerySpec:
    """A query kind with its record count, output dimension and sensitivities."""

    kind: QueryKind
    n: int
    d: int
    sensitivities: SensitivityProfile

    @staticmethod
    def mean(n: int, d: int) -> "QuerySpec":
        """Column mean of an (n, d) matrix with rows in a unit L-infinity ball.

        Replacing one row moves each output coordinate by at most 1/n, hence
        l2 = sqrt(d)/n and l1 = d/n.
        """
        _check_counts(n, d)
        return QuerySpec(
            kind=QueryKind.MEAN,
            n=n,
            d=d,
            sensitivities=SensitivityProfile(l2=math.sqrt(d) / n, l1=d / n),
        )

    @staticmethod
    def histogram(n: int, d: int) -> "QuerySpec":
        """Normalized histogram of n labels over d bins (labels are 1-based).

        Replacing one label moves mass 1/n between two bins, hence
        l2 = sqrt(2)/n and l1 = 2/n.
        """
        _check_counts(n, d)
        return QuerySpec(
            kind=QueryKind.HISTOGRAM,
            n=n,
            d=d,
            sensitivities=SensitivityProfile(l2=math.sqrt(2.0) / n, l1=2.0 / n),
        )


def _check_counts(n: int, d: int) -> None:
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    if not isinstance(d, (int, np.integer)) or d < 1:
        raise DomainError(f"d must be a positive integer, got {d!r}")


@dataclass(frozen=True)
class Release:
    """A (possibly noisy) query answer together with how it was produced.

    sigma is the Gaussian standard deviation used, or the Laplace scale for
    Laplace releases, or 0 for noise-free ones.
    """

    values: np.ndarray = field(repr=False)
    sigma: float
    mechanism: Mechanism
    seed: int

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.shape[0] < 1:
            raise DomainError(f"release values must be a nonempty flat vector, got shape {values.shape}")
        object.__setattr__(self, "values", values)
        if not math.isfinite(self.sigma) or self.sigma < 0.0:
            raise DomainError(f"release noise scale must be finite and >= 0, got {self.sigma!r}")
        if not isinstance(self.mechanism, Mechanism):
            raise DomainError(f"mechanism must be a Mechanism, got {self.mechanism!r}")
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            raise DomainError(f"seed must be a nonnegative integer, got {self.seed!r}")

    @property
    def d(self) -> int:
        return int(self.values.shape[0])

    def to_dict(self) -> dict:
        return {
            "values": [float(v) for v in self.values],
            "sigma": float(self.sigma),
            "mechanism": self.mechanism.value,
            "seed": int(self.seed),
            "d": self.d,
        }

    @staticmethod
    def from_dict(payload: dict) -> "Release":
        try:
            values = np.asarray(payload["values"], dtype=float)
            sigma = float(payload["sigma"])
            mechanism = Mechanism(payload["mechanism"])
            seed = int(payload["seed"])
        except (KeyError, TypeError, ValueError) as exc:
            raise DomainError(f"malformed release payload: {exc}") from exc
        if values.ndim != 1:
            raise DomainError("release values must be a flat vector")
        if "d" in payload and int(payload["d"]) != values.shape[0]:
            raise DomainError("release d field disagrees with the values length")
        return Release(values=values, sigma=sigma, mechanism=mechanism, seed=seed)


def _check_seed(seed: int) -> int:
    if not isinstance(seed, (int, np.integer)) or seed < 0:
        raise DomainError(f"seed must be a nonnegative integer, got {seed!r}")
    return int(seed)


def evaluate_query(spec: QuerySpec, dataset: np.ndarray) -> np.ndarray:
    """Exact query answer on a dataset.

    Mean queries take an (n, d) float matrix; histogram queries take a
    length-n vector of integer labels in [1, d].
    """
    if spec.kind is QueryKind.MEAN:
        data = np.asarray(dataset, dtype=float)
        if data.shape != (spec.n, spec.d):
            raise DomainError(
                f"mean query expects shape {(spec.n, spec.d)}, got {data.shape}"
            )
        return data.mean(axis=0)
    labels = np.asarray(dataset)
    if labels.shape != (spec.n,):
        raise DomainError(f"histogram query expects shape {(spec.n,)}, got {labels.shape}")
    if not np.issubdtype(labels.dtype, np.integer):
        raise DomainError(f"histogram labels must be integers, got dtype {labels.dtype}")
    if labels.min() < 1 or labels.max() > spec.d:
        raise DomainError(f"histogram labels must lie in [1, {spec.d}]")
    counts = np.bincount(labels - 1, minlength=spec.d).astype(float)
    return counts / spec.n


def perturb_gaussian(
    exact: np.ndarray,
    sigma: float,
    seed: int,
    mechanism: Mechanism = Mechanism.ANALYTIC_GAUSSIAN,
) -> Release:
    """Add iid centered Gaussian noise of standard deviation sigma.

    sigma = 0 returns the exact values, flagged as a NoNoise release.
    """
    exact = _flat_vector(exact)
    sigma = float(sigma)
    if not math.isfinite(sigma) or sigma < 0.0:
        raise DomainError(f"sigma must be finite and >= 0, got {sigma!r}")
    seed = _check_seed(seed)
    if mechanism not in (Mechanism.ANALYTIC_GAUSSIAN, Mechanism.CLASSICAL_GAUSSIAN):
        raise DomainError(f"perturb_gaussian cannot emit mechanism {mechanism!r}")
    if sigma == 0.0:
        return Release(values=exact.copy(), sigma=0.0, mechanism=Mechanism.NO_NOISE, seed=seed)
    rng = np.random.default_rng(seed)
    noisy = exact + sigma * rng.standard_normal(exact.shape[0])
    return Release(values=noisy, sigma=sigma, mechanism=mechanism, seed=seed)


def perturb_laplace(exact: np.ndarray, scale: float, seed: int) -> Release:
    """Add iid centered Laplace noise of the given scale (must be > 0)."""
    exact = _flat_vector(exact)
    scale = float(scale)
    if not math.isfinite(scale) or scale <= 0.0:
        raise DomainError(f"scale must be finite and > 0, got {scale!r}")
    seed = _check_seed(seed)
    rng = np.random.default_rng(seed)
    noisy = exact + rng.laplace(0.0, scale, exact.shape[0])
    return Release(values=noisy, sigma=scale, mechanism=Mechanism.LAPLACE, seed=seed)


def _flat_vector(values: np.ndarray) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if arr.ndim != 1 or arr.shape[0] < 1:
        raise DomainError(f"expected a nonempty flat vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DomainError("vector entries must all be finite")
    return arr


def empirical_privacy_loss_check(
    epsilon: float,
    distance: float,
    sigma: float,
    samples: int = 10**5,
    seed: int = 0,
) -> tuple[float, float]:
    """Monte-Carlo exceedance frequencies of the privacy loss at +/- epsilon.

    The privacy loss of Gaussian output perturbation at separation
    ``distance`` is itself Gaussian with mean eta = distance**2/(2 sigma**2)
    and variance 2 eta; this samples it and reports the two tail
    frequencies, for comparison against :func:`privacy_loss_tails`.
    """
    epsilon = float(epsilon)
    if not math.isfinite(epsilon) or epsilon < 0.0:
        raise DomainError(f"epsilon must be finite and >= 0, got {epsilon!r}")
    if not math.isfinite(distance) or distance <= 0.0:
        raise DomainError(f"distance must be finite and > 0, got {distance!r}")
    if not math.isfinite(sigma) or sigma <= 0.0:
        raise DomainError(f"sigma must be finite and > 0, got {sigma!r}")
    if not isinstance(samples, (int, np.integer)) or samples < 10**4:
        raise DomainError(f"samples must be an integer >= 10**4, got {samples!r}")
    seed = _check_seed(seed)
    eta = distance * distance / (2.0 * sigma * sigma)
    rng = np.random.default_rng(seed)
    losses = rng.normal(eta, math.sqrt(2.0 * eta), int(samples))
    return (float(np.mean(losses >= epsilon)), float(np.mean(losses <= -epsilon)))
