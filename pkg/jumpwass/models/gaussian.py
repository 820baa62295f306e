"""
Gaussian and Gaussian-mixture value types.

A Dirac at the origin is the zero-mean, zero-covariance Gaussian.
"""
from dataclasses import dataclass
from typing import Any, Dict, Iterator, List, Sequence, Tuple

import numpy as np
from scipy.stats import multivariate_normal

from jumpwass.core.config import PROBABILITY_TOLERANCE
from jumpwass.core.errors import DimensionMismatchError, NotPositiveSemidefiniteError, ProbabilityVectorError
from jumpwass.utils.linalg import as_finite_array, clamp_psd, psd_sqrt


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Gaussian:
    mean: np.ndarray
    cov: np.ndarray

    def __post_init__(self):
        mean = as_finite_array(self.mean, "mean", ndim=1)
        cov = as_finite_array(self.cov, "covariance", ndim=2)
        if cov.shape != (mean.size, mean.size):
            raise DimensionMismatchError(
                f"covariance shape {cov.shape} does not match mean length {mean.size}"
            )
        object.__setattr__(self, "mean", _frozen(mean))
        object.__setattr__(self, "cov", _frozen(clamp_psd(cov)))

    @classmethod
    def dirac(cls, dim: int) -> "Gaussian":
        """delta(x): the Dirac reference at the origin"""
        return cls(mean=np.zeros(dim), cov=np.zeros((dim, dim)))

    @property
    def dim(self) -> int:
        return self.mean.size

    @property
    def is_dirac(self) -> bool:
        return not np.any(self.mean) and not np.any(self.cov)

    @property
    def second_moment(self) -> np.ndarray:
        """E[x x^T] = Sigma + mu mu^T"""
        return self.cov + np.outer(self.mean, self.mean)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw (size, n) samples; singular covariances allowed"""
        z = rng.standard_normal((size, self.dim))
        return self.mean + z @ psd_sqrt(self.cov).T

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "Gaussian":
        return cls(mean=data["mean"], cov=data["covariance"])


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    """
    Weighted Gaussian components stored as stacked arrays.

    weights (K,), means (K, n), covs (K, n, n). Weights must sum to 1 within
    PROBABILITY_TOLERANCE; they are kept as given, not renormalized.
    """

    weights: np.ndarray
    means: np.ndarray
    covs: np.ndarray

    def __post_init__(self):
        weights = as_finite_array(self.weights, "weights", ndim=1)
        means = as_finite_array(self.means, "means", ndim=2)
        covs = as_finite_array(self.covs, "covariances", ndim=3)
        if weights.size == 0:
            raise ProbabilityVectorError("mixture must have at least one component")
        if means.shape[0] != weights.size or covs.shape[0] != weights.size:
            raise DimensionMismatchError(
                f"{weights.size} weights for {means.shape[0]} means and {covs.shape[0]} covariances"
            )
        n = means.shape[1]
        if covs.shape[1:] != (n, n):
            raise DimensionMismatchError(f"component covariances must be {n}x{n}, got {covs.shape[1:]}")
        if np.any(weights < 0.0) or np.any(weights > 1.0 + PROBABILITY_TOLERANCE):
            raise ProbabilityVectorError("mixture weights must lie in [0, 1]")
        total = float(np.sum(weights))
        if abs(total - 1.0) > PROBABILITY_TOLERANCE:
            raise ProbabilityVectorError(f"mixture weights sum to {total!r}, expected 1")
        object.__setattr__(self, "weights", _frozen(weights))
        object.__setattr__(self, "means", _frozen(means))
        object.__setattr__(self, "covs", _frozen(clamp_psd(covs, "component covariance")))

    @classmethod
    def from_components(cls, components: Sequence[Tuple[float, Gaussian]]) -> "GaussianMixture":
        if len(components) == 0:
            raise ProbabilityVectorError("mixture must have at least one component")
        dims = {g.dim for _, g in components}
        if len(dims) != 1:
            raise DimensionMismatchError(f"components have different dimensions: {sorted(dims)}")
        return cls(
            weights=np.array([w for w, _ in components], dtype=float),
            means=np.stack([g.mean for _, g in components]),
            covs=np.stack([g.cov for _, g in components]),
        )

    @classmethod
    def single(cls, g: Gaussian) -> "GaussianMixture":
        return cls.from_components([(1.0, g)])

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    @property
    def num_components(self) -> int:
        return self.weights.size

    def __len__(self) -> int:
        return self.num_components

    def component(self, i: int) -> Gaussian:
        return Gaussian(mean=self.means[i], cov=self.covs[i])

    @property
    def components(self) -> List[Tuple[float, Gaussian]]:
        return list(self.iter_components())

    def iter_components(self) -> Iterator[Tuple[float, Gaussian]]:
        for i in range(self.num_components):
            yield float(self.weights[i]), self.component(i)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        """Draw (size, n) samples: pick a component by weight, then sample it"""
        labels = rng.choice(self.num_components, size=size, p=self.weights / np.sum(self.weights))
        z = rng.standard_normal((size, self.dim))
        factors = np.stack([psd_sqrt(c) for c in self.covs])
        return self.means[labels] + np.einsum("sab,sb->sa", factors[labels], z)

    def pdf(self, points) -> np.ndarray:
        """
        Mixture density sum_j alpha_j N(x; mu_j, Sigma_j) at (P, n) points.

        Undefined when a component with positive weight is singular.
        """
        x = np.atleast_2d(np.asarray(points, dtype=float))
        if x.shape[-1] != self.dim:
            raise DimensionMismatchError(f"points must have {self.dim} columns, got shape {x.shape}")
        density = np.zeros(x.shape[0])
        for w, g in self.iter_components():
            if w == 0.0:
                continue
            if np.linalg.matrix_rank(g.cov) < self.dim:
                raise NotPositiveSemidefiniteError(
                    "density is undefined for a singular component covariance",
                    invariant="non-singular component covariance",
                )
            density += w * multivariate_normal(mean=g.mean, cov=g.cov).pdf(x)
        return density
