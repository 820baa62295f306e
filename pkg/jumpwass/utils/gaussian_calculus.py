"""
Linear pushforward, moment merging and closed-form Wasserstein distances
to the Dirac reference at the origin.

Return conventions: wasserstein_to_dirac returns W, mixture_w2_to_dirac
returns W^2.
"""
import numpy as np

from jumpwass.core.errors import DimensionMismatchError
from jumpwass.models.gaussian import Gaussian, GaussianMixture
from jumpwass.utils.linalg import as_finite_array, symmetrize


def _check_map(A, dim: int) -> np.ndarray:
    A = as_finite_array(A, "linear map", ndim=2)
    if A.shape != (dim, dim):
        raise DimensionMismatchError(f"linear map has shape {A.shape}, expected ({dim}, {dim})")
    return A


def push_gaussian(A, g: Gaussian) -> Gaussian:
    """N(A mu, A Sigma A^T)"""
    A = _check_map(A, g.dim)
    return Gaussian(mean=A @ g.mean, cov=symmetrize(A @ g.cov @ A.T))


def push_mixture(A, mix: GaussianMixture) -> GaussianMixture:
    """Componentwise push_gaussian; weights untouched"""
    A = _check_map(A, mix.dim)
    means = mix.means @ A.T
    covs = symmetrize(np.einsum("ab,kbc,dc->kad", A, mix.covs, A))
    return GaussianMixture(weights=mix.weights, means=means, covs=covs)


def push_modes(modes: np.ndarray, g: Gaussian) -> GaussianMixture:
    """
    Split step: push g through each of the (m, n, n) modes.

    Returns the m pushed Gaussians as a mixture with uniform placeholder
    weights; callers reweight with with_weights().
    """
    pushed = [push_gaussian(a, g) for a in modes]
    m = len(pushed)
    return GaussianMixture(
        weights=np.full(m, 1.0 / m),
        means=np.stack([p.mean for p in pushed]),
        covs=np.stack([p.cov for p in pushed]),
    )


def with_weights(mix: GaussianMixture, weights) -> GaussianMixture:
    return GaussianMixture(weights=weights, means=mix.means, covs=mix.covs)


def merge_mixture(mix: GaussianMixture) -> Gaussian:
    """
    Synthetic Gaussian carrying the mixture's first two moments.

    mu_hat = sum_j w_j mu_j
    Sigma_hat = sum_j w_j (Sigma_j + (mu_j - mu_hat)(mu_j - mu_hat)^T)
    """
    w = mix.weights
    mu_hat = w @ mix.means
    spread = mix.means - mu_hat
    cov_hat = np.einsum("k,kab->ab", w, mix.covs) + np.einsum("k,ka,kb->ab", w, spread, spread)
    return Gaussian(mean=mu_hat, cov=symmetrize(cov_hat))


def gaussian_w2_to_dirac(g: Gaussian) -> float:
    """W^2(N(mu, Sigma), delta) = ||mu||^2 + tr(Sigma)"""
    return float(g.mean @ g.mean + np.trace(g.cov))


def wasserstein_to_dirac(g: Gaussian) -> float:
    """W(N(mu, Sigma), delta) = sqrt(||mu||^2 + tr(Sigma))"""
    return float(np.sqrt(gaussian_w2_to_dirac(g)))


def component_w2_to_dirac(mix: GaussianMixture) -> np.ndarray:
    """Per-component W_j^2, shape (K,)"""
    return np.einsum("ka,ka->k", mix.means, mix.means) + np.trace(mix.covs, axis1=1, axis2=2)


def mixture_w2_to_dirac(mix: GaussianMixture) -> float:
    """W^2(mixture, delta) = sum_j w_j W_j^2"""
    return float(mix.weights @ component_w2_to_dirac(mix))
