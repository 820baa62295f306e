"""
Small dense matrix helpers for covariance handling
"""
import logging

import numpy as np
import scipy.linalg

from jumpwass.core.config import PSD_TOLERANCE, SYMMETRY_TOLERANCE
from jumpwass.core.errors import (
    DimensionMismatchError,
    NonFiniteEntryError,
    NotPositiveSemidefiniteError,
)

logger = logging.getLogger(__name__)


def as_finite_array(values, name: str, ndim: int) -> np.ndarray:
    """Convert to a float array of the given rank, rejecting NaN/inf"""
    try:
        arr = np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise DimensionMismatchError(f"{name} is not a rectangular numeric array: {e}")
    if arr.ndim != ndim:
        raise DimensionMismatchError(f"{name} must have {ndim} dimension(s), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteEntryError(f"{name} contains non-finite entries")
    return arr


def symmetrize(matrix: np.ndarray) -> np.ndarray:
    """Return (M + M^T) / 2 over the last two axes"""
    return 0.5 * (matrix + np.swapaxes(matrix, -1, -2))


def psd_scale(eigenvalues: np.ndarray) -> np.ndarray:
    return np.maximum(1.0, np.max(np.abs(eigenvalues), axis=-1))


def clamp_psd(cov: np.ndarray, name: str = "covariance") -> np.ndarray:
    """
    Symmetrize a covariance and clamp round-off negative eigenvalues to zero.

    Accepts a single (n, n) matrix or a stack (K, n, n). Eigenvalues below
    -PSD_TOLERANCE * max(1, max|eigenvalue|) are an error.
    """
    if cov.shape[-1] != cov.shape[-2]:
        raise DimensionMismatchError(f"{name} must be square, got shape {cov.shape}")
    asym = np.max(np.abs(cov - np.swapaxes(cov, -1, -2)), initial=0.0)
    if asym > SYMMETRY_TOLERANCE * max(1.0, float(np.max(np.abs(cov), initial=0.0))):
        raise NotPositiveSemidefiniteError(
            f"{name} is not symmetric (max asymmetry {asym:.3e})", invariant="symmetric covariance"
        )
    sym = symmetrize(cov)
    if sym.shape[-1] == 0:
        return sym

    eigenvalues = np.linalg.eigvalsh(sym)
    floor = -PSD_TOLERANCE * psd_scale(eigenvalues)
    min_eig = eigenvalues[..., 0]
    if np.any(min_eig < floor):
        worst = float(np.min(min_eig))
        raise NotPositiveSemidefiniteError(f"{name} has negative eigenvalue {worst:.3e}")

    negative = min_eig < 0.0
    if not np.any(negative):
        return sym
    logger.debug(f"Clamping round-off negative eigenvalues in {int(np.sum(negative))} {name}(s)")
    if sym.ndim == 2:
        return _rebuild_clamped(sym)
    out = sym.copy()
    for idx in zip(*np.nonzero(negative)):
        out[idx] = _rebuild_clamped(sym[idx])
    return out


def _rebuild_clamped(matrix: np.ndarray) -> np.ndarray:
    w, v = scipy.linalg.eigh(matrix)
    rebuilt = (v * np.clip(w, 0.0, None)) @ v.T
    return symmetrize(rebuilt)


def psd_sqrt(cov: np.ndarray) -> np.ndarray:
    """
    Square-root factor L with L @ L.T == cov, via eigendecomposition.

    Works for singular covariances (clamped eigenvalues), unlike Cholesky.
    """
    w, v = scipy.linalg.eigh(symmetrize(cov))
    return v * np.sqrt(np.clip(w, 0.0, None))
