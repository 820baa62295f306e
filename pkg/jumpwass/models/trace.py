"""
Per-step Wasserstein records and the carried state of the Markov-exact engine
"""
from dataclasses import dataclass, replace
from typing import Dict, Iterable, List, Optional, Sequence, Tuple
import math

import numpy as np

from jumpwass.core.config import PROBABILITY_TOLERANCE
from jumpwass.core.errors import DimensionMismatchError, ProbabilityVectorError
from jumpwass.models.gaussian import Gaussian
from jumpwass.utils.linalg import clamp_psd, symmetrize


@dataclass(frozen=True)
class TraceEntry:
    k: int
    w_hat: float
    w_sq_hat: float
    per_mode_w: Optional[Tuple[Optional[float], ...]] = None
    w_oracle: Optional[float] = None
    w_markov_exact: Optional[float] = None
    mc_mean_sq: Optional[float] = None
    mc_stderr: Optional[float] = None

    @classmethod
    def from_w_sq(cls, k: int, w_sq: float, **extra) -> "TraceEntry":
        w_sq = max(float(w_sq), 0.0)
        return cls(k=k, w_hat=math.sqrt(w_sq), w_sq_hat=w_sq, **extra)


@dataclass(frozen=True)
class WassersteinTrace:
    """
    Time-indexed record of W_hat(k), starting at k = 0.

    `engine` names what produced w_hat; `num_modes` sizes the per-mode columns.
    """

    entries: Tuple[TraceEntry, ...]
    engine: str = "split_merge"
    num_modes: int = 1

    def __post_init__(self):
        entries = tuple(self.entries)
        if not entries:
            raise ValueError("trace must contain at least the k=0 entry")
        if entries[0].k != 0:
            raise ValueError(f"trace must start at k=0, starts at k={entries[0].k}")
        for prev, cur in zip(entries, entries[1:]):
            if cur.k <= prev.k:
                raise ValueError(f"trace time indices must strictly increase ({prev.k} then {cur.k})")
        for e in entries:
            if e.w_hat < 0.0:
                raise ValueError(f"negative w_hat at k={e.k}")
            if not math.isclose(e.w_hat * e.w_hat, e.w_sq_hat, rel_tol=1e-12, abs_tol=1e-300):
                raise ValueError(f"w_sq_hat != w_hat^2 at k={e.k}")
            if e.per_mode_w is not None and len(e.per_mode_w) != self.num_modes:
                raise DimensionMismatchError(
                    f"per-mode column at k={e.k} has {len(e.per_mode_w)} entries, expected {self.num_modes}"
                )
        object.__setattr__(self, "entries", entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def horizon(self) -> int:
        return self.entries[-1].k

    @property
    def ks(self) -> List[int]:
        return [e.k for e in self.entries]

    @property
    def w_hat(self) -> np.ndarray:
        return np.array([e.w_hat for e in self.entries])

    @property
    def w_sq_hat(self) -> np.ndarray:
        return np.array([e.w_sq_hat for e in self.entries])

    def at(self, k: int) -> TraceEntry:
        for e in self.entries:
            if e.k == k:
                return e
        raise KeyError(f"no trace entry for k={k}")

    def by_k(self) -> Dict[int, TraceEntry]:
        return {e.k: e for e in self.entries}

    def with_entries(self, entries: Iterable[TraceEntry]) -> "WassersteinTrace":
        return replace(self, entries=tuple(entries))


def combine_traces(
    base: WassersteinTrace,
    oracle: Optional[WassersteinTrace] = None,
    single_modes: Optional[Sequence[WassersteinTrace]] = None,
    markov_exact: Optional[WassersteinTrace] = None,
    mc: Optional[Dict[int, Tuple[float, float]]] = None,
) -> WassersteinTrace:
    """
    Merge engine traces into one table keyed by the base trace's k values.

    Values from other engines fill their columns where their k exists and
    stay None elsewhere. `mc` maps k to (mean_sq, stderr).
    """
    oracle_by_k = oracle.by_k() if oracle else {}
    markov_by_k = markov_exact.by_k() if markov_exact else {}
    modes_by_k = [t.by_k() for t in single_modes] if single_modes else None
    mc = mc or {}

    entries = []
    for e in base.entries:
        per_mode = None
        if modes_by_k is not None:
            per_mode = tuple(m[e.k].w_hat if e.k in m else None for m in modes_by_k)
        mc_mean_sq, mc_stderr = mc.get(e.k, (None, None))
        entries.append(
            replace(
                e,
                per_mode_w=per_mode,
                w_oracle=oracle_by_k[e.k].w_hat if e.k in oracle_by_k else None,
                w_markov_exact=markov_by_k[e.k].w_hat if e.k in markov_by_k else None,
                mc_mean_sq=mc_mean_sq,
                mc_stderr=mc_stderr,
            )
        )
    num_modes = len(single_modes) if single_modes else base.num_modes
    return WassersteinTrace(entries=tuple(entries), engine=base.engine, num_modes=num_modes)


@dataclass(frozen=True, eq=False)
class ModeConditionalState:
    """
    Mode-conditional first and second moments at one time step.

    masses q_j = P(sigma = j), means E[x | sigma = j], second_moments
    E[x x^T | sigma = j]. Modes with zero mass carry zero moments.
    """

    masses: np.ndarray
    means: np.ndarray
    second_moments: np.ndarray

    def __post_init__(self):
        masses = np.array(self.masses, dtype=float)
        if np.any(masses < -PROBABILITY_TOLERANCE):
            raise ProbabilityVectorError("mode masses must be non-negative")
        if abs(float(np.sum(masses)) - 1.0) > PROBABILITY_TOLERANCE:
            raise ProbabilityVectorError(f"mode masses sum to {float(np.sum(masses))!r}, expected 1")
        means = np.array(self.means, dtype=float)
        moments = np.array(self.second_moments, dtype=float)
        m = masses.size
        if means.shape[0] != m or moments.shape[0] != m:
            raise DimensionMismatchError("masses, means and second moments must have one entry per mode")
        object.__setattr__(self, "masses", np.clip(masses, 0.0, None))
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "second_moments", clamp_psd(moments, "conditional second moment"))

    @classmethod
    def from_unnormalized(cls, masses: np.ndarray, first: np.ndarray, second: np.ndarray) -> "ModeConditionalState":
        """Build from E[x 1{sigma=j}] and E[x x^T 1{sigma=j}]"""
        safe = np.where(masses > 0.0, masses, 1.0)
        means = np.where(masses[:, None] > 0.0, first / safe[:, None], 0.0)
        moments = np.where(masses[:, None, None] > 0.0, second / safe[:, None, None], 0.0)
        return cls(masses=masses, means=means, second_moments=symmetrize(moments))

    @property
    def num_modes(self) -> int:
        return self.masses.size

    @property
    def dim(self) -> int:
        return self.means.shape[1]

    @property
    def w_sq(self) -> float:
        """E||x||^2 = sum_j q_j tr(M_j)"""
        return float(self.masses @ np.trace(self.second_moments, axis1=1, axis2=2))

    def merged(self) -> Gaussian:
        """Synthetic Gaussian with the unconditional mean and covariance"""
        mean = self.masses @ self.means
        second = np.einsum("j,jab->ab", self.masses, self.second_moments)
        return Gaussian(mean=mean, cov=symmetrize(second - np.outer(mean, mean)))
