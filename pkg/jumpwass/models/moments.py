from dataclasses import dataclass
from typing import Dict, Iterator, Tuple

import numpy as np


@dataclass(frozen=True, eq=False)
class TrajectoryBatch:
    """Sampled states (N, K+1, n) and applied modes (N, K), 0-based"""

    states: np.ndarray
    modes: np.ndarray
    seed: int

    @property
    def num_trajectories(self) -> int:
        return self.states.shape[0]

    @property
    def horizon(self) -> int:
        return self.states.shape[1] - 1


@dataclass(frozen=True, eq=False)
class MomentEstimate:
    """Empirical moments of x(k) over the sampled trajectories"""

    k: int
    mean_sq: float
    stderr: float
    sample_mean: np.ndarray
    sample_cov: np.ndarray
    num_samples: int


@dataclass(frozen=True, eq=False)
class EmpiricalMoments:
    estimates: Tuple[MomentEstimate, ...]

    def __iter__(self) -> Iterator[MomentEstimate]:
        return iter(self.estimates)

    def __len__(self) -> int:
        return len(self.estimates)

    @property
    def ks(self):
        return [e.k for e in self.estimates]

    def by_k(self) -> Dict[int, MomentEstimate]:
        return {e.k: e for e in self.estimates}

    def columns(self) -> Dict[int, Tuple[float, float]]:
        """k -> (mean_sq, stderr), the form the trace table consumes"""
        return {e.k: (e.mean_sq, e.stderr) for e in self.estimates}
