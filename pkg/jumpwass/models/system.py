"""
Jump linear system and switching laws.

x(k+1) = A_{sigma_k} x(k) with sigma_k drawn according to a SwitchingLaw.
The mode applied at the transition x(k) -> x(k+1) is distributed as
marginal_at(k + 1).
"""
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterator, Optional, Tuple
import logging

import numpy as np
import scipy.linalg

from jumpwass.core.config import PROBABILITY_TOLERANCE
from jumpwass.core.errors import (
    DimensionMismatchError,
    EmptyModeSetError,
    NonFiniteEntryError,
    ProbabilityVectorError,
    ScheduleExhaustedError,
    TransitionMatrixError,
)

logger = logging.getLogger(__name__)


class LawMode(str, Enum):
    """How path probabilities are weighted"""
    PRODUCT = "product-of-marginals"
    CHAIN = "chain"


class ModeTiming(str, Enum):
    """When the first Markov mode is drawn"""
    TRANSITION = "transition"  # sigma_1 ~ pi(0) P
    PRIOR = "prior"  # sigma_1 ~ pi(0)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


def normalize_probability_vector(values, name: str = "probability vector") -> np.ndarray:
    """
    Validate a probability vector and renormalize it if it is within tolerance.

    Entries must lie in [0, 1] and sum to 1 within PROBABILITY_TOLERANCE.
    """
    try:
        vec = np.array(values, dtype=float)
    except (TypeError, ValueError) as e:
        raise ProbabilityVectorError(f"{name} is not numeric: {e}")
    if vec.ndim != 1 or vec.size == 0:
        raise ProbabilityVectorError(f"{name} must be a non-empty 1-D vector, got shape {vec.shape}")
    if not np.all(np.isfinite(vec)):
        raise ProbabilityVectorError(f"{name} contains non-finite entries")
    if np.any(vec < -PROBABILITY_TOLERANCE) or np.any(vec > 1.0 + PROBABILITY_TOLERANCE):
        raise ProbabilityVectorError(f"{name} has entries outside [0, 1]: {vec.tolist()}")
    total = float(np.sum(vec))
    if abs(total - 1.0) > PROBABILITY_TOLERANCE:
        raise ProbabilityVectorError(f"{name} sums to {total!r}, expected 1")
    vec = np.clip(vec, 0.0, 1.0)
    total = float(np.sum(vec))
    if total != 1.0:
        logger.debug(f"Renormalizing {name} (sum {total!r})")
        vec = vec / total
    return vec


@dataclass(frozen=True, eq=False)
class JumpLinearSystem:
    """Ordered mode set {A_1, ..., A_m} sharing the state dimension n"""

    modes: Tuple[np.ndarray, ...]
    mode_names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        modes = tuple(np.array(a, dtype=float) if _is_rectangular(a) else a for a in self.modes)
        object.__setattr__(self, "modes", modes)
        validate_system(self)
        object.__setattr__(self, "modes", tuple(_frozen(a) for a in modes))
        if self.mode_names is not None:
            names = tuple(str(name) for name in self.mode_names)
            if len(names) != len(modes):
                raise DimensionMismatchError(
                    f"{len(names)} mode names given for {len(modes)} modes", invariant="mode_names length"
                )
            object.__setattr__(self, "mode_names", names)

    @property
    def num_modes(self) -> int:
        return len(self.modes)

    @property
    def dim(self) -> int:
        return self.modes[0].shape[0]

    @property
    def stacked(self) -> np.ndarray:
        """Modes as an (m, n, n) array"""
        return np.stack(self.modes)

    def label(self, j: int) -> str:
        """Label for 1-based mode j"""
        if self.mode_names:
            return self.mode_names[j - 1]
        return f"mode_{j}"

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "JumpLinearSystem":
        names = data.get("mode_names")
        return cls(modes=tuple(data.get("modes", ())), mode_names=tuple(names) if names else None)


def _is_rectangular(values) -> bool:
    try:
        np.array(values, dtype=float)
        return True
    except (TypeError, ValueError):
        return False


def validate_system(system: JumpLinearSystem) -> None:
    """
    Check the JumpLinearSystem invariants; raise the matching error on failure.

    m >= 1, every A_j square n x n with a common n, all entries finite.
    """
    modes = system.modes
    if len(modes) == 0:
        raise EmptyModeSetError("system has no modes")
    n = None
    for j, a in enumerate(modes, start=1):
        if not isinstance(a, np.ndarray) or a.ndim != 2:
            raise DimensionMismatchError(f"mode {j} is not a 2-D matrix")
        if a.shape[0] != a.shape[1]:
            raise DimensionMismatchError(f"mode {j} is not square: shape {a.shape}")
        if n is None:
            n = a.shape[0]
        elif a.shape[0] != n:
            raise DimensionMismatchError(f"mode {j} is {a.shape[0]}x{a.shape[0]} but mode 1 is {n}x{n}")
        if not np.all(np.isfinite(a)):
            raise NonFiniteEntryError(f"mode {j} contains non-finite entries")
    if n == 0:
        raise DimensionMismatchError("state dimension must be at least 1")


@dataclass(frozen=True)
class ModePath:
    """Mode sequence (j_1, ..., j_k), 1-based"""

    steps: Tuple[int, ...]

    def __post_init__(self):
        steps = tuple(int(j) for j in self.steps)
        if any(s != j for s, j in zip(steps, self.steps)):
            raise ValueError(f"mode indices must be integers, got {self.steps}")
        if len(steps) == 0:
            raise ValueError("mode path must have length >= 1")
        if min(steps) < 1:
            raise ValueError(f"mode indices are 1-based, got {steps}")
        object.__setattr__(self, "steps", steps)

    def __len__(self) -> int:
        return len(self.steps)

    def check(self, num_modes: int) -> None:
        if max(self.steps) > num_modes:
            raise ValueError(f"path {self.steps} uses a mode index above {num_modes}")

    def product(self, system: JumpLinearSystem) -> np.ndarray:
        """A*_p = A_{j_k} ... A_{j_1}"""
        self.check(system.num_modes)
        result = np.eye(system.dim)
        for j in self.steps:
            result = system.modes[j - 1] @ result
        return result


class SwitchingLaw:
    """Probability law over mode sequences"""

    kind: str = "abstract"

    @property
    def num_modes(self) -> int:
        raise NotImplementedError

    @property
    def horizon(self) -> Optional[int]:
        """Last time index with a defined marginal, or None if unbounded"""
        return None

    @property
    def is_markov(self) -> bool:
        return False

    def marginal_at(self, k: int) -> np.ndarray:
        raise NotImplementedError

    def marginals(self, horizon: int) -> Iterator[np.ndarray]:
        """pi(1), ..., pi(horizon)"""
        for k in range(1, horizon + 1):
            yield self.marginal_at(k)

    def check_horizon(self, horizon: int) -> None:
        if self.horizon is not None and horizon > self.horizon:
            raise ScheduleExhaustedError(
                f"{self.kind} law defines {self.horizon} steps, {horizon} requested"
            )

    @staticmethod
    def _check_k(k: int) -> int:
        if int(k) != k or k < 1:
            raise ValueError(f"time index must be a positive integer, got {k!r}")
        return int(k)


@dataclass(frozen=True, eq=False)
class IIDLaw(SwitchingLaw):
    """Stationary randomized switching: sigma_k ~ pi for every k"""

    pi: np.ndarray
    kind: str = field(default="iid", init=False)

    def __post_init__(self):
        object.__setattr__(self, "pi", _frozen(normalize_probability_vector(self.pi, "pi")))

    @property
    def num_modes(self) -> int:
        return self.pi.size

    def marginal_at(self, k: int) -> np.ndarray:
        self._check_k(k)
        return self.pi


@dataclass(frozen=True, eq=False)
class ScheduleLaw(SwitchingLaw):
    """Independent switching with an explicit finite list pi(1), pi(2), ..."""

    vectors: Tuple[np.ndarray, ...]
    kind: str = field(default="schedule", init=False)

    def __post_init__(self):
        if len(self.vectors) == 0:
            raise ProbabilityVectorError("schedule must contain at least one probability vector")
        vectors = tuple(
            _frozen(normalize_probability_vector(v, f"schedule[{k}]")) for k, v in enumerate(self.vectors, start=1)
        )
        m = vectors[0].size
        for k, v in enumerate(vectors, start=1):
            if v.size != m:
                raise DimensionMismatchError(f"schedule[{k}] has {v.size} entries, expected {m}")
        object.__setattr__(self, "vectors", vectors)

    @classmethod
    def no_switching(cls, j: int, num_modes: int, horizon: int) -> "ScheduleLaw":
        """Stationary deterministic schedule that always runs 1-based mode j"""
        if not 1 <= j <= num_modes:
            raise ValueError(f"mode index {j} outside 1..{num_modes}")
        e_j = np.zeros(num_modes)
        e_j[j - 1] = 1.0
        return cls(vectors=tuple(e_j for _ in range(horizon)))

    @property
    def num_modes(self) -> int:
        return self.vectors[0].size

    @property
    def horizon(self) -> Optional[int]:
        return len(self.vectors)

    def marginal_at(self, k: int) -> np.ndarray:
        k = self._check_k(k)
        if k > len(self.vectors):
            raise ScheduleExhaustedError(f"schedule has {len(self.vectors)} steps, k={k} requested")
        return self.vectors[k - 1]


@dataclass(frozen=True, eq=False)
class MarkovLaw(SwitchingLaw):
    """Markov chain switching with prior pi0 and row-stochastic P"""

    pi0: np.ndarray
    transition: np.ndarray
    timing: ModeTiming = ModeTiming.TRANSITION
    kind: str = field(default="markov", init=False)

    def __post_init__(self):
        pi0 = normalize_probability_vector(self.pi0, "pi0")
        try:
            P = np.array(self.transition, dtype=float)
        except (TypeError, ValueError) as e:
            raise TransitionMatrixError(f"transition matrix is not numeric: {e}")
        if P.ndim != 2 or P.shape != (pi0.size, pi0.size):
            raise TransitionMatrixError(
                f"transition matrix must be {pi0.size}x{pi0.size}, got shape {P.shape}"
            )
        rows = []
        for i, row in enumerate(P, start=1):
            try:
                rows.append(normalize_probability_vector(row, f"transition row {i}"))
            except ProbabilityVectorError as e:
                raise TransitionMatrixError(str(e))
        object.__setattr__(self, "pi0", _frozen(pi0))
        object.__setattr__(self, "transition", _frozen(np.stack(rows)))
        object.__setattr__(self, "timing", ModeTiming(self.timing))

    @classmethod
    def at_stationarity(cls, transition, timing: ModeTiming = ModeTiming.TRANSITION) -> "MarkovLaw":
        """Markov law started from the stationary distribution of P"""
        P = np.array(transition, dtype=float)
        pi = stationary_distribution(P)
        return cls(pi0=pi, transition=P, timing=timing)

    @property
    def num_modes(self) -> int:
        return self.pi0.size

    @property
    def is_markov(self) -> bool:
        return True

    def stationary_distribution(self) -> np.ndarray:
        return stationary_distribution(self.transition)

    def marginal_at(self, k: int) -> np.ndarray:
        k = self._check_k(k)
        steps = k if self.timing == ModeTiming.TRANSITION else k - 1
        pi = self.pi0
        for _ in range(steps):
            pi = pi @ self.transition
        return pi

    def marginals(self, horizon: int) -> Iterator[np.ndarray]:
        pi = self.pi0 if self.timing == ModeTiming.PRIOR else self.pi0 @ self.transition
        for _ in range(horizon):
            yield pi
            pi = pi @ self.transition


def stationary_distribution(transition: np.ndarray) -> np.ndarray:
    """Left eigenvector of P for eigenvalue 1, normalized to a probability vector"""
    w, vl = scipy.linalg.eig(transition, left=True, right=False)
    idx = int(np.argmin(np.abs(w - 1.0)))
    vec = np.real(vl[:, idx])
    vec = vec / np.sum(vec)
    return normalize_probability_vector(np.clip(vec, 0.0, None), "stationary distribution")


def law_from_dict(data: Dict[str, Any]) -> SwitchingLaw:
    """Build a SwitchingLaw from a config mapping keyed by 'kind'"""
    kind = data.get("kind")
    if kind == "iid":
        return IIDLaw(pi=data["pi"])
    if kind == "schedule":
        return ScheduleLaw(vectors=tuple(data["vectors"]))
    if kind == "markov":
        return MarkovLaw(
            pi0=data["initial"],
            transition=data["transition"],
            timing=ModeTiming(data.get("timing", ModeTiming.TRANSITION.value)),
        )
    raise ValueError(f"unknown switching law kind: {kind!r}")
