from itertools import product
from typing import Iterator
import logging

import numpy as np

from jumpwass.models.system import (
    JumpLinearSystem,
    LawMode,
    MarkovLaw,
    ModePath,
    SwitchingLaw,
    validate_system,
)

logger = logging.getLogger(__name__)


class SystemService:
    @staticmethod
    def validate_system(system: JumpLinearSystem) -> None:
        """Raise the matching JumpwassError if any system invariant fails"""
        validate_system(system)

    @staticmethod
    def marginal_at(law: SwitchingLaw, k: int) -> np.ndarray:
        """Occupation probabilities pi(k) of the mode applied at x(k-1) -> x(k)"""
        return law.marginal_at(k)

    @staticmethod
    def path_probability(law: SwitchingLaw, path: ModePath, law_mode: LawMode) -> float:
        """
        Probability of the exact mode sequence.

        PRODUCT multiplies the marginals pi_{j_r}(r). CHAIN uses the Markov
        path law pi_{j_1}(1) prod P[j_r, j_{r+1}]; for independent laws both
        coincide.
        """
        path.check(law.num_modes)
        law.check_horizon(len(path))
        law_mode = LawMode(law_mode)
        if law_mode == LawMode.CHAIN and isinstance(law, MarkovLaw):
            first = path.steps[0] - 1
            prob = float(law.marginal_at(1)[first])
            for a, b in zip(path.steps, path.steps[1:]):
                prob *= float(law.transition[a - 1, b - 1])
            return prob

        prob = 1.0
        for r, pi in enumerate(law.marginals(len(path)), start=1):
            prob *= float(pi[path.steps[r - 1] - 1])
        return prob

    @staticmethod
    def enumerate_paths(num_modes: int, k: int) -> Iterator[ModePath]:
        """All m^k paths of length k in lexicographic order"""
        for steps in product(range(1, num_modes + 1), repeat=k):
            yield ModePath(steps=steps)

    @staticmethod
    def path_masses_by_final_mode(law: SwitchingLaw, k: int, law_mode: LawMode) -> np.ndarray:
        """Sum of path_probability over length-k paths, grouped by the last mode"""
        masses = np.zeros(law.num_modes)
        for path in SystemService.enumerate_paths(law.num_modes, k):
            masses[path.steps[-1] - 1] += SystemService.path_probability(law, path, law_mode)
        return masses
