"""
State-PDF propagation engines.

- enumeration: the exact mixture with m^k components (oracle)
- split-and-merge: one synthetic Gaussian per step, exact in W under
  independent switching
- mode-conditional: m conditional moment pairs per step, exact in W under
  the Markov chain law
- single mode: no-switch propagation along one A_j
"""
from typing import Iterator, Optional, Tuple
import logging

import numpy as np

from jumpwass.core.config import ENUMERATION_COMPONENT_CAP
from jumpwass.core.errors import ComponentCapExceededError, DimensionMismatchError, LawKindError
from jumpwass.models.gaussian import Gaussian, GaussianMixture
from jumpwass.models.system import JumpLinearSystem, LawMode, MarkovLaw, SwitchingLaw
from jumpwass.models.trace import ModeConditionalState, TraceEntry, WassersteinTrace
from jumpwass.utils.gaussian_calculus import (
    gaussian_w2_to_dirac,
    merge_mixture,
    mixture_w2_to_dirac,
    push_gaussian,
    push_modes,
    with_weights,
)
from jumpwass.utils.linalg import symmetrize

logger = logging.getLogger(__name__)


def _check_horizon(horizon: int) -> int:
    if int(horizon) != horizon or horizon < 1:
        raise ValueError(f"horizon must be a positive integer, got {horizon!r}")
    return int(horizon)


def _check_dims(system: JumpLinearSystem, law: SwitchingLaw, init: Gaussian) -> None:
    if law.num_modes != system.num_modes:
        raise DimensionMismatchError(
            f"switching law has {law.num_modes} modes, system has {system.num_modes}"
        )
    if init.dim != system.dim:
        raise DimensionMismatchError(
            f"initial state has dimension {init.dim}, system has {system.dim}"
        )


class PropagationService:
    @staticmethod
    def enumeration_bytes(num_components: int, dim: int) -> int:
        """Memory for weights, means and covariances of the enumerated mixture"""
        return num_components * (1 + dim + dim * dim) * 8

    @staticmethod
    def iter_enumeration(
        system: JumpLinearSystem,
        law: SwitchingLaw,
        law_mode: LawMode,
        init: Gaussian,
        horizon: int,
        component_cap: Optional[int] = None,
    ) -> Iterator[Tuple[int, GaussianMixture]]:
        """
        Yield (k, rho(k)) for k = 1..horizon.

        Component index at step k is the path (j_1, ..., j_k) read as a base-m
        number with j_1 most significant, so components come out in
        lexicographic path order.
        """
        horizon = _check_horizon(horizon)
        _check_dims(system, law, init)
        law.check_horizon(horizon)
        law_mode = LawMode(law_mode)
        cap = ENUMERATION_COMPONENT_CAP if component_cap is None else int(component_cap)
        m, n = system.num_modes, system.dim
        required = m ** horizon
        if required > cap:
            raise ComponentCapExceededError(required, cap, PropagationService.enumeration_bytes(required, n))

        modes = system.stacked
        chain = law_mode == LawMode.CHAIN and isinstance(law, MarkovLaw)
        weights = np.ones(1)
        means = init.mean[None, :]
        covs = init.cov[None, :, :]
        last_mode = None

        for k, pi in enumerate(law.marginals(horizon), start=1):
            if chain and last_mode is not None:
                step_weights = law.transition[last_mode]  # (K, m)
            else:
                step_weights = np.broadcast_to(pi, (weights.size, m))
            weights = (weights[:, None] * step_weights).reshape(-1)
            means = np.einsum("jab,kb->kja", modes, means).reshape(-1, n)
            covs = symmetrize(np.einsum("jab,kbc,jdc->kjad", modes, covs, modes)).reshape(-1, n, n)
            last_mode = np.tile(np.arange(m), weights.size // m)
            logger.debug(f"Enumeration step {k}: {weights.size} components")
            yield k, GaussianMixture(weights=weights, means=means, covs=covs)

    @staticmethod
    def enumerate_mixture(
        system: JumpLinearSystem,
        law: SwitchingLaw,
        law_mode: LawMode,
        init: Gaussian,
        k: int,
        component_cap: Optional[int] = None,
    ) -> GaussianMixture:
        """State PDF at time k as the full m^k-component mixture"""
        mixture = None
        for _, mixture in PropagationService.iter_enumeration(system, law, law_mode, init, k, component_cap):
            pass
        return mixture

    @staticmethod
    def run_enumeration(
        system: JumpLinearSystem,
        law: SwitchingLaw,
        law_mode: LawMode,
        init: Gaussian,
        horizon: int,
        component_cap: Optional[int] = None,
    ) -> WassersteinTrace:
        """Oracle trace W(k) = sqrt(mixture W^2) for k = 0..horizon"""
        logger.info(f"Enumerating mixtures up to k={horizon} ({LawMode(law_mode).value} weights)")
        entries = [TraceEntry.from_w_sq(0, gaussian_w2_to_dirac(init))]
        for k, mixture in PropagationService.iter_enumeration(system, law, law_mode, init, horizon, component_cap):
            entries.append(TraceEntry.from_w_sq(k, mixture_w2_to_dirac(mixture)))
        return WassersteinTrace(entries=tuple(entries), engine="enumerate", num_modes=system.num_modes)

    @staticmethod
    def split_and_merge_step(system: JumpLinearSystem, pi_next: np.ndarray, g: Gaussian) -> Tuple[Gaussian, float]:
        """Split g through every mode, merge with weights pi_next; return (merged, W_hat)"""
        split = push_modes(system.stacked, g)
        merged = merge_mixture(with_weights(split, pi_next))
        return merged, float(np.sqrt(gaussian_w2_to_dirac(merged)))

    @staticmethod
    def iter_split_and_merge(
        system: JumpLinearSystem, law: SwitchingLaw, init: Gaussian, horizon: int
    ) -> Iterator[Tuple[int, Gaussian]]:
        """Yield (k, synthetic Gaussian at k) for k = 0..horizon; carries one Gaussian"""
        horizon = _check_horizon(horizon)
        _check_dims(system, law, init)
        law.check_horizon(horizon)
        g = init
        yield 0, g
        for k, pi in enumerate(law.marginals(horizon), start=1):
            g, _ = PropagationService.split_and_merge_step(system, pi, g)
            yield k, g

    @staticmethod
    def run_split_and_merge(
        system: JumpLinearSystem, law: SwitchingLaw, init: Gaussian, horizon: int
    ) -> WassersteinTrace:
        logger.info(f"Running split-and-merge for {horizon} steps")
        entries = [
            TraceEntry.from_w_sq(k, gaussian_w2_to_dirac(g))
            for k, g in PropagationService.iter_split_and_merge(system, law, init, horizon)
        ]
        logger.debug(f"Split-and-merge final W_hat={entries[-1].w_hat:.6g}")
        return WassersteinTrace(entries=tuple(entries), engine="split_merge", num_modes=system.num_modes)

    @staticmethod
    def iter_mode_conditional(
        system: JumpLinearSystem, law: MarkovLaw, init: Gaussian, horizon: int
    ) -> Iterator[Tuple[int, ModeConditionalState]]:
        """
        Markov-exact recursion over mode-conditional moments.

        With F_j(k) = E[x(k) 1{sigma_k = j}] and Q_j(k) = E[x(k) x(k)^T 1{sigma_k = j}]:
          F_j(1) = pi_j(1) A_j mu0,            Q_j(1) = pi_j(1) A_j S0 A_j^T
          F_j(k+1) = A_j sum_i P_ij F_i(k),    Q_j(k+1) = A_j (sum_i P_ij Q_i(k)) A_j^T
        The k = 0 state puts the prior pi(0) on the unconditional moments.
        """
        if not isinstance(law, MarkovLaw):
            raise LawKindError(f"mode-conditional propagation needs a Markov law, got '{law.kind}'")
        horizon = _check_horizon(horizon)
        _check_dims(system, law, init)

        modes = system.stacked
        m = system.num_modes
        P = law.transition
        s0 = init.second_moment
        yield 0, ModeConditionalState(
            masses=law.pi0,
            means=np.tile(init.mean, (m, 1)),
            second_moments=np.tile(s0, (m, 1, 1)),
        )

        masses = law.marginal_at(1)
        first = masses[:, None] * np.einsum("jab,b->ja", modes, init.mean)
        second = masses[:, None, None] * np.einsum("jab,bc,jdc->jad", modes, s0, modes)
        second = symmetrize(second)
        yield 1, ModeConditionalState.from_unnormalized(masses, first, second)

        for k in range(2, horizon + 1):
            masses = masses @ P
            first = np.einsum("jab,jb->ja", modes, P.T @ first)
            mixed = np.einsum("ij,iab->jab", P, second)
            second = symmetrize(np.einsum("jab,jbc,jdc->jad", modes, mixed, modes))
            yield k, ModeConditionalState.from_unnormalized(masses, first, second)

    @staticmethod
    def run_mode_conditional(
        system: JumpLinearSystem, law: MarkovLaw, init: Gaussian, horizon: int
    ) -> WassersteinTrace:
        logger.info(f"Running Markov-exact mode-conditional recursion for {horizon} steps")
        entries = [
            TraceEntry.from_w_sq(k, state.w_sq)
            for k, state in PropagationService.iter_mode_conditional(system, law, init, horizon)
        ]
        return WassersteinTrace(entries=tuple(entries), engine="mode_conditional", num_modes=system.num_modes)

    @staticmethod
    def run_single_mode(system: JumpLinearSystem, j: int, init: Gaussian, horizon: int) -> WassersteinTrace:
        """No-switch trace W_j(k) along the 1-based mode j"""
        if int(j) != j or not 1 <= j <= system.num_modes:
            raise ValueError(f"mode index {j!r} outside 1..{system.num_modes}")
        horizon = _check_horizon(horizon)
        if init.dim != system.dim:
            raise DimensionMismatchError(f"initial state has dimension {init.dim}, system has {system.dim}")
        A = system.modes[int(j) - 1]
        g = init
        entries = [TraceEntry.from_w_sq(0, gaussian_w2_to_dirac(g))]
        for k in range(1, horizon + 1):
            g = push_gaussian(A, g)
            entries.append(TraceEntry.from_w_sq(k, gaussian_w2_to_dirac(g)))
        return WassersteinTrace(entries=tuple(entries), engine=f"single_mode_{int(j)}", num_modes=system.num_modes)
