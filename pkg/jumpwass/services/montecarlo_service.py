"""
Trajectory sampling of x(k+1) = A_{sigma_k} x(k) and empirical checks of
W^2(k) = E||x(k)||^2.
"""
from concurrent.futures import ThreadPoolExecutor
from typing import Optional, Tuple
import logging
import math

import numpy as np

from jumpwass.core.config import DEFAULT_SIGMA_MULT, MC_BLOCK_SIZE, MC_WORKERS, ROUNDOFF_TOLERANCE
from jumpwass.core.errors import DimensionMismatchError, HorizonMismatchError, InsufficientSamplesError
from jumpwass.models.gaussian import Gaussian
from jumpwass.models.moments import EmpiricalMoments, MomentEstimate, TrajectoryBatch
from jumpwass.models.system import JumpLinearSystem, LawMode, MarkovLaw, SwitchingLaw
from jumpwass.models.trace import WassersteinTrace
from jumpwass.schemas.config import SamplerConfig
from jumpwass.schemas.report import StepCheck, TraceValidationReport
from jumpwass.utils.linalg import psd_sqrt
from jumpwass.utils.rng import StreamPurpose, TrajectoryStream, block_generator

logger = logging.getLogger(__name__)


def _draw_modes(u: np.ndarray, cumulative: np.ndarray, num_modes: int) -> np.ndarray:
    """Inverse-CDF mode draw; cumulative is (m,) or (B, m)"""
    if cumulative.ndim == 1:
        cumulative = cumulative[None, :]
    idx = np.sum(u[:, None] >= cumulative, axis=1)
    return np.minimum(idx, num_modes - 1)


def _simulate_block(
    system: JumpLinearSystem,
    law: SwitchingLaw,
    law_mode: LawMode,
    init: Gaussian,
    horizon: int,
    seed: int,
    block: int,
) -> Tuple[np.ndarray, np.ndarray]:
    """Full block of MC_BLOCK_SIZE trajectories; callers slice what they need"""
    size = MC_BLOCK_SIZE
    m, n = system.num_modes, system.dim
    modes_stack = system.stacked
    chain = law_mode == LawMode.CHAIN and isinstance(law, MarkovLaw)
    cumulative_rows = np.cumsum(law.transition, axis=1) if chain else None

    states = np.empty((size, horizon + 1, n))
    applied = np.empty((size, horizon), dtype=np.int64)

    z = block_generator(seed, block, 0, StreamPurpose.INITIAL_STATE).standard_normal((size, n))
    x = init.mean + z @ psd_sqrt(init.cov).T
    states[:, 0, :] = x

    prev = None
    for k, pi in enumerate(law.marginals(horizon), start=1):
        u = block_generator(seed, block, k, StreamPurpose.MODE_DRAW).random(size)
        if chain and prev is not None:
            sigma = _draw_modes(u, cumulative_rows[prev], m)
        else:
            sigma = _draw_modes(u, np.cumsum(pi), m)
        x = np.einsum("bij,bj->bi", modes_stack[sigma], x)
        states[:, k, :] = x
        applied[:, k - 1] = sigma
        prev = sigma
    return states, applied


class MonteCarloService:
    @staticmethod
    def sample_trajectory(
        system: JumpLinearSystem,
        law: SwitchingLaw,
        law_mode: LawMode,
        init: Gaussian,
        horizon: int,
        stream: TrajectoryStream,
    ) -> np.ndarray:
        """States x(0), ..., x(horizon) of one trajectory, shape (horizon + 1, n)"""
        MonteCarloService._check_inputs(system, law, init, horizon)
        states, _ = _simulate_block(system, law, LawMode(law_mode), init, horizon, stream.seed, stream.block)
        return states[stream.offset]

    @staticmethod
    def sample_trajectories(
        system: JumpLinearSystem,
        law: SwitchingLaw,
        init: Gaussian,
        config: SamplerConfig,
        workers: Optional[int] = None,
    ) -> TrajectoryBatch:
        """
        Sample config.num_trajectories trajectories block by block.

        Blocks may run on several threads; they are reassembled in block
        order, so the batch does not depend on the worker count.
        """
        if config.horizon is None:
            raise ValueError("sampler horizon must be set")
        horizon = config.horizon
        MonteCarloService._check_inputs(system, law, init, horizon)
        law_mode = LawMode(config.law_mode)
        total = config.num_trajectories
        num_blocks = math.ceil(total / MC_BLOCK_SIZE)
        workers = workers or config.workers or MC_WORKERS
        logger.info(
            f"Sampling {total} trajectories over {horizon} steps "
            f"({law_mode.value}, seed {config.seed}, {num_blocks} blocks, {workers} worker(s))"
        )

        def run(block: int):
            return _simulate_block(system, law, law_mode, init, horizon, config.seed, block)

        if workers > 1 and num_blocks > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                results = list(pool.map(run, range(num_blocks)))
        else:
            results = [run(b) for b in range(num_blocks)]

        states = np.concatenate([s for s, _ in results])[:total]
        modes = np.concatenate([a for _, a in results])[:total]
        return TrajectoryBatch(states=states, modes=modes, seed=config.seed)

    @staticmethod
    def estimate_moments(trajectories, k: int) -> MomentEstimate:
        """
        Sample mean of ||x(k)||^2 with standard error std / sqrt(N), plus the
        sample mean and covariance of x(k).
        """
        states = trajectories.states if isinstance(trajectories, TrajectoryBatch) else np.asarray(trajectories, dtype=float)
        if states.ndim == 2:
            states = states[:, None, :]
        if states.shape[0] < 2:
            raise InsufficientSamplesError(f"need at least 2 trajectories, got {states.shape[0]}")
        if not 0 <= k < states.shape[1]:
            raise HorizonMismatchError(f"k={k} outside the sampled range 0..{states.shape[1] - 1}")
        x = states[:, k, :]
        sq = np.einsum("na,na->n", x, x)
        num = sq.size
        if np.all(sq == sq[0]):
            mean_sq, stderr = float(sq[0]), 0.0
        else:
            mean_sq = float(np.mean(sq))
            stderr = float(np.std(sq, ddof=1) / math.sqrt(num))
        return MomentEstimate(
            k=k,
            mean_sq=mean_sq,
            stderr=stderr,
            sample_mean=np.mean(x, axis=0),
            sample_cov=np.atleast_2d(np.cov(x, rowvar=False, ddof=1)),
            num_samples=num,
        )

    @staticmethod
    def estimate_all(trajectories: TrajectoryBatch) -> EmpiricalMoments:
        return EmpiricalMoments(
            estimates=tuple(
                MonteCarloService.estimate_moments(trajectories, k) for k in range(trajectories.horizon + 1)
            )
        )

    @staticmethod
    def occupation_frequencies(trajectories: TrajectoryBatch, k: int, num_modes: int) -> np.ndarray:
        """Empirical frequencies of the mode applied at x(k-1) -> x(k)"""
        if not 1 <= k <= trajectories.horizon:
            raise HorizonMismatchError(f"k={k} outside 1..{trajectories.horizon}")
        counts = np.bincount(trajectories.modes[:, k - 1], minlength=num_modes)
        return counts / trajectories.num_trajectories

    @staticmethod
    def validate_trace(
        trace: WassersteinTrace, moments: EmpiricalMoments, sigma_mult: float = DEFAULT_SIGMA_MULT
    ) -> TraceValidationReport:
        """Pass at k when |W^2(k) - mean_sq(k)| <= sigma_mult * stderr(k) plus a round-off floor"""
        trace_by_k = trace.by_k()
        missing = [e.k for e in moments if e.k not in trace_by_k]
        if missing:
            raise HorizonMismatchError(
                f"trace covers k=0..{trace.horizon} but moments include k={missing}"
            )
        checks = []
        for est in moments:
            w_sq = trace_by_k[est.k].w_sq_hat
            deviation = abs(w_sq - est.mean_sq)
            checks.append(
                StepCheck(
                    k=est.k,
                    w_sq_hat=w_sq,
                    mean_sq=est.mean_sq,
                    stderr=est.stderr,
                    deviation=deviation,
                    passed=deviation <= sigma_mult * est.stderr + ROUNDOFF_TOLERANCE * max(1.0, abs(w_sq)),
                )
            )
        report = TraceValidationReport(sigma_mult=sigma_mult, checks=checks)
        if report.failures:
            logger.warning(
                f"Monte Carlo check failed at k={[c.k for c in report.failures]} ({trace.engine} trace)"
            )
        return report

    @staticmethod
    def _check_inputs(system: JumpLinearSystem, law: SwitchingLaw, init: Gaussian, horizon: int) -> None:
        if int(horizon) != horizon or horizon < 1:
            raise ValueError(f"horizon must be a positive integer, got {horizon!r}")
        if law.num_modes != system.num_modes:
            raise DimensionMismatchError(f"switching law has {law.num_modes} modes, system has {system.num_modes}")
        if init.dim != system.dim:
            raise DimensionMismatchError(f"initial state has dimension {init.dim}, system has {system.dim}")
        law.check_horizon(horizon)
