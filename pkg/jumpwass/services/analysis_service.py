from typing import Callable, List, Optional, TypeVar
import logging

import numpy as np

from jumpwass.core.errors import EngineError
from jumpwass.models.analysis import AnalysisResult
from jumpwass.models.gaussian import Gaussian
from jumpwass.models.system import JumpLinearSystem, LawMode, MarkovLaw, SwitchingLaw
from jumpwass.models.trace import WassersteinTrace, combine_traces
from jumpwass.schemas.config import AnalysisConfig, Engine
from jumpwass.schemas.report import ConvergenceStatus, ConvergenceVerdict, OracleComparison
from jumpwass.services.montecarlo_service import MonteCarloService
from jumpwass.services.propagation_service import PropagationService

logger = logging.getLogger(__name__)

T = TypeVar("T")


def _run_engine(engine: str, fn: Callable[[], T]) -> T:
    try:
        return fn()
    except EngineError:
        raise
    except Exception as e:
        logger.error(f"Engine '{engine}' failed: {str(e)}")
        raise EngineError(engine, e) from e


def _reference_trace(
    system: JumpLinearSystem, law: SwitchingLaw, law_mode: LawMode, init: Gaussian, horizon: int
) -> WassersteinTrace:
    """Analytic trace that is exact for the given path law"""
    if LawMode(law_mode) == LawMode.CHAIN and isinstance(law, MarkovLaw):
        return PropagationService.run_mode_conditional(system, law, init, horizon)
    return PropagationService.run_split_and_merge(system, law, init, horizon)


class AnalysisService:
    @staticmethod
    def assess_convergence(trace: WassersteinTrace, epsilon: float, window: int) -> ConvergenceVerdict:
        """
        Verdict on W_hat(k):
        converged when the last `window` values are all below epsilon,
        diverging when the last `window` steps strictly increase and
        W_hat(K) > W_hat(0), inconclusive otherwise (including traces
        shorter than window + 1 entries).
        """
        if epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {epsilon!r}")
        if int(window) != window or window < 1:
            raise ValueError(f"window must be a positive integer, got {window!r}")
        window = int(window)
        w = trace.w_hat
        ks = trace.ks
        below = np.flatnonzero(w < epsilon)
        first_k = ks[int(below[0])] if below.size else None

        status = ConvergenceStatus.INCONCLUSIVE
        if w.size >= window + 1:
            tail = w[-(window + 1):]
            if np.all(w[-window:] < epsilon):
                status = ConvergenceStatus.CONVERGED
            elif np.all(np.diff(tail) > 0) and w[-1] > w[0]:
                status = ConvergenceStatus.DIVERGING

        return ConvergenceVerdict(
            status=status,
            first_k_below_epsilon=first_k,
            final_w=float(w[-1]),
            epsilon=float(epsilon),
            window=window,
        )

    @staticmethod
    def run_analysis(cfg: AnalysisConfig, workers: Optional[int] = None) -> AnalysisResult:
        """Run every requested engine and assemble the per-k table and verdict"""
        system = cfg.build_system()
        law = cfg.build_law()
        init = cfg.build_initial()
        horizon = cfg.horizon
        engines = cfg.effective_engines
        logger.info(f"Running analysis: engines={[e.value for e in engines]}, horizon={horizon}")

        traces = {}
        split_merge = _run_engine(
            Engine.SPLIT_MERGE.value,
            lambda: PropagationService.run_split_and_merge(system, law, init, horizon),
        )
        traces[split_merge.engine] = split_merge

        markov_exact = None
        if Engine.MODE_CONDITIONAL in engines:
            markov_exact = _run_engine(
                Engine.MODE_CONDITIONAL.value,
                lambda: PropagationService.run_mode_conditional(system, law, init, horizon),
            )
            traces[markov_exact.engine] = markov_exact

        oracle = None
        if Engine.ENUMERATE in engines:
            oracle = _run_engine(
                Engine.ENUMERATE.value,
                lambda: PropagationService.run_enumeration(
                    system,
                    law,
                    cfg.oracle_law_mode,
                    init,
                    cfg.effective_oracle_horizon,
                    cfg.oracle_component_cap,
                ),
            )
            traces[oracle.engine] = oracle

        single_modes = None
        if Engine.SINGLE_MODES in engines:
            single_modes = _run_engine(
                Engine.SINGLE_MODES.value,
                lambda: [
                    PropagationService.run_single_mode(system, j, init, horizon)
                    for j in range(1, system.num_modes + 1)
                ],
            )
            for t in single_modes:
                traces[t.engine] = t

        moments = mc_report = mc_reference = None
        if Engine.MONTECARLO in engines:
            sampler = cfg.sampler_config()

            def montecarlo():
                batch = MonteCarloService.sample_trajectories(system, law, init, sampler, workers=workers)
                estimates = MonteCarloService.estimate_all(batch)
                if sampler.law_mode == LawMode.CHAIN and isinstance(law, MarkovLaw):
                    reference = markov_exact if markov_exact is not None else (
                        PropagationService.run_mode_conditional(system, law, init, horizon)
                    )
                else:
                    reference = split_merge
                return estimates, reference, MonteCarloService.validate_trace(reference, estimates)

            moments, reference, mc_report = _run_engine(Engine.MONTECARLO.value, montecarlo)
            mc_reference = reference.engine

        table = combine_traces(
            split_merge,
            oracle=oracle,
            single_modes=single_modes,
            markov_exact=markov_exact,
            mc=moments.columns() if moments is not None else None,
        )
        verdict = AnalysisService.assess_convergence(
            split_merge, cfg.convergence.epsilon, cfg.convergence.window
        )
        logger.info(
            f"Analysis finished: {verdict.status.value}, final W_hat={verdict.final_w:.6g}, "
            f"first k below {verdict.epsilon:g}: {verdict.first_k_below_epsilon}"
        )
        return AnalysisResult(
            traces=traces,
            table=table,
            verdict=verdict,
            moments=moments,
            mc_report=mc_report,
            mc_reference=mc_reference,
            metadata={
                "num_modes": str(system.num_modes),
                "dim": str(system.dim),
                "law": law.kind,
                "horizon": str(horizon),
            },
        )

    @staticmethod
    def compare_with_oracle(
        cfg: AnalysisConfig, oracle_horizon: Optional[int] = None, law_mode: Optional[LawMode] = None
    ) -> OracleComparison:
        """
        Max deviation between an analytic engine and the enumeration oracle
        over k = 0..oracle_horizon.

        product-of-marginals compares split-and-merge; chain compares the
        Markov-exact engine (split-and-merge for independent laws, where the
        two path laws coincide).
        """
        system = cfg.build_system()
        law = cfg.build_law()
        init = cfg.build_initial()
        horizon = oracle_horizon if oracle_horizon is not None else cfg.effective_oracle_horizon
        law_mode = LawMode(law_mode) if law_mode is not None else cfg.oracle_law_mode

        analytic = _run_engine(
            "analytic", lambda: _reference_trace(system, law, law_mode, init, horizon)
        )
        oracle = _run_engine(
            Engine.ENUMERATE.value,
            lambda: PropagationService.run_enumeration(
                system, law, law_mode, init, horizon, cfg.oracle_component_cap
            ),
        )
        diff = np.abs(analytic.w_hat - oracle.w_hat)
        scale = np.where(oracle.w_hat > 0.0, oracle.w_hat, 1.0)
        comparison = OracleComparison(
            law_mode=law_mode.value,
            oracle_horizon=horizon,
            max_abs_deviation=float(np.max(diff)),
            max_rel_deviation=float(np.max(diff / scale)),
        )
        logger.info(
            f"{analytic.engine} vs enumeration ({law_mode.value}, k<={horizon}): "
            f"max |dW| = {comparison.max_abs_deviation:.3e}"
        )
        return comparison

    @staticmethod
    def summary_lines(result: AnalysisResult) -> List[str]:
        """Plain-text summary written by `analyze --summary`"""
        v = result.verdict
        table = result.table
        lines = [
            f"modes: {result.metadata.get('num_modes')}  dimension: {result.metadata.get('dim')}  "
            f"law: {result.metadata.get('law')}  horizon: {table.horizon}",
            f"engines: {', '.join(sorted(result.traces))}",
            f"verdict: {v.status.value}",
            f"epsilon: {v.epsilon:g}  window: {v.window}",
            f"first_k_below_epsilon: {v.first_k_below_epsilon if v.first_k_below_epsilon is not None else '-'}",
            f"W_hat(0): {table.entries[0].w_hat:.17g}",
            f"final_w: {v.final_w:.17g}",
        ]
        if "enumerate" in result.traces:
            oracle = result.traces["enumerate"]
            base = result.traces["split_merge"]
            deviation = max(abs(base.at(e.k).w_hat - e.w_hat) for e in oracle)
            lines.append(f"max |W_hat - W_oracle| (k<={oracle.horizon}): {deviation:.3e}")
        if result.mc_report is not None:
            report = result.mc_report
            worst = max(report.checks, key=lambda c: c.deviation / c.stderr if c.stderr > 0 else 0.0)
            lines.append(
                f"monte carlo vs {result.mc_reference}: "
                f"{'pass' if report.passed else 'FAIL'} "
                f"({len(report.checks) - len(report.failures)}/{len(report.checks)} steps within "
                f"{report.sigma_mult:g} stderr; worst k={worst.k})"
            )
        return lines
