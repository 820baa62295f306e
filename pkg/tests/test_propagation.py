import math

import numpy as np
import pytest

from jumpwass.core.errors import ComponentCapExceededError, LawKindError, ScheduleExhaustedError
from jumpwass.models.gaussian import Gaussian
from jumpwass.models.system import IIDLaw, JumpLinearSystem, LawMode, MarkovLaw, ModeTiming, ScheduleLaw
from jumpwass.models.trace import TraceEntry, WassersteinTrace
from jumpwass.services.propagation_service import PropagationService
from jumpwass.services.system_service import SystemService
from jumpwass.utils.gaussian_calculus import (
    component_w2_to_dirac,
    mixture_w2_to_dirac,
    push_gaussian,
    wasserstein_to_dirac,
)

P = [[0.75, 0.25], [0.2, 0.8]]


def closed_form_w_sq(law, horizon):
    """Diagonal example system: each axis' second moment scales by its mode-averaged factor"""
    x_sq, y_sq = 25.1, 25.1
    values = [x_sq + y_sq]
    for pi in law.marginals(horizon):
        x_sq *= 0.49 * pi[0] + pi[1]
        y_sq *= pi[0] + 0.7225 * pi[1]
        values.append(x_sq + y_sq)
    return values


class TestEnumerateMixture:
    def test_first_step_with_prior_timing(self, system, init):
        law = MarkovLaw(pi0=[0.5, 0.5], transition=P, timing=ModeTiming.PRIOR)
        mix = PropagationService.enumerate_mixture(system, law, LawMode.PRODUCT, init, 1)
        assert mix.num_components == 2
        np.testing.assert_array_equal(mix.weights, [0.5, 0.5])
        np.testing.assert_allclose(mix.means, [[3.5, 5.0], [5.0, 4.25]], atol=1e-15)
        np.testing.assert_allclose(mix.covs[0], np.diag([0.049, 0.1]), atol=1e-15)
        np.testing.assert_allclose(mix.covs[1], np.diag([0.1, 0.07225]), atol=1e-15)

    def test_single_mode_system_has_one_component(self):
        A = np.array([[0.9, 0.2], [0.0, 0.5]])
        init = Gaussian(mean=[1.0, -1.0], cov=[[0.3, 0.1], [0.1, 0.2]])
        system = JumpLinearSystem(modes=(A,))
        mix = PropagationService.enumerate_mixture(system, IIDLaw(pi=[1.0]), LawMode.PRODUCT, init, 6)
        Ak = np.linalg.matrix_power(A, 6)
        assert mix.num_components == 1
        np.testing.assert_allclose(mix.means[0], Ak @ init.mean, rtol=1e-12)
        np.testing.assert_allclose(mix.covs[0], Ak @ init.cov @ Ak.T, rtol=1e-12, atol=1e-15)

    @pytest.mark.parametrize("law_mode", list(LawMode))
    def test_component_count_and_weights(self, system, markov_law, init, law_mode):
        mix = PropagationService.enumerate_mixture(system, markov_law, law_mode, init, 3)
        assert mix.num_components == 8
        assert math.fsum(mix.weights) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("law_mode", list(LawMode))
    def test_components_in_lexicographic_path_order(self, system, markov_law, init, law_mode):
        mix = PropagationService.enumerate_mixture(system, markov_law, law_mode, init, 4)
        for i, path in enumerate(SystemService.enumerate_paths(2, 4)):
            expected = SystemService.path_probability(markov_law, path, law_mode)
            assert mix.weights[i] == pytest.approx(expected, rel=1e-12)
            np.testing.assert_allclose(mix.means[i], path.product(system) @ init.mean, rtol=1e-12)

    def test_component_cap(self, system, markov_law, init):
        with pytest.raises(ComponentCapExceededError) as exc:
            PropagationService.enumerate_mixture(system, markov_law, LawMode.PRODUCT, init, 3, component_cap=4)
        assert exc.value.required_components == 8
        assert exc.value.required_bytes == 8 * (1 + 2 + 4) * 8
        assert "MiB" in str(exc.value)

    def test_schedule_too_short(self, system, init):
        law = ScheduleLaw(vectors=([0.5, 0.5],))
        with pytest.raises(ScheduleExhaustedError):
            PropagationService.enumerate_mixture(system, law, LawMode.PRODUCT, init, 2)

    def test_additivity_at_every_step(self, system, markov_law, init):
        for _, mix in PropagationService.iter_enumeration(system, markov_law, LawMode.PRODUCT, init, 8):
            per_component = [wasserstein_to_dirac(g) ** 2 for _, g in mix.iter_components()]
            np.testing.assert_allclose(component_w2_to_dirac(mix), per_component, rtol=1e-12)
            assert mixture_w2_to_dirac(mix) == pytest.approx(
                math.fsum(w * v for w, v in zip(mix.weights, per_component)), rel=1e-12
            )


class TestSplitAndMergeStep:
    def test_unit_vector_returns_push_exactly(self, system, init):
        for j in range(2):
            e_j = np.zeros(2)
            e_j[j] = 1.0
            merged, w = PropagationService.split_and_merge_step(system, e_j, init)
            direct = push_gaussian(system.modes[j], init)
            np.testing.assert_array_equal(merged.mean, direct.mean)
            np.testing.assert_array_equal(merged.cov, direct.cov)
            assert w == wasserstein_to_dirac(direct)

    def test_example_step(self, system, init):
        merged, w = PropagationService.split_and_merge_step(system, np.array([0.5, 0.5]), init)
        np.testing.assert_allclose(merged.mean, [4.25, 4.625], atol=1e-14)
        assert w ** 2 == pytest.approx(40.316875, rel=1e-12)

    def test_identical_modes(self, init):
        A = np.array([[0.6, 0.1], [-0.2, 0.9]])
        system = JumpLinearSystem(modes=(A, A, A))
        merged, _ = PropagationService.split_and_merge_step(system, np.array([0.2, 0.3, 0.5]), init)
        direct = push_gaussian(A, init)
        np.testing.assert_allclose(merged.mean, direct.mean, rtol=1e-14)
        np.testing.assert_allclose(merged.cov, direct.cov, rtol=1e-13, atol=1e-16)


class TestRunSplitAndMerge:
    def test_example_trace_decreases(self, system, markov_law, init):
        trace = PropagationService.run_split_and_merge(system, markov_law, init, 20)
        assert trace.ks == list(range(21))
        assert np.all(trace.w_hat > 0.0)
        assert trace.at(20).w_hat < trace.at(0).w_hat
        assert trace.at(0).w_hat == pytest.approx(wasserstein_to_dirac(init), rel=1e-15)

    def test_matches_closed_form(self, system, markov_law, init):
        trace = PropagationService.run_split_and_merge(system, markov_law, init, 100)
        np.testing.assert_allclose(trace.w_sq_hat, closed_form_w_sq(markov_law, 100), rtol=1e-10)
        assert trace.at(50).w_hat == pytest.approx(0.078, abs=2e-3)
        assert trace.at(100).w_hat < 0.05

    def test_scalar_contraction(self, init):
        system = JumpLinearSystem(modes=(0.5 * np.eye(2),))
        trace = PropagationService.run_split_and_merge(system, IIDLaw(pi=[1.0]), init, 10)
        for e in trace:
            assert e.w_hat == pytest.approx(0.5 ** e.k * trace.at(0).w_hat, rel=1e-12)

    def test_identity_dynamics(self, init):
        system = JumpLinearSystem(modes=(np.eye(2), np.eye(2)))
        trace = PropagationService.run_split_and_merge(system, IIDLaw(pi=[0.4, 0.6]), init, 10)
        np.testing.assert_allclose(trace.w_hat, trace.at(0).w_hat, rtol=1e-14)

    def test_schedule_exhausted(self, system, init):
        law = ScheduleLaw(vectors=([0.5, 0.5], [0.5, 0.5]))
        with pytest.raises(ScheduleExhaustedError):
            PropagationService.run_split_and_merge(system, law, init, 3)

    def test_oracle_equivalence(self, system, markov_law, init):
        trace = PropagationService.run_split_and_merge(system, markov_law, init, 12)
        for k, mix in PropagationService.iter_enumeration(system, markov_law, LawMode.PRODUCT, init, 12):
            w_hat = trace.at(k).w_hat
            assert abs(w_hat - math.sqrt(mixture_w2_to_dirac(mix))) <= 1e-9 * (1.0 + w_hat)

    def test_carried_state_is_one_gaussian(self, system, markov_law, init):
        for _, g in PropagationService.iter_split_and_merge(system, markov_law, init, 30):
            assert isinstance(g, Gaussian)
            assert g.mean.shape == (2,)
            assert g.cov.shape == (2, 2)

    def test_deterministic_start(self, system, markov_law):
        init = Gaussian(mean=[5.0, 5.0], cov=np.zeros((2, 2)))
        trace = PropagationService.run_split_and_merge(system, markov_law, init, 10)
        assert trace.at(0).w_sq_hat == pytest.approx(50.0)
        assert np.all(np.diff(trace.w_hat) < 0.0)


class TestRunModeConditional:
    def test_identity_transition_decouples_modes(self, system, init):
        law = MarkovLaw(pi0=[0.3, 0.7], transition=np.eye(2))
        trace = PropagationService.run_mode_conditional(system, law, init, 15)
        singles = [PropagationService.run_single_mode(system, j, init, 15) for j in (1, 2)]
        for k in range(16):
            expected = 0.3 * singles[0].at(k).w_sq_hat + 0.7 * singles[1].at(k).w_sq_hat
            assert trace.at(k).w_sq_hat == pytest.approx(expected, rel=1e-12)

    def test_rank_one_transition_matches_split_and_merge(self, system, init):
        law = MarkovLaw(pi0=[0.5, 0.5], transition=[[0.3, 0.7], [0.3, 0.7]])
        exact = PropagationService.run_mode_conditional(system, law, init, 25)
        merged = PropagationService.run_split_and_merge(system, law, init, 25)
        np.testing.assert_allclose(exact.w_hat, merged.w_hat, rtol=1e-12)

    @pytest.mark.parametrize("timing", list(ModeTiming))
    def test_matches_chain_enumeration(self, system, init, timing):
        law = MarkovLaw(pi0=[0.5, 0.5], transition=P, timing=timing)
        trace = PropagationService.run_mode_conditional(system, law, init, 12)
        oracle = PropagationService.run_enumeration(system, law, LawMode.CHAIN, init, 12)
        np.testing.assert_allclose(trace.w_hat, oracle.w_hat, rtol=1e-9)

    def test_chain_and_product_differ_for_example(self, system, markov_law, init):
        exact = PropagationService.run_mode_conditional(system, markov_law, init, 12)
        merged = PropagationService.run_split_and_merge(system, markov_law, init, 12)
        assert abs(exact.at(12).w_hat - merged.at(12).w_hat) > 1e-6

    def test_non_markov_law_rejected(self, system, init):
        with pytest.raises(LawKindError):
            PropagationService.run_mode_conditional(system, IIDLaw(pi=[0.5, 0.5]), init, 5)

    def test_state_size_is_constant(self, system, markov_law, init):
        for _, state in PropagationService.iter_mode_conditional(system, markov_law, init, 30):
            assert state.masses.shape == (2,)
            assert state.means.shape == (2, 2)
            assert state.second_moments.shape == (2, 2, 2)

    def test_merged_state_carries_w2(self, system, markov_law, init):
        for _, state in PropagationService.iter_mode_conditional(system, markov_law, init, 10):
            assert wasserstein_to_dirac(state.merged()) ** 2 == pytest.approx(state.w_sq, rel=1e-10)

    def test_deterministic_start(self, system, markov_law):
        init = Gaussian.dirac(2)
        trace = PropagationService.run_mode_conditional(system, markov_law, init, 5)
        assert np.all(trace.w_hat == 0.0)


class TestRunSingleMode:
    def test_first_mode_limit(self, system, init):
        trace = PropagationService.run_single_mode(system, 1, init, 30)
        k = 30
        expected = math.sqrt(25 * 0.49 ** k + 25 + 0.1 * 0.49 ** k + 0.1)
        assert trace.at(k).w_hat == pytest.approx(expected, rel=1e-12)
        assert abs(trace.at(k).w_hat - math.sqrt(25.1)) <= 1e-6
        assert trace.at(k).w_hat == pytest.approx(5.0099900, abs=1e-7)

    def test_second_mode_limit(self, system, init):
        trace = PropagationService.run_single_mode(system, 2, init, 60)
        expected_30 = math.sqrt(25.1 + 25.1 * 0.7225 ** 30)
        assert trace.at(30).w_hat == pytest.approx(expected_30, rel=1e-12)
        assert abs(trace.at(60).w_hat - math.sqrt(25.1)) <= 1e-6

    def test_engine_name(self, system, init):
        assert PropagationService.run_single_mode(system, 2, init, 3).engine == "single_mode_2"

    def test_nilpotent_mode(self, init):
        system = JumpLinearSystem(modes=(np.array([[0.0, 1.0], [0.0, 0.0]]),))
        trace = PropagationService.run_single_mode(system, 1, init, 6)
        assert all(e.w_hat == 0.0 for e in trace if e.k >= 2)
        assert trace.at(1).w_hat > 0.0

    @pytest.mark.parametrize("j", [0, 3, 1.5])
    def test_invalid_mode_index(self, system, init, j):
        with pytest.raises(ValueError):
            PropagationService.run_single_mode(system, j, init, 5)


class TestWassersteinTrace:
    def test_must_start_at_zero(self):
        with pytest.raises(ValueError):
            WassersteinTrace(entries=(TraceEntry.from_w_sq(1, 1.0),))

    def test_time_must_increase(self):
        with pytest.raises(ValueError):
            WassersteinTrace(entries=(TraceEntry.from_w_sq(0, 1.0), TraceEntry.from_w_sq(0, 1.0)))

    def test_w_sq_consistency(self):
        with pytest.raises(ValueError):
            WassersteinTrace(entries=(TraceEntry(k=0, w_hat=2.0, w_sq_hat=5.0),))
