import math

import numpy as np
import pytest

from jumpwass.core.errors import (
    DimensionMismatchError,
    NotPositiveSemidefiniteError,
    ProbabilityVectorError,
)
from jumpwass.models.gaussian import Gaussian, GaussianMixture
from jumpwass.utils.gaussian_calculus import (
    component_w2_to_dirac,
    merge_mixture,
    mixture_w2_to_dirac,
    push_gaussian,
    push_mixture,
    wasserstein_to_dirac,
)
from jumpwass.utils.linalg import clamp_psd, psd_sqrt

A1 = np.array([[0.7, 0.0], [0.0, 1.0]])


def random_psd(rng: np.random.Generator, n: int) -> np.ndarray:
    m = rng.standard_normal((n, n))
    return m @ m.T / n


def random_mixture(rng: np.random.Generator, n: int, k: int) -> GaussianMixture:
    weights = rng.dirichlet(np.ones(k))
    means = rng.normal(0.0, 3.0, size=(k, n))
    covs = np.stack([random_psd(rng, n) for _ in range(k)])
    return GaussianMixture(weights=weights, means=means, covs=covs)


def step_one_mixture() -> GaussianMixture:
    return GaussianMixture.from_components(
        [
            (0.5, Gaussian(mean=[3.5, 5.0], cov=np.diag([0.049, 0.1]))),
            (0.5, Gaussian(mean=[5.0, 4.25], cov=np.diag([0.1, 0.07225]))),
        ]
    )


class TestGaussian:
    def test_covariance_symmetrized(self):
        g = Gaussian(mean=[0.0, 0.0], cov=[[1.0, 0.5 + 1e-14], [0.5, 1.0]])
        assert g.cov[0, 1] == g.cov[1, 0]

    def test_asymmetric_covariance_rejected(self):
        with pytest.raises(NotPositiveSemidefiniteError):
            Gaussian(mean=[0.0, 0.0], cov=[[1.0, 0.5], [0.4, 1.0]])

    def test_round_off_negative_eigenvalue_clamped(self):
        g = Gaussian(mean=[0.0, 0.0], cov=np.diag([1.0, -1e-12]))
        np.testing.assert_allclose(g.cov, np.diag([1.0, 0.0]), atol=1e-15)

    def test_negative_eigenvalue_rejected(self):
        with pytest.raises(NotPositiveSemidefiniteError):
            Gaussian(mean=[0.0, 0.0], cov=np.diag([1.0, -1e-3]))

    def test_dirac_representative(self):
        d = Gaussian.dirac(3)
        assert d.is_dirac
        assert wasserstein_to_dirac(d) == 0.0

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            Gaussian(mean=[0.0, 0.0, 0.0], cov=np.eye(2))

    def test_second_moment(self):
        g = Gaussian(mean=[3.0, 4.0], cov=np.diag([1.0, 2.0]))
        np.testing.assert_allclose(g.second_moment, [[10.0, 12.0], [12.0, 18.0]])

    def test_sample_from_singular_covariance(self):
        g = Gaussian(mean=[1.0, 2.0], cov=[[1.0, 1.0], [1.0, 1.0]])
        x = g.sample(np.random.default_rng(3), 1000)
        np.testing.assert_allclose(x[:, 0] - x[:, 1], -1.0, atol=1e-12)


class TestGaussianMixture:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ProbabilityVectorError):
            GaussianMixture(weights=[0.5, 0.4], means=np.zeros((2, 2)), covs=np.zeros((2, 2, 2)))

    def test_components_share_dimension(self):
        with pytest.raises(DimensionMismatchError):
            GaussianMixture.from_components([(0.5, Gaussian.dirac(2)), (0.5, Gaussian.dirac(3))])

    def test_component_access(self):
        mix = step_one_mixture()
        assert mix.num_components == 2
        w, g = mix.components[1]
        assert w == 0.5
        np.testing.assert_array_equal(g.mean, [5.0, 4.25])

    def test_pdf_of_single_component(self):
        g = Gaussian(mean=[0.0, 0.0], cov=np.eye(2))
        density = GaussianMixture.single(g).pdf([[0.0, 0.0]])
        assert density[0] == pytest.approx(1.0 / (2.0 * math.pi), rel=1e-12)

    def test_pdf_is_weighted_sum(self):
        mix = step_one_mixture()
        points = np.array([[4.0, 4.5], [3.5, 5.0]])
        expected = sum(
            w * np.exp(-0.5 * np.sum((points - g.mean) ** 2 / np.diag(g.cov), axis=1))
            / (2.0 * math.pi * math.sqrt(np.prod(np.diag(g.cov))))
            for w, g in mix.iter_components()
        )
        np.testing.assert_allclose(mix.pdf(points), expected, rtol=1e-10)

    def test_pdf_undefined_for_singular_component(self):
        mix = GaussianMixture.single(Gaussian.dirac(2))
        with pytest.raises(ValueError):
            mix.pdf([[0.0, 0.0]])


class TestPushGaussian:
    def test_identity_leaves_gaussian_unchanged(self):
        g = Gaussian(mean=[1.0, -2.0], cov=[[2.0, 0.3], [0.3, 1.0]])
        pushed = push_gaussian(np.eye(2), g)
        np.testing.assert_array_equal(pushed.mean, g.mean)
        np.testing.assert_array_equal(pushed.cov, g.cov)

    def test_first_mode_on_initial_state(self, init):
        pushed = push_gaussian(A1, init)
        np.testing.assert_allclose(pushed.mean, [3.5, 5.0], atol=1e-15)
        np.testing.assert_allclose(pushed.cov, np.diag([0.049, 0.1]), atol=1e-15)

    def test_zero_map_gives_dirac(self, init):
        assert push_gaussian(np.zeros((2, 2)), init).is_dirac

    def test_dimension_mismatch(self, init):
        with pytest.raises(DimensionMismatchError):
            push_gaussian(np.eye(3), init)

    def test_congruence_matches_naive_triple_loop(self):
        rng = np.random.default_rng(11)
        for n in (1, 2, 3, 4):
            A = rng.standard_normal((n, n))
            g = Gaussian(mean=rng.standard_normal(n), cov=random_psd(rng, n))
            naive = np.zeros((n, n))
            for i in range(n):
                for j in range(n):
                    naive[i, j] = sum(A[i, a] * g.cov[a, b] * A[j, b] for a in range(n) for b in range(n))
            scale = np.max(np.abs(naive))
            np.testing.assert_allclose(push_gaussian(A, g).cov, naive, rtol=1e-12, atol=1e-12 * scale)

    @pytest.mark.parametrize("c", [-2.5, -1.0, 0.3, 4.0])
    def test_scaling(self, c):
        g = Gaussian(mean=[1.0, 2.0, -1.0], cov=np.diag([0.5, 1.0, 2.0]))
        scaled = wasserstein_to_dirac(push_gaussian(c * np.eye(3), g))
        assert scaled == pytest.approx(abs(c) * wasserstein_to_dirac(g), rel=1e-12)


class TestPushMixture:
    def test_single_component_matches_push_gaussian(self, init):
        pushed = push_mixture(A1, GaussianMixture.single(init))
        direct = push_gaussian(A1, init)
        np.testing.assert_allclose(pushed.means[0], direct.mean, rtol=1e-15)
        np.testing.assert_allclose(pushed.covs[0], direct.cov, rtol=1e-15)

    def test_weights_preserved(self):
        mix = GaussianMixture(weights=[0.3, 0.7], means=[[1.0, 0.0], [0.0, 1.0]], covs=np.stack([np.eye(2)] * 2))
        np.testing.assert_array_equal(push_mixture(A1, mix).weights, [0.3, 0.7])

    def test_zero_map_gives_two_diracs(self):
        pushed = push_mixture(np.zeros((2, 2)), step_one_mixture())
        assert all(g.is_dirac for _, g in pushed.iter_components())


class TestMergeMixture:
    def test_single_component_unchanged(self, init):
        merged = merge_mixture(GaussianMixture.single(init))
        np.testing.assert_allclose(merged.mean, init.mean, rtol=1e-15)
        np.testing.assert_allclose(merged.cov, init.cov, rtol=1e-15)

    def test_symmetric_pair(self):
        mix = GaussianMixture(
            weights=[0.5, 0.5], means=[[1.0, 0.0], [-1.0, 0.0]], covs=np.stack([np.eye(2), np.eye(2)])
        )
        merged = merge_mixture(mix)
        np.testing.assert_allclose(merged.mean, [0.0, 0.0], atol=1e-15)
        np.testing.assert_allclose(merged.cov, np.diag([2.0, 1.0]), atol=1e-15)

    def test_step_one_mixture(self):
        merged = merge_mixture(step_one_mixture())
        np.testing.assert_allclose(merged.mean, [4.25, 4.625], atol=1e-14)
        np.testing.assert_allclose(merged.cov, [[0.637, -0.28125], [-0.28125, 0.22675]], atol=1e-14)

    def test_merged_covariance_is_psd(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            mix = random_mixture(rng, int(rng.integers(1, 5)), int(rng.integers(1, 17)))
            assert np.linalg.eigvalsh(merge_mixture(mix).cov).min() >= -1e-10

    @pytest.mark.slow
    def test_moments_match_samples(self):
        rng = np.random.default_rng(2024)
        num = 10 ** 6
        for _ in range(20):
            n = int(rng.integers(1, 4))
            mix = random_mixture(rng, n, int(rng.integers(1, 5)))
            merged = merge_mixture(mix)
            x = mix.sample(rng, num)

            mean_err = np.std(x, axis=0, ddof=1) / math.sqrt(num)
            assert np.all(np.abs(x.mean(axis=0) - merged.mean) <= 4.0 * mean_err)

            centered = x - merged.mean
            for a in range(n):
                for b in range(a, n):
                    prod = centered[:, a] * centered[:, b]
                    err = np.std(prod, ddof=1) / math.sqrt(num)
                    assert abs(prod.mean() - merged.cov[a, b]) <= 4.0 * err


class TestWassersteinToDirac:
    def test_dirac_to_itself(self):
        assert wasserstein_to_dirac(Gaussian.dirac(2)) == 0.0

    def test_initial_state(self, init):
        assert wasserstein_to_dirac(init) == pytest.approx(math.sqrt(50.2), rel=1e-15)
        assert wasserstein_to_dirac(init) == pytest.approx(7.0851958, abs=1e-7)

    def test_diagonal_example(self):
        g = Gaussian(mean=[3.0, 4.0], cov=np.diag([1.0, 2.0]))
        assert wasserstein_to_dirac(g) == pytest.approx(5.2915026, abs=1e-7)

    @pytest.mark.slow
    def test_agrees_with_sampled_second_moment(self, init):
        x = init.sample(np.random.default_rng(99), 10 ** 6)
        sq = np.einsum("na,na->n", x, x)
        stderr = np.std(sq, ddof=1) / math.sqrt(sq.size)
        assert abs(sq.mean() - 50.2) <= 3.0 * stderr


class TestMixtureW2:
    def test_single_component(self, init):
        value = mixture_w2_to_dirac(GaussianMixture.single(init))
        assert value == pytest.approx(wasserstein_to_dirac(init) ** 2, rel=1e-14)

    def test_step_one_mixture(self):
        mix = step_one_mixture()
        np.testing.assert_allclose(component_w2_to_dirac(mix), [37.399, 43.23475], rtol=1e-14)
        assert mixture_w2_to_dirac(mix) == pytest.approx(40.316875, rel=1e-14)

    def test_additivity_over_components(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            mix = random_mixture(rng, int(rng.integers(1, 5)), int(rng.integers(1, 17)))
            expected = math.fsum(w * wasserstein_to_dirac(g) ** 2 for w, g in mix.iter_components())
            assert mixture_w2_to_dirac(mix) == pytest.approx(expected, rel=1e-12)

    def test_merge_preserves_w2(self):
        rng = np.random.default_rng(23)
        for _ in range(500):
            mix = random_mixture(rng, int(rng.integers(1, 5)), int(rng.integers(1, 17)))
            value = mixture_w2_to_dirac(mix)
            merged = wasserstein_to_dirac(merge_mixture(mix)) ** 2
            assert abs(value - merged) <= 1e-9 * (1.0 + value)


class TestLinalgHelpers:
    def test_psd_sqrt_reconstructs(self):
        rng = np.random.default_rng(1)
        cov = random_psd(rng, 4)
        L = psd_sqrt(cov)
        np.testing.assert_allclose(L @ L.T, cov, atol=1e-12)

    def test_clamp_psd_on_stack(self):
        stack = np.stack([np.eye(2), np.diag([1.0, -1e-13])])
        clamped = clamp_psd(stack)
        np.testing.assert_allclose(clamped[1], np.diag([1.0, 0.0]), atol=1e-15)
        np.testing.assert_array_equal(clamped[0], np.eye(2))
