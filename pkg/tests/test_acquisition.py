import numpy as np
import pytest
from src.acquisition import (
    AcquisitionKind,
    AcquisitionParams,
    acq_ei,
    acq_pi,
    acq_smc,
    acq_ucb,
    ei_from_moments,
    evaluate_acquisition,
    pi_from_moments,
    posterior_moments,
    smc_from_moments,
    ucb_from_moments,
)
from src.exceptions import ConfigError, DimensionMismatchError
from src.space import MixedSpace, MixedVector
from src.surrogate import Dataset, KernelHyperparams, fit_gp


@pytest.fixture
def model():
    space = MixedSpace(((0.0, 1.0),), (), (3,))
    points = [MixedVector((x,), (), (c,)) for x, c in [(0.1, 0), (0.4, 1), (0.8, 2), (0.6, 0)]]
    values = [[1.0, -1.0], [2.0, 0.5], [0.5, 0.0], [1.5, 1.0]]
    hp = KernelHyperparams((0.4, 1.0), signal_amplitude=1.0, noise_variance=1e-4)
    return fit_gp(Dataset().append(points, values), space, hp)


class TestAcquisitionKind:
    """Test acquisition names"""

    @pytest.mark.parametrize("name", ["ei", " PI", "Ucb", "smc"])
    def test_parse(self, name):
        """Test parse"""
        assert AcquisitionKind.parse(name).value == name.strip().upper()

    def test_unknown_name(self):
        """Test unknown name"""
        with pytest.raises(ConfigError):
            AcquisitionKind.parse("thompson")

    def test_only_smc_is_stochastic(self):
        """Test only SMC is stochastic"""
        assert [k.is_stochastic for k in AcquisitionKind] == [False, False, False, True]

    def test_params_validation(self):
        """Test params validation"""
        with pytest.raises(ConfigError):
            AcquisitionParams((0.0,), ucb_kappa=0.0)
        with pytest.raises(ConfigError):
            AcquisitionParams((0.0,), pi_ei_xi=-0.1)


class TestMomentFormulas:
    """Test closed-form acquisition values"""

    def test_expected_improvement(self):
        """Test expected improvement"""
        value = ei_from_moments(np.array([[1.0]]), np.array([[1.0]]), [0.0], 0.0)
        assert value[0, 0] == pytest.approx(1.0833155, rel=1e-6)

    def test_probability_of_improvement(self):
        """Test probability of improvement"""
        value = pi_from_moments(np.array([[1.0]]), np.array([[1.0]]), [0.0], 0.0)
        assert value[0, 0] == pytest.approx(0.8413447, rel=1e-6)

    def test_upper_confidence_bound(self):
        """Test upper confidence bound"""
        value = ucb_from_moments(np.array([[1.0, -2.0]]), np.array([[1.0, 0.5]]), 2.0)
        np.testing.assert_allclose(value, [[3.0, -1.0]])

    def test_zero_sigma_limits(self):
        """Test zero sigma limits"""
        mean = np.array([[0.5, -0.5]])
        sigma = np.zeros((1, 2))
        np.testing.assert_allclose(ei_from_moments(mean, sigma, [0.0, 0.0], 0.0), [[0.5, 0.0]])
        np.testing.assert_allclose(pi_from_moments(mean, sigma, [0.0, 0.0], 0.0), [[1.0, 0.0]])

    def test_xi_reduces_improvement(self):
        """Test xi reduces improvement"""
        mean, sigma = np.array([[1.0]]), np.array([[0.5]])
        assert ei_from_moments(mean, sigma, [0.0], 0.1) < ei_from_moments(mean, sigma, [0.0], 0.0)
        assert pi_from_moments(mean, sigma, [0.0], 0.1) < pi_from_moments(mean, sigma, [0.0], 0.0)

    def test_incumbent_count_checked(self):
        """Test incumbent count checked"""
        with pytest.raises(DimensionMismatchError):
            ei_from_moments(np.zeros((2, 2)), np.ones((2, 2)), [0.0], 0.0)

    def test_smc_stays_in_range(self):
        """Test SMC stays in range"""
        rng = np.random.default_rng(0)
        mean = np.tile([[1.0, -3.0]], (10000, 1))
        sigma = np.tile([[0.5, 2.0]], (10000, 1))
        scores = smc_from_moments(mean, sigma, rng.random(10000))

        assert np.all(scores >= mean) and np.all(scores <= mean + 2 * sigma)
        np.testing.assert_allclose(scores.mean(axis=0), [1.5, -1.0], atol=0.05)

    def test_smc_shares_draw_across_objectives(self):
        """Test SMC shares draw across objectives"""
        scores = smc_from_moments(np.zeros((1, 2)), np.array([[1.0, 3.0]]), np.array([0.25]))
        np.testing.assert_allclose(scores, [[0.5, 1.5]])


class TestModelAcquisition:
    """Test acquisitions evaluated through a fitted surrogate"""

    def test_shapes(self, model):
        """Test shapes"""
        params = AcquisitionParams((2.0, 1.0))
        points = [MixedVector((0.3,), (), (1,)), MixedVector((0.9,), (), (0,))]
        for kind in AcquisitionKind:
            scores = evaluate_acquisition(kind, model, points, params, np.random.default_rng(0))
            assert scores.shape == (2, 2)

    def test_single_point_forms_agree(self, model):
        """Test single point forms agree"""
        params = AcquisitionParams((2.0, 1.0))
        w = MixedVector((0.3,), (), (1,))
        ei = evaluate_acquisition(AcquisitionKind.EI, model, [w], params)[0]
        pi = evaluate_acquisition(AcquisitionKind.PI, model, [w], params)[0]
        np.testing.assert_allclose(acq_ei(model, w, params), ei)
        np.testing.assert_allclose(acq_pi(model, w, params), pi)
        mean, sigma = posterior_moments(model, [w])
        np.testing.assert_allclose(acq_ucb(model, w, params), mean[0] + 2.0 * sigma[0])

    def test_ei_pi_nonnegative(self, model):
        """Test EI and PI are nonnegative"""
        params = AcquisitionParams((2.0, 1.0))
        points = [MixedVector((x,), (), (c,)) for x in np.linspace(0, 1, 7) for c in range(3)]
        assert np.all(evaluate_acquisition(AcquisitionKind.EI, model, points, params) >= 0)
        pi = evaluate_acquisition(AcquisitionKind.PI, model, points, params)
        assert np.all((pi >= 0) & (pi <= 1))

    def test_smc_reproducible_with_stream(self, model):
        """Test SMC reproducible with stream"""
        w = MixedVector((0.3,), (), (1,))
        a = acq_smc(model, w, np.random.default_rng(5))
        b = acq_smc(model, w, np.random.default_rng(5))
        np.testing.assert_array_equal(a, b)

    def test_smc_needs_stream(self, model):
        """Test SMC needs stream"""
        w = MixedVector((0.3,), (), (1,))
        with pytest.raises(ConfigError):
            evaluate_acquisition(AcquisitionKind.SMC, model, [w], AcquisitionParams((0, 0)))


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
