import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy import stats

from src.bayes.estimator import EstimateReport
from src.middleware.errors import DomainError
from src.models import (
    CoherenceModel,
    ExponentialRateModel,
    LifetimeModel,
    coherence_likelihood,
    coherence_quantifier,
    coverage,
    estimate_rate,
    geometric_symmetry_numeric,
    lifetime_fisher,
    lifetime_frameworks,
    lifetime_grid,
    lifetime_likelihood,
    lifetime_state,
    nsr,
    nsr_percent,
    rate_closed_form,
    rate_grid,
    simulate_shots,
    theta_for_zeta,
)
from src.numerics.random import RandomStream
from src.priors import lifetime_geometric_symmetry
from src.quantum import Povm


def report(estimate, error=0.01):
    return EstimateReport(estimate=estimate, error=error, empirical_loss=error**2, f_mean=0.0)


class TestCoherence:
    def test_zeta_roots(self):
        assert theta_for_zeta(0.72) == pytest.approx(0.8)
        assert theta_for_zeta(0.72, upper_root=False) == pytest.approx(0.2)

    def test_quantifier(self):
        result = coherence_quantifier(report(0.8, 0.01))
        assert result.zeta == pytest.approx(0.72)
        assert result.dzeta == pytest.approx(0.9 * 0.6 / 0.4 * 0.01)

    def test_quantifier_at_boundary(self):
        result = coherence_quantifier(report(1.0))
        assert result.singular and result.zeta == 0.0

    @given(st.floats(0.0, 1.0))
    def test_zeta_range(self, theta):
        assert 0.0 <= coherence_quantifier(report(theta)).zeta <= 0.9 + 1e-12

    @pytest.mark.parametrize("theta,expected", [(0.8, 0.77), (0.0, 0.05), (1.0, 0.95)])
    def test_likelihood(self, theta, expected):
        assert float(coherence_likelihood(1, theta)) == pytest.approx(expected)
        assert float(coherence_likelihood(0, theta)) == pytest.approx(1 - expected)

    def test_likelihood_domain(self):
        with pytest.raises(DomainError):
            coherence_likelihood(1, 1.2)
        with pytest.raises(DomainError):
            coherence_likelihood(2, 0.5)


class TestLifetime:
    def test_ground_state_probe(self):
        rho, drho = lifetime_state(0.7, 1.0, 0.0)
        np.testing.assert_allclose(rho, np.diag([1.0, 0.0]))
        np.testing.assert_allclose(drho, 0.0)

    def test_excited_probe_is_diagonal(self):
        rho, _ = lifetime_state(2.0, 1.0, 1.0)
        np.testing.assert_allclose(rho, np.diag([1 - np.exp(-0.5), np.exp(-0.5)]))

    def test_superposition_coherence(self):
        rho, _ = lifetime_state(1.0, 1.0, 0.5)
        assert rho[0, 1].real == pytest.approx(np.sqrt(np.exp(-1)) / 2, abs=1e-5)

    def test_analytic_derivative(self):
        theta, h = 1.3, 1e-6
        _, drho = lifetime_state(theta, 1.0, 0.3)
        numeric = (lifetime_state(theta + h, 1.0, 0.3)[0] - lifetime_state(theta - h, 1.0, 0.3)[0]) / (2 * h)
        np.testing.assert_allclose(drho, numeric, atol=1e-8)

    def test_likelihood_needs_excited_probe(self):
        with pytest.raises(DomainError):
            lifetime_likelihood(1, 1.0, 1.0, eta=0.5)

    def test_survival_probability(self):
        assert float(lifetime_likelihood(1, 1.0, 1.0)) == pytest.approx(np.exp(-1))

    def test_geometric_prior_follows_fisher(self, lifetime_setup):
        grid, frameworks = lifetime_setup
        expected = np.sqrt(lifetime_fisher(grid.nodes, 1.0))
        ratio = frameworks["geometry"].prior.density / expected
        np.testing.assert_allclose(ratio, ratio[0], rtol=1e-12)
        assert not frameworks["geometry"].f.increasing

    def test_numeric_geometry_matches_closed_form(self):
        grid = lifetime_grid(10.0, 1.0, 513)
        numeric = geometric_symmetry_numeric(grid, 1.0, 1.0)
        closed = lifetime_geometric_symmetry(grid, 1.0)
        np.testing.assert_allclose(
            numeric.f_values - numeric.f_values[-1], closed.f_values - closed.f_values[-1], atol=1e-6
        )
        assert numeric.f_values[-1] == pytest.approx(0.0, abs=1e-12)

    def test_numeric_geometry_framework(self):
        frameworks = lifetime_frameworks(lifetime_grid(10.0, 1.0, 129), 1.0, eta=0.5)
        assert frameworks["geometry"].f.closed_form is None


class TestRate:
    def test_closed_form_single_shot(self):
        result = rate_closed_form(1.0, 1)
        assert result.estimate == pytest.approx(np.exp(-np.euler_gamma))
        assert result.empirical_loss == pytest.approx(np.pi**2 / 6)

    @pytest.mark.parametrize("mu", [1, 5, 20])
    def test_grid_pipeline_matches_closed_form(self, mu):
        model = ExponentialRateModel()
        for seed in range(10):
            times = model.sample(1.0, None, RandomStream(seed, mu), mu)
            result = estimate_rate(times)
            assert result.report.estimate == pytest.approx(result.closed_form.estimate, rel=1e-3)
            assert result.report.error == pytest.approx(result.closed_form.error, rel=1e-3)
            assert result.truncation_sensitivity < 1e-4

    @pytest.mark.parametrize("mu", [5, 20, 200])
    def test_grid_spans_gamma_tails(self, mu):
        grid = rate_grid(2.0, mu, 257)
        assert grid.lower == pytest.approx(stats.gamma.ppf(1e-12, mu, scale=1 / mu) / 2.0, rel=1e-12)
        assert grid.upper == pytest.approx(stats.gamma.isf(1e-12, mu, scale=1 / mu) / 2.0, rel=1e-12)

    def test_grid_floor_from_truncation(self):
        grid = rate_grid(2.0, 1, 257, truncation=1e3)
        assert grid.lower == pytest.approx(1e-3 / 2.0, rel=1e-12)
        assert rate_grid(2.0, 1, 257, truncation=1e15).lower == pytest.approx(stats.gamma.ppf(1e-12, 1, scale=1.0) / 2.0, rel=1e-12)

    def test_asymptotics(self):
        times = ExponentialRateModel().sample(1.0, None, RandomStream(0, 2000), 2000)
        assert estimate_rate(times).report.estimate * times.mean() == pytest.approx(1.0, abs=0.01)

    def test_rejects_bad_times(self):
        with pytest.raises(DomainError):
            estimate_rate([1.0, -2.0])
        with pytest.raises(DomainError):
            estimate_rate([])


class TestSimulation:
    def test_coherence_frequencies(self):
        batch = simulate_shots(CoherenceModel(0.1), 0.8, 100_000, RandomStream(5), povm=Povm.computational(2))
        sigma = np.sqrt(0.77 * 0.23 / 100_000)
        assert abs(np.mean(batch.outcomes == 1) - 0.77) < 4 * sigma
        assert batch.seed == (5, 0)

    def test_lifetime_frequencies(self):
        batch = simulate_shots(LifetimeModel(1.0, 1.0), 1.0, 100_000, RandomStream(6), povm=Povm.computational(2))
        p = np.exp(-1)
        assert abs(np.mean(batch.outcomes == 1) - p) < 4 * np.sqrt(p * (1 - p) / 100_000)

    def test_exponential_mean(self):
        batch = simulate_shots(ExponentialRateModel(), 2.0, 100_000, RandomStream(7))
        assert abs(batch.outcomes.mean() - 0.5) < 4 * 0.5 / np.sqrt(100_000)

    def test_reproducible(self):
        a = simulate_shots(ExponentialRateModel(), 1.0, 10, RandomStream(1, 2))
        b = simulate_shots(ExponentialRateModel(), 1.0, 10, RandomStream(1, 2))
        np.testing.assert_array_equal(a.outcomes, b.outcomes)

    def test_quantum_model_needs_povm(self):
        with pytest.raises(DomainError):
            simulate_shots(CoherenceModel(), 0.5, 3, RandomStream(0))


class TestMetrics:
    def test_nsr(self):
        assert nsr([2.0, 2.0, 2.0]) == 0.0
        assert nsr([1.0, 3.0]) == pytest.approx(0.25)
        assert nsr_percent([1.0, 3.0]) == pytest.approx(25.0)

    @pytest.mark.parametrize("values", [[], [1.0, -1.0]])
    def test_nsr_undefined(self, values):
        with pytest.raises(DomainError):
            nsr(values)

    def test_coverage(self):
        assert coverage([1.0, 2.0, 5.0], [0.1, 0.5, 1.0], 2.0) == pytest.approx(2 / 3)
