import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from src.bayes import PosteriorState, bayes_update, optimal_estimate
from src.middleware.errors import ConfigError, DomainError, GridMismatchError, LyapunovInconsistencyError, ModelError
from src.models.coherence import CoherenceModel, coherence_likelihood
from src.models.lifetime import LifetimeModel, lifetime_fisher, lifetime_frameworks, lifetime_grid, lifetime_likelihood
from src.numerics.linalg import HermitianOperator, random_density_matrix, random_hermitian
from src.numerics.random import RandomStream
from src.priors import classical_fisher, delta_prior
from src.quantum import (
    BornLikelihood,
    FunctionModel,
    Povm,
    adaptive_loop,
    consistency_check,
    optimal_strategy,
    optimize_probe,
    qfi,
    sld,
    solve_lyapunov,
    state_moment,
)


def offdiagonal(element: HermitianOperator) -> float:
    m = element.entries
    return float(np.max(np.abs(m - np.diag(np.diag(m)))))


class TestLyapunov:
    @pytest.mark.parametrize("dim", [2, 3, 4])
    def test_residual(self, dim, generator):
        rho0 = random_density_matrix(dim, generator)
        rho1 = random_hermitian(dim, generator)
        S = solve_lyapunov(rho0, rho1).entries
        np.testing.assert_allclose(S @ rho0.entries + rho0.entries @ S, 2 * rho1.entries, atol=1e-10)

    def test_rank_deficient_consistent(self):
        S = solve_lyapunov(np.diag([1.0, 0.0]), np.diag([0.3, 0.0]))
        np.testing.assert_allclose(S.entries, np.diag([0.3, 0.0]), atol=1e-12)

    def test_rank_deficient_inconsistent(self):
        with pytest.raises(LyapunovInconsistencyError, match="kernel"):
            solve_lyapunov(np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))

    def test_sld_of_diagonal_family(self):
        rho = np.diag([0.25, 0.75])
        drho = np.diag([-1.0, 1.0])
        np.testing.assert_allclose(sld(rho, drho).entries, np.diag([-4.0, 4.0 / 3.0]), atol=1e-12)


class TestQfi:
    @pytest.mark.parametrize("theta", [0.1, 0.3, 0.5, 0.7, 0.9])
    def test_coherence(self, theta):
        assert qfi(CoherenceModel(0.1), theta) == pytest.approx(81 / (100 * theta * (1 - theta)), rel=1e-5)

    @pytest.mark.parametrize("eta", [0.25, 0.5, 0.75, 1.0])
    @pytest.mark.parametrize("theta", [0.3, 1.0, 3.0])
    def test_lifetime(self, eta, theta):
        assert qfi(LifetimeModel(eta, 1.0), theta) == pytest.approx(float(lifetime_fisher(theta, 1.0, eta)), rel=1e-5)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0.05, 0.95))
    def test_dominates_classical_fisher(self, theta):
        model = CoherenceModel(0.1)
        assert qfi(model, theta) >= classical_fisher(BornLikelihood(model, Povm.computational(2)), theta) * (1 - 1e-6)

    def test_numeric_derivative_fallback(self):
        model = FunctionModel(2, lambda theta, _: np.diag([1 - theta, theta]))
        assert qfi(model, 0.3) == pytest.approx(1 / (0.3 * 0.7), rel=1e-6)


class TestPovm:
    def test_incomplete(self):
        with pytest.raises(ModelError):
            Povm((HermitianOperator(np.diag([1.0, 0.0])),), np.array([0.0]))

    def test_negative_element(self):
        with pytest.raises(ModelError):
            Povm((HermitianOperator(np.diag([1.5, 0.0])), HermitianOperator(np.diag([-0.5, 1.0]))), np.array([0.0, 1.0]))

    @pytest.mark.parametrize("theta", [0.0, 0.2, 0.8, 1.0])
    def test_born_rule_matches_coherence_likelihood(self, theta):
        likelihood = BornLikelihood(CoherenceModel(0.1), Povm.computational(2))
        for s in (0, 1):
            assert float(likelihood.probability(s, theta)) == pytest.approx(float(coherence_likelihood(s, theta)), abs=1e-12)

    @pytest.mark.parametrize("theta", [0.3, 1.0, 3.0])
    def test_born_rule_matches_lifetime_likelihood(self, theta):
        likelihood = BornLikelihood(LifetimeModel(1.0, 1.0), Povm.computational(2))
        np.testing.assert_allclose(
            likelihood.evaluate(np.arange(2), theta),
            [float(lifetime_likelihood(s, theta, 1.0)) for s in (0, 1)],
            atol=1e-12,
        )

    def test_dimension_mismatch(self):
        with pytest.raises(DomainError):
            BornLikelihood(CoherenceModel(0.1), Povm.computational(3))


class TestStrategy:
    def test_state_moments(self, coherence_setup):
        model, frameworks = coherence_setup
        fw = frameworks["transformation"]
        assert state_moment(model, fw.prior, fw.f, 0).trace() == pytest.approx(1.0, abs=1e-10)
        with pytest.raises(DomainError):
            state_moment(model, fw.prior, fw.f, 3)

    @pytest.mark.parametrize("name", ["transformation", "geometry"])
    def test_coherence_measures_computational_basis(self, coherence_setup, name):
        model, frameworks = coherence_setup
        fw = frameworks[name]
        report = optimal_strategy(model, fw.prior, fw.f)
        assert len(report.povm) == 2
        assert max(offdiagonal(e) for e in report.povm.elements) < 1e-8
        assert consistency_check(report, report.rho0, report.rho1) < 1e-8
        assert not report.out_of_range.any()

    @pytest.mark.parametrize("name", ["transformation", "geometry"])
    def test_gain_bounds(self, coherence_setup, name):
        model, frameworks = coherence_setup
        fw = frameworks[name]
        report = optimal_strategy(model, fw.prior, fw.f)
        assert report.prior_f_mean**2 - 1e-12 <= report.gain_G <= report.prior_f_second + 1e-12
        assert report.min_loss == pytest.approx(report.prior_f_second - report.gain_G, abs=1e-12)
        assert 0.0 <= report.intrinsic_gain <= 1.0
        assert report.min_loss <= report.prior_loss + 1e-12

    def test_lifetime_golden_numbers(self, lifetime_setup):
        _, frameworks = lifetime_setup
        fw = frameworks["transformation"]
        assert optimal_strategy(LifetimeModel(1.0), fw.prior, fw.f).min_loss == pytest.approx(0.99, abs=0.02)
        half = optimal_strategy(LifetimeModel(0.5), fw.prior, fw.f)
        assert half.min_loss == pytest.approx(1.52, abs=0.02)
        components = [np.sort(np.abs(np.linalg.eigh(e.entries)[1][:, -1])) for e in half.povm.elements]
        assert any(np.allclose(c, (0.44, 0.90), atol=0.01) for c in components)

    def test_energy_basis_for_excited_probe(self, lifetime_setup):
        _, frameworks = lifetime_setup
        for fw in frameworks.values():
            report = optimal_strategy(LifetimeModel(1.0), fw.prior, fw.f)
            assert max(offdiagonal(e) for e in report.povm.elements) < 1e-10


class TestAdaptive:
    def test_reproducible_trajectory(self):
        grid = lifetime_grid(10.0, 1.0, 129)
        fw = lifetime_frameworks(grid)["transformation"]
        model = LifetimeModel(1.0, 1.0)
        runs = [adaptive_loop(model, fw.prior, fw.f, [0.5, 1.0, 2.0], 1.0, 6, RandomStream(3, 0)) for _ in range(2)]
        assert [s.outcome for s in runs[0]] == [s.outcome for s in runs[1]]
        assert [s.control for s in runs[0]] == [s.control for s in runs[1]]
        assert [s.shot for s in runs[0]] == list(range(1, 7))
        assert all(s.control in (0.5, 1.0, 2.0) for s in runs[0])

    def test_rejects_empty_candidates(self):
        grid = lifetime_grid(10.0, 1.0, 65)
        fw = lifetime_frameworks(grid)["transformation"]
        with pytest.raises(ConfigError):
            adaptive_loop(LifetimeModel(), fw.prior, fw.f, [], 1.0, 3, RandomStream(0))

    def test_single_candidate_remeasures_with_optimal_povm(self):
        grid = lifetime_grid(10.0, 1.0, 129)
        fw = lifetime_frameworks(grid)["transformation"]
        model = LifetimeModel(1.0, 1.0)
        steps = adaptive_loop(model, fw.prior, fw.f, [1.0], 0.8, 5, RandomStream(4, 0))

        rng = RandomStream(4, 0)
        state = PosteriorState.from_prior(fw.prior)
        for step in steps:
            strategy = optimal_strategy(model, state, fw.f, 1.0)
            likelihood = BornLikelihood(model, strategy.povm)
            outcome = rng.choice(likelihood.evaluate(np.arange(len(strategy.povm)), 0.8, 1.0))
            state = bayes_update(state, likelihood, outcome, 1.0)
            assert step.outcome == outcome
            assert step.report == optimal_estimate(state, fw.f)

    def test_repeated_candidate_changes_nothing(self):
        grid = lifetime_grid(10.0, 1.0, 129)
        fw = lifetime_frameworks(grid)["transformation"]
        model = LifetimeModel(1.0, 1.0)
        once = adaptive_loop(model, fw.prior, fw.f, [2.0], 1.0, 5, RandomStream(9, 1))
        twice = adaptive_loop(model, fw.prior, fw.f, [2.0, 2.0], 1.0, 5, RandomStream(9, 1))
        assert [s.outcome for s in once] == [s.outcome for s in twice]
        assert [s.report for s in once] == [s.report for s in twice]

    def test_delta_prior_learns_nothing(self):
        grid = lifetime_grid(10.0, 1.0, 129)
        fw = lifetime_frameworks(grid)["transformation"]
        prior = delta_prior(grid, 1.0)
        node = grid.nodes[int(np.argmin(np.abs(grid.nodes - 1.0)))]
        steps = adaptive_loop(LifetimeModel(1.0, 1.0), prior, fw.f, [None], 1.0, 4, RandomStream(2))
        for step in steps:
            assert step.report.estimate == pytest.approx(node, rel=1e-9)
            assert step.report.empirical_loss == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.slow
    def test_error_bars_cover_truth(self):
        grid = lifetime_grid(10.0, 1.0, 257)
        fw = lifetime_frameworks(grid)["transformation"]
        model = LifetimeModel(1.0, 1.0)
        covered = 0
        for seed in range(100):
            final = adaptive_loop(model, fw.prior, fw.f, [None], 1.0, 200, RandomStream(seed))[-1].report
            covered += abs(final.estimate - 1.0) <= 3 * final.error
        assert covered >= 95


class TestProbe:
    def test_excited_probe_is_optimal(self):
        fw = lifetime_frameworks(lifetime_grid(10.0, 1.0, 257))["transformation"]
        etas = np.round(0.05 * np.arange(1, 21), 2)
        result = optimize_probe(lambda eta: LifetimeModel(eta, 1.0), fw.prior, fw.f, etas)
        assert result.eta_star == 1.0
        assert len(result.gain_curve) == len(etas)

    @pytest.mark.parametrize("b", [2.0, 100.0])
    def test_excited_state_wins_for_other_widths(self, b):
        fw = lifetime_frameworks(lifetime_grid(b, 1.0, 257))["transformation"]
        etas = np.round(0.1 * np.arange(1, 11), 1)
        assert optimize_probe(lambda eta: LifetimeModel(eta, 1.0), fw.prior, fw.f, etas).eta_star == 1.0

    def test_flat_gain_curve_picks_largest_eta(self):
        fw = lifetime_frameworks(lifetime_grid(10.0, 1.0, 65))["transformation"]
        result = optimize_probe(lambda eta: LifetimeModel(1.0, 1.0), fw.prior, fw.f, [0.7, 0.2, 0.9, 0.4])
        assert result.eta_star == 0.9
        assert np.ptp(result.gain_curve) == 0.0

    def test_rejects_f_on_another_grid(self):
        fw = lifetime_frameworks(lifetime_grid(10.0, 1.0, 65))["transformation"]
        other = lifetime_frameworks(lifetime_grid(10.0, 1.0, 129))["transformation"]
        with pytest.raises(GridMismatchError):
            optimize_probe(lambda eta: LifetimeModel(eta), fw.prior, other.f, [0.5, 1.0])

    def test_rejects_eta_dependent_f(self):
        fw = lifetime_frameworks(lifetime_grid(10.0, 1.0, 65))["transformation"]
        with pytest.raises(ConfigError):
            optimize_probe(lambda eta: LifetimeModel(eta), fw.prior, lambda eta: fw.f, [0.5, 1.0])
