import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError

from src.bayes import (
    DiscreteLikelihood,
    EstimateReport,
    PosteriorState,
    bayes_update,
    bayes_update_many,
    evidence,
    log_evidence,
    optimal_estimate,
    prior_f_moments,
)
from src.middleware.errors import ContradictionError, GridMismatchError, ModelError
from src.models.coherence import CoherenceLikelihood, coherence_likelihood
from src.numerics.quadrature import integrate_grid, linear_grid, log_grid, logit_grid
from src.priors import identity_symmetry, log_symmetry, make_ignorance_prior, prior_from_density


def coin():
    return DiscreteLikelihood([0, 1], lambda x, theta, _: theta if x == 1 else 1 - theta)


class TestPosterior:
    def test_single_update_is_normalized(self, unit_grid):
        state = bayes_update(PosteriorState.from_prior(make_ignorance_prior("flat", unit_grid)), coin(), 1)
        assert integrate_grid(state.density, unit_grid) == pytest.approx(1.0, abs=1e-12)
        assert state.shot_count == 1

    def test_beta_posterior_mean(self, unit_grid):
        state = PosteriorState.from_prior(make_ignorance_prior("flat", unit_grid))
        state = bayes_update(state, coin(), 1)
        assert state.mean() == pytest.approx(2 / 3, abs=1e-10)

    def test_batch_matches_sequential(self, unit_grid):
        prior = make_ignorance_prior("flat", unit_grid)
        outcomes = [1, 0, 1, 1, 0, 1]
        sequential = PosteriorState.from_prior(prior)
        for x in outcomes:
            sequential = bayes_update(sequential, coin(), x)
        batch = bayes_update_many(PosteriorState.from_prior(prior), coin(), outcomes)
        np.testing.assert_allclose(batch.density, sequential.density, atol=1e-9)
        assert batch.log_evidence == pytest.approx(sequential.log_evidence, rel=1e-10)
        assert batch.shot_count == sequential.shot_count == len(outcomes)

    def test_update_order_does_not_matter(self, unit_grid):
        prior = PosteriorState.from_prior(make_ignorance_prior("flat", unit_grid))
        outcomes = [1, 0, 1, 1, 0, 1]
        forward = prior
        for x in outcomes:
            forward = bayes_update(forward, coin(), x)
        backward = prior
        for x in reversed(outcomes):
            backward = bayes_update(backward, coin(), x)
        np.testing.assert_allclose(forward.density, backward.density, atol=1e-12)

    def test_contradiction(self, unit_grid):
        never = DiscreteLikelihood([0, 1], lambda x, theta, _: np.zeros_like(theta) if x == 1 else np.ones_like(theta))
        state = PosteriorState.from_prior(make_ignorance_prior("flat", unit_grid))
        with pytest.raises(ContradictionError):
            bayes_update(state, never, 1)
        with pytest.raises(ContradictionError):
            bayes_update_many(state, never, [0, 1])

    def test_invalid_likelihood(self, unit_grid):
        broken = DiscreteLikelihood([0], lambda x, theta, _: -np.ones_like(theta))
        with pytest.raises(ModelError):
            bayes_update(PosteriorState.from_prior(make_ignorance_prior("flat", unit_grid)), broken, 0)

    def test_controls_are_passed_through(self, unit_grid):
        seen = []

        def p(x, theta, control):
            seen.append(control)
            return np.full_like(theta, 0.5)

        model = DiscreteLikelihood([0, 1], p)
        bayes_update_many(PosteriorState.from_prior(make_ignorance_prior("flat", unit_grid)), model, [0, 1], [3.0, 4.0])
        assert seen == [3.0, 4.0]


class TestEvidence:
    def test_coin_evidence(self, unit_grid):
        prior = make_ignorance_prior("flat", unit_grid)
        assert evidence(prior, coin(), [1, 1, 0]) == pytest.approx(1 / 12, rel=1e-10)
        assert log_evidence(prior, coin(), [1, 1, 0]) == pytest.approx(np.log(1 / 12), rel=1e-10)

    def test_coherence_evidence_matches_direct_integral(self):
        grid = logit_grid(0.05, 0.95, 257)
        prior = make_ignorance_prior("weight", grid)
        direct = integrate_grid(prior.density * coherence_likelihood(0, grid.nodes) * coherence_likelihood(1, grid.nodes), grid)
        model = CoherenceLikelihood(0.1)
        assert evidence(prior, model, [0, 1]) == pytest.approx(direct, rel=1e-10)
        assert evidence(prior, model, [1, 0]) == pytest.approx(direct, rel=1e-10)


class TestEstimator:
    def test_identity_estimate_is_posterior_mean(self, unit_grid):
        prior = make_ignorance_prior("flat", unit_grid)
        report = optimal_estimate(prior, identity_symmetry(unit_grid))
        assert report.estimate == pytest.approx(0.5, abs=1e-12)
        assert report.error == pytest.approx(np.sqrt(1 / 12), rel=1e-10)
        assert not report.clamped

    def test_prior_moments(self, scale_grid):
        prior = make_ignorance_prior("jeffreys_scale", scale_grid)
        moments = prior_f_moments(prior, log_symmetry(scale_grid))
        assert moments.mean == pytest.approx(0.0, abs=1e-12)
        assert moments.variance == pytest.approx((2 * np.log(10)) ** 2 / 12, rel=1e-8)

    def test_grid_mismatch(self, unit_grid):
        prior = make_ignorance_prior("flat", unit_grid)
        with pytest.raises(GridMismatchError):
            optimal_estimate(prior, identity_symmetry(linear_grid(0.0, 1.0, 101)))

    def test_report_is_validated(self):
        with pytest.raises(ValidationError):
            EstimateReport(estimate=1.0, error=-1.0, empirical_loss=0.0, f_mean=0.0)

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(st.floats(0.01, 10.0), min_size=33, max_size=33),
        st.floats(-0.3, 0.3).filter(lambda d: abs(d) > 1e-3),
    )
    def test_optimal_estimate_dominates_perturbations(self, weights, delta):
        grid = log_grid(0.1, 10.0, 33)
        posterior = prior_from_density(np.asarray(weights), grid)
        f = log_symmetry(grid)
        best = optimal_estimate(posterior, f)

        def expected_loss(estimate):
            return integrate_grid(posterior.density * (f.f_values - float(f(estimate))) ** 2, grid)

        perturbed = float(np.clip(best.estimate * np.exp(delta), grid.lower, grid.upper))
        assert expected_loss(best.estimate) <= expected_loss(perturbed) + 1e-12
        assert expected_loss(best.estimate) == pytest.approx(best.empirical_loss, rel=1e-9, abs=1e-12)
