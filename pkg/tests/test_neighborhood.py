"""Tests for per-node estimation and the three penalty rules."""
import numpy as np
import pytest
from numpy.testing import assert_allclose

from neighsel.errors import DomainError, FoldTooSmall
from neighsel.lasso import LassoProblem, kkt_residual, lambda_max, lasso_fit
from neighsel.neighborhood import (
    AlphaPenalty,
    CvPenalty,
    FixedPenalty,
    NeighborhoodSet,
    PenaltyValue,
    column_sigma_hat,
    cv_lambda,
    default_cv_grid,
    estimate_all_neighborhoods,
    estimate_neighborhood,
    lambda_alpha,
)
from neighsel.numeric import DataMatrix, SymMatrix, standardize, substream
from neighsel.synth import sample_gaussian

from oracles import tail_quantile_oracle


def random_standardized(seed: int, n: int, p: int, correlated: bool = True) -> DataMatrix:
    rng = substream(seed, 81)
    raw = rng.standard_normal((n, p))
    if correlated and p > 1:
        raw[:, 1:] += 0.4 * raw[:, :1]
    return standardize(DataMatrix(raw))


class TestPenaltyValue:
    def test_rejects_unknown_rule(self):
        with pytest.raises(DomainError):
            PenaltyValue(lam=0.1, sigma_hat=1.0, rule="oracle")

    def test_rejects_bad_lambda(self):
        with pytest.raises(DomainError):
            PenaltyValue(lam=-0.1, sigma_hat=1.0, rule="fixed")
        with pytest.raises(DomainError):
            PenaltyValue(lam=float("nan"), sigma_hat=1.0, rule="fixed")

    def test_neighborhood_set_validation(self):
        pen = PenaltyValue(lam=0.1, sigma_hat=1.0, rule="fixed")
        with pytest.raises(DomainError):
            NeighborhoodSet(node=0, members=(1, 2), signs=(1,), penalty=pen)
        with pytest.raises(DomainError):
            NeighborhoodSet(node=0, members=(1,), signs=(0,), penalty=pen)


class TestLambdaAlpha:
    def test_alpha_rule_identity_is_exact(self):
        # invariant: lam is literally 2 sigma_hat / sqrt(n) * tail_quantile
        for n, p, alpha in [(40, 10, 0.05), (600, 1000, 0.05), (200, 30, 0.3)]:
            pen = lambda_alpha(n, p, 1.0, alpha)
            assert pen.lam == 2.0 * pen.sigma_hat / np.sqrt(n) * pen.tail_quantile
            assert pen.rule == "alpha" and pen.alpha == alpha

    def test_frozen_values_at_demonstration_scale(self):
        # oracle-derived; the short prints 0.44513 / 0.44095 round the same
        # formula more coarsely, hence the looser second band
        pen = lambda_alpha(600, 1000, 1.0, 0.05)
        assert_allclose(pen.tail_quantile, 5.451310437845478, atol=1e-12)
        assert_allclose(pen.lam, 0.44509763340764585, atol=1e-12)
        assert abs(pen.lam - 0.44513) < 1e-3

        pen = lambda_alpha(600, 1000, 1.0, 0.064)
        assert_allclose(pen.tail_quantile, 5.407249391943359, atol=1e-12)
        assert_allclose(pen.lam, 0.4415000640745278, atol=1e-12)
        assert abs(pen.lam - 0.44095) < 1e-3

    def test_matches_tail_quantile_oracle(self):
        pen = lambda_alpha(40, 10, 1.0, 0.05)
        assert_allclose(pen.tail_quantile, tail_quantile_oracle(0.05 / 200), atol=1e-9)

    def test_scaling_structure(self):
        base = lambda_alpha(100, 50, 1.0, 0.05)
        assert lambda_alpha(100, 50, 2.0, 0.05).lam == pytest.approx(2 * base.lam, rel=1e-12)
        assert lambda_alpha(400, 50, 1.0, 0.05).lam == pytest.approx(base.lam / 2, rel=1e-12)

    def test_monotone_in_alpha_n_p(self):
        lams = [lambda_alpha(100, 50, 1.0, a).lam for a in (0.01, 0.05, 0.2, 0.6)]
        assert all(x > y for x, y in zip(lams, lams[1:]))
        lams = [lambda_alpha(n, 50, 1.0, 0.05).lam for n in (50, 100, 200, 400)]
        assert all(x > y for x, y in zip(lams, lams[1:]))
        lams = [lambda_alpha(100, p, 1.0, 0.05).lam for p in (10, 50, 200, 1000)]
        assert all(x < y for x, y in zip(lams, lams[1:]))

    def test_domain_errors(self):
        for bad in [0.0, 1.0, -0.2, 1.5]:
            with pytest.raises(DomainError):
                lambda_alpha(100, 50, 1.0, bad)
        with pytest.raises(DomainError):
            lambda_alpha(1, 50, 1.0, 0.05)
        with pytest.raises(DomainError):
            lambda_alpha(100, 50, 0.0, 0.05)

    def test_sigma_hat_is_one_after_standardizing(self):
        data = random_standardized(1, 60, 5)
        for a in range(5):
            assert abs(column_sigma_hat(data, a) - 1.0) <= 1e-10


class TestEstimateNeighborhood:
    def test_empty_at_lambda_max(self):
        data = random_standardized(2, 50, 6)
        lam = max(lambda_max(data, a, [b for b in range(6) if b != a]) for a in range(6))
        for a in range(6):
            hood = estimate_neighborhood(
                data, a, PenaltyValue(lam=lam, sigma_hat=1.0, rule="fixed")
            )
            assert hood.members == ()

    def test_two_variable_model_sign_recovery(self):
        # regression of X_1 on X_2 under cov -0.245 has a negative
        # coefficient; at lam = 0.05 and n = 1e4 it should be picked up
        # essentially always
        cov = SymMatrix(np.array([[1.0, -0.245], [-0.245, 1.0]]))
        pen = PenaltyValue(lam=0.05, sigma_hat=1.0, rule="fixed")
        good = 0
        for rep in range(100):
            data = standardize(sample_gaussian(cov, 10_000, 4200 + rep))
            hood = estimate_neighborhood(data, 0, pen)
            good += hood.members == (1,) and hood.signs == (-1,)
        assert good >= 95

    def test_independent_noise_mostly_empty_at_alpha(self):
        # alpha-level penalty controls false selection even with p >> n
        empties = 0
        for rep in range(100):
            rng = substream(9000, rep)
            data = standardize(DataMatrix(rng.standard_normal((50, 100))))
            pen = lambda_alpha(50, 100, column_sigma_hat(data, 0), 0.05)
            empties += estimate_neighborhood(data, 0, pen).members == ()
        assert empties >= 95

    def test_active_set_carries_kkt_certificate(self):
        data = random_standardized(3, 80, 10)
        for a in range(10):
            pen = lambda_alpha(80, 10, column_sigma_hat(data, a), 0.05)
            hood = estimate_neighborhood(data, a, pen)
            allowed = tuple(b for b in range(10) if b != a)
            fit = lasso_fit(LassoProblem(data, a, allowed, pen.lam))
            assert fit.active == hood.members
            assert kkt_residual(fit) <= 1e-8


class TestEstimateAll:
    def test_single_node(self):
        data = standardize(DataMatrix(substream(4, 0).standard_normal((10, 1))))
        hoods = estimate_all_neighborhoods(data, AlphaPenalty(0.05))
        assert len(hoods) == 1 and hoods[0].members == ()

    def test_worker_count_does_not_change_output(self):
        data = random_standardized(5, 60, 12)
        for rule in [AlphaPenalty(0.05), FixedPenalty(0.3), CvPenalty(folds=5, grid_size=10)]:
            one = estimate_all_neighborhoods(data, rule, workers=1, seed=3)
            eight = estimate_all_neighborhoods(data, rule, workers=8, seed=3)
            key = [(h.node, h.members, h.signs, h.penalty.lam) for h in one]
            assert key == [(h.node, h.members, h.signs, h.penalty.lam) for h in eight]

    def test_relabeling_equivariance(self):
        data = random_standardized(6, 120, 8)
        hoods = estimate_all_neighborhoods(data, AlphaPenalty(0.1))
        perm = substream(6, 1).permutation(8)
        permuted = standardize(DataMatrix(data.values[:, perm]))
        hoods_p = estimate_all_neighborhoods(permuted, AlphaPenalty(0.1))
        inverse = np.argsort(perm)
        for j in range(8):
            expected = tuple(sorted(inverse[b] for b in hoods[perm[j]].members))
            assert hoods_p[j].members == expected

    def test_rejects_bad_worker_count(self):
        data = random_standardized(7, 20, 3)
        with pytest.raises(DomainError):
            estimate_all_neighborhoods(data, AlphaPenalty(0.05), workers=0)


class TestCvLambda:
    def test_grid_of_length_one(self):
        data = random_standardized(8, 40, 4)
        pen = cv_lambda(data, 0, folds=4, grid=[0.37], seed=0)
        assert pen.lam == 0.37 and pen.rule == "cv" and pen.folds == 4

    def test_fold_validation(self):
        data = random_standardized(9, 20, 3)
        with pytest.raises(DomainError):
            cv_lambda(data, 0, folds=1, grid=[0.5, 0.1], seed=0)
        with pytest.raises(FoldTooSmall):
            cv_lambda(data, 0, folds=15, grid=[0.5, 0.1], seed=0)

    def test_exact_ties_break_toward_larger_penalty(self):
        # every grid value sits above lambda_max in every fold, so all
        # fits are zero and all scores tie exactly
        data = random_standardized(10, 40, 4)
        pen = cv_lambda(data, 0, folds=4, grid=[10.0, 9.0, 8.0], seed=0)
        assert pen.lam == 10.0

    def test_pure_noise_prefers_largest_penalty(self):
        hits = 0
        for rep in range(100):
            rng = substream(7700, rep)
            data = standardize(DataMatrix(rng.standard_normal((40, 4))))
            top = lambda_max(data, 0, [1, 2, 3])
            grid = np.geomspace(top, top / 100.0, 20)
            pen = cv_lambda(data, 0, folds=4, grid=grid, seed=rep)
            hits += pen.lam == grid[0]
        assert hits > 50

    def test_seeded_shuffle_is_deterministic(self):
        data = random_standardized(11, 60, 5)
        grid = default_cv_grid(data, 2, CvPenalty(folds=5, grid_size=15))
        first = cv_lambda(data, 2, folds=5, grid=grid, seed=12)
        second = cv_lambda(data, 2, folds=5, grid=grid, seed=12)
        assert first.lam == second.lam

    def test_default_grid_shape(self):
        data = random_standardized(12, 50, 6)
        grid = default_cv_grid(data, 0, CvPenalty(grid_size=50, grid_ratio=1000.0))
        assert len(grid) == 50
        assert grid[0] == pytest.approx(lambda_max(data, 0, [1, 2, 3, 4, 5]))
        assert grid[-1] == pytest.approx(grid[0] / 1000.0)
        assert all(x > y for x, y in zip(grid, grid[1:]))
