import math

import numpy as np
import pytest

from ising_ebic import (
    RegressionData,
    cumulant,
    cumulant_d1,
    cumulant_d2,
    fit_mle,
    kkt_max_violation,
    lambda_max,
    lasso_path,
    lasso_path_at,
    loglik_score_hessian,
)


def make_data(n, p, beta0, seed, pm_one=True):
    gen = np.random.default_rng(seed)
    X = gen.choice([-1.0, 1.0], size=(n, p)) if pm_one else gen.standard_normal((n, p))
    pr = 1.0 / (1.0 + np.exp(-(X @ beta0)))
    y = (gen.random(n) < pr).astype(float)
    return RegressionData(X, y)


class TestCumulant:
    def test_values_at_zero(self):
        assert cumulant(0.0) == pytest.approx(math.log(2), abs=1e-15)
        assert cumulant_d1(0.0) == 0.5
        assert cumulant_d2(0.0) == 0.25

    def test_sigmoid_symmetry(self):
        assert cumulant_d1(-3.7) == pytest.approx(1.0 - cumulant_d1(3.7), abs=1e-15)

    @pytest.mark.parametrize("theta", [-2.0, 0.0, 1.5])
    def test_d2_matches_finite_difference(self, theta):
        h = 1e-5
        fd = (cumulant_d1(theta + h) - cumulant_d1(theta - h)) / (2 * h)
        assert abs(cumulant_d2(theta) - fd) < 1e-8

    @pytest.mark.parametrize("theta", [-1e3, 1e3])
    def test_overflow_safe(self, theta):
        for f in (cumulant, cumulant_d1, cumulant_d2):
            val = float(f(theta))
            assert math.isfinite(val)
        assert cumulant(1e3) == pytest.approx(1e3)
        assert cumulant(-1e3) == pytest.approx(0.0, abs=1e-300)

    def test_d1_matches_finite_difference_of_cumulant(self):
        for theta in (-4.0, 0.3, 2.2):
            h = 1e-6
            fd = (cumulant(theta + h) - cumulant(theta - h)) / (2 * h)
            assert abs(cumulant_d1(theta) - fd) < 1e-8


class TestLoglikScoreHessian:
    def test_at_zero(self):
        data = make_data(50, 4, np.zeros(4), 0)
        ll, s, H = loglik_score_hessian(data, range(4), np.zeros(4))
        assert ll == pytest.approx(-50 * math.log(2), abs=1e-10)
        expected = data.X.T @ (data.y - 0.5)
        assert np.allclose(s, expected, atol=1e-12)
        assert np.allclose(H, H.T)
        assert np.all(np.linalg.eigvalsh(H) > -1e-10)

    def test_score_matches_finite_difference(self):
        data = make_data(20, 5, np.array([0.5, -1.0, 0.0, 0.2, 0.8]), 1, pm_one=False)
        beta = np.array([0.3, -0.4, 0.1, 0.0, 0.6])
        ll, s, _ = loglik_score_hessian(data, range(5), beta)
        h = 1e-6
        for k in range(5):
            e = np.zeros(5)
            e[k] = h
            lp, _, _ = loglik_score_hessian(data, range(5), beta + e)
            lm, _, _ = loglik_score_hessian(data, range(5), beta - e)
            fd = (lp - lm) / (2 * h)
            assert abs(s[k] - fd) <= 1e-6 * max(1.0, abs(fd))

    def test_hessian_matches_finite_difference(self):
        data = make_data(20, 5, np.array([0.5, -1.0, 0.0, 0.2, 0.8]), 1, pm_one=False)
        beta = np.array([0.3, -0.4, 0.1, 0.0, 0.6])
        _, _, H = loglik_score_hessian(data, range(5), beta)
        h = 1e-5
        for k in range(5):
            e = np.zeros(5)
            e[k] = h
            _, sp, _ = loglik_score_hessian(data, range(5), beta + e)
            _, sm, _ = loglik_score_hessian(data, range(5), beta - e)
            fd = (sp - sm) / (2 * h)
            # H is minus the derivative of the score
            assert np.abs(H[:, k] + fd).max() <= 1e-5 * max(1.0, np.abs(fd).max())

    def test_subset_support(self):
        data = make_data(30, 4, np.zeros(4), 2)
        ll, s, H = loglik_score_hessian(data, [1, 3], np.array([0.2, -0.1]))
        assert s.shape == (2,) and H.shape == (2, 2)

    def test_rejects_bad_beta_shape(self):
        data = make_data(10, 3, np.zeros(3), 3)
        with pytest.raises(ValueError):
            loglik_score_hessian(data, [0, 1], np.zeros(3))


class TestFitMle:
    def test_empty_support(self):
        data = make_data(40, 3, np.zeros(3), 4)
        fit = fit_mle(data, [])
        assert fit.loglik == pytest.approx(-40 * math.log(2))
        assert fit.converged and fit.support == ()

    def test_null_signal_shrinks(self):
        data = make_data(10_000, 1, np.zeros(1), 5)
        fit = fit_mle(data, [0])
        assert abs(fit.beta[0]) < 0.05

    def test_recovers_generating_coefficient(self):
        data = make_data(50_000, 1, np.array([1.0]), 6)
        fit = fit_mle(data, [0])
        assert abs(fit.beta[0] - 1.0) < 0.05

    def test_gradient_small_at_convergence(self):
        for seed in range(5):
            data = make_data(300, 4, np.array([0.8, -0.5, 0.0, 0.3]), 10 + seed)
            fit = fit_mle(data, range(4))
            assert fit.converged
            assert fit.grad_norm <= 1e-8 * data.n

    def test_never_worse_than_null(self):
        for seed in range(5):
            data = make_data(80, 5, np.zeros(5), 20 + seed)
            fit = fit_mle(data, range(5))
            assert fit.loglik >= -data.n * math.log(2) - 1e-12

    def test_nested_monotonicity(self):
        data = make_data(200, 5, np.array([0.7, -0.2, 0.4, 0.0, 0.0]), 30)
        inner = fit_mle(data, [0, 1])
        outer = fit_mle(data, [0, 1, 2, 4])
        assert outer.loglik >= inner.loglik - 1e-8

    def test_concavity_along_segments(self):
        data = make_data(60, 3, np.array([0.5, 0.5, -0.5]), 31)
        gen = np.random.default_rng(0)
        for _ in range(20):
            b1 = gen.standard_normal(3)
            b2 = gen.standard_normal(3)
            lls = []
            for t in np.linspace(0, 1, 10):
                ll, _, _ = loglik_score_hessian(data, range(3), (1 - t) * b1 + t * b2)
                lls.append(ll)
            for i, t in enumerate(np.linspace(0, 1, 10)):
                chord = (1 - t) * lls[0] + t * lls[-1]
                assert lls[i] >= chord - 1e-9

    def test_separated_data_capped(self):
        X = np.linspace(-1, 1, 40).reshape(-1, 1)
        y = (X[:, 0] > 0).astype(float)
        fit = fit_mle(RegressionData(X, y), [0])
        assert not fit.converged
        assert np.linalg.norm(fit.beta) <= 30.0 + 1e-9

    def test_support_larger_than_n(self):
        data = make_data(3, 5, np.zeros(5), 32)
        with pytest.raises(ValueError):
            fit_mle(data, range(5))

    def test_intercept_recovers_offset(self):
        gen = np.random.default_rng(33)
        X = gen.choice([-1.0, 1.0], size=(20_000, 1))
        pr = 1.0 / (1.0 + np.exp(-(0.5 * X[:, 0] + 0.7)))
        y = (gen.random(20_000) < pr).astype(float)
        fit = fit_mle(RegressionData(X, y), [0], intercept=True)
        assert abs(fit.intercept - 0.7) < 0.05
        assert abs(fit.beta[0] - 0.5) < 0.05


class TestLassoPath:
    def test_zero_solution_at_lambda_max(self):
        for seed in range(5):
            data = make_data(100, 6, np.array([1.0, -0.5, 0, 0, 0.2, 0]), 40 + seed)
            path = lasso_path(data, 25, 0.05)
            assert path.supports[0] == ()
            assert np.all(path.solutions[0] == 0.0)

    def test_lambdas_strictly_decreasing(self):
        data = make_data(50, 3, np.zeros(3), 41)
        path = lasso_path(data, 30, 0.01)
        assert np.all(np.diff(path.lambdas) < 0)

    def test_supports_are_nonzeros(self):
        data = make_data(120, 5, np.array([0.8, 0, -0.6, 0, 0]), 42)
        path = lasso_path(data, 40, 0.01)
        for sol, sup in zip(path.solutions, path.supports):
            assert tuple(np.flatnonzero(sol)) == sup

    def test_endpoint_matches_mle(self):
        data = make_data(200, 3, np.array([1.0, -0.7, 0.3]), 43)
        path = lasso_path(data, 100, 1e-4)
        mle = fit_mle(data, range(3))
        assert np.linalg.norm(path.solutions[-1] - mle.beta) < 1e-3

    def test_kkt_on_random_instance(self):
        data = make_data(100, 8, np.array([1.2, -0.8, 0.5, 0, 0, 0, 0.3, 0]), 44)
        path = lasso_path(data, 100, 0.01)
        for k in range(path.lambdas.size):
            viol = kkt_max_violation(data, path.solutions[k], float(path.lambdas[k]))
            assert viol <= 1e-6 * data.n

    def test_refits_dominate_penalized_loglik(self):
        data = make_data(150, 4, np.array([0.9, -0.4, 0, 0.2]), 45)
        path = lasso_path(data, 30, 0.01)
        for sol, sup in zip(path.solutions, path.supports):
            ll_pen, _, _ = loglik_score_hessian(data, range(4), sol)
            refit = fit_mle(data, sup)
            assert refit.loglik >= ll_pen - 1e-8

    def test_lambda_max_column_scaling(self):
        data = make_data(80, 3, np.array([2.0, 0.1, 0.1]), 46)
        base = lambda_max(data)
        j = int(np.argmax(np.abs(data.X.T @ (data.y - 0.5))))
        X2 = data.X.copy()
        X2[:, j] *= 3.0
        scaled = lambda_max(RegressionData(X2, data.y))
        assert scaled == pytest.approx(3.0 * base, rel=1e-12)

    def test_constant_column_stays_zero(self):
        gen = np.random.default_rng(47)
        X = np.hstack([np.zeros((60, 1)), gen.choice([-1.0, 1.0], size=(60, 1))])
        y = (gen.random(60) < 0.5).astype(float)
        path = lasso_path(RegressionData(X, y), 20, 0.01)
        assert np.all(path.solutions[:, 0] == 0.0)

    def test_warm_start_grid_override(self):
        data = make_data(90, 4, np.array([1.0, 0, 0, -0.5]), 48)
        lam = lambda_max(data)
        path = lasso_path_at(data, np.array([lam, lam / 2, lam / 10]))
        assert path.solutions.shape == (3, 4)
        assert path.supports[0] == ()

    def test_validation(self):
        data = make_data(30, 2, np.zeros(2), 49)
        with pytest.raises(ValueError):
            lasso_path(data, 1, 0.01)
        with pytest.raises(ValueError):
            lasso_path(data, 10, 1.5)
        with pytest.raises(ValueError):
            lasso_path_at(data, np.array([1.0, 2.0]))
