"""Logistic regression core: cumulant function, likelihood derivatives,
Newton maximum-likelihood fitting on a support, and the L1 regularization path."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from ._kernels import cd_pass, column_scores

NORM_CAP = 30.0  # beyond this L2 norm a fit is treated as separated
CD_TOL = 1e-9
CD_MAX_PASSES = 10_000


def cumulant(theta):
    """log(1 + e^theta), evaluated without overflow for any magnitude."""
    theta = np.asarray(theta, dtype=np.float64)
    return np.maximum(theta, 0.0) + np.log1p(np.exp(-np.abs(theta)))


def cumulant_d1(theta):
    """First derivative e^theta / (1 + e^theta), i.e. the logistic sigmoid."""
    return expit(theta)


def cumulant_d2(theta):
    """Second derivative e^theta / (1 + e^theta)^2, symmetric and <= 1/4."""
    t = np.exp(-np.abs(np.asarray(theta, dtype=np.float64)))
    return t / (1.0 + t) ** 2


@dataclass(frozen=True, eq=False)
class RegressionData:
    """Design matrix X (n x p, float) and binary responses y in {0, 1}."""

    X: np.ndarray
    y: np.ndarray

    def __post_init__(self) -> None:
        X = np.ascontiguousarray(self.X, dtype=np.float64)
        y = np.ascontiguousarray(self.y, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] < 1 or X.shape[1] < 1:
            raise ValueError("X must be a nonempty n x p matrix")
        if y.shape != (X.shape[0],):
            raise ValueError("y must have one entry per row of X")
        if not np.all((y == 0.0) | (y == 1.0)):
            raise ValueError("responses must be 0 or 1")
        if not np.all(np.isfinite(X)):
            raise ValueError("X must be finite")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True, eq=False)
class RegressionFit:
    """Coefficients on a sorted support, with loglik and convergence metadata."""

    support: tuple[int, ...]
    beta: np.ndarray
    loglik: float
    converged: bool
    iterations: int
    grad_norm: float
    intercept: float = 0.0


@dataclass(frozen=True, eq=False)
class LassoPath:
    """Solutions of min -loglik(beta) + lambda * ||beta||_1 over a lambda grid.

    ``lambdas`` is strictly decreasing; ``solutions[k]`` is the dense
    coefficient vector at lambdas[k] and ``supports[k]`` its nonzero indices.
    """

    lambdas: np.ndarray
    solutions: np.ndarray
    supports: tuple[tuple[int, ...], ...]
    intercepts: np.ndarray | None = None


def _as_support(support, p: int) -> tuple[int, ...]:
    sup = tuple(sorted(int(j) for j in support))
    if len(set(sup)) != len(sup):
        raise ValueError("support contains duplicate indices")
    if sup and (sup[0] < 0 or sup[-1] >= p):
        raise ValueError(f"support index out of range for p={p}")
    return sup


def loglik_score_hessian(data: RegressionData, support, beta):
    """Log-likelihood, score vector and negative-Hessian matrix on a support.

    Returns ``(loglik, score, hessian)`` where score[k] differentiates with
    respect to the k-th support coordinate and hessian is the positive
    semidefinite curvature sum_i x_iJ x_iJ^T b''(x_iJ . beta).
    """
    sup = _as_support(support, data.p)
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (len(sup),):
        raise ValueError("beta must have one coefficient per support index")
    XJ = data.X[:, sup]
    eta = XJ @ beta if sup else np.zeros(data.n)
    ll = float(np.dot(data.y, eta) - cumulant(eta).sum())
    resid = data.y - cumulant_d1(eta)
    score = XJ.T @ resid
    hess = (XJ * cumulant_d2(eta)[:, None]).T @ XJ
    return ll, score, hess


def _null_loglik(n: int) -> float:
    return -n * math.log(2.0)


def fit_mle(
    data: RegressionData,
    support,
    *,
    intercept: bool = False,
    grad_tol: float = 1e-8,
    step_tol: float = 1e-10,
    max_iter: int = 100,
) -> RegressionFit:
    """Maximize the logistic log-likelihood on a support by damped Newton steps.

    Converges when the score sup-norm drops below ``grad_tol * n`` or the
    Newton step below ``step_tol``.  If the coefficient norm exceeds NORM_CAP
    (a separated fit: probabilities already within 1e-13 of 0/1) the fit is
    capped to that norm and flagged nonconverged; its loglik remains usable
    for model comparison.
    """
    sup = _as_support(support, data.p)
    if len(sup) + int(intercept) > data.n:
        raise ValueError("support size cannot exceed the sample size")
    if not sup and not intercept:
        return RegressionFit((), np.zeros(0), _null_loglik(data.n), True, 0, 0.0)

    XJ = data.X[:, sup]
    if intercept:
        XJ = np.hstack([XJ, np.ones((data.n, 1))])
    y = data.y
    k = XJ.shape[1]
    beta = np.zeros(k)
    eta = np.zeros(data.n)
    ll = float(np.dot(y, eta) - cumulant(eta).sum())

    def _ll_at(b):
        e = XJ @ b
        return float(np.dot(y, e) - cumulant(e).sum()), e

    converged = False
    it = 0
    score = XJ.T @ (y - cumulant_d1(eta))
    for it in range(1, max_iter + 1):
        if np.abs(score).max() <= grad_tol * data.n:
            converged = True
            it -= 1
            break
        hess = (XJ * cumulant_d2(eta)[:, None]).T @ XJ
        try:
            step = np.linalg.solve(hess, score)
        except np.linalg.LinAlgError:
            ridge = 1e-10 * max(np.trace(hess), 1.0)
            step = np.linalg.solve(hess + ridge * np.eye(k), score)
        t = 1.0
        while t > 1e-12:
            ll_new, eta_new = _ll_at(beta + t * step)
            if ll_new >= ll:
                break
            t *= 0.5
        else:
            break  # no ascent direction left; treat as stalled
        beta = beta + t * step
        ll, eta = ll_new, eta_new
        score = XJ.T @ (y - cumulant_d1(eta))
        nrm = float(np.linalg.norm(beta))
        if nrm > NORM_CAP:
            beta *= NORM_CAP / nrm
            ll, eta = _ll_at(beta)
            score = XJ.T @ (y - cumulant_d1(eta))
            converged = False
            break
        if t * float(np.linalg.norm(step)) <= step_tol:
            converged = True
            break
    else:
        converged = np.abs(score).max() <= grad_tol * data.n

    grad_norm = float(np.abs(score).max()) if k else 0.0
    if intercept:
        return RegressionFit(sup, beta[:-1].copy(), ll, converged, it, grad_norm, float(beta[-1]))
    return RegressionFit(sup, beta.copy(), ll, converged, it, grad_norm)


def lambda_max(data: RegressionData) -> float:
    """Smallest penalty with an all-zero solution: max_j |sum_i x_ij (y_i - 1/2)|."""
    scores = column_scores(data.X, data.y - 0.5)
    return float(np.abs(scores).max())


def lasso_path_at(
    data: RegressionData,
    lambdas,
    *,
    intercept: bool = False,
) -> LassoPath:
    """Solve the penalized problem along a given decreasing lambda grid.

    Each solution warm-starts from the previous one.  A pass recomputes the
    exact curvature weights b''(eta) and working residuals, then makes one
    full cyclic sweep of coordinate updates; passes repeat until the largest
    coefficient change is below CD_TOL (at most CD_MAX_PASSES per lambda).
    At a fixed point the updates reproduce the exact KKT conditions.
    """
    lambdas = np.asarray(lambdas, dtype=np.float64)
    if lambdas.ndim != 1 or lambdas.size < 1:
        raise ValueError("lambdas must be a nonempty 1-d array")
    if np.any(np.diff(lambdas) >= 0):
        raise ValueError("lambdas must be strictly decreasing")
    if np.any(lambdas <= 0):
        raise ValueError("lambdas must be positive")
    X, y = data.X, data.y
    n, p = X.shape
    beta = np.zeros(p)
    icpt = 0.0
    eta = np.zeros(n)
    sols = np.empty((lambdas.size, p))
    icpts = np.zeros(lambdas.size)
    supports = []
    for k, lam in enumerate(lambdas):
        for _ in range(CD_MAX_PASSES):
            mu = cumulant_d1(eta)
            w = mu * (1.0 - mu)
            r = y - mu
            max_delta = cd_pass(X, w, r, eta, beta, lam)
            if intercept:
                wsum = float(w.sum())
                if wsum > 1e-12:
                    d0 = float(r.sum()) / wsum
                    icpt += d0
                    eta += d0
                    max_delta = max(max_delta, abs(d0))
            if max_delta < CD_TOL:
                break
        sols[k] = beta
        icpts[k] = icpt
        supports.append(tuple(int(j) for j in np.flatnonzero(beta)))
    return LassoPath(
        lambdas, sols, tuple(supports), icpts if intercept else None
    )


def lasso_path(
    data: RegressionData,
    n_lambdas: int = 100,
    lambda_min_ratio: float = 0.01,
    *,
    intercept: bool = False,
) -> LassoPath:
    """L1 path on a log-spaced grid from lambda_max down to its given fraction."""
    if n_lambdas < 2:
        raise ValueError("n_lambdas must be at least 2")
    if not (0.0 < lambda_min_ratio < 1.0):
        raise ValueError("lambda_min_ratio must lie in (0, 1)")
    lam_max = lambda_max(data)
    if lam_max <= 0.0:
        # Degenerate responses exactly balanced against every column; any
        # positive grid keeps the all-zero solution.
        lam_max = 1e-10 * data.n
    grid = np.geomspace(lam_max, lam_max * lambda_min_ratio, n_lambdas)
    return lasso_path_at(data, grid, intercept=intercept)


def kkt_max_violation(data: RegressionData, beta, lam: float, intercept: float = 0.0) -> float:
    """Largest KKT residual of a penalized solution (0 means exactly stationary).

    For active coordinates the score must equal lam * sign(beta_j); for
    inactive ones it must not exceed lam in magnitude.
    """
    beta = np.asarray(beta, dtype=np.float64)
    eta = data.X @ beta + intercept
    score = data.X.T @ (data.y - cumulant_d1(eta))
    active = beta != 0.0
    viol = np.where(
        active,
        np.abs(score - lam * np.sign(beta)),
        np.maximum(np.abs(score) - lam, 0.0),
    )
    return float(viol.max()) if viol.size else 0.0
