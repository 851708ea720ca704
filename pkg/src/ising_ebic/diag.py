"""Empirical checks of the distributional conditions behind nodewise selection:
sparse-eigenvalue bounds, third-moment bounds, the degree-bounded eigenvalue
lower bound, a mixture construction showing second moments alone are not
enough, and a likelihood-ratio monitor for nested supports."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError
from .glm import cumulant_d2, fit_mle
from .ising import EXACT_MAX_P, IsingParams, SampleMatrix, enumerate_states, exact_distribution
from .rng import RngSeed
from .select import node_regression

EXHAUSTIVE_SUBSET_LIMIT = 1_000_000

_KEY_THIRD_MOMENT = 5
_KEY_SPARSE_EIG = 6
_KEY_COUNTEREXAMPLE = 7


@dataclass(frozen=True)
class AssumptionReport:
    q: int
    min_sparse_eig: float
    max_sparse_eig: float
    max_third_moment: float
    max_abs_entry: float
    neighborhood_norm_max: float | None
    method: str
    trials: int

    def to_jsonable(self) -> dict:
        return {
            "q": self.q,
            "min_sparse_eig": self.min_sparse_eig,
            "max_sparse_eig": self.max_sparse_eig,
            "max_third_moment": self.max_third_moment,
            "max_abs_entry": self.max_abs_entry,
            "neighborhood_norm_max": self.neighborhood_norm_max,
            "method": self.method,
            "trials": self.trials,
        }


def _check_square_symmetric(m: np.ndarray) -> np.ndarray:
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("second-moment matrix must be square")
    if not np.allclose(m, m.T, atol=1e-12, rtol=0.0):
        raise ValueError("second-moment matrix must be symmetric")
    return (m + m.T) / 2.0


def sparse_eig_bounds(
    second_moment: np.ndarray,
    q: int,
    method: str = "exhaustive",
    trials: int = 1000,
    rng: RngSeed | None = None,
) -> tuple[float, float]:
    """Extreme eigenvalues over principal submatrices of size at most q.

    Exhaustive mode enumerates subsets of size exactly q: by eigenvalue
    interlacing the minimum of lambda_min and maximum of lambda_max over all
    sizes <= q are attained at size q, so the result equals the full
    enumeration.  Monte-Carlo mode scans random subsets and returns an
    estimate (an upper bound on the min, lower bound on the max).
    """
    m = _check_square_symmetric(second_moment)
    p = m.shape[0]
    if not (1 <= q <= p):
        raise ValueError(f"q must lie in [1, {p}]")
    if method not in ("exhaustive", "monte_carlo"):
        raise ValueError("method must be 'exhaustive' or 'monte_carlo'")

    if method == "exhaustive":
        if math.comb(p, q) > EXHAUSTIVE_SUBSET_LIMIT:
            raise CapacityError(
                f"C({p},{q}) subsets exceed the exhaustive budget; use method='monte_carlo'"
            )
        subsets = itertools.combinations(range(p), q)
    else:
        if rng is None:
            raise ValueError("monte_carlo mode requires an rng")
        gen = rng.generator(_KEY_SPARSE_EIG)
        subsets = (gen.choice(p, size=q, replace=False) for _ in range(trials))

    lo = math.inf
    hi = -math.inf
    for sub in subsets:
        idx = np.fromiter(sub, dtype=np.intp)
        eig = np.linalg.eigvalsh(m[np.ix_(idx, idx)])
        lo = min(lo, float(eig[0]))
        hi = max(hi, float(eig[-1]))
    return lo, hi


def _third_moment_ascent(X: np.ndarray, weights: np.ndarray, q: int, trials: int, gen) -> float:
    """Maximize sum_i w_i |x_i . u|^3 over q-sparse unit u by projected ascent.

    Each trial fixes a random size-q coordinate subset and runs 50 normalized
    gradient steps from a random unit start, keeping the best value seen.
    The result is a certified lower bound on the supremum.
    """
    p = X.shape[1]
    k = min(q, p)
    best = 0.0
    for _ in range(trials):
        sub = np.sort(gen.choice(p, size=k, replace=False))
        Xs = X[:, sub]
        u = gen.standard_normal(k)
        u /= np.linalg.norm(u)
        for step in range(50):
            t = Xs @ u
            val = float(weights @ (np.abs(t) ** 3))
            if val > best:
                best = val
            g = Xs.T @ (3.0 * weights * t * np.abs(t))
            gn = np.linalg.norm(g)
            if gn == 0.0:
                break
            u = u + (0.2 / math.sqrt(step + 1.0)) * g / gn
            u /= np.linalg.norm(u)
        t = Xs @ u
        best = max(best, float(weights @ (np.abs(t) ** 3)))
    return best


def third_moment_bound(
    samples: SampleMatrix,
    q: int,
    trials: int = 50,
    rng: RngSeed | None = None,
) -> float:
    """Estimated sup over q-sparse unit u of the empirical mean |X u|^3.

    A lower-bound estimate: projected gradient ascent over random coordinate
    subsets (see _third_moment_ascent).
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if rng is None:
        raise ValueError("third_moment_bound requires an rng")
    gen = rng.generator(_KEY_THIRD_MOMENT)
    X = samples.values.astype(np.float64)
    weights = np.full(samples.n, 1.0 / samples.n)
    return _third_moment_ascent(X, weights, q, trials, gen)


def exact_second_moment(params: IsingParams) -> np.ndarray:
    """E[Z Z^T] computed from the exact distribution (p <= 20)."""
    probs = exact_distribution(params)
    states = enumerate_states(params.p)
    m = np.zeros((params.p, params.p))
    chunk = 1 << 16
    for lo in range(0, states.shape[0], chunk):
        s = states[lo:lo + chunk].astype(np.float64)
        m += (s * probs[lo:lo + chunk, None]).T @ s
    return (m + m.T) / 2.0


def sparse_eig_floor(b0: float, q: int) -> float:
    """Eigenvalue floor 4/q * e^(2 b0 sqrt(q)) / (1 + e^(2 b0 sqrt(q)))^2.

    Valid for +-1 models whose per-node interaction norms are at most b0 and
    degrees at most q; decreasing in both arguments (for b0 > 0).
    """
    if q < 1:
        raise ValueError("q must be at least 1")
    if b0 < 0:
        raise ValueError("b0 must be nonnegative")
    return float(4.0 / q * cumulant_d2(2.0 * b0 * math.sqrt(q)))


def sparse_eig_floor_details(params: IsingParams, q: int) -> dict:
    """Exhaustively compare a model's exact min sparse eigenvalue with the analytic floor."""
    if params.p > EXACT_MAX_P:
        raise CapacityError(f"check requires p <= {EXACT_MAX_P}")
    if params.max_degree() > q:
        raise ValueError(f"all node degrees must be at most q={q}")
    b0 = params.neighborhood_norm_max()
    bound = sparse_eig_floor(b0, q)
    min_eig, _ = sparse_eig_bounds(exact_second_moment(params), min(q, params.p))
    return {
        "q": q,
        "b0": b0,
        "bound": bound,
        "min_sparse_eig": min_eig,
        # 1e-12 slack absorbs eigensolver roundoff; the analytic gap is far larger.
        "passes": bool(min_eig >= bound - 1e-12),
    }


def sparse_eig_floor_check(params: IsingParams, q: int) -> bool:
    return sparse_eig_floor_details(params, q)["passes"]


@dataclass(frozen=True)
class CounterexampleReport:
    q: int
    n: int
    trials: int
    heavy_fraction: float  # trials where the +-1_q draws reach n/q
    t_fraction: float  # trials where the curvature drop statistic exceeds 0.05 n
    mean_t_over_n: float

    def to_jsonable(self) -> dict:
        return {
            "q": self.q,
            "n": self.n,
            "trials": self.trials,
            "heavy_fraction": self.heavy_fraction,
            "t_fraction": self.t_fraction,
            "mean_t_over_n": self.mean_t_over_n,
        }


def counterexample_draw(q: int, n: int, gen) -> np.ndarray:
    """n draws from the mixture: +-1_q with probability 1/(2q) each, else uniform signs."""
    r = gen.random(n)
    X = np.where(gen.random((n, q)) < 0.5, 1.0, -1.0)
    X[r < 0.5 / q] = 1.0
    X[(r >= 0.5 / q) & (r < 1.0 / q)] = -1.0
    return X


def counterexample_t_statistic(X: np.ndarray, q: int) -> float:
    """Curvature drop u^T (H(0) - H(beta)) u at u = 1/sqrt(q), beta = 1/q."""
    s = X.sum(axis=1)
    return float(((s * s) / q * (0.25 - cumulant_d2(s / q))).sum())


def counterexample_run(
    q: int,
    n: int,
    trials: int = 200,
    rng: RngSeed | None = None,
) -> CounterexampleReport:
    """Demonstrate that bounded sparse second moments do not control curvature.

    Per trial: draw n mixture vectors, count rows with |row sum| = q (these
    align fully with u = 1_q/sqrt(q)), and evaluate the curvature drop T.
    Reported are the fraction of trials where the count reaches n/q and the
    fraction where T > 0.05 n.
    """
    if q < 2:
        raise ValueError("q must be at least 2")
    if n < 1 or n % q != 0:
        raise ValueError("n must be a positive multiple of q")
    if trials < 1:
        raise ValueError("trials must be at least 1")
    if rng is None:
        raise ValueError("counterexample_run requires an rng")
    gen = rng.generator(_KEY_COUNTEREXAMPLE)
    heavy_hits = 0
    t_hits = 0
    t_sum = 0.0
    for _ in range(trials):
        X = counterexample_draw(q, n, gen)
        row_sums = X.sum(axis=1)  # exact integers
        if int((np.abs(row_sums) == q).sum()) >= n // q:
            heavy_hits += 1
        t = counterexample_t_statistic(X, q)
        t_sum += t
        if t > 0.05 * n:
            t_hits += 1
    return CounterexampleReport(
        q, n, trials, heavy_hits / trials, t_hits / trials, t_sum / (trials * n)
    )


@dataclass(frozen=True)
class LikelihoodRatioStats:
    node: int
    q: int
    epsilon: float
    nu: float
    n_models: int
    max_gap: float
    min_gap: float
    max_ratio: float


def likelihood_ratio_monitor(
    samples: SampleMatrix,
    true_params: IsingParams,
    v: int,
    epsilon: float = 0.5,
    nu: float = 1.0,
    q: int | None = None,
) -> LikelihoodRatioStats:
    """Scan the fitted log-likelihood gain of every superset of the true support.

    For node v's regression, fits every J containing the true neighborhood
    with |J| <= q and reports the largest gap ll(J) - ll(J0), normalized by
    (|J \\ J0| + nu) log(p_covariates).  Diagnostic only: large values flag
    overfitting headroom, they are not a pass/fail gate.
    """
    if samples.p > 12:
        raise ValueError("exhaustive superset scan requires p <= 12")
    if samples.p < 3:
        raise ValueError("monitor requires at least 2 covariates (p >= 3)")
    if q is None:
        q = samples.p - 1
    data = node_regression(samples, v)
    nodes = [w for w in range(samples.p) if w != v]
    true_nb = set(int(w) for w in np.flatnonzero(true_params.theta[v]))
    j0 = tuple(j for j, w in enumerate(nodes) if w in true_nb)
    if len(j0) > q:
        raise ValueError("true neighborhood larger than q")
    ll0 = fit_mle(data, j0).loglik
    rest = [j for j in range(data.p) if j not in j0]
    log_p = math.log(data.p)
    max_gap = -math.inf
    min_gap = math.inf
    max_ratio = 0.0
    n_models = 0
    for extra_size in range(0, q - len(j0) + 1):
        for extra in itertools.combinations(rest, extra_size):
            sup = tuple(sorted(j0 + extra))
            gap = 0.0 if not extra else fit_mle(data, sup).loglik - ll0
            n_models += 1
            max_gap = max(max_gap, gap)
            min_gap = min(min_gap, gap)
            ratio = gap / ((extra_size + nu) * log_p)
            max_ratio = max(max_ratio, ratio)
    return LikelihoodRatioStats(
        v, q, epsilon, nu, n_models, max_gap, min_gap, max_ratio
    )


def assumptions_from_samples(
    samples: SampleMatrix,
    q: int,
    method: str = "exhaustive",
    trials: int = 1000,
    rng: RngSeed | None = None,
) -> AssumptionReport:
    """Assumption diagnostics from data: empirical second moments and third moments."""
    X = samples.values.astype(np.float64)
    second = (X.T @ X) / samples.n
    lo, hi = sparse_eig_bounds(second, q, method, trials, rng)
    mc_rng = rng if rng is not None else RngSeed(0)
    third = third_moment_bound(samples, q, max(1, min(trials, 200)), mc_rng)
    return AssumptionReport(
        q, lo, hi, third, float(np.abs(X).max()), None, method, trials
    )


def assumptions_from_params(
    params: IsingParams,
    q: int,
    method: str = "exhaustive",
    trials: int = 1000,
    rng: RngSeed | None = None,
) -> AssumptionReport:
    """Assumption diagnostics from a known model: exact second and third moments."""
    second = exact_second_moment(params)
    lo, hi = sparse_eig_bounds(second, q, method, trials, rng)
    mc_rng = rng if rng is not None else RngSeed(0)
    gen = mc_rng.generator(_KEY_THIRD_MOMENT)
    probs = exact_distribution(params)
    states = enumerate_states(params.p).astype(np.float64)
    third = _third_moment_ascent(states, probs, q, max(1, min(trials, 200)), gen)
    return AssumptionReport(
        q, lo, hi, third, 1.0, params.neighborhood_norm_max(), method, trials
    )
