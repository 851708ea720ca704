"""Per-node model selection and graph assembly.

Each node's neighborhood is chosen from the candidate supports produced by an
L1 regularization path on its conditional logistic regression, either by
penalized-BIC scoring of unpenalized refits, by cross-validated deviance, or
by stability selection over half-sample paths.  Nodewise choices are then
symmetrized into AND / OR graphs.
"""

from __future__ import annotations

import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .glm import (
    RegressionData,
    RegressionFit,
    cumulant,
    fit_mle,
    lambda_max,
    lasso_path,
    lasso_path_at,
)
from .ising import Graph, SampleMatrix
from .rng import RngSeed

_KEY_STABILITY = 4


@dataclass(frozen=True)
class BicConfig:
    """Scoring and path configuration for nodewise selection.

    ``q_max`` bounds candidate support sizes; ``None`` resolves to
    ceil(n / log n) capped at p - 1, generous enough not to bind in the
    sparse regimes this package targets.
    """

    gamma: float = 0.5
    q_max: int | None = None
    n_lambdas: int = 100
    lambda_min_ratio: float = 0.01

    def __post_init__(self) -> None:
        if self.gamma < 0:
            raise ValueError("gamma must be nonnegative")
        if self.q_max is not None and self.q_max < 0:
            raise ValueError("q_max must be nonnegative")

    def resolve_q_max(self, n: int, p: int) -> int:
        if self.q_max is not None:
            return min(self.q_max, p - 1)
        return min(p - 1, math.ceil(n / math.log(n)) if n > 1 else p - 1)


@dataclass(frozen=True, eq=False)
class Candidate:
    support: tuple[int, ...]  # node indices, sorted
    loglik: float
    score: float | None
    converged: bool


@dataclass(frozen=True, eq=False)
class NodeSelection:
    node: int
    method: str
    candidates: tuple[Candidate, ...]
    chosen: tuple[int, ...]
    frequencies: tuple[float, ...] | None = None  # stability only, length p


@dataclass(frozen=True, eq=False)
class SelectionReport:
    selections: tuple[NodeSelection, ...]
    graph_and: Graph
    graph_or: Graph
    config: dict
    timing: dict

    def to_jsonable(self) -> dict:
        """Canonical JSON form.  Timing is intentionally excluded so that
        identical seeds yield byte-identical reports."""
        nodes = []
        for sel in self.selections:
            entry = {
                "node": sel.node,
                "method": sel.method,
                "chosen": list(sel.chosen),
                "candidates": {
                    "supports": [list(c.support) for c in sel.candidates],
                    "logliks": [c.loglik for c in sel.candidates],
                    "scores": [c.score for c in sel.candidates],
                    "converged": [c.converged for c in sel.candidates],
                },
            }
            if sel.frequencies is not None:
                entry["frequencies"] = list(sel.frequencies)
            nodes.append(entry)
        return {
            "config": self.config,
            "nodes": nodes,
            "edges_and": [list(e) for e in self.graph_and.edge_list()],
            "edges_or": [list(e) for e in self.graph_or.edge_list()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_jsonable(), indent=2, sort_keys=True)


def bic_gamma(loglik: float, support_size: int, n: int, p_covariates: int, gamma: float) -> float:
    """Penalized information criterion -2 loglik + |J| (log n + 2 gamma log p)."""
    if n < 2:
        raise ValueError("n must be at least 2")
    if p_covariates < 1:
        raise ValueError("p_covariates must be at least 1")
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    return -2.0 * loglik + support_size * (math.log(n) + 2.0 * gamma * math.log(p_covariates))


def node_regression(samples: SampleMatrix, v: int) -> RegressionData:
    """Conditional regression for node v: response (Z_v + 1)/2, covariates Z_w, w != v."""
    if not (0 <= v < samples.p):
        raise IndexError(f"node {v} out of range for p={samples.p}")
    vals = samples.values.astype(np.float64)
    y = (vals[:, v] + 1.0) / 2.0
    X = np.delete(vals, v, axis=1)
    return RegressionData(X, y)


def covariate_nodes(v: int, p: int) -> tuple[int, ...]:
    """Node index of each reduced-design column for the regression at node v."""
    return tuple(w for w in range(p) if w != v)


def _to_node_support(support, v: int) -> tuple[int, ...]:
    return tuple(j if j < v else j + 1 for j in support)


def _candidate_fits(
    samples: SampleMatrix, v: int, cfg: BicConfig
) -> list[tuple[tuple[int, ...], RegressionFit]]:
    """Distinct path supports (size-capped, plus the empty model), refit unpenalized.

    Returned in canonical (size, lexicographic) order with supports expressed
    as node indices.
    """
    data = node_regression(samples, v)
    q_max = cfg.resolve_q_max(samples.n, samples.p)
    path = lasso_path(data, cfg.n_lambdas, cfg.lambda_min_ratio)
    seen = {()}
    supports = [()]
    for sup in path.supports:
        if len(sup) <= q_max and sup not in seen:
            seen.add(sup)
            supports.append(sup)
    supports.sort(key=lambda s: (len(s), s))
    return [(_to_node_support(sup, v), fit_mle(data, sup)) for sup in supports]


def _choose_bic(
    fits: list[tuple[tuple[int, ...], RegressionFit]],
    n: int,
    p_covariates: int,
    gamma: float,
) -> tuple[tuple[Candidate, ...], tuple[int, ...]]:
    cands = tuple(
        Candidate(
            sup,
            fit.loglik,
            bic_gamma(fit.loglik, len(sup), n, p_covariates, gamma),
            fit.converged,
        )
        for sup, fit in fits
    )
    best = min(cands, key=lambda c: (c.score, len(c.support), c.support))
    return cands, best.support


def neighborhood_select_bic(samples: SampleMatrix, v: int, cfg: BicConfig) -> NodeSelection:
    """Choose node v's neighborhood by minimum penalized-BIC over path candidates.

    Ties break toward the smaller support, then lexicographically.
    Nonconverged (separated) refits keep their capped loglik and are flagged.
    """
    if samples.n < 2:
        raise ValueError("need at least 2 observations")
    fits = _candidate_fits(samples, v, cfg)
    cands, chosen = _choose_bic(fits, samples.n, samples.p - 1, cfg.gamma)
    return NodeSelection(v, "bic", cands, chosen)


def cv_fold_masks(n: int, folds: int) -> list[np.ndarray]:
    """Deterministic fold assignment: fold k holds out rows {i : i mod folds == k}."""
    rows = np.arange(n)
    return [rows % folds == k for k in range(folds)]


def neighborhood_select_cv(
    samples: SampleMatrix,
    v: int,
    folds: int = 10,
    cfg: BicConfig = BicConfig(),
) -> NodeSelection:
    """Choose node v's neighborhood by 10-fold cross-validated deviance.

    The lambda grid is fixed on the full data; fold k holds out rows
    {i : i mod folds == k}.  The selected support is the full-data path
    solution at the lambda with smallest average held-out negative
    log-likelihood (per observation), refit without penalty.
    """
    if folds < 2:
        raise ValueError("folds must be at least 2")
    if samples.n < folds:
        raise ValueError("need at least one observation per fold")
    data = node_regression(samples, v)
    lam_max = max(lambda_max(data), 1e-10 * data.n)
    grid = np.geomspace(lam_max, lam_max * cfg.lambda_min_ratio, cfg.n_lambdas)
    full_path = lasso_path_at(data, grid)

    n = data.n
    cv_err = np.zeros(grid.size)
    for test in cv_fold_masks(n, folds):
        train = ~test
        sub = RegressionData(data.X[train], data.y[train])
        sub_path = lasso_path_at(sub, grid)
        eta = data.X[test] @ sub_path.solutions.T  # (n_test, n_lambda)
        nll = -(data.y[test][:, None] * eta - cumulant(eta)).mean(axis=0)
        cv_err += nll
    cv_err /= folds

    best_k = int(np.argmin(cv_err))  # ties resolve to the larger lambda
    chosen_reduced = full_path.supports[best_k]

    # Record one candidate per distinct support along the full-data path,
    # scored by its best cross-validated error.
    by_support: dict[tuple[int, ...], float] = {}
    for sup, err in zip(full_path.supports, cv_err):
        if sup not in by_support or err < by_support[sup]:
            by_support[sup] = float(err)
    cands = []
    for sup in sorted(by_support, key=lambda s: (len(s), s)):
        fit = fit_mle(data, sup)
        cands.append(
            Candidate(_to_node_support(sup, v), fit.loglik, by_support[sup], fit.converged)
        )
    return NodeSelection(v, "cv", tuple(cands), _to_node_support(chosen_reduced, v))


def neighborhood_select_stability(
    samples: SampleMatrix,
    v: int,
    expected_support: int = 10,
    cutoff: float = 0.75,
    subsamples: int = 100,
    rng: RngSeed | None = None,
    cfg: BicConfig = BicConfig(),
) -> NodeSelection:
    """Choose node v's neighborhood by stability selection.

    For each of ``subsamples`` half-samples (size floor(n/2), drawn without
    replacement), the path supports are accumulated up to and including the
    first grid point whose support reaches ``expected_support``.  Covariates
    whose selection frequency reaches ``cutoff`` form the neighborhood, refit
    unpenalized on the full data.

    Randomness comes from the substream of ``rng`` keyed by the node index,
    so per-node runs are independent and order-insensitive.
    """
    if samples.n < 4:
        raise ValueError("need at least 4 observations")
    if rng is None:
        raise ValueError("stability selection requires an rng")
    if expected_support < 1:
        raise ValueError("expected_support must be at least 1")
    if not (0.0 < cutoff <= 1.0):
        raise ValueError("cutoff must lie in (0, 1]")
    gen = rng.generator(_KEY_STABILITY, v)
    data = node_regression(samples, v)
    n, p_cov = data.n, data.p
    m = n // 2
    counts = np.zeros(p_cov)
    for _ in range(subsamples):
        idx = gen.permutation(n)[:m]
        sub = RegressionData(data.X[idx], data.y[idx])
        path = lasso_path(sub, cfg.n_lambdas, cfg.lambda_min_ratio)
        union: set[int] = set()
        for sup in path.supports:
            union.update(sup)
            if len(sup) >= expected_support:
                break
        for j in union:
            counts[j] += 1.0
    freq = counts / subsamples
    chosen_reduced = tuple(int(j) for j in np.flatnonzero(freq >= cutoff))
    fit = fit_mle(data, chosen_reduced)
    chosen = _to_node_support(chosen_reduced, v)
    freqs = np.zeros(samples.p)
    freqs[list(covariate_nodes(v, samples.p))] = freq
    cand = Candidate(chosen, fit.loglik, None, fit.converged)
    return NodeSelection(v, "stability", (cand,), chosen, tuple(float(f) for f in freqs))


def _fits_task(args):
    samples, v, cfg = args
    return _candidate_fits(samples, v, cfg)


def select_graph_bic_sweep(
    samples: SampleMatrix,
    gammas,
    cfg: BicConfig = BicConfig(),
    *,
    parallel: bool = False,
    workers: int | None = None,
) -> dict[float, "SelectionReport"]:
    """BIC selection at several gamma values sharing one path + refit per node.

    The candidate list does not depend on gamma, so each node's regularization
    path and unpenalized refits are computed once and rescored per gamma.
    Returns one SelectionReport per gamma, identical to running
    ``select_graph(..., method="bic")`` at that gamma.
    """
    gammas = list(gammas)
    if not gammas:
        raise ValueError("need at least one gamma")
    t0 = time.perf_counter()
    tasks = [(samples, v, cfg) for v in range(samples.p)]
    if parallel and samples.p > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            per_node_fits = list(pool.map(_fits_task, tasks))
    else:
        per_node_fits = [_fits_task(t) for t in tasks]
    timing = {"total_s": time.perf_counter() - t0}

    reports = {}
    for gamma in gammas:
        selections = []
        for v, fits in enumerate(per_node_fits):
            cands, chosen = _choose_bic(fits, samples.n, samples.p - 1, gamma)
            selections.append(NodeSelection(v, "bic", cands, chosen))
        graph_and, graph_or = assemble_graphs(
            samples.p, {s.node: s.chosen for s in selections}
        )
        config = {
            "method": "bic",
            "gamma": gamma,
            "n": samples.n,
            "p": samples.p,
            "q_max": cfg.resolve_q_max(samples.n, samples.p),
            "n_lambdas": cfg.n_lambdas,
            "lambda_min_ratio": cfg.lambda_min_ratio,
        }
        reports[gamma] = SelectionReport(
            tuple(selections), graph_and, graph_or, config, dict(timing)
        )
    return reports


def _node_task(args) -> NodeSelection:
    samples, v, method, cfg, rng, opts = args
    if method == "bic":
        return neighborhood_select_bic(samples, v, cfg)
    if method == "cv":
        return neighborhood_select_cv(samples, v, opts["folds"], cfg)
    if method == "stability":
        return neighborhood_select_stability(
            samples,
            v,
            opts["expected_support"],
            opts["cutoff"],
            opts["subsamples"],
            rng,
            cfg,
        )
    raise ValueError(f"unknown method {method!r}")


def assemble_graphs(p: int, chosen: dict[int, tuple[int, ...]]) -> tuple[Graph, Graph]:
    """Symmetrize nodewise neighborhoods into AND / OR graphs."""
    sets = {v: set(ws) for v, ws in chosen.items()}
    edges_and, edges_or = [], []
    for v in range(p):
        for w in sets[v]:
            if v < w:
                if v in sets[w]:
                    edges_and.append((v, w))
                edges_or.append((v, w))
            elif v not in sets[w]:
                edges_or.append((w, v))
    return Graph.from_pairs(p, edges_and), Graph.from_pairs(p, edges_or)


def select_graph(
    samples: SampleMatrix,
    method: str = "bic",
    cfg: BicConfig = BicConfig(),
    *,
    rng: RngSeed | None = None,
    parallel: bool = False,
    workers: int | None = None,
    folds: int = 10,
    expected_support: int = 10,
    cutoff: float = 0.75,
    subsamples: int = 100,
) -> SelectionReport:
    """Run nodewise selection for every node and symmetrize.

    Per-node computations are independent; with ``parallel=True`` they run in
    a bounded process pool.  Results are identical either way because each
    node's randomness is derived from (seed, stream, node).
    """
    if method not in ("bic", "cv", "stability"):
        raise ValueError(f"unknown method {method!r}")
    if method == "stability" and rng is None:
        raise ValueError("stability selection requires an rng")
    t0 = time.perf_counter()
    opts = {
        "folds": folds,
        "expected_support": expected_support,
        "cutoff": cutoff,
        "subsamples": subsamples,
    }
    tasks = [(samples, v, method, cfg, rng, opts) for v in range(samples.p)]
    if parallel and samples.p > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            selections = list(pool.map(_node_task, tasks))
    else:
        selections = [_node_task(t) for t in tasks]
    selections.sort(key=lambda s: s.node)
    graph_and, graph_or = assemble_graphs(samples.p, {s.node: s.chosen for s in selections})

    config = {
        "method": method,
        "n": samples.n,
        "p": samples.p,
        "q_max": cfg.resolve_q_max(samples.n, samples.p),
        "n_lambdas": cfg.n_lambdas,
        "lambda_min_ratio": cfg.lambda_min_ratio,
    }
    if method == "bic":
        config["gamma"] = cfg.gamma
    elif method == "cv":
        config["folds"] = folds
    else:
        config.update(
            {
                "expected_support": expected_support,
                "cutoff": cutoff,
                "subsamples": subsamples,
                "seed": rng.seed,
                "stream": rng.stream,
            }
        )
    timing = {"total_s": time.perf_counter() - t0}
    return SelectionReport(tuple(selections), graph_and, graph_or, config, timing)
