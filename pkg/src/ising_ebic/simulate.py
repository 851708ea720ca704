"""Benchmark experiment harness: lattice and star scenarios, replicate
management, and PSR/FDR aggregation."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

from .fileio import read_edgelist
from .ising import (
    EXACT_MAX_P,
    IsingParams,
    exact_sample,
    generate_lattice,
    generate_star,
    gibbs_sample,
)
from .metrics import psr_fdr
from .rng import RngSeed
from .select import BicConfig, SelectionReport, select_graph, select_graph_bic_sweep

SCENARIOS = ("lattice4", "lattice8", "star_log", "star_linear", "custom")
METHODS = ("bic", "cv", "stability")
RULES = ("and", "or", "both")
DEFAULT_GAMMAS = (0.0, 0.25, 0.5, 0.75, 1.0)


@dataclass(frozen=True)
class ExperimentConfig:
    scenario: str
    p: int = 0
    coupling: str = "attractive"
    magnitude: float | None = None
    gammas: tuple[float, ...] = DEFAULT_GAMMAS
    replicates: int = 100
    seed: int = 0
    rule: str = "both"
    methods: tuple[str, ...] = ("bic",)
    n: int | None = None
    model_path: str | None = None
    burn_in: int = 200
    thin: int = 5
    q_max: int | None = None
    n_lambdas: int = 100
    lambda_min_ratio: float = 0.01
    folds: int = 10
    expected_support: int = 10
    cutoff: float = 0.75
    subsamples: int = 100

    def __post_init__(self) -> None:
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}")
        if self.coupling not in ("attractive", "random"):
            raise ValueError("coupling must be 'attractive' or 'random'")
        if self.rule not in RULES:
            raise ValueError("rule must be 'and', 'or' or 'both'")
        if not self.methods or any(m not in METHODS for m in self.methods):
            raise ValueError(f"methods must be drawn from {METHODS}")
        if self.replicates < 1:
            raise ValueError("replicates must be at least 1")
        if any(g < 0 for g in self.gammas) or not self.gammas:
            raise ValueError("gammas must be nonnegative")
        if self.scenario == "custom":
            if self.model_path is None:
                raise ValueError("custom scenario requires model_path")
            if self.n is None:
                raise ValueError("custom scenario requires an explicit n")
        else:
            if self.p < 2:
                raise ValueError("p must be at least 2")
        if self.scenario.startswith("star") and self.coupling == "random":
            raise ValueError("random couplings apply to lattice scenarios only")

    def rules(self) -> tuple[str, ...]:
        return ("and", "or") if self.rule == "both" else (self.rule,)

    def bic_config(self, gamma: float) -> BicConfig:
        return BicConfig(gamma, self.q_max, self.n_lambdas, self.lambda_min_ratio)


def _lattice_side(p: int) -> int:
    side = math.isqrt(p)
    if side * side != p or side < 2:
        raise ValueError(f"lattice scenarios need a square p >= 4, got {p}")
    return side


def scenario_sample_size(scenario: str, p: int) -> int:
    """Per-scenario sample size: ceil(c * d * log p) with natural log.

    c = 15 (4-neighbor lattice, d = 4), c = 25 (8-neighbor, d = 8), c = 10
    for stars with d equal to the spoke count.
    """
    if scenario == "lattice4":
        _lattice_side(p)
        return math.ceil(15 * 4 * math.log(p))
    if scenario == "lattice8":
        _lattice_side(p)
        return math.ceil(25 * 8 * math.log(p))
    if scenario in ("star_log", "star_linear"):
        q = math.ceil(math.log(p)) if scenario == "star_log" else math.ceil(0.1 * p)
        return math.ceil(10 * q * math.log(p))
    raise ValueError(f"no sample-size formula for scenario {scenario!r}")


def _default_magnitude(scenario: str) -> float:
    return 0.5 if scenario == "lattice4" else 0.25


def make_scenario_params(config: ExperimentConfig, rng: RngSeed) -> IsingParams:
    if config.scenario == "custom":
        return read_edgelist(config.model_path)
    mag = config.magnitude if config.magnitude is not None else _default_magnitude(config.scenario)
    if config.scenario == "lattice4":
        return generate_lattice(_lattice_side(config.p), "four", config.coupling, mag, rng)
    if config.scenario == "lattice8":
        return generate_lattice(_lattice_side(config.p), "eight", config.coupling, mag, rng)
    sparsity = "logarithmic" if config.scenario == "star_log" else "linear"
    return generate_star(config.p, sparsity, mag)


def _metrics_entry(report: SelectionReport, truth, rules) -> dict:
    out = {}
    for rule in rules:
        graph = report.graph_and if rule == "and" else report.graph_or
        m = psr_fdr(graph, truth)
        out[rule] = {
            "psr": m.psr,
            "fdr": m.fdr,
            "true_edge_count": m.true_edge_count,
            "est_edge_count": m.est_edge_count,
            "true_positive_count": m.true_positive_count,
        }
    return out


def run_replicate(config: ExperimentConfig, r: int, include_reports: bool = False) -> dict:
    """One replicate: model, sample, all requested selections, metrics.

    Replicate r derives every random draw from stream r of the experiment
    seed, so replicates can run in any order or in parallel.
    """
    rep_rng = RngSeed(config.seed, r)
    params = make_scenario_params(config, rep_rng)
    p = params.p
    n = config.n if config.n is not None else scenario_sample_size(config.scenario, p)
    if p <= EXACT_MAX_P:
        samples = exact_sample(params, n, rep_rng)
    else:
        samples = gibbs_sample(params, n, config.burn_in, config.thin, rep_rng)
    truth = params.graph()
    rules = config.rules()

    entries = []
    for method in config.methods:
        if method == "bic":
            reports = select_graph_bic_sweep(
                samples, config.gammas, config.bic_config(config.gammas[0])
            )
            for gamma in config.gammas:
                rep = reports[gamma]
                entry = {
                    "method": "bic",
                    "gamma": gamma,
                    "metrics": _metrics_entry(rep, truth, rules),
                    "edges_and": [list(e) for e in rep.graph_and.edge_list()],
                    "edges_or": [list(e) for e in rep.graph_or.edge_list()],
                }
                if include_reports:
                    entry["report"] = rep.to_jsonable()
                entries.append(entry)
        else:
            rep = select_graph(
                samples,
                method,
                config.bic_config(config.gammas[0]),
                rng=rep_rng,
                folds=config.folds,
                expected_support=config.expected_support,
                cutoff=config.cutoff,
                subsamples=config.subsamples,
            )
            entry = {
                "method": method,
                "gamma": None,
                "metrics": _metrics_entry(rep, truth, rules),
                "edges_and": [list(e) for e in rep.graph_and.edge_list()],
                "edges_or": [list(e) for e in rep.graph_or.edge_list()],
            }
            if include_reports:
                entry["report"] = rep.to_jsonable()
            entries.append(entry)

    return {
        "replicate": r,
        "n": n,
        "p": p,
        "truth_edges": [list(e) for e in truth.edge_list()],
        "entries": entries,
    }


def _replicate_worker(args):
    config, r, include_reports = args
    return run_replicate(config, r, include_reports)


def aggregate_metrics(replicate_records, rules) -> list[dict]:
    """Mean PSR/FDR per (method, gamma, rule) across replicates."""
    keys: list[tuple[str, float | None]] = []
    acc: dict[tuple, dict] = {}
    for rec in replicate_records:
        for entry in rec["entries"]:
            key = (entry["method"], entry["gamma"])
            if key not in acc:
                keys.append(key)
                acc[key] = {rule: {"psr": [], "fdr": []} for rule in rules}
            for rule in rules:
                acc[key][rule]["psr"].append(entry["metrics"][rule]["psr"])
                acc[key][rule]["fdr"].append(entry["metrics"][rule]["fdr"])
    rows = []
    for method, gamma in keys:
        for rule in rules:
            psrs = acc[(method, gamma)][rule]["psr"]
            fdrs = acc[(method, gamma)][rule]["fdr"]
            rows.append(
                {
                    "method": method,
                    "gamma": gamma,
                    "rule": rule,
                    "psr": sum(psrs) / len(psrs),
                    "fdr": sum(fdrs) / len(fdrs),
                    "replicates": len(psrs),
                }
            )
    return rows


def run_simulation(
    config: ExperimentConfig,
    *,
    parallel: bool = False,
    workers: int | None = None,
    include_reports: bool = False,
) -> dict:
    """All replicates plus the aggregated PSR/FDR table, as a JSON-ready dict."""
    tasks = [(config, r, include_reports) for r in range(config.replicates)]
    if parallel and config.replicates > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_replicate_worker, tasks))
    else:
        records = [_replicate_worker(t) for t in tasks]
    records.sort(key=lambda rec: rec["replicate"])
    rules = config.rules()
    return {
        "config": {
            "scenario": config.scenario,
            "p": config.p,
            "coupling": config.coupling,
            "magnitude": config.magnitude,
            "gammas": list(config.gammas),
            "replicates": config.replicates,
            "seed": config.seed,
            "rule": config.rule,
            "methods": list(config.methods),
            "n": config.n,
            "burn_in": config.burn_in,
            "thin": config.thin,
            "q_max": config.q_max,
            "n_lambdas": config.n_lambdas,
            "lambda_min_ratio": config.lambda_min_ratio,
        },
        "replicates": records,
        "aggregate": aggregate_metrics(records, rules),
    }
