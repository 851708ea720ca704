"""Command-line front end: simulation studies, one-shot graph selection,
the precipitation pipeline, and assumption diagnostics.

Exit codes: 0 success, 1 runtime failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .diag import assumptions_from_params, assumptions_from_samples, counterexample_run, sparse_eig_floor_details
from .fileio import (
    ensure_dir,
    read_edgelist,
    read_layout_csv,
    read_samples_csv,
    read_truth_graph,
    write_curve_csv,
    write_metrics_csv,
    write_table_csv,
)
from .ising import EXACT_MAX_P
from .metrics import psr_fdr, smoothed_edge_probability
from .rng import RngSeed
from .select import BicConfig, select_graph, select_graph_bic_sweep
from .simulate import DEFAULT_GAMMAS, ExperimentConfig, run_simulation
from .weather import align_to_layout, build_weather_dataset, read_weather_csv


class UsageError(Exception):
    pass


def _float_list(text: str) -> tuple[float, ...]:
    return tuple(float(x) for x in text.split(",") if x.strip())


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",") if x.strip())


def _str_list(text: str) -> tuple[str, ...]:
    return tuple(x.strip() for x in text.split(",") if x.strip())


def _dump_json(obj, out_path) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True)
    if out_path is None:
        print(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text + "\n")


def _add_path_options(parser) -> None:
    parser.add_argument("--q-max", type=int, default=None, help="candidate support size cap")
    parser.add_argument("--n-lambdas", type=int, default=100)
    parser.add_argument("--lambda-min-ratio", type=float, default=0.01)


def _add_method_options(parser) -> None:
    parser.add_argument("--folds", type=int, default=10, help="cross-validation folds")
    parser.add_argument("--expected-support", type=int, default=10)
    parser.add_argument("--cutoff", type=float, default=0.75)
    parser.add_argument("--subsamples", type=int, default=100)


def _add_exec_options(parser) -> None:
    parser.add_argument("--parallel", action="store_true", help="run independent tasks in a process pool")
    parser.add_argument("--workers", type=int, default=None, help="worker pool size bound")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ising-ebic",
        description="Binary-pairwise graph selection via nodewise penalized "
        "logistic regression with information-criterion scoring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="replicate benchmark simulation scenarios")
    sim.add_argument(
        "--scenario",
        required=True,
        choices=["lattice4", "lattice8", "star_log", "star_linear", "custom"],
    )
    sim.add_argument("--p", type=int, default=0, help="node count (square for lattices)")
    sim.add_argument("--coupling", choices=["attractive", "random"], default="attractive")
    sim.add_argument("--magnitude", type=float, default=None)
    sim.add_argument("--gamma", type=_float_list, default=DEFAULT_GAMMAS, help="comma-separated gamma grid")
    sim.add_argument("--replicates", type=int, default=100)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--rule", choices=["and", "or", "both"], default="both")
    sim.add_argument("--method", type=_str_list, default=("bic",), help="comma-separated: bic,cv,stability")
    sim.add_argument("--n", type=int, default=None, help="override the scenario sample-size formula")
    sim.add_argument("--model", default=None, help="edge-list file for the custom scenario")
    sim.add_argument("--burn-in", type=int, default=200)
    sim.add_argument("--thin", type=int, default=5)
    sim.add_argument("--no-reports", action="store_true", help="omit per-replicate selection reports")
    sim.add_argument("--out", required=True, help="output directory")
    _add_path_options(sim)
    _add_method_options(sim)
    _add_exec_options(sim)

    sel = sub.add_parser("select", help="select a graph from a sample CSV")
    sel.add_argument("--samples", required=True)
    sel.add_argument("--method", choices=["bic", "cv", "stability"], default="bic")
    sel.add_argument("--gamma", type=float, default=0.5)
    sel.add_argument("--seed", type=int, default=0)
    sel.add_argument("--truth", default=None, help="edge-list file for PSR/FDR evaluation")
    sel.add_argument("--out", default=None, help="report JSON path (stdout if omitted)")
    sel.add_argument("--metrics-out", default=None, help="optional metrics CSV path")
    _add_path_options(sel)
    _add_method_options(sel)
    _add_exec_options(sel)

    wea = sub.add_parser("weather", help="binary precipitation pipeline on station data")
    wea.add_argument("--csv", required=True, help="records CSV: station,lat,lon,date,prcp")
    wea.add_argument("--truth", required=True, help="truth graph edge-list")
    wea.add_argument("--layout", required=True, help="layout CSV: station,lat,lon")
    wea.add_argument("--method", type=_str_list, default=("bic",))
    wea.add_argument("--gamma", type=_float_list, default=(0.0, 0.25, 0.5))
    wea.add_argument("--seed", type=int, default=0)
    wea.add_argument("--bandwidth", type=float, default=10.0)
    wea.add_argument("--grid-max", type=float, default=500.0)
    wea.add_argument("--grid-step", type=float, default=2.0)
    wea.add_argument("--completeness", type=float, default=0.9)
    wea.add_argument("--days", type=_int_list, default=(1, 16), help="days of month to keep")
    wea.add_argument("--trace-sentinel", type=float, default=None)
    wea.add_argument(
        "--trace-as-dry",
        action="store_true",
        help="count sentinel-valued trace amounts as dry instead of wet",
    )
    wea.add_argument("--out", required=True, help="output directory")
    _add_path_options(wea)
    _add_method_options(wea)
    _add_exec_options(wea)

    diag = sub.add_parser("diagnose", help="assumption diagnostics")
    dsub = diag.add_subparsers(dest="diag_command", required=True)

    assum = dsub.add_parser("assumptions", help="sparse-eigenvalue and moment bounds")
    src = assum.add_mutually_exclusive_group(required=True)
    src.add_argument("--samples", default=None, help="sample CSV")
    src.add_argument("--model", default=None, help="model edge-list (exact moments, p <= 20)")
    assum.add_argument("--q", type=int, required=True, help="sparsity level")
    assum.add_argument("--method", choices=["exhaustive", "monte_carlo"], default="exhaustive")
    assum.add_argument("--trials", type=int, default=1000)
    assum.add_argument("--seed", type=int, default=0)
    assum.add_argument("--out", default=None)

    ctr = dsub.add_parser("counterexample", help="curvature-drop mixture experiment")
    ctr.add_argument("--q", type=int, required=True)
    ctr.add_argument("--n", type=int, required=True)
    ctr.add_argument("--trials", type=int, default=200)
    ctr.add_argument("--seed", type=int, default=0)
    ctr.add_argument("--out", default=None)

    return parser


def _cmd_simulate(args) -> int:
    config = ExperimentConfig(
        scenario=args.scenario,
        p=args.p,
        coupling=args.coupling,
        magnitude=args.magnitude,
        gammas=tuple(args.gamma),
        replicates=args.replicates,
        seed=args.seed,
        rule=args.rule,
        methods=tuple(args.method),
        n=args.n,
        model_path=args.model,
        burn_in=args.burn_in,
        thin=args.thin,
        q_max=args.q_max,
        n_lambdas=args.n_lambdas,
        lambda_min_ratio=args.lambda_min_ratio,
        folds=args.folds,
        expected_support=args.expected_support,
        cutoff=args.cutoff,
        subsamples=args.subsamples,
    )
    out = ensure_dir(args.out)
    result = run_simulation(
        config,
        parallel=args.parallel,
        workers=args.workers,
        include_reports=not args.no_reports,
    )
    _dump_json(result, out / "summary.json")
    rows = [
        (
            row["method"] if row["gamma"] is None else f"{row['method']}_{row['gamma']:g}",
            row["rule"],
            row["psr"],
            row["fdr"],
        )
        for row in result["aggregate"]
    ]
    write_table_csv(rows, out / "summary.csv")
    for row in result["aggregate"]:
        label = row["method"] if row["gamma"] is None else f"{row['method']} gamma={row['gamma']:g}"
        print(f"{label:24s} {row['rule']:4s} PSR {100*row['psr']:6.2f}%  FDR {100*row['fdr']:6.2f}%")
    return 0


def _cmd_select(args) -> int:
    samples = read_samples_csv(args.samples)
    cfg = BicConfig(args.gamma, args.q_max, args.n_lambdas, args.lambda_min_ratio)
    report = select_graph(
        samples,
        args.method,
        cfg,
        rng=RngSeed(args.seed),
        parallel=args.parallel,
        workers=args.workers,
        folds=args.folds,
        expected_support=args.expected_support,
        cutoff=args.cutoff,
        subsamples=args.subsamples,
    )
    payload = report.to_jsonable()
    if args.truth is not None:
        truth = read_truth_graph(args.truth, samples.p)
        metrics = {}
        for rule, graph in (("and", report.graph_and), ("or", report.graph_or)):
            m = psr_fdr(graph, truth)
            metrics[f"psr_{rule}"] = m.psr
            metrics[f"fdr_{rule}"] = m.fdr
        payload["metrics"] = metrics
        if args.metrics_out:
            write_metrics_csv(metrics, args.metrics_out)
    _dump_json(payload, args.out)
    print(
        f"selected {len(report.graph_and.edges)} edges (and) / "
        f"{len(report.graph_or.edges)} edges (or) on p={samples.p}",
        file=sys.stderr,
    )
    return 0


def _cmd_weather(args) -> int:
    records = read_weather_csv(args.csv)
    dataset = build_weather_dataset(
        records,
        day_filter=tuple(args.days),
        completeness=args.completeness,
        trace_sentinel=args.trace_sentinel,
        trace_as_dry=args.trace_as_dry,
    )
    layout_ids, layout = read_layout_csv(args.layout)
    samples = align_to_layout(dataset, layout_ids, layout)
    truth = read_truth_graph(args.truth, samples.p)
    grid = np.arange(0.0, args.grid_max + args.grid_step, args.grid_step)
    out = ensure_dir(args.out)

    methods: list[tuple[str, str, float | None]] = []
    for m in args.method:
        if m == "bic":
            methods.extend(("bic", f"bic_{g:g}", g) for g in args.gamma)
        elif m in ("cv", "stability"):
            methods.append((m, m, None))
        else:
            raise UsageError(f"unknown method {m!r}")
    if not methods:
        raise UsageError("no methods requested (check --method and --gamma)")

    cfg0 = BicConfig(0.0, args.q_max, args.n_lambdas, args.lambda_min_ratio)
    bic_reports = None
    table_rows = []
    report_payload = {
        "n": samples.n,
        "p": samples.p,
        "stations": list(layout_ids),
        "dropped_stations": list(dataset.dropped_stations),
        "dropped_dates": dataset.dropped_dates,
        "bandwidth": args.bandwidth,
        "methods": {},
    }
    for method, label, gamma in methods:
        if method == "bic":
            if bic_reports is None:
                bic_reports = select_graph_bic_sweep(
                    samples, args.gamma, cfg0, parallel=args.parallel, workers=args.workers
                )
            rep = bic_reports[gamma]
        else:
            rep = select_graph(
                samples,
                method,
                cfg0,
                rng=RngSeed(args.seed),
                parallel=args.parallel,
                workers=args.workers,
                folds=args.folds,
                expected_support=args.expected_support,
                cutoff=args.cutoff,
                subsamples=args.subsamples,
            )
        entry = {"selection": rep.to_jsonable(), "rules": {}}
        for rule, graph in (("and", rep.graph_and), ("or", rep.graph_or)):
            m = psr_fdr(graph, truth)
            table_rows.append((label, rule, m.psr, m.fdr))
            gcurve, probs = smoothed_edge_probability([graph], layout, args.bandwidth, grid)
            write_curve_csv(gcurve, probs, out / f"curve_{label}_{rule}.csv")
            entry["rules"][rule] = {
                "psr": m.psr,
                "fdr": m.fdr,
                "edges": [list(e) for e in graph.edge_list()],
                "curve": [[d, None if np.isnan(pr) else pr] for d, pr in zip(gcurve.tolist(), probs.tolist())],
            }
        report_payload["methods"][label] = entry

    tcurve, tprobs = smoothed_edge_probability([truth], layout, args.bandwidth, grid)
    write_curve_csv(tcurve, tprobs, out / "curve_truth.csv")
    report_payload["truth"] = {
        "edges": [list(e) for e in truth.edge_list()],
        "curve": [[d, None if np.isnan(pr) else pr] for d, pr in zip(tcurve.tolist(), tprobs.tolist())],
    }
    write_table_csv(table_rows, out / "table.csv")
    _dump_json(report_payload, out / "report.json")
    for label, rule, psr, fdr in table_rows:
        print(f"{label:12s} {rule:4s} PSR {100*psr:6.2f}%  FDR {100*fdr:6.2f}%")
    return 0


def _cmd_diagnose(args) -> int:
    if args.diag_command == "assumptions":
        rng = RngSeed(args.seed)
        if args.samples is not None:
            samples = read_samples_csv(args.samples)
            if args.q > samples.p:
                raise UsageError(f"--q must be at most the number of variables p={samples.p}")
            if args.q < 1:
                raise UsageError("--q must be at least 1")
            report = assumptions_from_samples(samples, args.q, args.method, args.trials, rng)
            payload = report.to_jsonable()
        else:
            params = read_edgelist(args.model)
            if params.p > EXACT_MAX_P:
                raise UsageError(f"model diagnostics need p <= {EXACT_MAX_P}")
            if args.q > params.p:
                raise UsageError(f"--q must be at most the number of variables p={params.p}")
            if args.q < 1:
                raise UsageError("--q must be at least 1")
            report = assumptions_from_params(params, args.q, args.method, args.trials, rng)
            payload = report.to_jsonable()
            if params.max_degree() <= args.q:
                payload["eigenvalue_floor"] = sparse_eig_floor_details(params, args.q)
        _dump_json(payload, args.out)
        return 0
    if args.diag_command == "counterexample":
        if args.q < 2:
            raise UsageError("--q must be at least 2")
        if args.n < 1 or args.n % args.q != 0:
            raise UsageError("--n must be a positive multiple of --q")
        report = counterexample_run(args.q, args.n, args.trials, RngSeed(args.seed))
        _dump_json(report.to_jsonable(), args.out)
        return 0
    raise UsageError(f"unknown diagnose subcommand {args.diag_command!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "simulate": _cmd_simulate,
        "select": _cmd_select,
        "weather": _cmd_weather,
        "diagnose": _cmd_diagnose,
    }
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
