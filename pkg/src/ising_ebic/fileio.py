"""Readers and writers for the on-disk formats: sample CSV, model edge-list
text, station layout CSV, and the CSV tables emitted by the CLI."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .ising import Graph, IsingParams, SampleMatrix
from .metrics import StationLayout


def write_samples_csv(samples: SampleMatrix, path) -> None:
    """Sample CSV: header z0,...,z{p-1}, one -1/1 observation per row."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"z{j}" for j in range(samples.p)])
        writer.writerows(samples.values.tolist())


def read_samples_csv(path) -> SampleMatrix:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise ValueError(f"{path}: empty sample file")
        expected = [f"z{j}" for j in range(len(header))]
        if [h.strip() for h in header] != expected:
            raise ValueError(f"{path}: header must be z0,...,z{{p-1}}")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            try:
                vals = [int(x) for x in row]
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: non-integer entry") from exc
            if len(vals) != len(header):
                raise ValueError(f"{path}:{lineno}: expected {len(header)} columns")
            rows.append(vals)
    if not rows:
        raise ValueError(f"{path}: no observations")
    return SampleMatrix(np.array(rows, dtype=np.int8))


def write_edgelist(params: IsingParams, path) -> None:
    """Model edge-list: '# p=<p>' header, then 'v w theta' per edge (v < w)."""
    with open(path, "w") as fh:
        fh.write(f"# p={params.p}\n")
        vs, ws = np.nonzero(np.triu(params.theta))
        for v, w in sorted(zip(vs.tolist(), ws.tolist())):
            fh.write(f"{v} {w} {float(params.theta[v, w])!r}\n")


def read_edgelist(path, p: int | None = None) -> IsingParams:
    """Parse 'v w theta' lines; a '# p=<p>' comment or the ``p`` argument sets
    the node count (otherwise inferred as max index + 1)."""
    entries: dict[tuple[int, int], float] = {}
    max_node = -1
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if p is None and "p=" in line:
                    p = int(line.split("p=", 1)[1].strip())
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 'v w theta'")
            try:
                v, w, theta = int(parts[0]), int(parts[1]), float(parts[2])
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed edge line") from exc
            if v == w or v < 0 or w < 0:
                raise ValueError(f"{path}:{lineno}: invalid edge ({v}, {w})")
            key = (min(v, w), max(v, w))
            if key in entries:
                raise ValueError(f"{path}:{lineno}: duplicate edge {key}")
            entries[key] = theta
            max_node = max(max_node, v, w)
    if p is None:
        p = max_node + 1
    if p < 1 or max_node >= p:
        raise ValueError(f"{path}: node index {max_node} outside p={p}")
    theta = np.zeros((p, p))
    for (v, w), val in entries.items():
        theta[v, w] = theta[w, v] = val
    return IsingParams(p, theta)


def read_truth_graph(path, p: int | None = None) -> Graph:
    return read_edgelist(path, p).graph()


def read_layout_csv(path) -> tuple[list[str], StationLayout]:
    """Layout CSV 'station,lat,lon'; row order defines node indices."""
    ids: list[str] = []
    coords: list[tuple[float, float]] = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["station", "lat", "lon"]:
            raise ValueError(f"{path}: header must be 'station,lat,lon'")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 columns")
            try:
                ids.append(row[0].strip())
                coords.append((float(row[1]), float(row[2])))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: malformed layout row") from exc
    if not ids:
        raise ValueError(f"{path}: no stations")
    if len(set(ids)) != len(ids):
        raise ValueError(f"{path}: duplicate station ids")
    return ids, StationLayout(np.array(coords))


def write_layout_csv(ids, layout: StationLayout, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["station", "lat", "lon"])
        for sid, (lat, lon) in zip(ids, layout.coordinates.tolist()):
            writer.writerow([sid, repr(lat), repr(lon)])


def write_curve_csv(grid, probs, path) -> None:
    """Curve CSV 'd,probability'; NaN probabilities are written as empty."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["d", "probability"])
        for d, pr in zip(np.asarray(grid).tolist(), np.asarray(probs).tolist()):
            writer.writerow([repr(d), "" if math.isnan(pr) else repr(pr)])


def write_metrics_csv(metrics: dict, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["metric", "value"])
        for key in sorted(metrics):
            writer.writerow([key, repr(metrics[key])])


def write_table_csv(rows, path) -> None:
    """Summary table: method, rule, PSR%, FDR% (percentages, 2 decimals)."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "rule", "PSR%", "FDR%"])
        for method, rule, psr, fdr in rows:
            writer.writerow([method, rule, f"{100.0 * psr:.2f}", f"{100.0 * fdr:.2f}"])


def ensure_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out
