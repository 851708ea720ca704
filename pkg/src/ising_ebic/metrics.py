"""Graph-recovery metrics and distance-smoothed edge-selection curves."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .ising import Graph

EARTH_RADIUS_MILES = 3958.8


@dataclass(frozen=True)
class GraphMetrics:
    """Positive selection rate and false discovery rate of an estimated graph.

    psr = TP / |E_true| (0 when the truth is empty); fdr = FP / |E_est|
    (0 when the estimate is empty).
    """

    psr: float
    fdr: float
    true_edge_count: int
    est_edge_count: int
    true_positive_count: int


@dataclass(frozen=True, eq=False)
class StationLayout:
    """Per-node (latitude, longitude) coordinates in degrees."""

    coordinates: np.ndarray

    def __post_init__(self) -> None:
        coords = np.asarray(self.coordinates, dtype=np.float64)
        if coords.ndim != 2 or coords.shape[1] != 2 or coords.shape[0] < 1:
            raise ValueError("coordinates must be a (p, 2) array of lat/lon")
        if np.any(np.abs(coords[:, 0]) > 90.0):
            raise ValueError("latitudes must lie in [-90, 90]")
        if np.any(np.abs(coords[:, 1]) > 180.0):
            raise ValueError("longitudes must lie in [-180, 180]")
        coords = coords.copy()
        coords.setflags(write=False)
        object.__setattr__(self, "coordinates", coords)

    @property
    def p(self) -> int:
        return self.coordinates.shape[0]


def psr_fdr(est: Graph, truth: Graph) -> GraphMetrics:
    """Compare an estimated edge set to the truth."""
    if est.p != truth.p:
        raise ValueError(f"node counts differ: {est.p} vs {truth.p}")
    tp = len(est.edges & truth.edges)
    n_true = len(truth.edges)
    n_est = len(est.edges)
    psr = tp / n_true if n_true else 0.0
    fdr = (n_est - tp) / n_est if n_est else 0.0
    return GraphMetrics(psr, fdr, n_true, n_est, tp)


def pairwise_distance(layout: StationLayout, v: int, w: int) -> float:
    """Great-circle (haversine) distance between two stations, in miles."""
    lat1, lon1, lat2, lon2 = np.radians(
        [*layout.coordinates[v], *layout.coordinates[w]]
    )
    s = (
        np.sin((lat2 - lat1) / 2.0) ** 2
        + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2.0) ** 2
    )
    return float(2.0 * EARTH_RADIUS_MILES * np.arcsin(np.sqrt(np.minimum(s, 1.0))))


def _pair_distances(layout: StationLayout) -> tuple[np.ndarray, list[tuple[int, int]]]:
    pairs = [(v, w) for v in range(layout.p) for w in range(v + 1, layout.p)]
    dists = np.array([pairwise_distance(layout, v, w) for v, w in pairs])
    return dists, pairs


def default_distance_grid() -> np.ndarray:
    """0 to 500 miles in 2-mile steps."""
    return np.arange(0.0, 502.0, 2.0)


def smoothed_edge_probability(
    graphs,
    layout: StationLayout,
    bandwidth: float = 10.0,
    grid: np.ndarray | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian-kernel estimate of edge probability as a function of distance.

    For each grid distance d, returns the kernel-weighted average over all
    node pairs (pooled across the supplied graphs) of the edge indicator,
    with weights exp(-((d - d_pair) / bandwidth)^2 / 2).  Grid points with no
    numerical kernel mass come back as NaN rather than 0.

    Returns (grid, probabilities).
    """
    graphs = list(graphs)
    if not graphs:
        raise ValueError("need at least one graph")
    if bandwidth <= 0:
        raise ValueError("bandwidth must be positive")
    for g in graphs:
        if g.p != layout.p:
            raise ValueError("all graphs must share the layout's node count")
    if grid is None:
        grid = default_distance_grid()
    grid = np.asarray(grid, dtype=np.float64)

    dists, pairs = _pair_distances(layout)
    edge_counts = np.array(
        [sum(1.0 for g in graphs if g.has_edge(v, w)) for v, w in pairs]
    )
    n_graphs = float(len(graphs))

    t = (grid[:, None] - dists[None, :]) / bandwidth
    kern = np.exp(-0.5 * t * t)
    denom = kern.sum(axis=1) * n_graphs
    numer = kern @ edge_counts
    probs = np.full(grid.shape, np.nan)
    mass = denom > 0.0
    probs[mass] = numer[mass] / denom[mass]
    return grid, probs
