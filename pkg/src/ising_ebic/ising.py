"""Pairwise binary (+-1) Markov random fields: model types, benchmark graph
families, exact enumeration for small node counts, and samplers."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._kernels import gibbs_record, gibbs_sweeps
from .errors import CapacityError
from .rng import RngSeed

EXACT_MAX_P = 20

# Subkeys carving per-operation substreams out of one RngSeed (see rng.RngSeed).
_KEY_LATTICE = 1
_KEY_GIBBS = 2
_KEY_EXACT = 3


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph on ``p`` nodes labeled 0..p-1."""

    p: int
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValueError("node count must be positive")
        norm = set()
        for e in self.edges:
            v, w = e
            if v == w:
                raise ValueError(f"self-loop on node {v}")
            if not (0 <= v < self.p and 0 <= w < self.p):
                raise ValueError(f"edge {e} has endpoint outside [0, {self.p})")
            norm.add((min(v, w), max(v, w)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def from_pairs(cls, p: int, pairs) -> "Graph":
        return cls(p, frozenset((min(v, w), max(v, w)) for v, w in pairs))

    def has_edge(self, v: int, w: int) -> bool:
        return (min(v, w), max(v, w)) in self.edges

    def neighbors(self, v: int) -> tuple[int, ...]:
        out = [w for (a, b) in self.edges for w in ((b,) if a == v else (a,) if b == v else ())]
        return tuple(sorted(out))

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def max_degree(self) -> int:
        deg = [0] * self.p
        for v, w in self.edges:
            deg[v] += 1
            deg[w] += 1
        return max(deg) if deg else 0

    def edge_list(self) -> list[tuple[int, int]]:
        """Edges in sorted order (canonical for serialization)."""
        return sorted(self.edges)

    def relabel(self, perm) -> "Graph":
        """Graph with node v renamed to perm[v]."""
        perm = list(perm)
        if sorted(perm) != list(range(self.p)):
            raise ValueError("perm must be a permutation of 0..p-1")
        return Graph.from_pairs(self.p, ((perm[v], perm[w]) for v, w in self.edges))


@dataclass(frozen=True, eq=False)
class IsingParams:
    """Symmetric interaction matrix with zero diagonal.

    The nonzero pattern of ``theta`` defines the interaction graph: an edge
    {v, w} is present exactly when theta[v, w] != 0.
    """

    p: int
    theta: np.ndarray

    def __post_init__(self) -> None:
        th = np.asarray(self.theta, dtype=np.float64)
        if th.shape != (self.p, self.p):
            raise ValueError(f"theta must be {self.p}x{self.p}")
        if not np.array_equal(th, th.T):
            raise ValueError("theta must be symmetric")
        if np.any(np.diagonal(th) != 0.0):
            raise ValueError("theta must have zero diagonal")
        th = th.copy()
        th.setflags(write=False)
        object.__setattr__(self, "theta", th)

    def graph(self) -> Graph:
        vs, ws = np.nonzero(self.theta)
        return Graph.from_pairs(self.p, ((int(v), int(w)) for v, w in zip(vs, ws) if v < w))

    def neighborhood_norm_max(self) -> float:
        """Largest per-node L2 norm of interaction strengths."""
        return float(np.sqrt((self.theta**2).sum(axis=1)).max())

    def theta_min(self) -> float:
        """Smallest nonzero interaction magnitude (0 for the empty graph)."""
        nz = np.abs(self.theta[self.theta != 0.0])
        return float(nz.min()) if nz.size else 0.0

    def max_degree(self) -> int:
        return int((self.theta != 0.0).sum(axis=1).max()) if self.p else 0


@dataclass(frozen=True, eq=False)
class SampleMatrix:
    """n x p matrix of observations with entries in {-1, +1} (int8)."""

    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.asarray(self.values)
        if vals.ndim != 2 or vals.shape[0] < 1 or vals.shape[1] < 1:
            raise ValueError("values must be a nonempty 2-d array")
        if not np.all(np.isin(vals, (-1, 1))):
            raise ValueError("sample entries must be -1 or +1")
        vals = np.ascontiguousarray(vals, dtype=np.int8)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return self.values.shape[0]

    @property
    def p(self) -> int:
        return self.values.shape[1]


def _params_from_edges(p: int, edges: dict[tuple[int, int], float]) -> IsingParams:
    theta = np.zeros((p, p))
    for (v, w), val in edges.items():
        theta[v, w] = val
        theta[w, v] = val
    return IsingParams(p, theta)


def generate_lattice(
    side: int,
    neighbors: str = "four",
    coupling: str = "attractive",
    magnitude: float = 0.5,
    rng: RngSeed | None = None,
) -> IsingParams:
    """Ising model on a non-periodic side x side grid, nodes in row-major order.

    ``neighbors="four"`` links each node to the nodes directly above, below,
    left and right; ``"eight"`` adds the diagonals.  ``coupling="attractive"``
    puts +magnitude on every edge; ``"random"`` draws each edge sign
    independently and uniformly (requires ``rng``).
    """
    if side < 2:
        raise ValueError("side must be at least 2")
    if neighbors not in ("four", "eight"):
        raise ValueError("neighbors must be 'four' or 'eight'")
    if coupling not in ("attractive", "random"):
        raise ValueError("coupling must be 'attractive' or 'random'")
    if magnitude <= 0:
        raise ValueError("magnitude must be positive")
    p = side * side
    offsets = [(0, 1), (1, 0)]
    if neighbors == "eight":
        offsets += [(1, 1), (1, -1)]
    pairs = []
    for r in range(side):
        for c in range(side):
            for dr, dc in offsets:
                r2, c2 = r + dr, c + dc
                if 0 <= r2 < side and 0 <= c2 < side:
                    pairs.append((r * side + c, r2 * side + c2))
    pairs.sort()
    if coupling == "attractive":
        signs = np.ones(len(pairs))
    else:
        if rng is None:
            raise ValueError("random couplings require an rng")
        gen = rng.generator(_KEY_LATTICE)
        signs = np.where(gen.random(len(pairs)) < 0.5, 1.0, -1.0)
    return _params_from_edges(p, {e: magnitude * s for e, s in zip(pairs, signs)})


def generate_star(p: int, sparsity: str = "logarithmic", magnitude: float = 0.25) -> IsingParams:
    """Hub-and-spoke Ising model: node 0 linked to nodes 1..q with +magnitude.

    ``q = ceil(log p)`` for logarithmic sparsity, ``q = ceil(0.1 p)`` for
    linear sparsity (natural log).
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    if sparsity not in ("logarithmic", "linear"):
        raise ValueError("sparsity must be 'logarithmic' or 'linear'")
    if magnitude <= 0:
        raise ValueError("magnitude must be positive")
    q = math.ceil(math.log(p)) if sparsity == "logarithmic" else math.ceil(0.1 * p)
    q = max(q, 1)
    if q >= p:
        raise ValueError(f"star with {q} spokes does not fit on {p} nodes")
    return _params_from_edges(p, {(0, w): magnitude for w in range(1, q + 1)})


def enumerate_states(p: int) -> np.ndarray:
    """All 2^p states as a (2^p, p) int8 matrix.

    Row i encodes variable v as +1 when bit v of i is set, else -1, so the
    state index doubles as a frequency-table key.
    """
    if p > EXACT_MAX_P:
        raise CapacityError(f"state enumeration limited to p <= {EXACT_MAX_P}, got {p}")
    idx = np.arange(1 << p, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(p)) & 1
    return (2 * bits - 1).astype(np.int8)


def exact_distribution(params: IsingParams) -> np.ndarray:
    """Exact probability of each of the 2^p states, ordered as enumerate_states.

    Normalization is carried out through a log-sum-exp, so strong couplings do
    not overflow.
    """
    if params.p > EXACT_MAX_P:
        raise CapacityError(
            f"exact distribution limited to p <= {EXACT_MAX_P}, got {params.p}"
        )
    states = enumerate_states(params.p)
    log_w = np.zeros(states.shape[0])
    vs, ws = np.nonzero(np.triu(params.theta))
    for v, w in zip(vs, ws):
        log_w += params.theta[v, w] * (states[:, v].astype(np.float64) * states[:, w])
    log_w -= log_w.max()
    probs = np.exp(log_w)
    probs /= probs.sum()
    return probs


def conditional_logit(params: IsingParams, v: int, z) -> float:
    """Log-odds of Z_v = +1 given the other coordinates of ``z``.

    Equals twice the interaction-weighted sum over v's neighbors; the entry
    z[v] itself never enters.
    """
    if not (0 <= v < params.p):
        raise IndexError(f"node {v} out of range for p={params.p}")
    z = np.asarray(z, dtype=np.float64)
    nb = np.flatnonzero(params.theta[v])
    return float(2.0 * np.dot(params.theta[v, nb], z[nb]))


def gibbs_sample(
    params: IsingParams,
    n: int,
    burn_in: int = 200,
    thin: int = 5,
    rng: RngSeed | None = None,
) -> SampleMatrix:
    """Draw n rows by single-site Gibbs sampling.

    One sweep updates all sites sequentially in index order, each from its
    full conditional.  The first ``burn_in`` sweeps are discarded, then one
    state is recorded every ``thin`` sweeps.  Fully deterministic for a fixed
    RngSeed.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if thin < 1:
        raise ValueError("thin must be at least 1")
    if burn_in < 0:
        raise ValueError("burn_in must be nonnegative")
    if rng is None:
        raise ValueError("gibbs_sample requires an rng")
    gen = rng.generator(_KEY_GIBBS)
    p = params.p
    theta2 = np.ascontiguousarray(2.0 * params.theta)
    z = np.where(gen.random(p) < 0.5, 1, -1).astype(np.int8)
    if burn_in:
        gibbs_sweeps(theta2, z, gen.random((burn_in, p)))
    out = np.empty((n, p), dtype=np.int8)
    # Uniforms are drawn in fixed chunks purely to bound memory; the consumed
    # stream is identical for any chunk size.
    chunk = max(1, 4096 // thin)
    done = 0
    while done < n:
        rows = min(chunk, n - done)
        u = gen.random((rows * thin, p))
        gibbs_record(theta2, z, u, thin, out[done:done + rows])
        done += rows
    return SampleMatrix(out)


def exact_sample(params: IsingParams, n: int, rng: RngSeed | None = None) -> SampleMatrix:
    """Draw n i.i.d. rows by inverse-CDF sampling from the exact distribution."""
    if params.p > EXACT_MAX_P:
        raise CapacityError(
            f"exact sampling limited to p <= {EXACT_MAX_P}, got {params.p}"
        )
    if n < 1:
        raise ValueError("n must be at least 1")
    if rng is None:
        raise ValueError("exact_sample requires an rng")
    gen = rng.generator(_KEY_EXACT)
    probs = exact_distribution(params)
    cdf = np.cumsum(probs)
    idx = np.searchsorted(cdf, gen.random(n), side="right")
    idx = np.minimum(idx, probs.size - 1)
    return SampleMatrix(enumerate_states(params.p)[idx])
