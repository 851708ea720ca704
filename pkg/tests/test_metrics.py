import numpy as np
import pytest

from ising_ebic import (
    Graph,
    StationLayout,
    pairwise_distance,
    psr_fdr,
    smoothed_edge_probability,
)
from ising_ebic.metrics import EARTH_RADIUS_MILES, default_distance_grid

MILES_PER_DEG_LAT = np.pi * EARTH_RADIUS_MILES / 180.0  # ~69.09


def line_layout(distances_miles):
    """Stations along one meridian at the given cumulative distances."""
    lats = 38.0 + np.asarray(distances_miles) / MILES_PER_DEG_LAT
    return StationLayout(np.column_stack([lats, np.full(len(lats), -95.0)]))


class TestPsrFdr:
    def test_partial_overlap(self):
        truth = Graph.from_pairs(3, [(0, 1), (1, 2)])
        est = Graph.from_pairs(3, [(0, 1), (0, 2)])
        m = psr_fdr(est, truth)
        assert (m.psr, m.fdr) == (0.5, 0.5)
        assert (m.true_edge_count, m.est_edge_count, m.true_positive_count) == (2, 2, 1)

    def test_perfect_recovery(self):
        g = Graph.from_pairs(4, [(0, 1), (2, 3)])
        m = psr_fdr(g, g)
        assert (m.psr, m.fdr) == (1.0, 0.0)

    def test_empty_estimate(self):
        truth = Graph.from_pairs(3, [(0, 1)])
        m = psr_fdr(Graph(3), truth)
        assert (m.psr, m.fdr) == (0.0, 0.0)

    def test_empty_truth(self):
        est = Graph.from_pairs(3, [(0, 1)])
        m = psr_fdr(est, Graph(3))
        assert (m.psr, m.fdr) == (0.0, 1.0)

    def test_mismatched_p(self):
        with pytest.raises(ValueError):
            psr_fdr(Graph(3), Graph(4))

    def test_or_rule_psr_dominates_and_rule(self):
        truth = Graph.from_pairs(4, [(0, 1), (1, 2), (2, 3)])
        g_or = Graph.from_pairs(4, [(0, 1), (1, 2), (0, 3)])
        g_and = Graph.from_pairs(4, [(0, 1)])  # subset of the OR graph
        assert psr_fdr(g_or, truth).psr >= psr_fdr(g_and, truth).psr


class TestPairwiseDistance:
    def test_identical_coordinates(self):
        lay = StationLayout(np.array([[40.0, -90.0], [40.0, -90.0]]))
        assert pairwise_distance(lay, 0, 1) == 0.0

    def test_one_degree_latitude(self):
        lay = StationLayout(np.array([[40.0, -90.0], [41.0, -90.0]]))
        assert pairwise_distance(lay, 0, 1) == pytest.approx(MILES_PER_DEG_LAT, abs=1e-6)
        assert pairwise_distance(lay, 0, 1) == pytest.approx(69.09, abs=0.01)

    def test_symmetry_exact(self):
        lay = StationLayout(np.array([[40.0, -90.0], [43.7, -88.1]]))
        assert pairwise_distance(lay, 0, 1) == pairwise_distance(lay, 1, 0)

    def test_triangle_inequality(self):
        gen = np.random.default_rng(0)
        for _ in range(50):
            coords = np.column_stack([gen.uniform(-60, 60, 3), gen.uniform(-150, 150, 3)])
            lay = StationLayout(coords)
            d01 = pairwise_distance(lay, 0, 1)
            d12 = pairwise_distance(lay, 1, 2)
            d02 = pairwise_distance(lay, 0, 2)
            assert d02 <= (d01 + d12) * (1 + 1e-9)

    def test_coordinate_validation(self):
        with pytest.raises(ValueError):
            StationLayout(np.array([[95.0, 0.0]]))
        with pytest.raises(ValueError):
            StationLayout(np.array([[0.0, 190.0]]))


class TestSmoothedEdgeProbability:
    def test_complete_graph_curve_is_one(self):
        lay = line_layout([0, 30, 70])
        g = Graph.from_pairs(3, [(0, 1), (0, 2), (1, 2)])
        grid, probs = smoothed_edge_probability([g], lay, 10.0, np.arange(0, 101, 5.0))
        mass = ~np.isnan(probs)
        assert np.allclose(probs[mass], 1.0)

    def test_empty_graph_curve_is_zero(self):
        lay = line_layout([0, 30, 70])
        grid, probs = smoothed_edge_probability([Graph(3)], lay, 10.0, np.arange(0, 101, 5.0))
        mass = ~np.isnan(probs)
        assert mass.any()
        assert np.allclose(probs[mass], 0.0)

    def test_two_pair_kernel_separation(self):
        # near pair at 10 mi (with the edge) and far pair at 1000 mi; the two
        # clusters sit ~2700 mi apart so cross pairs carry no kernel weight
        lats = np.array([0.0, 10.0 / MILES_PER_DEG_LAT, 40.0, 40.0 + 1000.0 / MILES_PER_DEG_LAT])
        lay = StationLayout(np.column_stack([lats, np.full(4, -95.0)]))
        g = Graph.from_pairs(4, [(0, 1)])
        grid = np.array([10.0, 1000.0])
        _, probs = smoothed_edge_probability([g], lay, 10.0, grid)
        assert abs(probs[0] - 1.0) < 1e-6
        assert abs(probs[1] - 0.0) < 1e-6

    def test_values_within_unit_interval(self):
        gen = np.random.default_rng(1)
        lay = StationLayout(np.column_stack([gen.uniform(38, 43, 6), gen.uniform(-95, -88, 6)]))
        g = Graph.from_pairs(6, [(0, 1), (2, 3), (1, 4)])
        _, probs = smoothed_edge_probability([g, Graph(6)], lay)
        mass = ~np.isnan(probs)
        assert np.all(probs[mass] >= 0.0) and np.all(probs[mass] <= 1.0)

    def test_duplicating_graphs_invariant(self):
        lay = line_layout([0, 25, 60, 90])
        g1 = Graph.from_pairs(4, [(0, 1), (1, 2)])
        g2 = Graph.from_pairs(4, [(2, 3)])
        _, once = smoothed_edge_probability([g1, g2], lay)
        _, twice = smoothed_edge_probability([g1, g2, g1, g2], lay)
        assert np.allclose(once, twice, equal_nan=True)

    def test_zero_mass_reported_missing(self):
        lay = line_layout([0, 10])
        g = Graph.from_pairs(2, [(0, 1)])
        _, probs = smoothed_edge_probability([g], lay, 10.0, np.array([10.0, 1e6]))
        assert probs[0] == pytest.approx(1.0)
        assert np.isnan(probs[1])

    def test_default_grid(self):
        grid = default_distance_grid()
        assert grid[0] == 0.0 and grid[-1] == 500.0 and grid[1] - grid[0] == 2.0

    def test_validation(self):
        lay = line_layout([0, 10])
        with pytest.raises(ValueError):
            smoothed_edge_probability([], lay)
        with pytest.raises(ValueError):
            smoothed_edge_probability([Graph(3)], lay)
        with pytest.raises(ValueError):
            smoothed_edge_probability([Graph(2)], lay, bandwidth=0.0)
