import math
import networkx as nx
import numpy as np
import pytest

from supplynet.errors import UnsupportedConfigurationError
from supplynet.model import Network, Setup, demand_satisfaction, generate_setup, network_cost
from supplynet.steiner import (connectivity_threshold, insert_intermediates, mst_parents, solve_min_cost,
                               terminal_arborescence)

from oracles import mst_cost, subset_optimum

EQ_TRI = [(0.0, 0.0), (1.0, 0.0), (0.5, 0.8660254)]
FERMAT = (0.5, 0.2886751)


class TestTerminalArborescence:
    def test_two_points(self):
        s = Setup.from_points([(0, 0), (2, 0)], ["producer", "demander"])
        net = terminal_arborescence(s)
        assert net.edges == ((0, 1),) and network_cost(net) == 2.0

    def test_equilateral(self):
        s = Setup.from_points(EQ_TRI, ["producer", "demander", "demander"])
        net = terminal_arborescence(s)
        assert net.m == 2 and network_cost(net) == pytest.approx(2.0, abs=1e-6)

    def test_collinear_prefers_chain(self):
        s = Setup.from_points([(0, 0), (4, 0), (1, 0)], ["producer", "demander", "demander"])
        net = terminal_arborescence(s)
        assert set(net.edges) == {(0, 2), (2, 1)} and network_cost(net) == 4.0

    def test_oriented_from_producer(self):
        s = generate_setup(15, 1, 8, 2)
        net = terminal_arborescence(s)
        indeg = {v for _, v in net.edges}
        assert s.producers[0] not in indeg and len(indeg) == net.m
        assert demand_satisfaction(net) == 1.0

    def test_multi_producer_unsupported(self):
        s = generate_setup(6, 2, 2, 0)
        with pytest.raises(UnsupportedConfigurationError):
            terminal_arborescence(s)
        with pytest.raises(UnsupportedConfigurationError):
            solve_min_cost(s)


class TestInsertion:
    def test_collinear_tie_rejected(self):
        s = Setup.from_points([(0, 0), (1, 0), (2, 0)], ["producer", "intermediate", "demander"])
        base = terminal_arborescence(s)
        out = insert_intermediates(base)
        assert out == base and network_cost(out) == 2.0

    def test_fermat_point(self):
        s = Setup.from_points(EQ_TRI + [FERMAT], ["producer", "demander", "demander", "intermediate"])
        out = solve_min_cost(s)
        assert 3 in {u for e in out.edges for u in e}
        assert network_cost(out) == pytest.approx(sum(math.dist(q, FERMAT) for q in EQ_TRI), abs=1e-9)
        assert network_cost(out) == pytest.approx(1.7320508, abs=1e-6)

    def test_no_intermediates(self):
        s = generate_setup(6, 1, 5, 3)
        base = terminal_arborescence(s)
        assert insert_intermediates(base) == base

    @pytest.mark.parametrize("seed", range(20))
    def test_never_worse_and_full_demand(self, seed):
        s = generate_setup(14, 1, 5, seed)
        base = terminal_arborescence(s)
        out = insert_intermediates(base)
        assert network_cost(out) <= network_cost(base) + 1e-12
        assert demand_satisfaction(out) == 1.0

    @pytest.mark.parametrize("seed", range(25))
    def test_upper_bounds_subset_optimum(self, seed):
        s = generate_setup(7, 1, 3, 500 + seed)
        assert network_cost(solve_min_cost(s)) >= subset_optimum(s) - 1e-12


class TestThreshold:
    def test_collinear(self):
        s = Setup.from_points([(0, 0), (1, 0), (3, 0)], ["producer", "intermediate", "demander"])
        assert connectivity_threshold(s) == 2.0
        assert 1.2 * connectivity_threshold(s) == pytest.approx(2.4)

    def test_is_connectivity_threshold(self):
        s = generate_setup(25, 1, 12, 4)
        t = connectivity_threshold(s)
        d = s.distances
        for cap, want in ((t, True), (t * (1 - 1e-9), False)):
            g = nx.Graph()
            g.add_nodes_from(range(s.n))
            g.add_edges_from((i, j) for i in range(s.n) for j in range(i) if d[i, j] <= cap)
            assert nx.is_connected(g) is want

    def test_mst_parents_matches_networkx(self):
        s = generate_setup(30, 1, 10, 9)
        par = mst_parents(s.distances)
        ours = sum(s.distances[p, v] for v, p in enumerate(par) if p >= 0)
        assert ours == pytest.approx(mst_cost([(nd.x, nd.y) for nd in s.nodes]))
