import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supplynet.errors import LoadError, ParameterError
from supplynet.model import (Network, NodeRole, Setup, demand_satisfaction, evaluate, generate_setup,
                             load_network, load_setup, network_cost, network_from_dict, network_to_dict,
                             robustness, save_network, save_setup, setup_from_dict, setup_to_dict)

from conftest import random_net
from oracles import removable, satisfied


def line_setup(xs, roles):
    return Setup.from_points([(x, 0.0) for x in xs], roles)


class TestSetup:
    def test_generate_counts_and_range(self):
        s = generate_setup(20, 1, 10, seed=4)
        assert s.n == 20
        assert len(s.producers) == 1 and len(s.demanders) == 10 and len(s.intermediates) == 9
        assert np.all((s.xy >= 0) & (s.xy <= 1))

    def test_generate_is_deterministic(self):
        assert generate_setup(12, 1, 6, 9) == generate_setup(12, 1, 6, 9)
        assert generate_setup(12, 1, 6, 9) != generate_setup(12, 1, 6, 10)

    @pytest.mark.parametrize("args", [(3, 1, 3), (5, 0, 2), (5, 2, 0), (1, 1, 0)])
    def test_generate_rejects_bad_counts(self, args):
        with pytest.raises(ParameterError):
            generate_setup(*args, seed=0)

    def test_requires_producer_and_demander(self):
        with pytest.raises(ParameterError):
            Setup.from_points([(0, 0), (1, 0)], ["producer", "intermediate"])

    def test_rejects_nonfinite(self):
        with pytest.raises(ParameterError):
            Setup.from_points([(0, 0), (math.nan, 0)], ["producer", "demander"])

    def test_distances_symmetric(self):
        s = generate_setup(8, 1, 3, 1)
        assert np.allclose(s.distances, s.distances.T)
        assert np.all(np.diag(s.distances) == 0)


class TestNetwork:
    def test_edges_sorted(self):
        s = line_setup([0, 1, 2], ["producer", "intermediate", "demander"])
        assert Network(s, ((2, 1), (0, 1))).edges == ((0, 1), (2, 1))

    @pytest.mark.parametrize("edges", [((0, 0),), ((0, 1), (0, 1)), ((0, 3),), ((-1, 0),)])
    def test_invalid_edges(self, edges):
        s = line_setup([0, 1, 2], ["producer", "intermediate", "demander"])
        with pytest.raises(ParameterError):
            Network(s, edges)

    def test_from_codes_matches(self):
        net = random_net(3)
        assert Network.from_codes(net.setup, net.codes) == net


class TestMetrics:
    def test_cost_triangle(self):
        s = Setup.from_points([(0, 0), (3, 0), (3, 4)], ["producer", "intermediate", "demander"])
        assert network_cost(Network(s, ((0, 1), (1, 2), (2, 0)))) == pytest.approx(12.0)

    def test_empty_network(self):
        s = line_setup([0, 1], ["producer", "demander"])
        met = evaluate(Network(s, ()))
        assert (met.c, met.d, met.r, met.m) == (0.0, 0.0, 0.0, 0)
        assert robustness(Network(s, ())) == (0.0, frozenset())

    def test_chain_is_fragile(self):
        s = line_setup([0, 1, 2], ["producer", "intermediate", "demander"])
        net = Network(s, ((0, 1), (1, 2)))
        assert demand_satisfaction(net) == 1.0
        assert robustness(net)[0] == 0.0

    def test_parallel_routes_are_removable(self):
        s = line_setup([0, 1, 2, 3], ["producer", "intermediate", "intermediate", "demander"])
        net = Network(s, ((0, 1), (1, 3), (0, 2), (2, 3)))
        r, er = robustness(net)
        assert r == 1.0 and er == frozenset(net.edges)

    def test_dead_end_edge_is_removable(self):
        s = line_setup([0, 1, 2], ["producer", "demander", "intermediate"])
        net = Network(s, ((0, 1), (0, 2)))
        r, er = robustness(net)
        assert er == {(0, 2)} and r == 0.5

    def test_partial_demand(self):
        s = line_setup([0, 1, 2, 3], ["producer", "demander", "demander", "demander"])
        assert demand_satisfaction(Network(s, ((0, 1), (2, 3)))) == pytest.approx(1 / 3)

    def test_any_producer_satisfies(self):
        s = line_setup([0, 1, 2, 3], ["producer", "producer", "demander", "demander"])
        assert demand_satisfaction(Network(s, ((0, 2), (1, 3)))) == 1.0

    def test_against_oracle(self, backend):
        for seed in range(60):
            net = random_net(seed, n_producers=1 + seed % 2)
            s = net.setup
            er = removable(s.n, list(net.edges), s.producers, s.demanders)
            r, got = robustness(net)
            assert got == er
            assert r == len(er) / net.m
            assert demand_satisfaction(net) == satisfied(s.n, net.edges, s.producers, s.demanders) / len(s.demanders)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_removable_edges_keep_demand(seed):
    net = random_net(seed)
    d0 = demand_satisfaction(net)
    r, er = robustness(net)
    assert 0.0 <= r <= 1.0
    for e in net.edges:
        d1 = demand_satisfaction(Network(net.setup, tuple(f for f in net.edges if f != e)))
        assert (d1 == d0) == (e in er)
        assert d1 <= d0


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_cost_is_additive(seed):
    net = random_net(seed)
    half = len(net.edges) // 2
    a = Network(net.setup, net.edges[:half])
    b = Network(net.setup, net.edges[half:])
    assert network_cost(net) == pytest.approx(network_cost(a) + network_cost(b))


class TestSerialization:
    def test_roundtrip(self, tmp_path):
        net = random_net(11)
        save_network(net, tmp_path / "n.json")
        save_setup(net.setup, tmp_path / "s.json")
        assert load_network(tmp_path / "n.json") == net
        assert load_setup(tmp_path / "s.json") == net.setup
        assert network_from_dict(json.loads(json.dumps(network_to_dict(net)))) == net

    def test_seed_kept(self):
        s = generate_setup(6, 1, 3, 77)
        assert setup_from_dict(setup_to_dict(s)).rng_seed == 77

    def test_bad_json_reports_line(self, tmp_path):
        p = tmp_path / "bad.json"
        p.write_text('{"nodes": [\n  {"id": 0,}\n]}')
        with pytest.raises(LoadError, match="line 2"):
            load_setup(p)

    @pytest.mark.parametrize("doc, msg", [
        ({}, "nodes"),
        ({"nodes": [{"id": 0, "x": 0, "y": 0}]}, "nodes\\[0\\]: missing field 'role'"),
        ({"nodes": [{"id": 0, "x": 0, "y": 0, "role": "boss"}]}, "nodes\\[0\\]"),
        ({"nodes": [{"id": 0, "x": 0, "y": 0, "role": "producer"}]}, "demander"),
    ])
    def test_field_diagnostics(self, doc, msg):
        with pytest.raises(LoadError, match=msg):
            setup_from_dict(doc)

    def test_bad_edges(self):
        doc = network_to_dict(random_net(2))
        doc["edges"] = [[0, 0]]
        with pytest.raises(LoadError, match="self-loop"):
            network_from_dict(doc)

    def test_roles_enum(self):
        s = generate_setup(5, 1, 2, 0)
        assert {nd.role for nd in s.nodes} == {NodeRole.PRODUCER, NodeRole.DEMANDER, NodeRole.INTERMEDIATE}
