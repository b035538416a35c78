import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supplynet.errors import ParameterError
from supplynet.evolver import (Dominance, EdgeUniverse, GAConfig, Member, Objective, crowding_distance,
                               dominance, dominance_matrix, evolve, hypervolume, mutate, nondominated_sort,
                               random_network, recombine, verify_archive)
from supplynet.model import Network, edge_lengths, evaluate, generate_setup, network_cost
from supplynet.motifs import NullModelConfig
from supplynet.steiner import solve_min_cost

SETUP = generate_setup(12, 1, 6, 5)


def member(c, r, feasible=True, violation=0.0, sigma=math.nan):
    return Member(Network(SETUP, ()), c, 1.0, r, sigma, violation, feasible)


class TestConfig:
    @pytest.mark.parametrize("kw", [
        {"elite_fraction": 0.0}, {"elite_fraction": 1.0}, {"elite_fraction": 0.9, "random_fraction": 0.1},
        {"random_fraction": -0.1}, {"m_min": 5, "m_max": 4}, {"population_size": 2}, {"generations": 0},
        {"mutation_size": 0}, {"edge_length_cap": 0.0}, {"objective": "speed"},
    ])
    def test_rejects(self, kw):
        base = {"m_min": 2, "m_max": 6}
        with pytest.raises(ParameterError):
            GAConfig(**{**base, **kw})

    def test_objective_aliases(self):
        assert GAConfig(1, 2, objective="cr").objective is Objective.COST_ROBUSTNESS
        assert GAConfig(1, 2, objective="csigma").objective is Objective.COST_SIGMA


class TestOperators:
    def test_random_network_sizes(self):
        assert random_network(SETUP, 0, seed=1).m == 0
        full = random_network(SETUP, 12 * 11, seed=1)
        assert full.m == 132
        with pytest.raises(ParameterError):
            random_network(SETUP, 133, seed=1)

    def test_random_network_cap(self):
        cap = 0.3
        net = random_network(SETUP, 10, cap, seed=2)
        assert edge_lengths(net).max() <= cap
        assert len(EdgeUniverse.of(SETUP, cap)) < 132

    def test_random_network_uniform(self):
        counts = np.zeros(132)
        uni = EdgeUniverse.of(SETUP)
        pos = {c: i for i, c in enumerate(uni.code_list)}
        for s in range(2000):
            for code in random_network(SETUP, 5, seed=s).codes:
                counts[pos[code]] += 1
        # each edge expected 2000 * 5 / 132 ~ 75.8 times
        assert counts.min() > 40 and counts.max() < 115

    def test_mutation_kinds(self):
        cfg = GAConfig(1, 10)
        net = random_network(SETUP, 8, seed=3)
        assert mutate(Network(SETUP, ()), cfg, 0, "remove").m == 0
        assert mutate(net, cfg, 0, "add").m == 9
        rep = mutate(net, cfg, 0, "replace")
        assert rep.m == 8 and rep != net
        assert mutate(net, cfg, 0, "remove").m == 7
        with pytest.raises(ParameterError):
            mutate(net, cfg, 0, "twist")

    def test_mutation_size_and_cap(self):
        cfg = GAConfig(1, 10, mutation_size=3, edge_length_cap=0.4)
        net = random_network(SETUP, 8, 0.4, seed=3)
        for s in range(30):
            out = mutate(net, cfg, s)
            assert abs(out.m - net.m) in (0, 3)
            if out.m:
                assert edge_lengths(out).max() <= 0.4

    def test_mutation_exhausted_universe(self):
        full = random_network(SETUP, 132, seed=0)
        cfg = GAConfig(1, 200)
        assert mutate(full, cfg, 0, "add").m == 132
        assert mutate(full, cfg, 0, "replace") == full

    def test_recombine_subsets(self):
        a = random_network(SETUP, 10, seed=1)
        b = random_network(SETUP, 10, seed=2)
        for s in range(20):
            assert set(recombine(a, a, s).edges) <= set(a.edges)
            assert set(recombine(a, b, s).edges) <= set(a.edges) | set(b.edges)

    def test_recombine_all_retained(self):
        class Always:
            def random(self, n):
                return np.zeros(n)

        a = random_network(SETUP, 10, seed=1)
        b = random_network(SETUP, 10, seed=2)
        assert set(recombine(a, b, Always()).edges) == set(a.edges) | set(b.edges)

    def test_recombine_mismatched(self):
        other = generate_setup(12, 1, 6, 6)
        with pytest.raises(ParameterError):
            recombine(random_network(SETUP, 3, seed=0), random_network(other, 3, seed=0))


class TestDominance:
    cfg = GAConfig(1, 10)

    def test_examples(self):
        crit = 0.44
        assert dominance(member(1, 0.9), member(2, 0.5), crit, self.cfg) is Dominance.A_DOMINATES
        assert dominance(member(2, 0.5), member(1, 0.9), crit, self.cfg) is Dominance.B_DOMINATES
        assert dominance(member(1, 0.5), member(1, 0.5), crit, self.cfg) is Dominance.INCOMPARABLE

    def test_lower_branch_prefers_low_r(self):
        cfg = GAConfig(1, 10, separate_branches=False)
        assert dominance(member(1, 0.1), member(1, 0.3), 0.44, cfg) is Dominance.A_DOMINATES

    def test_branches_kept_apart(self):
        # folded distances 0.34 vs 0.06: comparable only when branches are merged
        a, b = member(1, 0.1), member(2, 0.5)
        assert dominance(a, b, 0.44, GAConfig(1, 10, separate_branches=False)) is Dominance.A_DOMINATES
        assert dominance(a, b, 0.44, self.cfg) is Dominance.INCOMPARABLE

    def test_one_sided(self):
        cfg = GAConfig(1, 10, two_sided=False)
        assert dominance(member(1, 0.1), member(1, 0.3), 0.44, cfg) is Dominance.B_DOMINATES

    def test_constraints(self):
        feas = member(100, 0.0)
        bad = member(0, 1.0, feasible=False, violation=0.5)
        worse = member(0, 1.0, feasible=False, violation=1.5)
        assert dominance(feas, bad, 0.4, self.cfg) is Dominance.A_DOMINATES
        assert dominance(bad, worse, 0.4, self.cfg) is Dominance.A_DOMINATES
        assert dominance(bad, bad, 0.4, self.cfg) is Dominance.INCOMPARABLE

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.floats(0, 5), st.floats(0, 1), st.booleans(), st.floats(0, 3)),
                    min_size=1, max_size=25),
           st.floats(0, 1), st.booleans(), st.booleans())
    def test_matrix_and_sort_match_pairwise(self, pts, crit, two_sided, separate):
        cfg = GAConfig(1, 10, two_sided=two_sided, separate_branches=separate)
        ms = [member(c, r, f, 0.0 if f else v + 0.1) for c, r, f, v in pts]
        dom = dominance_matrix(ms, crit, cfg)
        for i, a in enumerate(ms):
            for j, b in enumerate(ms):
                assert dom[i, j] == (dominance(a, b, crit, cfg) is Dominance.A_DOMINATES)
        fronts = nondominated_sort(ms, crit, cfg)
        assert sorted(i for f in fronts for i in f) == list(range(len(ms)))
        first = set(fronts[0])
        for j in range(len(ms)):
            assert (j in first) == (not any(dom[i, j] for i in range(len(ms))))


class TestIndicators:
    def test_crowding(self):
        d = crowding_distance(np.array([0.0, 1.0, 2.0, 4.0]), np.array([0.0, 1.0, 2.0, 4.0]))
        assert math.isinf(d[0]) and math.isinf(d[3])
        assert d[1] == pytest.approx(2 * 2 / 4) and d[2] == pytest.approx(2 * 3 / 4)
        assert np.all(np.isinf(crowding_distance(np.array([1.0, 2.0]), np.array([0.0, 1.0]))))

    def test_hypervolume(self):
        assert hypervolume([], 10, 0) == 0
        assert hypervolume([(2, 1)], 10, 0) == pytest.approx(8)
        assert hypervolume([(2, 1), (4, 3)], 10, 0) == pytest.approx(2 * 1 + 6 * 3)
        # a dominated point adds nothing
        assert hypervolume([(2, 1), (4, 3), (5, 2)], 10, 0) == pytest.approx(20)


def _small_cfg(**kw):
    base = dict(m_min=16, m_max=22, population_size=100, generations=80, seed=0)
    return GAConfig(**{**base, **kw})


@pytest.fixture(scope="module")
def regression_run():
    setup = generate_setup(20, 1, 10, 0)
    cfg = _small_cfg()
    return setup, cfg, evolve(setup, cfg)


class TestEvolve:
    def test_archive_integrity(self, regression_run):
        _, cfg, arch = regression_run
        assert len(arch) > 0
        assert verify_archive(arch, cfg) == []
        for m in arch:
            met = evaluate(m.network)
            assert met.d == 1.0 and 16 <= met.m <= 22
            assert m.c == pytest.approx(met.c) and m.r == met.r

    def test_two_branch_front(self, regression_run):
        _, _, arch = regression_run
        assert any(m.r < arch.critical for m in arch)
        assert any(m.r > arch.critical for m in arch)
        cheapest = min(arch, key=lambda m: m.c)
        assert cheapest.r == arch.critical

    def test_history(self, regression_run):
        _, cfg, arch = regression_run
        assert [h["generation"] for h in arch.history] == list(range(cfg.generations))
        for prev, cur in zip(arch.history, arch.history[1:]):
            if cur["front_retained"]:
                assert cur["hypervolume"] >= prev["hypervolume"] - 1e-12 or cur["critical"] != prev["critical"]

    def test_deterministic(self):
        setup = generate_setup(14, 1, 7, 2)
        cfg = GAConfig(10, 14, population_size=40, generations=15, seed=4)
        a, b = evolve(setup, cfg), evolve(setup, cfg)
        assert [m.network.edges for m in a] == [m.network.edges for m in b]
        assert a.history == b.history

    def test_infeasible_window(self):
        setup = generate_setup(12, 1, 6, 0)
        arch = evolve(setup, GAConfig(2, 4, population_size=20, generations=3))
        assert len(arch) == 0 and "no feasible" in arch.diagnostic

    def test_window_larger_than_universe(self):
        setup = generate_setup(4, 1, 2, 0)
        with pytest.raises(ParameterError):
            evolve(setup, GAConfig(13, 20, population_size=10, generations=2))

    def test_tree_window_reaches_steiner_cost(self):
        # exact trees only; the optimum is the terminal MST (there are no intermediates)
        ratios = []
        for s in range(3, 11):
            setup = generate_setup(7, 1, 6, s)
            arch = evolve(setup, GAConfig(6, 6, population_size=60, generations=300, seed=1))
            ref = network_cost(solve_min_cost(setup))
            ratios.append(min(m.c for m in arch) / ref)
            assert min(m.r for m in arch) == 0.0
        assert min(ratios) >= 1 - 1e-9
        assert max(ratios) <= 1.10
        assert sum(r < 1 + 1e-9 for r in ratios) >= len(ratios) // 2

    def test_edge_budget_shifts_robustness(self):
        setup = generate_setup(20, 1, 10, 1)
        low = evolve(setup, _small_cfg(m_min=10, m_max=16, generations=60))
        high = evolve(setup, _small_cfg(m_min=28, m_max=34, generations=60))
        assert np.mean([m.r for m in low]) < np.mean([m.r for m in high])
        assert max(m.r for m in high) > 0.8

    def test_length_cap_respected(self):
        setup = generate_setup(16, 1, 8, 4)
        cfg = GAConfig(14, 20, population_size=60, generations=30, edge_length_cap=0.6, seed=2)
        arch = evolve(setup, cfg)
        assert verify_archive(arch, cfg) == []
        for m in arch:
            assert edge_lengths(m.network).max() <= 0.6

    def test_sigma_objective(self):
        setup = generate_setup(14, 1, 7, 8)
        cfg = GAConfig(12, 18, population_size=40, generations=10, objective="csigma",
                       motif_cfg=NullModelConfig(ensemble_size=20), final_ensemble_size=40, seed=3)
        arch = evolve(setup, cfg)
        assert len(arch) > 0 and verify_archive(arch, cfg) == []
        assert all(-1 <= m.sigma <= 1 for m in arch)

    def test_progress_callback(self):
        seen = []
        evolve(SETUP, GAConfig(6, 10, population_size=10, generations=4), progress=lambda g, rec: seen.append(g))
        assert seen == [0, 1, 2, 3]
