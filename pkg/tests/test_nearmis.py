import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import complete_graph, path_graph, random_graph
from sepsys.errors import BudgetExceeded, OracleLimitError, PreconditionError
from sepsys.graph import CostGraph, induced_edge_count
from sepsys.nearmis import (
    IsSearchConfig,
    bucket_by_cost,
    exact_mis,
    independent_set_search,
    near_mis,
    sample_size,
)


def brute_lex_mis(g):
    best_cost, best = -1.0, None
    for r in range(g.node_count, -1, -1):
        for combo in itertools.combinations(range(g.node_count), r):
            if any(g.has_edge(a, b) for a, b in itertools.combinations(combo, 2)):
                continue
            c = sum(g.costs[v] for v in combo)
            if c > best_cost + 1e-9 or (abs(c - best_cost) <= 1e-9 and combo < best):
                best_cost, best = c, combo
    return frozenset(best)


class TestBuckets:
    def test_unit_costs_single_bucket(self):
        b = bucket_by_cost(path_graph(5), 0.1)
        assert b.k == 1 and b.buckets[0] == frozenset(range(5))

    def test_intervals(self):
        g = CostGraph.from_edges(3, [], [1, 1.5, 4])
        b = bucket_by_cost(g, 1.0)
        assert b.buckets == (frozenset({0, 1}), frozenset(), frozenset({2}))

    def test_k_formula_keeps_empty_buckets(self):
        g = CostGraph.from_edges(2, [], [1, 10])
        b = bucket_by_cost(g, 0.5)
        assert b.k == math.ceil(math.log(10, 1.5)) + 1

    @given(st.lists(st.floats(1, 50), min_size=1, max_size=20), st.floats(0.01, 0.9))
    @settings(max_examples=150, deadline=None)
    def test_partition_and_ratio(self, costs, gamma):
        g = CostGraph.from_edges(len(costs), [], costs)
        b = bucket_by_cost(g, gamma)
        assert sorted(v for bk in b.buckets for v in bk) == list(range(len(costs)))
        for i, bk in enumerate(b.buckets, start=1):
            for v in bk:
                assert (1 + gamma) ** (i - 1) <= g.costs[v] * (1 + 1e-12)
                assert g.costs[v] < (1 + gamma) ** i * (1 + 1e-12)
            cs = [g.costs[v] for v in bk]
            if cs:
                assert max(cs) <= min(cs) * (1 + gamma) * (1 + 1e-12)

    def test_gamma_must_be_positive(self):
        with pytest.raises(PreconditionError):
            bucket_by_cost(path_graph(2), 0)


class TestConfig:
    @pytest.mark.parametrize(
        "kw", [dict(rho=0), dict(rho=1.1), dict(gamma=1), dict(eps=1), dict(delta=0), dict(enumeration_budget=0)]
    )
    def test_invalid(self, kw):
        args = dict(rho=0.5, gamma=0.1, eps=0.1, delta=0.1) | kw
        with pytest.raises(PreconditionError):
            IsSearchConfig(**args)

    def test_sample_size_formula(self):
        cfg = IsSearchConfig(0.5, 0.1, 0.2, 0.1)
        bound = math.ceil(8 * 2 / (0.2 * 0.1 * 0.5) * math.log(4 * 2 / (0.2 * 0.1)))
        assert sample_size(10**9, 2, cfg) == bound
        assert sample_size(7, 2, cfg) == 7


class TestIndependentSetSearch:
    def test_edgeless_returns_everything(self):
        out = independent_set_search(CostGraph.from_edges(6, []), IsSearchConfig(1.0, 0.1, 0.1, 0.1))
        assert out == frozenset(range(6))

    def test_edgeless_weighted_meets_guard(self):
        # smaller bucket subsets come first, so a cheap bucket may be left out
        g = CostGraph.from_edges(6, [], [1, 2, 3, 1, 1, 5])
        out = independent_set_search(g, IsSearchConfig(1.0, 0.1, 0.1, 0.1))
        assert g.cost_of(out) >= 0.7 * g.total_cost()

    def test_empty_graph(self):
        assert independent_set_search(CostGraph(()), IsSearchConfig(1.0, 0.1, 0.1, 0.1)) == frozenset()

    def test_clique_has_no_dense_independent_set(self):
        out = independent_set_search(complete_graph(20), IsSearchConfig(0.9, 0.01, 0.001, 0.1))
        assert out is None

    def test_random_graphs_with_oracle_rho(self):
        hits = 0
        for s in range(100):
            g = random_graph(30, 0.1, 1000 + s)
            rho = len(exact_mis(g, limit=None)) / 30
            cfg = IsSearchConfig(rho, 0.05, 0.2, 0.1, seed=s)
            out = independent_set_search(g, cfg)
            if out is not None:
                assert g.cost_of(out) >= rho * (1 - 3 * 0.05) * g.total_cost() - 1e-9
                assert induced_edge_count(g, out) <= 0.2 * 900
                hits += 1
        assert hits >= 90

    def test_budget_exceeded_is_distinct(self):
        g = random_graph(16, 0.3, 0)
        with pytest.raises(BudgetExceeded) as info:
            independent_set_search(g, IsSearchConfig(0.3, 0.05, 0.01, 0.1, enumeration_budget=1))
        assert info.value.examined == 1

    @given(st.integers(2, 14), st.floats(0.05, 0.6), st.integers(0, 10**6), st.floats(0.2, 1.0))
    @settings(max_examples=60, deadline=None)
    def test_return_guard_always_holds(self, n, p, seed, rho):
        g = random_graph(n, p, seed, (1, 2, 3))
        cfg = IsSearchConfig(rho, 0.1, 0.1, 0.2, seed=seed)
        try:
            out = independent_set_search(g, cfg)
        except BudgetExceeded:
            return
        if out is not None:
            assert g.cost_of(out) >= rho * (1 - 3 * 0.1) * g.total_cost() - 1e-9
            assert induced_edge_count(g, out) <= 0.1 * n * n

    @pytest.mark.parametrize("seed", range(30))
    def test_bad_bucket_loss_is_small(self, seed):
        # the MIS keeps all but 2 gamma rho C(V) of its cost inside good buckets
        g = random_graph(12, 0.3, seed, (1, 1.3, 2, 3.5))
        gamma = 0.2
        S = exact_mis(g)
        rho = g.cost_of(S) / g.total_cost()
        loss = 0.0
        for bk in bucket_by_cost(g, gamma).buckets:
            if len(S & bk) < gamma * rho * len(bk):
                loss += g.cost_of(S & bk)
        assert loss <= 2 * gamma * rho * g.total_cost() + 1e-9


class TestNearMis:
    def test_edgeless(self):
        g = CostGraph.from_edges(5, [], [1, 2, 1, 3, 1])
        res = near_mis(g, 0.3, 0.1, 0)
        assert res.nodes == frozenset(range(5)) and not res.fallback

    def test_clique_falls_back_to_top_nodes(self):
        g = complete_graph(16)
        res = near_mis(g, 0.25, 0.1, 0)
        assert res.fallback and res.nodes == frozenset(range(8))
        assert induced_edge_count(g, res.nodes) == 28 <= 0.25 * 256

    def test_random_unit_graphs(self):
        good = 0
        for s in range(100):
            g = random_graph(20, 0.15, s)
            S = near_mis(g, 0.3, 0.1, s).nodes
            good += g.cost_of(S) >= g.cost_of(exact_mis(g)) and induced_edge_count(g, S) <= 0.3 * 400
        assert good >= 90

    @given(st.integers(1, 14), st.floats(0.0, 0.7), st.integers(0, 10**6), st.floats(0.05, 0.9))
    @settings(max_examples=40, deadline=None)
    def test_size_floor_always(self, n, p, seed, eps):
        g = random_graph(n, p, seed, (1, 2, 4))
        S = near_mis(g, eps, 0.1, seed).nodes
        assert len(S) >= math.ceil(math.sqrt(eps) * n - 1e-9)

    def test_budget_exhaustion_is_a_warning(self):
        g = random_graph(16, 0.4, 0, (1, 2, 4))
        res = near_mis(g, 0.3, 0.1, 0, budget=1)
        assert res.warnings and len(res.nodes) >= math.ceil(math.sqrt(0.3) * 16)

    def test_deterministic(self):
        g = random_graph(18, 0.2, 5, (1, 2))
        assert near_mis(g, 0.3, 0.1, 11) == near_mis(g, 0.3, 0.1, 11)

    @pytest.mark.parametrize("eps,delta", [(0, 0.1), (1, 0.1), (0.3, 0), (0.3, 1)])
    def test_invalid(self, eps, delta):
        with pytest.raises(PreconditionError):
            near_mis(path_graph(3), eps, delta, 0)


class TestExactMis:
    def test_edgeless(self):
        assert exact_mis(CostGraph.from_edges(4, [])) == frozenset(range(4))

    def test_triangle_tie_break(self):
        assert exact_mis(complete_graph(3)) == {0}

    def test_weighted_path_tie_break(self):
        g = path_graph(4, [1, 3, 3, 1])
        S = exact_mis(g)
        assert g.cost_of(S) == 4 and S == {0, 2}

    def test_limit(self):
        with pytest.raises(OracleLimitError):
            exact_mis(path_graph(25))
        assert len(exact_mis(path_graph(25), limit=None)) == 13

    @given(st.integers(0, 11), st.floats(0.0, 0.8), st.integers(0, 10**6))
    @settings(max_examples=120, deadline=None)
    def test_matches_brute_force(self, n, p, seed):
        g = random_graph(n, p, seed, (1, 2, 3))
        assert exact_mis(g) == brute_lex_mis(g)
