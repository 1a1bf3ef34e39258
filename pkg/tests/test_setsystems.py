import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import brute_mis_cost, brute_vc_cost, complete_graph, path_graph, random_graph
from sepsys.errors import PreconditionError
from sepsys.graph import CostGraph, SeparationMode, matrix_cost, unseparated_edges
from sepsys.sepmatrix import exact_min_separating
from sepsys.setsystems import (
    eps_separating_large_m,
    eps_strongly_separating_large_m,
    group_count,
    separating_2logn,
    strongly_separating_logn,
    vertex_cover_2approx,
)
from sepsys.vectors import by_weight, log2_ceil, weight_class

SEP, STRONG = SeparationMode.SEPARATING, SeparationMode.STRONGLY_SEPARATING


class TestVectors:
    @pytest.mark.parametrize("m,w", [(4, 0), (4, 1), (5, 2), (6, 3), (3, 3)])
    def test_weight_class_matches_combinations(self, m, w):
        expected = sorted(sum(1 << i for i in c) for c in itertools.combinations(range(m), w))
        assert list(weight_class(m, w)) == expected

    def test_by_weight_covers_everything_once(self):
        vecs = list(by_weight(4))
        assert sorted(vecs) == list(range(16))
        assert [bin(v).count("1") for v in vecs] == sorted(bin(v).count("1") for v in vecs)
        assert vecs[0] == 0

    @pytest.mark.parametrize("n", range(1, 130))
    def test_log2_ceil(self, n):
        assert log2_ceil(n) == (math.ceil(math.log2(n)) if n > 1 else 0)
        assert 2 ** log2_ceil(n) >= n


def _is_cover(g, cover):
    return all(u in cover or v in cover for u, v in g.edges)


class TestVertexCover:
    def test_edgeless(self):
        res = vertex_cover_2approx(CostGraph.from_edges(4, []))
        assert res.cover == frozenset() and res.cover_cost == 0

    def test_path_unit(self):
        g = path_graph(3)
        res = vertex_cover_2approx(g)
        assert _is_cover(g, res.cover)
        assert brute_vc_cost(g) == 1
        assert res.cover_cost <= 2

    def test_triangle_weighted(self):
        g = complete_graph(3, [1, 1, 10])
        res = vertex_cover_2approx(g)
        assert brute_vc_cost(g) == 2
        assert _is_cover(g, res.cover) and res.cover_cost <= 4

    def test_single_edge_hits_factor_two(self):
        res = vertex_cover_2approx(complete_graph(2))
        assert res.cover_cost == 2 == 2 * brute_vc_cost(complete_graph(2))

    @pytest.mark.parametrize("seed", range(40))
    def test_random_weighted(self, seed):
        g = random_graph(9, 0.35, seed, (1, 1.5, 2, 7))
        res = vertex_cover_2approx(g)
        assert _is_cover(g, res.cover)
        assert res.cover_cost == pytest.approx(g.cost_of(res.cover))
        assert res.cover_cost <= 2 * brute_vc_cost(g) + 1e-9


class TestSeparating2Logn:
    def test_edgeless_zero(self):
        L = separating_2logn(CostGraph.from_edges(5, []), 3)
        assert set(L.rows) == {0}

    def test_k2(self):
        g = complete_graph(2)
        L = separating_2logn(g, 4)
        assert unseparated_edges(g, L) == []

    def test_path_cost_bound(self):
        g = path_graph(3)
        L = separating_2logn(g, 4)
        assert unseparated_edges(g, L) == []
        assert exact_min_separating(g, 4, SEP)[1] == 1
        assert matrix_cost(L, g) <= 4

    def test_m_too_small_names_bound(self):
        g = path_graph(8)
        with pytest.raises(PreconditionError, match="2\\*ceil\\(log2 n\\) = 6"):
            separating_2logn(g, 2)

    @pytest.mark.parametrize("seed", range(30))
    def test_random_full_separation(self, seed):
        g = random_graph(12, 0.3, seed, (1, 2, 3))
        L = separating_2logn(g, 8)
        assert unseparated_edges(g, L) == []
        cover = vertex_cover_2approx(g).cover
        w = log2_ceil(12)
        for v in range(12):
            assert bin(L.rows[v]).count("1") == (w if v in cover else 0)


class TestStronglySeparatingLogn:
    def test_n2_m2(self):
        g = complete_graph(2)
        L = strongly_separating_logn(g, 2)
        assert sorted(L.row_string(v) for v in range(2)) == ["01", "10"]
        assert matrix_cost(L, g) == 2

    def test_n3_m4(self):
        g = complete_graph(3)
        L = strongly_separating_logn(g, 4)
        assert len(set(L.rows)) == 3 and all(bin(r).count("1") == 2 for r in L.rows)
        assert matrix_cost(L, g) == 6

    def test_n4_weighted(self):
        g = complete_graph(4, [1, 2, 3, 4])
        assert matrix_cost(strongly_separating_logn(g, 4), g) == 20

    def test_infeasible(self):
        with pytest.raises(PreconditionError, match="infeasible"):
            strongly_separating_logn(complete_graph(8), 3)

    @given(st.integers(2, 20), st.integers(0, 10_000))
    @settings(max_examples=60, deadline=None)
    def test_antichain(self, n, seed):
        g = random_graph(n, 0.5, seed)
        L = strongly_separating_logn(g, 2 * log2_ceil(n))
        for a, b in itertools.combinations(L.rows, 2):
            assert a & ~b and b & ~a
        assert unseparated_edges(g, L, STRONG) == []


class TestLargeM:
    def test_group_count(self):
        assert group_count(0.2) == 5
        assert group_count(1 / 3) == 3
        with pytest.raises(PreconditionError):
            group_count(0)

    def test_edgeless(self):
        g = CostGraph.from_edges(4, [])
        assert set(eps_separating_large_m(g, 3, 0.5, 0).rows) == {0}

    def test_m_too_small(self):
        with pytest.raises(PreconditionError, match="ceil\\(1/eps\\) = 5"):
            eps_separating_large_m(complete_graph(3), 4, 0.2, 0)
        with pytest.raises(PreconditionError):
            eps_strongly_separating_large_m(complete_graph(3), 4, 0.2, 0)

    def test_k2_monte_carlo(self):
        g = complete_graph(2)
        frac = sum(len(unseparated_edges(g, eps_separating_large_m(g, 2, 0.5, s))) for s in range(1000)) / 1000
        assert frac <= 0.55

    def test_single_node(self):
        L = eps_strongly_separating_large_m(CostGraph.from_edges(1, []), 2, 0.5, 3)
        assert bin(L.rows[0]).count("1") == 1

    def test_k2_eps_one(self):
        g = complete_graph(2)
        L = eps_strongly_separating_large_m(g, 1, 1.0, 0)
        assert L.row_string(0) == L.row_string(1) == "1"
        assert len(unseparated_edges(g, L, STRONG)) == 1

    def test_k4_monte_carlo(self):
        g = complete_graph(4)
        total = 0
        for s in range(1000):
            L = eps_strongly_separating_large_m(g, 4, 0.25, s)
            assert matrix_cost(L, g) == 4
            total += len(unseparated_edges(g, L, STRONG))
        assert total / (1000 * 6) <= 0.30

    @pytest.mark.parametrize("seed", range(10))
    def test_rows_weight_at_most_one(self, seed):
        g = random_graph(15, 0.3, seed, (1, 2))
        L = eps_separating_large_m(g, 6, 0.2, seed)
        assert all(bin(r).count("1") <= 1 for r in L.rows)
        assert matrix_cost(L, g) == vertex_cover_2approx(g).cover_cost

    def test_deterministic(self):
        g = random_graph(15, 0.3, 1)
        assert eps_separating_large_m(g, 6, 0.2, 9) == eps_separating_large_m(g, 6, 0.2, 9)


@pytest.mark.parametrize("seed", range(25))
def test_exact_cost_at_least_vertex_cover_bound(seed):
    # nodes outside one independent set need a nonzero row
    g = random_graph(7, 0.4, seed, (1, 2, 4))
    opt = exact_min_separating(g, 3, SEP)[1]
    assert opt >= g.total_cost() - brute_mis_cost(g) - 1e-9
