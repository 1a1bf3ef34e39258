"""Graph builders and brute-force oracles shared by the tests."""

import itertools
import random

import pytest

from sepsys.graph import CostGraph


def path_graph(n, costs=None):
    return CostGraph.from_edges(n, [(i, i + 1) for i in range(n - 1)], costs)


def complete_graph(n, costs=None):
    return CostGraph.from_edges(n, itertools.combinations(range(n), 2), costs)


def grid_graph(rows, cols, costs=None):
    edges = []
    for i in range(rows):
        for j in range(cols):
            v = i * cols + j
            if j + 1 < cols:
                edges.append((v, v + 1))
            if i + 1 < rows:
                edges.append((v, v + cols))
    return CostGraph.from_edges(rows * cols, edges, costs)


def random_graph(n, p, seed, cost_choices=(1,)):
    rnd = random.Random(seed)
    edges = [e for e in itertools.combinations(range(n), 2) if rnd.random() < p]
    return CostGraph.from_edges(n, edges, [rnd.choice(cost_choices) for _ in range(n)])


def brute_mis_cost(g):
    """Max-cost independent set by scanning all subsets (n <= 16)."""
    best = 0
    for mask in range(1 << g.node_count):
        nodes = [v for v in range(g.node_count) if mask >> v & 1]
        if all(not g.has_edge(a, b) for a, b in itertools.combinations(nodes, 2)):
            best = max(best, sum(g.costs[v] for v in nodes))
    return best


def brute_vc_cost(g):
    best = float("inf")
    for mask in range(1 << g.node_count):
        if all(mask >> u & 1 or mask >> v & 1 for u, v in g.edges):
            best = min(best, sum(g.costs[v] for v in range(g.node_count) if mask >> v & 1))
    return best


def brute_min_separating(g, m, strong):
    """Scan all 2^(m n) matrices; only for tiny instances."""
    n = g.node_count
    best = float("inf")
    for rows in itertools.product(range(1 << m), repeat=n):
        ok = True
        for u, v in g.edges:
            a, b = rows[u], rows[v]
            if (strong and not (a & ~b and b & ~a)) or a == b:
                ok = False
                break
        if ok:
            best = min(best, sum(c * bin(r).count("1") for c, r in zip(g.costs, rows)))
    return best


def atlas_connected(max_n=6):
    nx = pytest.importorskip("networkx")
    out = []
    for h in nx.graph_atlas_g():
        n = h.number_of_nodes()
        if 1 <= n <= max_n and nx.is_connected(h):
            out.append(CostGraph.from_edges(n, list(h.edges())))
    return out
