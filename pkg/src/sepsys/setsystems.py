"""Baseline set-system constructions.

* a local-ratio 2-approximate weighted vertex cover,
* the ``2 log n``-approximate separating matrix built on that cover,
* the ``log n``-approximate strongly separating matrix (unique equal-weight rows),
* random-partition designs for the large-``m`` regime ``m >= 1/eps``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

from .errors import PreconditionError
from .graph import CostGraph, InterventionMatrix
from .vectors import log2_ceil, weight_class


@dataclass(frozen=True)
class VertexCoverResult:
    cover: frozenset[int]
    cover_cost: float


def vertex_cover_2approx(g: CostGraph) -> VertexCoverResult:
    """Local-ratio weighted vertex cover with cost at most twice the optimum.

    Edges are visited in ascending ``(u, v)`` order. For every edge whose
    endpoints both still carry positive residual cost, the smaller residual is
    subtracted from both; nodes whose residual reaches zero form the cover.
    """
    residual = list(g.costs)
    for u, v in g.edges:
        if residual[u] > 0 and residual[v] > 0:
            d = min(residual[u], residual[v])
            # assign instead of subtract on the smaller side so it hits 0.0 exactly
            if residual[u] <= residual[v]:
                residual[u], residual[v] = 0.0, residual[v] - d
            else:
                residual[u], residual[v] = residual[u] - d, 0.0
    cover = frozenset(v for v in range(g.node_count) if residual[v] == 0.0)
    return VertexCoverResult(cover, g.cost_of(cover))


def _by_descending_cost(g: CostGraph, nodes) -> list[int]:
    return sorted(nodes, key=lambda v: (-g.costs[v], v))


def separating_2logn(g: CostGraph, m: int) -> InterventionMatrix:
    """Cover nodes get distinct weight-``ceil(log2 n)`` rows; the rest get zero."""
    n = g.node_count
    w = log2_ceil(n)
    if g.edges and m < 2 * w:
        raise PreconditionError(f"m = {m} is too small: need m >= 2*ceil(log2 n) = {2 * w} for n = {n}")
    cover = vertex_cover_2approx(g).cover
    rows = [0] * n
    if cover:
        w = max(w, 1)
        vecs = weight_class(m, w)
        for v in _by_descending_cost(g, cover):
            rows[v] = next(vecs)
    return InterventionMatrix(tuple(rows), m)


def strongly_separating_logn(g: CostGraph, m: int) -> InterventionMatrix:
    """Every node gets a distinct row of weight ``ceil(log2 n)`` (an antichain)."""
    n = g.node_count
    w = log2_ceil(n)
    if comb(m, w) < n:
        raise PreconditionError(f"m = {m} is infeasible: C(m, {w}) = {comb(m, w)} < n = {n}")
    vecs = weight_class(m, w)
    rows = [0] * n
    for v in _by_descending_cost(g, range(n)):
        rows[v] = next(vecs)
    return InterventionMatrix(tuple(rows), m)


def group_count(eps: float) -> int:
    if not 0 < eps <= 1:
        raise PreconditionError(f"eps must lie in (0, 1], got {eps}")
    return math.ceil(1 / eps - 1e-12)


def _random_groups(nodes: list[int], groups: int, m: int, seed: int) -> dict[int, int]:
    if m < groups:
        raise PreconditionError(f"m = {m} is too small: need m >= ceil(1/eps) = {groups}")
    rng = np.random.default_rng(seed)
    draws = rng.integers(0, groups, size=len(nodes))
    return {v: 1 << int(k) for v, k in zip(nodes, draws)}


def eps_separating_large_m(g: CostGraph, m: int, eps: float, seed: int) -> InterventionMatrix:
    """Randomly split a 2-approximate vertex cover into ``ceil(1/eps)`` weight-1 groups."""
    groups = group_count(eps)
    cover = sorted(vertex_cover_2approx(g).cover)
    assign = _random_groups(cover, groups, m, seed)
    return InterventionMatrix(tuple(assign.get(v, 0) for v in range(g.node_count)), m)


def eps_strongly_separating_large_m(g: CostGraph, m: int, eps: float, seed: int) -> InterventionMatrix:
    """Randomly split all nodes into ``ceil(1/eps)`` groups with distinct weight-1 rows."""
    groups = group_count(eps)
    assign = _random_groups(list(range(g.node_count)), groups, m, seed)
    return InterventionMatrix(tuple(assign[v] for v in range(g.node_count)), m)
