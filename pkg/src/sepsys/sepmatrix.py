"""Greedy peeling designs and the exact optimum oracle.

``eps_separating_matrix`` peels near-maximum-cost independent sets off the
graph and gives each peel the cheapest unused row vector. ``ancestral_design``
contracts the peels into supernodes and gives them a pairwise non-dominating
assignment, which strongly separates every edge between different peels.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .errors import OracleLimitError, PreconditionError
from .graph import (
    CostGraph,
    InterventionMatrix,
    SeparationMode,
    format_row,
    iter_bits,
    matrix_cost,
    rows_strongly_separated,
    _parse_row,
)
from .nearmis import DEFAULT_BUDGET, DEFAULT_MIS_LIMIT, exact_mis, near_mis
from .vectors import by_weight, weight_class

ETA = 3
EXACT_LIMIT = 8
EXACT_NODE_BUDGET = 5_000_000


@dataclass(frozen=True)
class PeelHistory:
    groups: tuple[frozenset[int], ...]
    vectors: tuple[int, ...]
    m: int
    fallbacks: int = 0

    def check(self, n: int) -> None:
        """Raise ``PreconditionError`` unless the groups partition ``range(n)``."""
        seen: set[int] = set()
        for grp in self.groups:
            if seen & grp:
                raise PreconditionError("peel groups overlap")
            seen |= grp
        if seen != set(range(n)):
            raise PreconditionError(f"peel groups cover {len(seen)} of {n} nodes")
        if len(set(self.vectors)) != len(self.vectors) or len(self.vectors) != len(self.groups):
            raise PreconditionError("peel vectors must be distinct, one per group")
        weights = [v.bit_count() for v in self.vectors]
        if weights != sorted(weights):
            raise PreconditionError("peel vectors must come in nondecreasing weight order")

    def to_json(self) -> str:
        return json.dumps(
            {
                "m": self.m,
                "groups": [sorted(g) for g in self.groups],
                "vectors": [format_row(v, self.m) for v in self.vectors],
            },
            indent=2,
        )

    @classmethod
    def from_json(cls, text: str) -> "PeelHistory":
        data = json.loads(text)
        return cls(
            tuple(frozenset(g) for g in data["groups"]),
            tuple(_parse_row(v) for v in data["vectors"]),
            int(data["m"]),
        )


@dataclass(frozen=True)
class SupernodeSet:
    members: tuple[frozenset[int], ...]
    costs: tuple[float, ...]

    def __len__(self) -> int:
        return len(self.members)


def check_design_params(m: int, eps: float) -> None:
    if not 0 < eps < 1:
        raise PreconditionError(f"eps must lie in (0, 1), got {eps}")
    need = ETA * math.log2(1 / eps)
    if m < need - 1e-9:
        raise PreconditionError(
            f"m = {m} is below the feasibility bound m >= {ETA}*log2(1/eps) = {need:.3f} for eps = {eps}"
        )


def _peel(g: CostGraph, m: int, eps: float, delta: float, seed: int, oracle_mode: bool, budget: int, finder=None) -> PeelHistory:
    n = g.node_count
    remaining = list(range(n))
    supply: Iterator[int] = by_weight(m)
    groups: list[frozenset[int]] = []
    vectors: list[int] = []
    fallbacks = 0
    step = 0
    while remaining:
        sub, labels = g.induced_subgraph(remaining)
        if finder is not None:
            local = finder(sub, step)
        elif oracle_mode:
            local = exact_mis(sub, limit=None)
        else:
            res = near_mis(sub, eps * eps, eps * delta, _child_seed(seed, step), n_ref=n, budget=budget)
            fallbacks += res.fallback
            local = res.nodes
        assert local, "peel returned no nodes"
        group = frozenset(labels[i] for i in local)
        try:
            vec = next(supply)
        except StopIteration:
            raise PreconditionError(f"vector supply of 2^{m} rows exhausted after {len(groups)} peels") from None
        groups.append(group)
        vectors.append(vec)
        remaining = [v for v in remaining if v not in group]
        step += 1
    return PeelHistory(tuple(groups), tuple(vectors), m, fallbacks)


def _child_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, 0x5EE1, index]).generate_state(1)[0])


def _rows_from_history(n: int, hist: PeelHistory) -> InterventionMatrix:
    rows = [0] * n
    for grp, vec in zip(hist.groups, hist.vectors):
        for v in grp:
            rows[v] = vec
    return InterventionMatrix(tuple(rows), hist.m)


def eps_separating_matrix(
    g: CostGraph,
    m: int,
    eps: float,
    delta: float,
    seed: int,
    oracle_mode: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> tuple[InterventionMatrix, PeelHistory]:
    """Greedy peeling design; with probability ``>= 1 - delta`` it is eps-separating.

    Each round peels a near-maximum-cost independent set (an exact one when
    ``oracle_mode``) from the remaining graph and assigns it the cheapest
    unused vector, zero vector first. The near-MIS routine is called with
    error ``eps**2`` measured against the original node count, so each peel
    has at least ``eps n`` nodes and at most ``eps**2 n**2`` internal edges.
    """
    check_design_params(m, eps)
    if not 0 < delta < 1:
        raise PreconditionError(f"delta must lie in (0, 1), got {delta}")
    if oracle_mode and g.node_count > DEFAULT_MIS_LIMIT:
        raise OracleLimitError(f"oracle mode supports at most {DEFAULT_MIS_LIMIT} nodes, graph has {g.node_count}")
    hist = _peel(g, m, eps, delta, seed, oracle_mode, budget)
    return _rows_from_history(g.node_count, hist), hist


def contract_supernodes(g: CostGraph, hist: PeelHistory) -> SupernodeSet:
    hist.check(g.node_count)
    return SupernodeSet(hist.groups, tuple(g.cost_of(grp) for grp in hist.groups))


def _greedy_antichain(count: int, width: int, shift: int, start_weight: int) -> list[int] | None:
    chosen: list[int] = []
    if count == 0:
        return chosen
    for w in range(start_weight, width + 1):
        for vec in weight_class(width, w):
            vec <<= shift
            if all(rows_strongly_separated(vec, c) for c in chosen):
                chosen.append(vec)
                if len(chosen) == count:
                    return chosen
    return None


def ss_matrix_complete(sn: SupernodeSet, m: int) -> InterventionMatrix:
    """Pairwise non-dominating rows (all weight >= 1) for the supernodes.

    For each ``r`` the ``r`` most expensive supernodes get the weight-1 rows
    of ``r`` dedicated columns; the rest, most expensive first, get rows over
    the other ``m - r`` columns in ascending weight from a starting layer,
    skipping any row comparable to one already chosen. The cheapest
    ``(r, starting layer)`` combination wins.
    """
    k = len(sn)
    order = sorted(range(k), key=lambda i: (-sn.costs[i], i))
    best: tuple[float, list[int]] | None = None
    for r in range(min(m, k), -1, -1):
        rest = k - r
        width = m - r
        if rest and width == 0:
            continue
        for w0 in range(1, max(width, 1) + 1):
            tail = _greedy_antichain(rest, width, r, w0)
            if tail is None:
                continue
            vecs = [1 << j for j in range(r)] + tail
            rows = [0] * k
            for idx, vec in zip(order, vecs):
                rows[idx] = vec
            cost = math.fsum(sn.costs[i] * rows[i].bit_count() for i in range(k))
            if best is None or cost < best[0] - 1e-9:
                best = (cost, rows)
            if not rest:
                break
    if best is None:
        widest = math.comb(m, m // 2) if m else 0
        raise PreconditionError(
            f"no antichain of {k} nonzero rows in {m} columns (largest is {widest}; deficit {k - widest})"
        )
    rows = best[1]
    for a in range(k):
        for b in range(a + 1, k):
            assert rows_strongly_separated(rows[a], rows[b]), "supernode rows must form an antichain"
    return InterventionMatrix(tuple(rows), m)


@dataclass(frozen=True)
class AncestralResult:
    matrix: InterventionMatrix
    history: PeelHistory
    supernodes: SupernodeSet
    supernode_rows: InterventionMatrix


def expand_supernode_rows(n: int, sn: SupernodeSet, rows: InterventionMatrix) -> InterventionMatrix:
    out = [0] * n
    for members, row in zip(sn.members, rows.rows):
        for v in members:
            out[v] = row
    return InterventionMatrix(tuple(out), rows.m)


def ancestral_pipeline(
    h: CostGraph,
    m: int,
    eps: float,
    delta: float,
    seed: int,
    oracle_mode: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> AncestralResult:
    _, hist = eps_separating_matrix(h, m, eps, delta, seed, oracle_mode=oracle_mode, budget=budget)
    sn = contract_supernodes(h, hist)
    sn_rows = ss_matrix_complete(sn, m)
    return AncestralResult(expand_supernode_rows(h.node_count, sn, sn_rows), hist, sn, sn_rows)


def ancestral_design(
    h: CostGraph,
    m: int,
    eps: float,
    delta: float,
    seed: int,
    oracle_mode: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> InterventionMatrix:
    """Eps-strongly separating matrix for a supergraph ``h`` of the causal skeleton."""
    return ancestral_pipeline(h, m, eps, delta, seed, oracle_mode, budget).matrix


# -- exact optimum ------------------------------------------------------------

def _independent_partitions(g: CostGraph, max_blocks: int) -> Iterator[list[int]]:
    """Partitions of the nodes into independent blocks, as lists of block masks."""
    n = g.node_count
    adj = g.adjacency
    blocks: list[int] = []

    def rec(v: int) -> Iterator[list[int]]:
        if v == n:
            yield list(blocks)
            return
        for b in range(len(blocks)):
            if not adj[v] & blocks[b]:
                blocks[b] |= 1 << v
                yield from rec(v + 1)
                blocks[b] &= ~(1 << v)
        if len(blocks) < max_blocks:
            blocks.append(1 << v)
            yield from rec(v + 1)
            blocks.pop()

    yield from rec(0)


def _exact_separating(g: CostGraph, m: int) -> tuple[InterventionMatrix, float]:
    n = g.node_count
    supply = list(by_weight(m))
    weights = [v.bit_count() for v in supply]
    best: tuple[float, tuple[str, ...], list[int]] | None = None
    for blocks in _independent_partitions(g, len(supply)):
        bc = [(sum(g.costs[v] for v in iter_bits(b)), b) for b in blocks]
        bc.sort(key=lambda t: (-t[0], (t[1] & -t[1])))
        cost = math.fsum(c * weights[i] for i, (c, _) in enumerate(bc))
        if best is not None and cost > best[0] + 1e-9:
            continue
        rows = [0] * n
        for i, (_, b) in enumerate(bc):
            for v in iter_bits(b):
                rows[v] = supply[i]
        key = tuple(format_row(r, m) for r in rows)
        if best is None or cost < best[0] - 1e-9 or (abs(cost - best[0]) <= 1e-9 and key < best[1]):
            best = (cost, key, rows)
    if best is None:
        raise PreconditionError(f"no separating matrix with m = {m} exists: the graph needs more than 2^{m} colours")
    L = InterventionMatrix(tuple(best[2]), m)
    return L, matrix_cost(L, g)


def _exact_strong(g: CostGraph, m: int, node_budget: int) -> tuple[InterventionMatrix, float]:
    n = g.node_count
    adj = g.adjacency
    order = sorted(range(n), key=lambda v: (-g.costs[v], v))
    lb = [g.costs[v] * (1 if adj[v] else 0) for v in order]
    suffix = [0.0] * (n + 1)
    for i in range(n - 1, -1, -1):
        suffix[i] = suffix[i + 1] + lb[i]
    vectors = list(by_weight(m))
    rows = [0] * n
    assigned = 0
    best_cost = math.inf
    best_rows: list[int] | None = None
    visited = 0

    def rec(i: int, used: int, acc: float) -> None:
        nonlocal best_cost, best_rows, visited, assigned
        visited += 1
        if visited > node_budget:
            raise OracleLimitError(f"exact strongly separating search exceeded {node_budget} nodes")
        if acc + suffix[i] >= best_cost - 1e-9:
            return
        if i == n:
            best_cost, best_rows = acc, list(rows)
            return
        v = order[i]
        nbrs = adj[v] & assigned
        for vec in vectors:
            fresh = vec >> used
            # untouched columns are interchangeable: new columns must be taken lowest first
            if fresh & (fresh + 1):
                continue
            if any(not rows_strongly_separated(vec, rows[u]) for u in iter_bits(nbrs)):
                continue
            rows[v] = vec
            assigned |= 1 << v
            rec(i + 1, max(used, vec.bit_length()), acc + g.costs[v] * vec.bit_count())
            assigned &= ~(1 << v)
        rows[v] = 0

    rec(0, 0, 0.0)
    if best_rows is None:
        raise PreconditionError(f"no strongly separating matrix with m = {m} exists for this graph")
    L = InterventionMatrix(tuple(best_rows), m)
    return L, matrix_cost(L, g)


def exact_min_separating(
    g: CostGraph,
    m: int,
    mode: SeparationMode | str = SeparationMode.SEPARATING,
    limit: int = EXACT_LIMIT,
    node_budget: int = EXACT_NODE_BUDGET,
) -> tuple[InterventionMatrix, float]:
    """Minimum-cost fully (strongly) separating matrix by exhaustive pruned search.

    Raises ``OracleLimitError`` for graphs over ``limit`` nodes or searches
    over ``node_budget`` nodes, and ``PreconditionError`` when no valid
    matrix exists with ``m`` columns.
    """
    mode = SeparationMode.parse(mode)
    if g.node_count > limit:
        raise OracleLimitError(f"exact oracle limited to {limit} nodes, graph has {g.node_count}")
    if mode is SeparationMode.SEPARATING:
        return _exact_separating(g, m)
    return _exact_strong(g, m, node_budget)
