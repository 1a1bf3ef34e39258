"""Near-MIS and designs for bounded-degree graphs that split into small parts.

The partition comes from a deterministic BFS chunking partitioner; callers
check its reported cross-edge count against the hyperfinite requirement
``2 |cross edges| <= eps n`` before using it.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass

from .errors import PreconditionError
from .graph import CostGraph, Edge, InterventionMatrix, SeparationMode
from .nearmis import exact_mis, top_cost_nodes
from .sepmatrix import _peel, _rows_from_history, check_design_params, contract_supernodes, expand_supernode_rows, ss_matrix_complete

DEFAULT_PART_LIMIT = 64


@dataclass(frozen=True)
class GraphPartition:
    parts: tuple[frozenset[int], ...]
    max_part_size: int
    cross_edges: tuple[Edge, ...]

    def to_json(self) -> str:
        return json.dumps(
            {
                "max_part_size": self.max_part_size,
                "parts": [sorted(p) for p in self.parts],
                "cross_edges": [list(e) for e in self.cross_edges],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "GraphPartition":
        data = json.loads(text)
        return cls(
            tuple(frozenset(p) for p in data["parts"]),
            int(data["max_part_size"]),
            tuple((int(u), int(v)) for u, v in data["cross_edges"]),
        )


def bfs_partitioner(g: CostGraph, k: int) -> GraphPartition:
    """Chunk the graph into connected parts of at most ``k`` nodes.

    Each part is grown by BFS (neighbours in ascending order) from the
    lowest-index unassigned node and closed once it holds ``k`` nodes.
    """
    if k < 1:
        raise PreconditionError(f"part size k must be at least 1, got {k}")
    n = g.node_count
    owner = [-1] * n
    parts: list[frozenset[int]] = []
    for root in range(n):
        if owner[root] != -1:
            continue
        pid = len(parts)
        members = [root]
        owner[root] = pid
        queue = deque([root])
        while queue and len(members) < k:
            u = queue.popleft()
            for w in sorted(g.neighbors(u)):
                if owner[w] == -1:
                    owner[w] = pid
                    members.append(w)
                    queue.append(w)
                    if len(members) == k:
                        break
        parts.append(frozenset(members))
    cross = tuple(e for e in g.edges if owner[e[0]] != owner[e[1]])
    return GraphPartition(tuple(parts), k, cross)


def find_partition(g: CostGraph, eps: float) -> GraphPartition:
    """Finest BFS chunking whose cross edges satisfy ``2 |cross| <= eps n``."""
    n = g.node_count
    for k in range(1, max(n, 1) + 1):
        part = bfs_partitioner(g, k)
        if 2 * len(part.cross_edges) <= eps * n + 1e-9:
            return part
    raise AssertionError("a single-part chunking always has zero cross edges")


@dataclass(frozen=True)
class HyperfiniteTrace:
    """Intermediate sets of one hyperfinite near-MIS run."""

    part_mis: tuple[frozenset[int], ...]
    boundary: frozenset[int]
    core: frozenset[int]
    padding: frozenset[int]

    @property
    def nodes(self) -> frozenset[int]:
        return self.core | self.padding


def _check_partition(g: CostGraph, part: GraphPartition) -> None:
    owner: dict[int, int] = {}
    for i, p in enumerate(part.parts):
        for v in p:
            if v in owner:
                raise PreconditionError(f"node {v} appears in two parts")
            owner[v] = i
    if len(owner) != g.node_count or any(not 0 <= v < g.node_count for v in owner):
        raise PreconditionError("partition does not cover the graph's nodes exactly")
    cross = tuple(e for e in g.edges if owner[e[0]] != owner[e[1]])
    if set(cross) != set(part.cross_edges):
        raise PreconditionError("partition cross_edges do not match the graph")


def hyperfinite_trace(g: CostGraph, part: GraphPartition, eps: float, part_limit: int = DEFAULT_PART_LIMIT) -> HyperfiniteTrace:
    _check_partition(g, part)
    n = g.node_count
    if 2 * len(part.cross_edges) > eps * n + 1e-9:
        raise PreconditionError(
            f"partition has {len(part.cross_edges)} cross edges but at most eps*n/2 = {eps * n / 2:.3f} are allowed; "
            "use a larger eps or a coarser partition"
        )
    part_mis = []
    for p in part.parts:
        sub, labels = g.induced_subgraph(p)
        part_mis.append(frozenset(labels[i] for i in exact_mis(sub, limit=part_limit)))
    boundary = frozenset(v for e in part.cross_edges for v in e)
    assert len(boundary) <= 2 * len(part.cross_edges)
    core = frozenset().union(*part_mis) - boundary
    padding = frozenset(top_cost_nodes(g, int(eps * n + 1e-9), exclude=core))
    return HyperfiniteTrace(tuple(part_mis), boundary, core, padding)


def hyperfinite_near_mis(g: CostGraph, part: GraphPartition, eps: float, part_limit: int = DEFAULT_PART_LIMIT) -> frozenset[int]:
    """Per-part exact MIS, minus boundary nodes, plus the ``floor(eps n)`` costliest others.

    The result costs at least a maximum-cost independent set of ``g`` and has
    at most ``eps * n * max_degree`` internal edges.
    """
    return hyperfinite_trace(g, part, eps, part_limit).nodes


def hyperfinite_design(
    g: CostGraph,
    m: int,
    eps: float,
    delta: float,
    mode: SeparationMode | str,
    k: int,
    part_limit: int = DEFAULT_PART_LIMIT,
) -> InterventionMatrix:
    """Greedy peeling with the hyperfinite near-MIS at error ``eps / n`` per peel.

    ``delta`` is accepted for signature parity; the BFS partitioner is
    deterministic, so there is no failure probability to spend.
    """
    mode = SeparationMode.parse(mode)
    check_design_params(m, eps)
    n = g.node_count
    step_eps = eps / n if n else eps

    def finder(sub: CostGraph, step: int) -> frozenset[int]:
        return hyperfinite_near_mis(sub, bfs_partitioner(sub, k), step_eps, part_limit)

    hist = _peel(g, m, eps, delta, 0, False, 0, finder=finder)
    if mode is SeparationMode.SEPARATING:
        return _rows_from_history(n, hist)
    sn = contract_supernodes(g, hist)
    return expand_supernode_rows(n, sn, ss_matrix_complete(sn, m))
