"""Node-weighted graphs, intervention matrices and separation predicates.

Nodes are the integers ``0..n-1``. Rows of an intervention matrix are stored
as Python ints with column ``j`` at bit ``j``; the textual row lists column 0
first, so ``"1100"`` is the int ``0b0011``. Ascending integer order inside one
weight class is then colexicographic order on column sets.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .errors import PreconditionError

Edge = tuple[int, int]


class SeparationMode(str, enum.Enum):
    SEPARATING = "sep"
    STRONGLY_SEPARATING = "strong"

    @classmethod
    def parse(cls, value: "str | SeparationMode") -> "SeparationMode":
        if isinstance(value, cls):
            return value
        aliases = {
            "sep": cls.SEPARATING,
            "separating": cls.SEPARATING,
            "strong": cls.STRONGLY_SEPARATING,
            "ss": cls.STRONGLY_SEPARATING,
            "anc": cls.STRONGLY_SEPARATING,
            "strongly_separating": cls.STRONGLY_SEPARATING,
        }
        try:
            return aliases[str(value).lower()]
        except KeyError:
            raise PreconditionError(f"unknown separation mode {value!r}") from None


def _norm_edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class CostGraph:
    """Undirected graph with a cost in ``[1, W]`` on every node."""

    costs: tuple[float, ...]
    edges: tuple[Edge, ...] = ()
    _adj: tuple[int, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        costs = tuple(float(c) for c in self.costs)
        n = len(costs)
        for i, c in enumerate(costs):
            if not (c >= 1.0) or math.isinf(c):
                raise PreconditionError(f"node {i} has cost {c}; costs must lie in [1, W]")
        seen: set[Edge] = set()
        for u, v in self.edges:
            if u == v:
                raise PreconditionError(f"self-loop on node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise PreconditionError(f"edge ({u}, {v}) has an endpoint outside [0, {n})")
            e = _norm_edge(int(u), int(v))
            if e in seen:
                raise PreconditionError(f"duplicate edge {e}")
            seen.add(e)
        adj = [0] * n
        for u, v in seen:
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        object.__setattr__(self, "costs", costs)
        object.__setattr__(self, "edges", tuple(sorted(seen)))
        object.__setattr__(self, "_adj", tuple(adj))

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], costs: Sequence[float] | None = None) -> "CostGraph":
        if costs is None:
            costs = [1.0] * n
        if len(costs) != n:
            raise PreconditionError(f"expected {n} costs, got {len(costs)}")
        return cls(tuple(costs), tuple((int(u), int(v)) for u, v in edges))

    @property
    def node_count(self) -> int:
        return len(self.costs)

    n = node_count

    @property
    def max_cost(self) -> float:
        """The cost bound W (1 for the empty graph)."""
        return max(self.costs, default=1.0)

    @property
    def max_degree(self) -> int:
        return max((a.bit_count() for a in self._adj), default=0)

    @property
    def adjacency(self) -> tuple[int, ...]:
        """Neighbourhood of every node as a bitmask."""
        return self._adj

    def neighbors(self, v: int) -> frozenset[int]:
        return frozenset(iter_bits(self._adj[v]))

    def degree(self, v: int) -> int:
        return self._adj[v].bit_count()

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self._adj[u] >> v & 1)

    def cost_of(self, nodes: Iterable[int]) -> float:
        return math.fsum(self.costs[v] for v in nodes)

    def total_cost(self) -> float:
        return math.fsum(self.costs)

    def induced_subgraph(self, nodes: Iterable[int]) -> tuple["CostGraph", list[int]]:
        """Return the induced subgraph relabelled to ``0..k-1`` and the old labels."""
        keep = sorted(set(nodes))
        index = {v: i for i, v in enumerate(keep)}
        sub_edges = [(index[u], index[v]) for u, v in self.edges if u in index and v in index]
        return CostGraph(tuple(self.costs[v] for v in keep), tuple(sub_edges)), keep


@dataclass(frozen=True)
class InterventionMatrix:
    """An ``n x m`` 0/1 matrix; row ``v`` lists the interventions containing ``v``."""

    rows: tuple[int, ...]
    m: int

    def __post_init__(self) -> None:
        if self.m < 0:
            raise PreconditionError("m must be non-negative")
        rows = tuple(int(r) for r in self.rows)
        for i, r in enumerate(rows):
            if r < 0 or r >> self.m:
                raise PreconditionError(f"row {i} does not fit in {self.m} columns")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def zeros(cls, n: int, m: int) -> "InterventionMatrix":
        return cls((0,) * n, m)

    @classmethod
    def from_strings(cls, lines: Sequence[str]) -> "InterventionMatrix":
        if not lines:
            return cls((), 0)
        m = len(lines[0])
        for line in lines:
            if len(line) != m or set(line) - {"0", "1"}:
                raise PreconditionError(f"bad matrix row {line!r}")
        return cls(tuple(_parse_row(line) for line in lines), m)

    @property
    def n(self) -> int:
        return len(self.rows)

    def row_string(self, v: int) -> str:
        return format_row(self.rows[v], self.m)

    def entry(self, v: int, j: int) -> int:
        return self.rows[v] >> j & 1

    def weight(self, v: int) -> int:
        return self.rows[v].bit_count()

    def column(self, j: int) -> frozenset[int]:
        """Support of column ``j``: the intervention set S_j."""
        if not 0 <= j < self.m:
            raise IndexError(j)
        bit = 1 << j
        return frozenset(v for v, r in enumerate(self.rows) if r & bit)

    def columns(self) -> list[frozenset[int]]:
        return [self.column(j) for j in range(self.m)]

    def permute_columns(self, perm: Sequence[int]) -> "InterventionMatrix":
        """New matrix whose column ``j`` is this matrix's column ``perm[j]``."""
        out = []
        for v in range(self.n):
            r = 0
            for j, src in enumerate(perm):
                r |= self.entry(v, src) << j
            out.append(r)
        return InterventionMatrix(tuple(out), self.m)


def format_row(row: int, m: int) -> str:
    return format(row, f"0{m}b")[::-1] if m else ""


def _parse_row(text: str) -> int:
    return int(text[::-1], 2) if text else 0


def iter_bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def to_mask(nodes: Iterable[int]) -> int:
    mask = 0
    for v in nodes:
        mask |= 1 << v
    return mask


def _check_dims(L: InterventionMatrix, g: CostGraph) -> None:
    if L.n != g.node_count:
        raise PreconditionError(f"matrix has {L.n} rows but graph has {g.node_count} nodes")


def matrix_cost(L: InterventionMatrix, g: CostGraph) -> float:
    """Total intervention cost: sum over nodes of cost times row weight."""
    _check_dims(L, g)
    return math.fsum(c * r.bit_count() for c, r in zip(g.costs, L.rows))


def rows_separated(a: int, b: int) -> bool:
    return a != b


def rows_strongly_separated(a: int, b: int) -> bool:
    """True iff neither row's support contains the other's."""
    return bool(a & ~b) and bool(b & ~a)


def _check_pair(L: InterventionMatrix, u: int, v: int) -> None:
    if u == v:
        raise PreconditionError(f"a node is never separated from itself (u = v = {u})")
    for x in (u, v):
        if not 0 <= x < L.n:
            raise PreconditionError(f"node {x} outside [0, {L.n})")


def is_separated(L: InterventionMatrix, u: int, v: int) -> bool:
    _check_pair(L, u, v)
    return rows_separated(L.rows[u], L.rows[v])


def is_strongly_separated(L: InterventionMatrix, u: int, v: int) -> bool:
    _check_pair(L, u, v)
    return rows_strongly_separated(L.rows[u], L.rows[v])


def unseparated_edges(g: CostGraph, L: InterventionMatrix, mode: SeparationMode | str = SeparationMode.SEPARATING) -> list[Edge]:
    """Edges of ``g`` that ``L`` fails to (strongly) separate, in edge order."""
    _check_dims(L, g)
    mode = SeparationMode.parse(mode)
    test = rows_separated if mode is SeparationMode.SEPARATING else rows_strongly_separated
    rows = L.rows
    return [(u, v) for u, v in g.edges if not test(rows[u], rows[v])]


def eps_budget(eps: float, n: int) -> int:
    """Integer threshold ``ceil(eps * n^2)``; eps-separating means count < threshold."""
    return math.ceil(eps * n * n)


def is_eps_separating(g: CostGraph, L: InterventionMatrix, eps: float, mode: SeparationMode | str = SeparationMode.SEPARATING) -> bool:
    return len(unseparated_edges(g, L, mode)) < eps_budget(eps, g.node_count)


def closed_non_neighborhood(g: CostGraph, nodes: Iterable[int]) -> frozenset[int]:
    """Nodes with no edge to any node of ``nodes``."""
    return frozenset(iter_bits(non_neighborhood_mask(g, to_mask(nodes))))


def non_neighborhood_mask(g: CostGraph, mask: int) -> int:
    covered = 0
    for u in iter_bits(mask):
        covered |= g.adjacency[u]
    return ((1 << g.node_count) - 1) & ~covered


def induced_edge_count(g: CostGraph, nodes: Iterable[int]) -> int:
    return induced_edges_mask(g, to_mask(nodes))


def induced_edges_mask(g: CostGraph, mask: int) -> int:
    adj = g.adjacency
    return sum((adj[u] & mask).bit_count() for u in iter_bits(mask)) // 2


# -- text formats -----------------------------------------------------------

def format_cost(c: float) -> str:
    return str(int(c)) if c.is_integer() and abs(c) < 2**53 else repr(c)


def dumps_graph(g: CostGraph) -> str:
    lines = [f"graph {g.node_count} {len(g.edges)}"]
    lines += [f"node {i} {format_cost(c)}" for i, c in enumerate(g.costs)]
    lines += [f"edge {u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def loads_graph(text: str) -> CostGraph:
    lines = [ln.split() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines or lines[0][0] != "graph" or len(lines[0]) != 3:
        raise PreconditionError("graph file must start with 'graph <n> <edge_count>'")
    n, e = int(lines[0][1]), int(lines[0][2])
    costs: list[float | None] = [None] * n
    edges: list[Edge] = []
    for parts in lines[1:]:
        if parts[0] == "node" and len(parts) == 3:
            i = int(parts[1])
            if not 0 <= i < n:
                raise PreconditionError(f"node index {i} outside [0, {n})")
            costs[i] = float(parts[2])
        elif parts[0] == "edge" and len(parts) == 3:
            edges.append((int(parts[1]), int(parts[2])))
        else:
            raise PreconditionError(f"unrecognised graph line: {' '.join(parts)!r}")
    missing = [i for i, c in enumerate(costs) if c is None]
    if missing:
        raise PreconditionError(f"nodes without a cost line: {missing[:5]}")
    if len(edges) != e:
        raise PreconditionError(f"header declares {e} edges but file lists {len(edges)}")
    return CostGraph(tuple(costs), tuple(edges))  # type: ignore[arg-type]


def dumps_matrix(L: InterventionMatrix) -> str:
    lines = [f"matrix {L.n} {L.m}"] + [L.row_string(v) for v in range(L.n)]
    return "\n".join(lines) + "\n"


def loads_matrix(text: str) -> InterventionMatrix:
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    head = lines[0].split() if lines else []
    if len(head) != 3 or head[0] != "matrix":
        raise PreconditionError("matrix file must start with 'matrix <n> <m>'")
    n, m = int(head[1]), int(head[2])
    body = lines[1:]
    if m == 0:
        body = [""] * n if not body else body
    if len(body) != n:
        raise PreconditionError(f"header declares {n} rows but file has {len(body)}")
    for row in body:
        if len(row) != m or set(row) - {"0", "1"}:
            raise PreconditionError(f"bad matrix row {row!r} (expected {m} characters of 0/1)")
    return InterventionMatrix(tuple(_parse_row(r) for r in body), m)
