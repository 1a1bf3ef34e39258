"""Semi-Markovian causal models, an exact CI oracle, and design-driven recovery.

A model is an observable DAG plus latent variables, each latent feeding
exactly two observables. The oracle answers marginal independence under a
hard intervention: it cuts every edge into the intervened nodes (latent edges
included) and reports dependence iff the two nodes still share an ancestor.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from graphlib import CycleError, TopologicalSorter
from typing import Iterable

import numpy as np

from .errors import PreconditionError
from .graph import CostGraph, Edge, InterventionMatrix, rows_separated, rows_strongly_separated

Arc = tuple[int, int]


@dataclass(frozen=True)
class Scm:
    n: int
    dag: tuple[Arc, ...]
    latent_pairs: tuple[Edge, ...] = ()

    def __post_init__(self) -> None:
        if self.n < 0:
            raise PreconditionError(f"node count must be non-negative, got {self.n}")
        arcs = tuple(sorted(set((int(u), int(v)) for u, v in self.dag)))
        for u, v in arcs:
            if not (0 <= u < self.n and 0 <= v < self.n) or u == v:
                raise PreconditionError(f"invalid arc ({u}, {v}) for n = {self.n}")
        if len({frozenset(a) for a in arcs}) != len(arcs):
            raise PreconditionError("dag has both directions of some pair")
        ts = TopologicalSorter({v: set() for v in range(self.n)})
        for u, v in arcs:
            ts.add(v, u)
        try:
            ts.prepare()
        except CycleError as exc:
            raise PreconditionError(f"observable graph has a cycle: {exc.args[1]}") from None
        pairs = []
        for u, v in self.latent_pairs:
            u, v = int(u), int(v)
            if u == v:
                raise PreconditionError(f"latent on a single node {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise PreconditionError(f"latent pair ({u}, {v}) out of range")
            pairs.append((min(u, v), max(u, v)))
        object.__setattr__(self, "dag", arcs)
        object.__setattr__(self, "latent_pairs", tuple(sorted(set(pairs))))

    def skeleton_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted((min(u, v), max(u, v)) for u, v in self.dag))

    def skeleton(self, costs=None) -> CostGraph:
        return CostGraph.from_edges(self.n, self.skeleton_edges(), costs)

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "dag": [list(a) for a in self.dag], "latents": [list(p) for p in self.latent_pairs]})

    @classmethod
    def from_json(cls, text: str) -> "Scm":
        data = json.loads(text)
        try:
            return cls(int(data["n"]), tuple(map(tuple, data["dag"])), tuple(map(tuple, data.get("latents", []))))
        except (KeyError, TypeError, ValueError) as exc:
            raise PreconditionError(f"malformed scm JSON: {exc}") from None


def random_scm(n: int, edge_prob: float, latent_prob: float, seed: int) -> Scm:
    """Arcs point forward along a seeded random order; each pair gets a latent independently."""
    for name, p in (("edge_prob", edge_prob), ("latent_prob", latent_prob)):
        if not 0 <= p <= 1:
            raise PreconditionError(f"{name} must lie in [0, 1], got {p}")
    rng = np.random.default_rng(seed)
    order = [int(x) for x in rng.permutation(n)]
    arcs = []
    latents = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                arcs.append((order[i], order[j]))
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < latent_prob:
                latents.append((u, v))
    return Scm(n, tuple(arcs), tuple(latents))


def _ancestors(parents: list[list], start) -> set:
    seen = {start}
    stack = [start]
    while stack:
        x = stack.pop()
        for p in parents[x] if isinstance(x, int) else ():
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def ci_oracle(scm: Scm, u: int, v: int, do_set: Iterable[int] = ()) -> bool:
    """True iff ``u`` and ``v`` are independent under ``do(do_set)``."""
    if u == v:
        raise PreconditionError("ci_oracle needs two distinct nodes")
    for x in (u, v):
        if not 0 <= x < scm.n:
            raise PreconditionError(f"node {x} out of range for n = {scm.n}")
    cut = set(do_set)
    parents: list[list] = [[] for _ in range(scm.n)]
    for a, b in scm.dag:
        if b not in cut:
            parents[b].append(a)
    # latent k is the hashable ("L", k); latents have no parents
    for k, (a, b) in enumerate(scm.latent_pairs):
        for child in (a, b):
            if child not in cut:
                parents[child].append(("L", k))
    return not (_ancestors(parents, u) & _ancestors(parents, v))


def true_ancestral(scm: Scm) -> frozenset[Arc]:
    children: list[list[int]] = [[] for _ in range(scm.n)]
    for a, b in scm.dag:
        children[a].append(b)
    pairs = set()
    for s in range(scm.n):
        stack = list(children[s])
        seen: set[int] = set()
        while stack:
            x = stack.pop()
            if x in seen:
                continue
            seen.add(x)
            pairs.add((s, x))
            stack.extend(children[x])
    return frozenset(pairs)


@dataclass
class RecoveryReport:
    oriented: list[Arc] = field(default_factory=list)
    ancestral: list[Arc] = field(default_factory=list)
    unresolved: list[Edge] = field(default_factory=list)
    error_count: int = 0
    query_count: int = 0

    def to_json(self) -> str:
        return json.dumps(
            {
                "oriented": [list(a) for a in self.oriented],
                "ancestral": [list(a) for a in self.ancestral],
                "unresolved": [list(e) for e in self.unresolved],
                "error_count": self.error_count,
                "query_count": self.query_count,
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "RecoveryReport":
        d = json.loads(text)
        return cls(
            [tuple(a) for a in d["oriented"]],
            [tuple(a) for a in d["ancestral"]],
            [tuple(e) for e in d["unresolved"]],
            int(d["error_count"]),
            int(d["query_count"]),
        )


class _CountingOracle:
    def __init__(self, scm: Scm):
        self.scm = scm
        self.calls = 0

    def dependent(self, u: int, v: int, do_set: frozenset[int]) -> bool:
        self.calls += 1
        return not ci_oracle(self.scm, u, v, do_set)


def _one_sided_column(L: InterventionMatrix, a: int, b: int) -> int | None:
    """Lowest column containing ``a`` but not ``b``."""
    diff = L.rows[a] & ~L.rows[b]
    return (diff & -diff).bit_length() - 1 if diff else None


def _check_sizes(g: CostGraph, scm: Scm, L: InterventionMatrix) -> None:
    if g.node_count != scm.n or L.n != scm.n:
        raise PreconditionError(f"size mismatch: graph {g.node_count}, scm {scm.n}, matrix {L.n} nodes")


def recover_directions(g: CostGraph, scm: Scm, L: InterventionMatrix) -> RecoveryReport:
    """Orient every separated skeleton edge with one interventional CI test.

    For the lowest column ``S`` separating edge ``{u, v}`` with ``u`` in ``S``:
    dependence under ``do(S)`` means ``u -> v``, independence means ``v -> u``.
    """
    _check_sizes(g, scm, L)
    if set(g.edges) != set(scm.skeleton_edges()):
        raise PreconditionError("graph edges do not match the scm's observable skeleton")
    truth = set(scm.dag)
    oracle = _CountingOracle(scm)
    report = RecoveryReport()
    for u, v in g.edges:
        if not rows_separated(L.rows[u], L.rows[v]):
            report.unresolved.append((u, v))
            continue
        cu, cv = _one_sided_column(L, u, v), _one_sided_column(L, v, u)
        # use whichever one-sided column comes first; a in S, b outside
        a, b, col = (u, v, cu) if cv is None or (cu is not None and cu < cv) else (v, u, cv)
        arc = (a, b) if oracle.dependent(a, b, L.column(col)) else (b, a)
        report.oriented.append(arc)
        report.error_count += arc not in truth
    report.query_count = oracle.calls
    return report


def recover_ancestral(h: CostGraph, scm: Scm, L: InterventionMatrix) -> RecoveryReport:
    """Recover ancestral relations on the strongly separated pairs of supergraph ``h``.

    Each strongly separated pair gets two tests, ``do(S_i)`` with only ``u``
    intervened and ``do(S_j)`` with only ``v``. A dependence proves the
    intervened node is an ancestor of the other. Relations whose directed path
    runs through an intervened node are filled in by transitive closure of the
    proven ones, restricted to resolved pairs of ``h``.
    """
    _check_sizes(h, scm, L)
    missing = set(scm.skeleton_edges()) - set(h.edges)
    if missing:
        raise PreconditionError(f"supergraph misses {len(missing)} skeleton edge(s), e.g. {min(missing)}")
    oracle = _CountingOracle(scm)
    report = RecoveryReport()
    resolved: set[Edge] = set()
    proven: set[Arc] = set()
    for u, v in h.edges:
        if not rows_strongly_separated(L.rows[u], L.rows[v]):
            report.unresolved.append((u, v))
            continue
        resolved.add((u, v))
        si, sj = L.column(_one_sided_column(L, u, v)), L.column(_one_sided_column(L, v, u))
        if oracle.dependent(u, v, si):
            proven.add((u, v))
        if oracle.dependent(u, v, sj):
            proven.add((v, u))
    closure = true_ancestral(Scm(scm.n, tuple(proven))) if proven else frozenset()
    report.ancestral = sorted(a for a in closure if (min(a), max(a)) in resolved)
    truth = {a for a in true_ancestral(scm) if (min(a), max(a)) in resolved}
    report.error_count = len(truth.symmetric_difference(report.ancestral))
    report.query_count = oracle.calls
    return report


def answer_sequence(scm: Scm, L: InterventionMatrix, pairs: Iterable[Edge]) -> tuple[bool, ...]:
    """Oracle answers for every (pair, column) test the design can run."""
    cols = L.columns()
    return tuple(ci_oracle(scm, u, v, col) for u, v in pairs for col in cols)


def necessity_witness(L: InterventionMatrix, u: int, v: int) -> tuple[Scm, Scm]:
    """Two models the one-sided design cannot tell apart on the pair ``{u, v}``.

    When ``v`` is never intervened, the arc ``v -> u`` and a latent confounder
    of ``u`` and ``v`` give identical answers on every column.
    """
    if rows_strongly_separated(L.rows[u], L.rows[v]):
        raise PreconditionError(f"pair ({u}, {v}) is strongly separated; no witness exists")
    if L.rows[v] & ~L.rows[u]:
        u, v = v, u
    return Scm(L.n, ((v, u),)), Scm(L.n, (), ((u, v),))
