"""Near-maximum-cost independent sets via cost-bucketed sampling.

``independent_set_search`` is the sampling tester: it guesses small sets of
sampled nodes from a subset of cost buckets, keeps the nodes not adjacent to
the guess, and greedily retains low-degree nodes per bucket under a degree
budget. ``near_mis`` sweeps the target density ``rho`` downward until the
tester's output, padded with a few expensive nodes, is at least as costly as
the top-``sqrt(eps) n`` nodes. ``exact_mis`` is the exact oracle.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterator, Sequence

import numpy as np

from .errors import BudgetExceeded, OracleLimitError, PreconditionError
from .graph import CostGraph, induced_edges_mask, iter_bits, to_mask

DEFAULT_BUDGET = 10**6
DEFAULT_MIS_LIMIT = 24


@dataclass(frozen=True)
class CostBuckets:
    """Partition of the nodes by cost into ``[(1+gamma)^(i-1), (1+gamma)^i)``."""

    gamma: float
    buckets: tuple[frozenset[int], ...]

    @property
    def k(self) -> int:
        return len(self.buckets)


def _bucket_index(c: float, base: float) -> int:
    i = int(math.floor(math.log(c) / math.log(base))) + 1
    while i > 1 and base ** (i - 1) > c:
        i -= 1
    while c >= base**i:
        i += 1
    return i


def bucket_by_cost(g: CostGraph, gamma: float) -> CostBuckets:
    if not gamma > 0:
        raise PreconditionError(f"gamma must be positive, got {gamma}")
    base = 1.0 + gamma
    W = g.max_cost
    k = math.ceil(math.log(W) / math.log(base) - 1e-12) + 1
    index = [_bucket_index(c, base) for c in g.costs]
    k = max([k, *index])
    members: list[list[int]] = [[] for _ in range(k)]
    for v, i in enumerate(index):
        members[i - 1].append(v)
    return CostBuckets(gamma, tuple(frozenset(b) for b in members))


@dataclass(frozen=True)
class IsSearchConfig:
    rho: float
    gamma: float
    eps: float
    delta: float
    seed: int = 0
    enumeration_budget: int = DEFAULT_BUDGET

    def __post_init__(self) -> None:
        if not 0 < self.rho <= 1:
            raise PreconditionError(f"rho must lie in (0, 1], got {self.rho}")
        if not 0 < self.gamma < 1:
            raise PreconditionError(f"gamma must lie in (0, 1), got {self.gamma}")
        if not 0 < self.eps < 1:
            raise PreconditionError(f"eps must lie in (0, 1), got {self.eps}")
        if not 0 < self.delta < 1:
            raise PreconditionError(f"delta must lie in (0, 1), got {self.delta}")
        if self.enumeration_budget < 1:
            raise PreconditionError("enumeration_budget must be at least 1")


def sample_size(bucket_size: int, k: int, cfg: IsSearchConfig) -> int:
    """``min(|V_i|, ceil(8k / (eps gamma rho) * ln(4k / (eps delta))))``."""
    bound = 8 * k / (cfg.eps * cfg.gamma * cfg.rho) * math.log(4 * k / (cfg.eps * cfg.delta))
    return min(bucket_size, math.ceil(bound))


class _Tester:
    """One invocation of the sampling tester; holds the per-call state."""

    def __init__(self, g: CostGraph, cfg: IsSearchConfig, n_ref: int):
        self.g = g
        self.cfg = cfg
        self.costs = g.costs
        self.adj = g.adjacency
        buckets = bucket_by_cost(g, cfg.gamma)
        self.k = buckets.k
        self.degree_budget = cfg.eps * n_ref * n_ref / self.k
        self.threshold = cfg.rho * (1 - 3 * cfg.gamma) * g.total_cost()
        # pruning compares plain float sums; keep a little slack below the threshold
        self.prune_below = self.threshold * (1 - 1e-9)
        self.examined = 0

        rng = np.random.default_rng(cfg.seed)
        self.bucket_mask: dict[int, int] = {}
        self.sampled: dict[int, list[int]] = {}
        self.guess_size: dict[int, int] = {}
        for i, members in enumerate(buckets.buckets):
            if not members:
                continue
            nodes = sorted(members)
            t = sample_size(len(nodes), self.k, cfg)
            draws = rng.choice(len(nodes), size=t, replace=True)
            self.bucket_mask[i] = to_mask(nodes)
            self.sampled[i] = sorted({nodes[d] for d in draws})
            self.guess_size[i] = math.ceil(cfg.gamma * cfg.rho * t / 2)
        # buckets whose guess is larger than their sample are skipped
        self.eligible = [i for i in self.bucket_mask if self.guess_size[i] <= len(self.sampled[i])]
        self.bucket_cost = {i: self.mask_cost(self.bucket_mask[i]) for i in self.eligible}
        self.forced = {i: self._forced_neighbours(i) for i in self.eligible}

    def _forced_neighbours(self, i: int) -> int:
        """Nodes adjacent to every admissible guess from bucket ``i``."""
        sampled, s = self.sampled[i], self.guess_size[i]
        out = 0
        for x in range(self.g.node_count):
            missed = sum(1 for u in sampled if not self.adj[u] >> x & 1)
            if missed < s:
                out |= 1 << x
        return out

    def mask_cost(self, mask: int) -> float:
        costs = self.costs
        return sum(costs[v] for v in iter_bits(mask))

    def bucket_subsets(self) -> Iterator[tuple[int, ...]]:
        """Subsets of eligible buckets by size then lexicographically, cost-pruned."""
        elig = self.eligible
        cost = [self.bucket_cost[i] for i in elig]
        for size in range(1, len(elig) + 1):
            yield from self._combos(elig, cost, size, 0, (), 0, 0)

    def _combos(self, elig, cost, size, start, chosen, union, removed):
        need = size - len(chosen)
        if need == 0:
            yield chosen
            return
        thr = self.prune_below
        for pos in range(start, len(elig) - need + 1):
            i = elig[pos]
            u2 = union | self.bucket_mask[i]
            r2 = removed | self.forced[i]
            rest = sum(heapq.nlargest(need - 1, cost[pos + 1 :])) if need > 1 else 0.0
            if self.mask_cost(u2 & ~r2) + rest < thr:
                continue
            yield from self._combos(elig, cost, size, pos + 1, chosen + (i,), u2, r2)

    def search(self) -> frozenset[int] | None:
        for subset in self.bucket_subsets():
            union = 0
            for i in subset:
                union |= self.bucket_mask[i]
            found = self._guess(subset, 0, union, 0)
            if found is not None:
                return found
        return None

    def _guess(self, subset: Sequence[int], depth: int, union: int, removed: int) -> frozenset[int] | None:
        # every completion keeps Z inside union minus the neighbours seen so far
        if self.mask_cost(union & ~removed) < self.prune_below:
            return None
        if depth == len(subset):
            self.examined += 1
            if self.examined > self.cfg.enumeration_budget:
                raise BudgetExceeded(self.examined - 1)
            return self._evaluate(subset, union & ~removed)
        i = subset[depth]
        adj = self.adj
        for guess in combinations(self.sampled[i], self.guess_size[i]):
            nbrs = 0
            for u in guess:
                nbrs |= adj[u]
            found = self._guess(subset, depth + 1, union, removed | nbrs)
            if found is not None:
                return found
        return None

    def _evaluate(self, subset: Sequence[int], z: int) -> frozenset[int] | None:
        adj = self.adj
        picked = 0
        for i in subset:
            in_bucket = z & self.bucket_mask[i]
            ranked = sorted((((adj[v] & z).bit_count()), v) for v in iter_bits(in_bucket))
            total = 0
            for d, v in ranked:
                if total + d > self.degree_budget:
                    break
                total += d
                picked |= 1 << v
        if math.fsum(self.costs[v] for v in iter_bits(picked)) >= self.threshold:
            return frozenset(iter_bits(picked))
        return None


def independent_set_search(g: CostGraph, cfg: IsSearchConfig, n_ref: int | None = None) -> frozenset[int] | None:
    """Search for a set of cost ``>= rho (1 - 3 gamma) C(V)`` with ``<= eps n^2`` internal edges.

    Parameters
    ----------
    g : CostGraph
    cfg : IsSearchConfig
    n_ref : int, optional
        Node count used in the ``eps n^2`` edge budget. Defaults to ``g``'s
        own node count; the greedy peeling passes the original graph size.

    Returns
    -------
    frozenset or None
        The first qualifying set in the deterministic enumeration order, or
        ``None`` when no candidate qualifies.

    Raises
    ------
    BudgetExceeded
        If more than ``cfg.enumeration_budget`` candidate guesses are needed.
    """
    if g.node_count == 0:
        return frozenset()
    return _Tester(g, cfg, n_ref or g.node_count).search()


@dataclass(frozen=True)
class NearMisResult:
    nodes: frozenset[int]
    fallback: bool
    rho: float | None
    searches: int
    warnings: tuple[str, ...] = ()


def top_cost_nodes(g: CostGraph, count: int, exclude: frozenset[int] | set[int] = frozenset()) -> list[int]:
    order = sorted((v for v in range(g.node_count) if v not in exclude), key=lambda v: (-g.costs[v], v))
    return order[: max(0, count)]


def near_mis(
    g: CostGraph,
    eps: float,
    delta: float,
    seed: int,
    n_ref: int | None = None,
    budget: int = DEFAULT_BUDGET,
) -> NearMisResult:
    """Return a node set at least as costly as a maximum-cost independent set.

    With probability ``>= 1 - delta`` the result has at most ``eps n^2``
    internal edges and at least ``ceil(sqrt(eps) n)`` nodes. When no ``rho``
    in the sweep succeeds, the ``ceil(sqrt(eps) n)`` most expensive nodes are
    returned instead (``fallback=True``).
    """
    if not 0 < eps < 1:
        raise PreconditionError(f"eps must lie in (0, 1), got {eps}")
    if not 0 < delta < 1:
        raise PreconditionError(f"delta must lie in (0, 1), got {delta}")
    n = g.node_count
    if n == 0:
        return NearMisResult(frozenset(), False, None, 0)
    nn = n_ref or n
    W = g.max_cost
    gamma = eps / (8 * W)
    inner_delta = eps * delta / (4 * W * math.log2(1 / eps))
    edge_cap = eps * nn * nn
    root = math.sqrt(eps)

    top = frozenset(top_cost_nodes(g, _ceil(root * nn)))
    top_cost = g.cost_of(top)
    pad = _ceil(eps * nn / 2)
    warnings: list[str] = []

    rho, it = 1.0, 0
    while rho >= root:
        cfg = IsSearchConfig(rho, gamma, eps, inner_delta, seed=_spawn(seed, it), enumeration_budget=budget)
        it += 1
        try:
            found = independent_set_search(g, cfg, n_ref=nn)
        except BudgetExceeded as exc:
            warnings.append(f"rho={rho:.6g}: {exc}")
            found = None
        if found is not None:
            cand = found | frozenset(top_cost_nodes(g, pad, exclude=found))
            if g.cost_of(cand) >= top_cost and induced_edges_mask(g, to_mask(cand)) <= edge_cap:
                return NearMisResult(cand, False, rho, it, tuple(warnings))
        rho /= 1 + gamma
    return NearMisResult(top, True, None, it, tuple(warnings))


def _ceil(x: float) -> int:
    return math.ceil(x - 1e-9)


def _spawn(seed: int, index: int) -> int:
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def exact_mis(g: CostGraph, limit: int | None = DEFAULT_MIS_LIMIT) -> frozenset[int]:
    """Maximum-cost independent set; ties go to the lexicographically smallest set.

    Memoised branching on the lowest-index remaining node, with connected
    components solved independently. Raises ``OracleLimitError`` above
    ``limit`` nodes (``None`` disables the check).
    """
    n = g.node_count
    if limit is not None and n > limit:
        raise OracleLimitError(f"exact MIS oracle limited to {limit} nodes, graph has {n}")
    adj = g.adjacency
    costs = g.costs
    memo: dict[int, tuple[float, int]] = {}

    def component(mask: int) -> int:
        low = mask & -mask
        seen, frontier = low, low
        while frontier:
            nxt = 0
            for v in iter_bits(frontier):
                nxt |= adj[v]
            frontier = nxt & mask & ~seen
            seen |= frontier
        return seen

    def solve(mask: int) -> tuple[float, int]:
        if not mask:
            return 0.0, 0
        hit = memo.get(mask)
        if hit is not None:
            return hit
        comp = component(mask)
        if comp != mask:
            a_cost, a_set = solve(comp)
            b_cost, b_set = solve(mask & ~comp)
            out = (a_cost + b_cost, a_set | b_set)
        else:
            low = mask & -mask
            v = low.bit_length() - 1
            in_cost, in_set = solve(mask & ~low & ~adj[v])
            in_cost += costs[v]
            out_cost, out_set = solve(mask & ~low)
            tie = 1e-9 * max(1.0, abs(out_cost))
            out = (in_cost, in_set | low) if in_cost >= out_cost - tie else (out_cost, out_set)
        memo[mask] = out
        return out

    return frozenset(iter_bits(solve((1 << n) - 1)[1]))
