"""Candidate-path enumeration over the residual (non-consumed) graph.

Simple paths are produced lazily in nondecreasing cost order by a
uniform-cost search over partial paths; ties within equal cost come out
in lexicographic node-id order. Costs are hop counts or nonnegative
per-node weights, so a partial path's cost lower-bounds all of its
completions and the enumeration order is exact.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from itertools import islice
from typing import Callable, Iterator

import numpy as np

from .graph import NetworkGraph, edge_key

K_ENUM_DEFAULT = 100


@dataclass(frozen=True)
class CandidatePath:
    nodes: tuple[int, ...]
    cost: float | None = None

    @property
    def length(self) -> int:
        """Path length L_p = number of nodes in the sequence."""
        return len(self.nodes)

    def edges(self) -> list[tuple[int, int]]:
        return [edge_key(u, v) for u, v in zip(self.nodes, self.nodes[1:])]


class EdgeAvailability:
    """Set of edges consumed by already-accepted paths within a period."""

    def __init__(self):
        self.consumed: set[tuple[int, int]] = set()

    def is_available(self, u: int, v: int) -> bool:
        return edge_key(u, v) not in self.consumed

    def consume_path(self, path: CandidatePath) -> None:
        self.consumed.update(path.edges())


def _available_adjacency(
    g: NetworkGraph, available: EdgeAvailability | None
) -> dict[int, tuple[int, ...]]:
    adj = g.adjacency
    if available is None or not available.consumed:
        return adj
    consumed = available.consumed
    return {
        u: tuple(v for v in nbrs if edge_key(u, v) not in consumed)
        for u, nbrs in adj.items()
    }


def _cost_to_go(
    adj: dict[int, tuple[int, ...]],
    d: int,
    node_cost: Callable[[int], float] | None,
) -> dict[int, float]:
    """Cheapest remaining cost from each node to d, ignoring simplicity.

    Admissible and consistent, so using it as an A* heuristic keeps the
    enumeration's (cost, lexicographic) yield order exact. Unreachable
    nodes are absent from the map and get pruned.
    """
    dist: dict[int, float] = {}
    heap: list[tuple[float, int]] = [(0.0, d)]
    while heap:
        h, u = heapq.heappop(heap)
        if u in dist:
            continue
        dist[u] = h
        step = 1.0 if node_cost is None else node_cost(u)
        for w in adj[u]:
            if w not in dist:
                heapq.heappush(heap, (h + step, w))
    return dist


PRUNE_AFTER_POPS = 1000


def _can_complete(
    adj: dict[int, tuple[int, ...]], nodes: tuple[int, ...], d: int
) -> bool:
    """Whether d is reachable from nodes[-1] without revisiting nodes."""
    blocked = set(nodes)
    stack = [nodes[-1]]
    seen = {nodes[-1]}
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w == d:
                return True
            if w not in seen and w not in blocked:
                seen.add(w)
                stack.append(w)
    return False


def iter_simple_paths(
    g: NetworkGraph,
    available: EdgeAvailability | None,
    s: int,
    d: int,
    node_cost: Callable[[int], float] | None = None,
) -> Iterator[CandidatePath]:
    """Yield simple s-d paths in nondecreasing (cost, lexicographic) order.

    With ``node_cost`` absent the cost is the hop count; otherwise it is
    the sum of node weights over the path (weights must be nonnegative).

    Past PRUNE_AFTER_POPS expansions, partial paths that cannot reach d
    through unvisited nodes are discarded, which keeps the total work
    polynomial in the number of simple paths instead of exponential in
    dead-end excursions. The prune never changes what is yielded.
    """
    adj = _available_adjacency(g, available)
    togo = _cost_to_go(adj, d, node_cost)
    if s not in togo:
        return
    start_cost = 0.0 if node_cost is None else node_cost(s)
    # heap entries: (cost + to-go bound, nodes, cost)
    heap: list[tuple[float, tuple[int, ...], float]] = [
        (start_cost + togo[s], (s,), start_cost)
    ]
    pops = 0
    while heap:
        _, nodes, cost = heapq.heappop(heap)
        last = nodes[-1]
        if last == d:
            yield CandidatePath(nodes, cost)
            continue
        pops += 1
        if pops > PRUNE_AFTER_POPS and not _can_complete(adj, nodes, d):
            continue
        for nb in adj[last]:
            if nb in nodes or nb not in togo:
                continue
            step = 1.0 if node_cost is None else node_cost(nb)
            heapq.heappush(
                heap, (cost + step + togo[nb], nodes + (nb,), cost + step)
            )


def k_shortest_paths(
    g: NetworkGraph,
    available: EdgeAvailability | None,
    s: int,
    d: int,
    k: int,
) -> list[CandidatePath]:
    """The k loopless hop-shortest s-d paths, nondecreasing in length.

    Fewer than k are returned if fewer simple paths exist over available
    edges; an isolated endpoint yields an empty list.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    return list(islice(iter_simple_paths(g, available, s, d), k))


def cost_groups(
    paths: Iterator[CandidatePath], budget: int
) -> Iterator[list[CandidatePath]]:
    """Group an ordered path stream into runs of equal cost.

    At most ``budget`` paths are drawn from the stream in total.
    """
    group: list[CandidatePath] = []
    for path in islice(paths, budget):
        if group and path.cost != group[0].cost:
            yield group
            group = []
        group.append(path)
    if group:
        yield group


def weighted_shortest_path(
    g: NetworkGraph,
    available: EdgeAvailability | None,
    s: int,
    d: int,
    costs: dict[int, float],
    rng: np.random.Generator,
    budget: int = K_ENUM_DEFAULT,
) -> CandidatePath | None:
    """Minimum vertex-weight-sum path; ties broken uniformly at random.

    End devices cost 0; repeater costs must be nonnegative.
    """
    if any(c < 0 for c in costs.values()):
        raise ValueError("node costs must be nonnegative")

    def node_cost(v: int) -> float:
        return costs.get(v, 0.0)

    paths = iter_simple_paths(g, available, s, d, node_cost=node_cost)
    for group in cost_groups(paths, budget):
        return group[int(rng.integers(len(group)))]
    return None
