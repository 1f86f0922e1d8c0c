"""Network topologies: Waxman random graphs and wrapped square grids.

Graphs are immutable after construction. Node ids are dense integers
0..|V|-1, with repeaters first and end devices appended by
:func:`attach_endpoints`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

ROLE_REPEATER = "repeater"
ROLE_SOURCE = "source_device"
ROLE_DEST = "dest_device"


class TopologyError(RuntimeError):
    """Raised when graph generation cannot satisfy its constraints."""


def edge_key(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class NodeRecord:
    id: int
    role: str
    x: float | None = None
    y: float | None = None


@dataclass(frozen=True)
class WaxmanParams:
    alpha: float = 0.85
    beta: float = 0.275
    n_repeaters: int = 25

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError(f"waxman alpha must be in (0,1), got {self.alpha}")
        if not 0 < self.beta < 1:
            raise ValueError(f"waxman beta must be in (0,1), got {self.beta}")
        if self.n_repeaters < 1:
            raise ValueError(f"n_repeaters must be >= 1, got {self.n_repeaters}")


@dataclass(frozen=True)
class NetworkGraph:
    nodes: tuple[NodeRecord, ...]
    edges: frozenset[tuple[int, int]]
    kind: str  # "random" | "regular"
    n_side: int | None = None
    _adj: dict = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        adj: dict[int, list[int]] = {n.id: [] for n in self.nodes}
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on node {u}")
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(
            self, "_adj", {k: tuple(sorted(vs)) for k, vs in adj.items()}
        )

    @property
    def adjacency(self) -> dict[int, tuple[int, ...]]:
        return self._adj

    def neighbors(self, u: int) -> tuple[int, ...]:
        return self._adj[u]

    @property
    def repeaters(self) -> list[int]:
        return [n.id for n in self.nodes if n.role == ROLE_REPEATER]

    @property
    def sources(self) -> list[int]:
        return [n.id for n in self.nodes if n.role == ROLE_SOURCE]

    @property
    def dests(self) -> list[int]:
        return [n.id for n in self.nodes if n.role == ROLE_DEST]

    def role_of(self, u: int) -> str:
        return self.nodes[u].role

    @property
    def repeater_edges(self) -> list[tuple[int, int]]:
        """Edges between repeaters only (device attachments excluded)."""
        rep = {n.id for n in self.nodes if n.role == ROLE_REPEATER}
        return [e for e in self.edges if e[0] in rep and e[1] in rep]

    def attached_repeater(self, device: int) -> int:
        nbrs = self._adj[device]
        if len(nbrs) != 1:
            raise ValueError(f"node {device} is not a degree-1 device")
        return nbrs[0]

    def to_json(self) -> str:
        doc = {
            "kind": self.kind,
            "nodes": [
                {"id": n.id, "role": n.role, "x": n.x, "y": n.y}
                for n in self.nodes
            ],
            "edges": sorted([list(e) for e in self.edges]),
        }
        return json.dumps(doc, indent=2, sort_keys=False)

    @staticmethod
    def from_json(text: str) -> "NetworkGraph":
        doc = json.loads(text)
        nodes = tuple(
            NodeRecord(n["id"], n["role"], n.get("x"), n.get("y"))
            for n in sorted(doc["nodes"], key=lambda n: n["id"])
        )
        edges = frozenset(edge_key(u, v) for u, v in doc["edges"])
        return NetworkGraph(nodes=nodes, edges=edges, kind=doc["kind"])


def waxman_edge_probabilities(
    positions: np.ndarray, alpha: float, beta: float
) -> np.ndarray:
    """Pairwise link probabilities beta*exp(-d(u,v)/(L*alpha)).

    L is the maximum pairwise distance among the given positions.
    Returns an (n, n) symmetric matrix with zero diagonal.
    """
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.sqrt((diff**2).sum(axis=2))
    big_l = dist.max()
    if big_l == 0.0:
        probs = np.full_like(dist, beta)
    else:
        probs = beta * np.exp(-dist / (big_l * alpha))
    np.fill_diagonal(probs, 0.0)
    return probs


def _sample_waxman_once(
    params: WaxmanParams, rng: np.random.Generator
) -> tuple[np.ndarray, set[tuple[int, int]]]:
    n = params.n_repeaters
    positions = rng.random((n, 2))
    probs = waxman_edge_probabilities(positions, params.alpha, params.beta)
    draws = rng.random((n, n))
    edges = {
        (u, v)
        for u in range(n)
        for v in range(u + 1, n)
        if draws[u, v] < probs[u, v]
    }
    return positions, edges


def _is_connected(n: int, edges: set[tuple[int, int]]) -> bool:
    if n <= 1:
        return True
    adj: dict[int, list[int]] = {i: [] for i in range(n)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


def generate_waxman(
    params: WaxmanParams,
    rng: np.random.Generator,
    require_connected: bool = True,
    retry_budget: int = 1000,
    edge_count_target: int | None = None,
) -> NetworkGraph:
    """Draw a Waxman random graph over repeaters placed in the unit square.

    Disconnected samples are rejected and redrawn, up to ``retry_budget``
    attempts. When ``edge_count_target`` is set, only samples with exactly
    that many edges are accepted (used to match the regular topology's
    resource budget).
    """
    for _ in range(retry_budget):
        positions, edges = _sample_waxman_once(params, rng)
        if require_connected and not _is_connected(params.n_repeaters, edges):
            continue
        if edge_count_target is not None and len(edges) != edge_count_target:
            continue
        nodes = tuple(
            NodeRecord(i, ROLE_REPEATER, float(positions[i, 0]), float(positions[i, 1]))
            for i in range(params.n_repeaters)
        )
        return NetworkGraph(nodes=nodes, edges=frozenset(edges), kind="random")
    raise TopologyError(
        f"no acceptable Waxman sample within {retry_budget} attempts "
        f"(connected={require_connected}, edge_count_target={edge_count_target})"
    )


def generate_regular_grid(n_side: int) -> NetworkGraph:
    """n_side x n_side repeater grid with a top-to-bottom vertical wrap.

    The wrap removes top/bottom edge effects; there is no horizontal wrap
    because sources and destinations attach on the left/right columns.
    """
    if n_side < 2:
        raise ValueError(f"n_side must be >= 2, got {n_side}")
    n = n_side

    def nid(row: int, col: int) -> int:
        return row * n + col

    edges: set[tuple[int, int]] = set()
    for row in range(n):
        for col in range(n):
            if col + 1 < n:
                edges.add(edge_key(nid(row, col), nid(row, col + 1)))
            if row + 1 < n:
                edges.add(edge_key(nid(row, col), nid(row + 1, col)))
    for col in range(n):  # vertical wrap; coincides with grid edges when n == 2
        edges.add(edge_key(nid(0, col), nid(n - 1, col)))
    nodes = tuple(NodeRecord(i, ROLE_REPEATER) for i in range(n * n))
    return NetworkGraph(
        nodes=nodes, edges=frozenset(edges), kind="regular", n_side=n_side
    )


def attach_endpoints(
    g: NetworkGraph, n_sd: int, rng: np.random.Generator
) -> NetworkGraph:
    """Attach n_sd source and n_sd destination devices to repeaters.

    Random topology: sources go to n_sd distinct uniformly chosen
    repeaters, destinations to n_sd distinct repeaters from the remainder.
    Regular topology: sources attach one-to-one to left-column repeaters
    and destinations to right-column repeaters; the destination rows are
    an independent uniform draw, so pair i's endpoints generally sit on
    different rows and the typical route spans more than one lane.
    """
    if n_sd == 0:
        return g
    repeaters = g.repeaters
    if g.kind == "regular":
        n = g.n_side
        if n_sd > n:
            raise TopologyError(f"n_sd={n_sd} exceeds grid side {n}")
        src_rows = sorted(rng.choice(n, size=n_sd, replace=False).tolist())
        dst_rows = rng.choice(n, size=n_sd, replace=False).tolist()
        src_reps = [r * n for r in src_rows]
        dst_reps = [r * n + (n - 1) for r in dst_rows]
    else:
        if 2 * n_sd > len(repeaters):
            raise TopologyError(
                f"need {2 * n_sd} distinct repeaters, have {len(repeaters)}"
            )
        picked = rng.choice(len(repeaters), size=2 * n_sd, replace=False)
        src_reps = [repeaters[i] for i in picked[:n_sd]]
        dst_reps = [repeaters[i] for i in picked[n_sd:]]

    nodes = list(g.nodes)
    edges = set(g.edges)
    next_id = len(nodes)
    for rep in src_reps:
        nodes.append(NodeRecord(next_id, ROLE_SOURCE, g.nodes[rep].x, g.nodes[rep].y))
        edges.add(edge_key(next_id, rep))
        next_id += 1
    for rep in dst_reps:
        nodes.append(NodeRecord(next_id, ROLE_DEST, g.nodes[rep].x, g.nodes[rep].y))
        edges.add(edge_key(next_id, rep))
        next_id += 1
    return NetworkGraph(
        nodes=tuple(nodes), edges=frozenset(edges), kind=g.kind, n_side=g.n_side
    )


def sd_pairs(g: NetworkGraph) -> list[tuple[int, int, int]]:
    """(pair_id, source_device, dest_device) triples, pair_id = 0..n_sd-1."""
    srcs = g.sources
    dsts = g.dests
    return [(i, s, d) for i, (s, d) in enumerate(zip(srcs, dsts))]
