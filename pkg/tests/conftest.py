"""Shared fixtures and brute-force oracles for the test suite."""

from __future__ import annotations

import numpy as np
import pytest

from qroute.fidelity import FidelityParams
from qroute.graph import (
    ROLE_DEST,
    ROLE_REPEATER,
    ROLE_SOURCE,
    NetworkGraph,
    NodeRecord,
    edge_key,
)
from qroute.quality import QualityAssignment

ETA_H = 0.999
ETA_L = 0.8


def build_graph(roles: list[str], edges: list[tuple[int, int]]) -> NetworkGraph:
    nodes = tuple(NodeRecord(i, role) for i, role in enumerate(roles))
    return NetworkGraph(
        nodes=nodes,
        edges=frozenset(edge_key(u, v) for u, v in edges),
        kind="random",
    )


def two_class(etas: dict[int, float]) -> QualityAssignment:
    return QualityAssignment(etas, "two_class", ETA_H, ETA_L)


def exhaustive_simple_paths(g, s, d, consumed=frozenset()):
    """All simple s-d paths by DFS; the enumeration oracle."""
    adj = g.adjacency
    out = []

    def walk(nodes):
        last = nodes[-1]
        if last == d:
            out.append(tuple(nodes))
            return
        for nb in adj[last]:
            if nb in nodes or edge_key(last, nb) in consumed:
                continue
            walk(nodes + [nb])

    walk([s])
    return out


@pytest.fixture
def diamond():
    """S(0) - A(1, HQ) - D(3) and S(0) - B(2, LQ) - D(3)."""
    g = build_graph(
        [ROLE_SOURCE, ROLE_REPEATER, ROLE_REPEATER, ROLE_DEST],
        [(0, 1), (0, 2), (1, 3), (2, 3)],
    )
    q = two_class({1: ETA_H, 2: ETA_L})
    return g, q


@pytest.fixture
def params():
    return FidelityParams()


@pytest.fixture
def rng():
    return np.random.default_rng(42)
