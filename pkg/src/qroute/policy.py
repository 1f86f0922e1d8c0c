"""The four path-selection policies served to the routing engine.

SP and KA scan an ordered candidate stream and stop at the first
hop-length / cost level containing a feasible path; KSP and KX pick the
feasible path of minimum estimated fidelity from the first k shortest
paths (KX additionally caps the length at L_b + x). All ties are broken
uniformly at random.

KSP and KX are grey-box: their decisions depend only on the topology and
a per-path fidelity oracle, never on per-node quality data. That is made
structural here by routing every policy through :func:`select_with_oracle`.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import islice
from typing import Callable

import numpy as np

from .fidelity import FidelityParams, NoiseModel, estimated_fidelity
from .graph import NetworkGraph
from .pathfind import (
    K_ENUM_DEFAULT,
    CandidatePath,
    EdgeAvailability,
    cost_groups,
    iter_simple_paths,
)
from .quality import SCHEME_TWO_CLASS, QualityAssignment

KIND_SP = "sp"
KIND_KA = "ka"
KIND_KSP = "ksp"
KIND_KX = "kx"

KA_COST_HQ_DEFAULT = 100.0
KA_COST_LQ_DEFAULT = 1.0


@dataclass(frozen=True)
class PolicySpec:
    kind: str
    k: int = 10
    x: int = 0
    k_enum: int = K_ENUM_DEFAULT
    c_hq: float = KA_COST_HQ_DEFAULT
    c_lq: float = KA_COST_LQ_DEFAULT

    def __post_init__(self):
        if self.kind not in (KIND_SP, KIND_KA, KIND_KSP, KIND_KX):
            raise ValueError(f"unknown policy kind {self.kind!r}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.x < 0:
            raise ValueError(f"x must be >= 0, got {self.x}")

    @property
    def name(self) -> str:
        if self.kind == KIND_KX:
            return f"kx{self.x}"
        return self.kind


def parse_policy(name: str, k: int | None = None, **kwargs) -> PolicySpec:
    """Build a PolicySpec from a CLI/config string: sp | ka | ksp | kx<x>."""
    name = name.strip().lower()
    if k is not None:
        kwargs["k"] = k
    if name in (KIND_SP, KIND_KA, KIND_KSP):
        return PolicySpec(kind=name, **kwargs)
    if name.startswith(KIND_KX) and name[2:].isdigit():
        return PolicySpec(kind=KIND_KX, x=int(name[2:]), **kwargs)
    raise ValueError(f"unknown policy name {name!r}")


def _uniform_choice(
    paths: list[CandidatePath], rng: np.random.Generator
) -> CandidatePath:
    return paths[int(rng.integers(len(paths)))]


def select_with_oracle(
    spec: PolicySpec,
    g: NetworkGraph,
    available: EdgeAvailability | None,
    fidelity_of: Callable[[tuple[int, ...]], float],
    f_threshold: float,
    s: int,
    d: int,
    rng: np.random.Generator,
    node_costs: dict[int, float] | None = None,
) -> CandidatePath | None:
    """Apply a policy given only topology plus a fidelity oracle.

    ``node_costs`` is consulted by KA alone; grey-box policies ignore it.
    Returns None when no feasible candidate exists within the enumeration
    budget (the pair is blocked).
    """

    def is_feasible(path: CandidatePath) -> bool:
        return fidelity_of(path.nodes) >= f_threshold

    if spec.kind in (KIND_SP, KIND_KA):
        if spec.kind == KIND_SP:
            stream = iter_simple_paths(g, available, s, d)
        else:
            if node_costs is None:
                raise ValueError("KA requires per-node costs")
            stream = iter_simple_paths(
                g, available, s, d, node_cost=lambda v: node_costs.get(v, 0.0)
            )
        for group in cost_groups(stream, spec.k_enum):
            feas = [p for p in group if is_feasible(p)]
            if feas:
                return _uniform_choice(feas, rng)
        return None

    candidates = list(islice(iter_simple_paths(g, available, s, d), spec.k))
    feas = [p for p in candidates if is_feasible(p)]
    if not feas:
        return None
    if spec.kind == KIND_KX:
        l_b = min(p.length for p in feas)
        feas = [p for p in feas if p.length <= l_b + spec.x]
    f_min = min(fidelity_of(p.nodes) for p in feas)
    ties = [p for p in feas if fidelity_of(p.nodes) == f_min]
    return _uniform_choice(ties, rng)


def ka_costs(spec: PolicySpec, q: QualityAssignment) -> dict[int, float]:
    if q.scheme != SCHEME_TWO_CLASS:
        raise ValueError("KA is defined only for the two-class quality scheme")
    return {
        v: (spec.c_hq if q.is_hq(v) else spec.c_lq) for v in q.eta_by_node
    }


def select_path(
    spec: PolicySpec,
    g: NetworkGraph,
    available: EdgeAvailability | None,
    q: QualityAssignment,
    p: FidelityParams,
    noise: NoiseModel | None,
    s: int,
    d: int,
    rng: np.random.Generator,
) -> CandidatePath | None:
    """Policy entry point used by the engine; None means blocked."""

    cache: dict[tuple[int, ...], float] = {}

    def fidelity_of(nodes: tuple[int, ...]) -> float:
        est = cache.get(nodes)
        if est is None:
            est = cache[nodes] = estimated_fidelity(nodes, g, q, p, noise)
        return est

    costs = ka_costs(spec, q) if spec.kind == KIND_KA else None
    return select_with_oracle(
        spec, g, available, fidelity_of, p.f_threshold, s, d, rng,
        node_costs=costs,
    )
