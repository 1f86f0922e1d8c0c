"""Routing periods (sequential serving with exclusive links) and the
Monte Carlo replica loop.

Seed discipline: every random stream is an independent numpy PCG64
generator seeded by ``SeedSequence([master_seed, stream_tag, *indices])``,
so results are reproducible bit-for-bit and independent of execution
order. Topology, quality, serving-order, and noise streams are keyed
without the policy index, which makes policy comparisons paired.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .fidelity import (
    FidelityParams,
    NoiseModel,
    estimated_fidelity,
    path_fidelity,
)
from .graph import (
    NetworkGraph,
    WaxmanParams,
    attach_endpoints,
    generate_regular_grid,
    generate_waxman,
    sd_pairs,
)
from .pathfind import CandidatePath, EdgeAvailability
from .policy import PolicySpec, select_path
from .quality import QualityAssignment, assign_continuous, assign_two_class

STREAM_TOPOLOGY = 1
STREAM_QUALITY = 2
STREAM_ORDER = 3
STREAM_NOISE = 4
STREAM_TIE = 5

RAW_COLUMNS = [
    "policy", "topology", "xi", "a", "beta", "lambda", "n_sd",
    "replica_topo", "replica_quality", "order_index", "pair_id",
    "status", "path_len", "fidelity_true", "fidelity_est",
]


def derive_rng(master_seed: int, tag: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, tag, *key]))


def derive_seed(master_seed: int, tag: int, *key: int) -> int:
    ss = np.random.SeedSequence([master_seed, tag, *key])
    return int(ss.generate_state(1)[0])


@dataclass(frozen=True)
class PairRecord:
    pair_id: int
    order: int  # serving position theta, 1-based
    status: str  # "served" | "blocked"
    path: CandidatePath | None
    fidelity_true: float | None
    fidelity_est: float | None


@dataclass(frozen=True)
class PeriodOutcome:
    records: tuple[PairRecord, ...]

    @property
    def n_served(self) -> int:
        return sum(1 for r in self.records if r.status == "served")

    @property
    def n_blocked(self) -> int:
        return sum(1 for r in self.records if r.status == "blocked")


def run_period(
    g: NetworkGraph,
    q: QualityAssignment,
    p: FidelityParams,
    noise: NoiseModel | None,
    spec: PolicySpec,
    pairs: list[tuple[int, int, int]],
    rng: np.random.Generator,
) -> PeriodOutcome:
    """Serve (pair_id, s, d) triples in order, consuming links exclusively.

    Blocking is a result, not an error. The exact fidelity of accepted
    paths is recorded alongside the estimate the decision was based on.
    """
    if not pairs:
        raise ValueError("pairs must be nonempty")
    available = EdgeAvailability()
    records = []
    for theta, (pair_id, s, d) in enumerate(pairs, start=1):
        path = select_path(spec, g, available, q, p, noise, s, d, rng)
        if path is None:
            records.append(PairRecord(pair_id, theta, "blocked", None, None, None))
            continue
        available.consume_path(path)
        f_true = path_fidelity(path.nodes, g, q, p)
        f_est = estimated_fidelity(path.nodes, g, q, p, noise)
        records.append(
            PairRecord(pair_id, theta, "served", path, f_true, f_est)
        )
    return PeriodOutcome(tuple(records))


@dataclass(frozen=True)
class GridPoint:
    beta_idx: int
    beta: float | None  # None for the regular topology
    nsd_idx: int
    n_sd: int
    q_idx: int
    xi: float | None
    a: float | None
    lam_idx: int
    lam: float | None  # None = exact estimates


@dataclass(frozen=True)
class ExperimentConfig:
    topology_kind: str  # "random" | "regular"
    n_repeaters: int = 25
    n_side: int = 5
    alpha: float = 0.85
    betas: tuple[float | None, ...] = (0.275,)
    edge_count_target: int | None = None
    connect_retries: int = 1000
    n_sd_list: tuple[int, ...] = (5,)
    scheme: str = "two_class"
    quality_grid: tuple[tuple[float | None, float | None], ...] = ((0.8, None),)
    eta_high: float = 0.999
    eta_low: float = 0.8
    fidelity: FidelityParams = field(default_factory=FidelityParams)
    policies: tuple[PolicySpec, ...] = ()
    lambdas: tuple[float | None, ...] = (None,)
    n_topology: int = 100
    n_quality: int = 100
    master_seed: int = 0


def grid_points(config: ExperimentConfig) -> list[GridPoint]:
    points = []
    for bi, beta in enumerate(config.betas):
        for ni, n_sd in enumerate(config.n_sd_list):
            for qi, (xi, a) in enumerate(config.quality_grid):
                for li, lam in enumerate(config.lambdas):
                    points.append(GridPoint(bi, beta, ni, n_sd, qi, xi, a, li, lam))
    return points


def build_topology(
    config: ExperimentConfig, point: GridPoint, replica_topo: int
) -> NetworkGraph:
    """Topology + endpoints for one replica; independent of xi and lambda."""
    rng = derive_rng(
        config.master_seed, STREAM_TOPOLOGY,
        point.beta_idx, point.nsd_idx, replica_topo,
    )
    if config.topology_kind == "regular":
        g = generate_regular_grid(config.n_side)
    else:
        params = WaxmanParams(
            alpha=config.alpha, beta=point.beta, n_repeaters=config.n_repeaters
        )
        g = generate_waxman(
            params, rng,
            retry_budget=config.connect_retries,
            edge_count_target=config.edge_count_target,
        )
    return attach_endpoints(g, point.n_sd, rng)


def _assign_quality(
    config: ExperimentConfig, point: GridPoint, g: NetworkGraph,
    replica_topo: int, replica_quality: int,
) -> QualityAssignment:
    rng = derive_rng(
        config.master_seed, STREAM_QUALITY,
        point.beta_idx, point.nsd_idx, point.q_idx,
        replica_topo, replica_quality,
    )
    if config.scheme == "two_class":
        return assign_two_class(
            g, point.xi, rng, eta_high=config.eta_high, eta_low=config.eta_low
        )
    return assign_continuous(
        g, point.a, rng, eta_high=config.eta_high, eta_low=config.eta_low
    )


def _run_topo_replica(
    config: ExperimentConfig, point: GridPoint, replica_topo: int
) -> list[dict]:
    g = build_topology(config, point, replica_topo)
    pairs = sd_pairs(g)
    rows: list[dict] = []
    for replica_quality in range(config.n_quality):
        q = _assign_quality(config, point, g, replica_topo, replica_quality)
        order_rng = derive_rng(
            config.master_seed, STREAM_ORDER,
            point.beta_idx, point.nsd_idx, replica_topo, replica_quality,
        )
        order = order_rng.permutation(len(pairs))
        ordered_pairs = [pairs[i] for i in order]
        noise = None
        if point.lam is not None:
            noise_seed = derive_seed(
                config.master_seed, STREAM_NOISE,
                point.beta_idx, point.nsd_idx, replica_topo, replica_quality,
            )
            noise = NoiseModel(point.lam, noise_seed)
        for pol_idx, spec in enumerate(config.policies):
            tie_rng = derive_rng(
                config.master_seed, STREAM_TIE,
                pol_idx, point.beta_idx, point.nsd_idx, point.q_idx,
                point.lam_idx, replica_topo, replica_quality,
            )
            outcome = run_period(
                g, q, config.fidelity, noise, spec, ordered_pairs, tie_rng
            )
            for rec in outcome.records:
                rows.append({
                    "policy": spec.name,
                    "topology": config.topology_kind,
                    "xi": point.xi,
                    "a": point.a,
                    "beta": point.beta,
                    "lambda": point.lam,
                    "n_sd": point.n_sd,
                    "replica_topo": replica_topo,
                    "replica_quality": replica_quality,
                    "order_index": rec.order,
                    "pair_id": rec.pair_id,
                    "status": rec.status,
                    "path_len": rec.path.length if rec.path else None,
                    "fidelity_true": rec.fidelity_true,
                    "fidelity_est": rec.fidelity_est,
                })
    return rows


def _task(args):
    return _run_topo_replica(*args)


def run_experiment(config: ExperimentConfig, jobs: int = 1) -> list[dict]:
    """Full replica loop over the parameter grid; one raw row per
    pair-decision. Deterministic given the master seed, regardless of
    ``jobs``: tasks are merged in grid order.
    """
    if not config.policies:
        raise ValueError("config.policies must be nonempty")
    tasks = [
        (config, point, t)
        for point in grid_points(config)
        for t in range(config.n_topology)
    ]
    rows: list[dict] = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for chunk in pool.map(_task, tasks, chunksize=4):
                rows.extend(chunk)
    else:
        for task in tasks:
            rows.extend(_task(task))
    return rows
