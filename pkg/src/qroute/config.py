"""YAML experiment configuration: parsing, validation, defaults.

Defaults follow the baseline parameterisation: alpha=0.85, beta=0.275,
eta_h=0.999, eta_l=0.8, F=0.975, F_th=0.53, k=10, 100x100 replicas.
"""

from __future__ import annotations

import os

import yaml

from .engine import ExperimentConfig
from .fidelity import FidelityParams
from .policy import parse_policy

SEED_ENV_VAR = "QROUTE_SEED"


class ConfigError(ValueError):
    """Schema violation with a field-precise message."""


def _require(cond: bool, field: str, msg: str):
    if not cond:
        raise ConfigError(f"{field}: {msg}")


def _as_list(value) -> list:
    return value if isinstance(value, list) else [value]


def load_config(path: str, seed_override: int | None = None) -> ExperimentConfig:
    with open(path) as fh:
        doc = yaml.safe_load(fh)
    return parse_config(doc, seed_override=seed_override)


def parse_config(doc: dict, seed_override: int | None = None) -> ExperimentConfig:
    _require(isinstance(doc, dict), "<root>", "config must be a mapping")
    unknown = set(doc) - {
        "topology", "n_sd", "quality", "fidelity", "policies",
        "policy_params", "noise", "replicas", "master_seed",
    }
    _require(not unknown, "<root>", f"unknown keys: {sorted(unknown)}")

    topo = doc.get("topology", {})
    kind = topo.get("kind", "random")
    _require(kind in ("random", "regular"), "topology.kind",
             f"must be 'random' or 'regular', got {kind!r}")
    n_repeaters = topo.get("n_repeaters", 25)
    n_side = topo.get("n_side", 5)
    _require(isinstance(n_repeaters, int) and n_repeaters >= 1,
             "topology.n_repeaters", "must be a positive integer")
    _require(isinstance(n_side, int) and n_side >= 2,
             "topology.n_side", "must be an integer >= 2")
    waxman = topo.get("waxman", {})
    alpha = waxman.get("alpha", 0.85)
    _require(0 < alpha < 1, "topology.waxman.alpha", "must be in (0,1)")
    if kind == "regular":
        betas: list[float | None] = [None]
    else:
        betas = [float(b) for b in _as_list(waxman.get("beta", 0.275))]
        for i, b in enumerate(betas):
            _require(0 < b < 1, f"topology.waxman.beta[{i}]", "must be in (0,1)")
    edge_count_target = topo.get("edge_count_target")
    if edge_count_target is not None:
        _require(isinstance(edge_count_target, int) and edge_count_target > 0,
                 "topology.edge_count_target", "must be a positive integer")
    connect_retries = topo.get("connect_retries", 1000)

    n_sd_list = [int(v) for v in _as_list(doc.get("n_sd", 5))]
    for i, v in enumerate(n_sd_list):
        _require(v >= 1, f"n_sd[{i}]", "must be >= 1")

    quality = doc.get("quality", {})
    scheme = quality.get("scheme", "two_class")
    _require(scheme in ("two_class", "continuous"), "quality.scheme",
             f"must be 'two_class' or 'continuous', got {scheme!r}")
    eta_high = float(quality.get("eta_high", 0.999))
    eta_low = float(quality.get("eta_low", 0.8))
    _require(0 < eta_low <= eta_high <= 1, "quality.eta_low/eta_high",
             "must satisfy 0 < eta_low <= eta_high <= 1")
    if scheme == "two_class":
        xis = [float(v) for v in _as_list(quality.get("xi", 0.8))]
        for i, v in enumerate(xis):
            _require(0 <= v <= 1, f"quality.xi[{i}]", "must be in [0,1]")
        quality_grid = tuple((v, None) for v in xis)
    else:
        a = float(quality.get("a", 10.0))
        _require(a > 0, "quality.a", "must be > 0")
        quality_grid = ((None, a),)

    fid = doc.get("fidelity", {})
    f_init = float(fid.get("f_init", 0.975))
    f_threshold = float(fid.get("f_threshold", 0.53))
    _require(0.25 < f_init <= 1, "fidelity.f_init", "must be in (1/4, 1]")
    _require(0 <= f_threshold <= 1, "fidelity.f_threshold", "must be in [0,1]")

    pol_params = doc.get("policy_params", {})
    pol_kwargs = {}
    for name, target in (("k", "k"), ("k_enum", "k_enum"),
                         ("c_hq", "c_hq"), ("c_lq", "c_lq")):
        if name in pol_params:
            pol_kwargs[target] = pol_params[name]
    policy_names = _as_list(doc.get("policies", ["sp", "ka", "ksp", "kx0", "kx1"]))
    try:
        policies = tuple(parse_policy(str(n), **pol_kwargs) for n in policy_names)
    except ValueError as exc:
        raise ConfigError(f"policies: {exc}") from exc
    if scheme == "continuous":
        _require(all(p.kind != "ka" for p in policies), "policies",
                 "KA is not defined for the continuous quality scheme")

    noise = doc.get("noise")
    if noise is None:
        lambdas: list[float | None] = [None]
    else:
        lambdas = [
            None if v is None else float(v)
            for v in _as_list(noise.get("lambdas", [None]))
        ]
        for i, v in enumerate(lambdas):
            if v is not None:
                _require(v > 0, f"noise.lambdas[{i}]", "must be > 0")
        _require(scheme == "two_class" or lambdas == [None], "noise",
                 "noisy estimates require the two-class quality scheme")

    replicas = doc.get("replicas", {})
    n_topology = int(replicas.get("n_topology", 100))
    n_quality = int(replicas.get("n_quality", 100))
    _require(n_topology >= 1, "replicas.n_topology", "must be >= 1")
    _require(n_quality >= 1, "replicas.n_quality", "must be >= 1")

    master_seed = seed_override
    if master_seed is None:
        master_seed = doc.get("master_seed")
    if master_seed is None and os.environ.get(SEED_ENV_VAR):
        master_seed = int(os.environ[SEED_ENV_VAR])
    if master_seed is None:
        master_seed = 0
    _require(int(master_seed) >= 0, "master_seed", "must be a nonnegative integer")

    return ExperimentConfig(
        topology_kind=kind,
        n_repeaters=n_repeaters,
        n_side=n_side,
        alpha=alpha,
        betas=tuple(betas),
        edge_count_target=edge_count_target,
        connect_retries=connect_retries,
        n_sd_list=tuple(n_sd_list),
        scheme=scheme,
        quality_grid=quality_grid,
        eta_high=eta_high,
        eta_low=eta_low,
        fidelity=FidelityParams(f_init=f_init, f_threshold=f_threshold),
        policies=policies,
        lambdas=tuple(lambdas),
        n_topology=n_topology,
        n_quality=n_quality,
        master_seed=int(master_seed),
    )


def known_edge_count(config: ExperimentConfig) -> int | None:
    """Repeater-graph edge count when it is fixed by the config."""
    if config.topology_kind == "regular":
        n = config.n_side
        return 2 * n * (n - 1) + n if n > 2 else 4
    return config.edge_count_target
