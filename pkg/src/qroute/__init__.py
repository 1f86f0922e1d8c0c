"""qroute: entanglement routing simulator for quantum repeater networks."""

from .engine import ExperimentConfig, run_experiment, run_period
from .fidelity import FidelityParams, NoiseModel, estimated_fidelity, path_fidelity
from .graph import (
    NetworkGraph,
    NodeRecord,
    WaxmanParams,
    attach_endpoints,
    generate_regular_grid,
    generate_waxman,
)
from .pathfind import CandidatePath, EdgeAvailability, k_shortest_paths, weighted_shortest_path
from .policy import PolicySpec, parse_policy, select_path
from .quality import QualityAssignment, assign_continuous, assign_two_class

__all__ = [
    "CandidatePath",
    "EdgeAvailability",
    "ExperimentConfig",
    "FidelityParams",
    "NetworkGraph",
    "NodeRecord",
    "NoiseModel",
    "PolicySpec",
    "QualityAssignment",
    "WaxmanParams",
    "assign_continuous",
    "assign_two_class",
    "attach_endpoints",
    "estimated_fidelity",
    "generate_regular_grid",
    "generate_waxman",
    "k_shortest_paths",
    "parse_policy",
    "path_fidelity",
    "run_experiment",
    "run_period",
    "select_path",
    "weighted_shortest_path",
]
