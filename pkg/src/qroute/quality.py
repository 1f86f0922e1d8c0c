"""Repeater efficiency assignment: two-class (HQ/LQ) or continuous range."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .graph import NetworkGraph

ETA_HIGH_DEFAULT = 0.999
ETA_LOW_DEFAULT = 0.8

SCHEME_TWO_CLASS = "two_class"
SCHEME_CONTINUOUS = "continuous"


@dataclass(frozen=True)
class QualityAssignment:
    eta_by_node: dict[int, float]
    scheme: str
    eta_high: float
    eta_low: float

    def eta(self, node: int) -> float:
        return self.eta_by_node[node]

    def is_hq(self, node: int) -> bool:
        return self.eta_by_node[node] == self.eta_high

    def to_json(self) -> str:
        return json.dumps(
            {str(k): v for k, v in sorted(self.eta_by_node.items())}, indent=2
        )


def hq_count(xi: float, n_repeaters: int) -> int:
    # round half up so the count is unbiased over the xi grid
    return int(math.floor(xi * n_repeaters + 0.5))


def assign_two_class(
    g: NetworkGraph,
    xi: float,
    rng: np.random.Generator,
    eta_high: float = ETA_HIGH_DEFAULT,
    eta_low: float = ETA_LOW_DEFAULT,
) -> QualityAssignment:
    """Mark a uniformly chosen fraction xi of repeaters as high quality."""
    if not 0.0 <= xi <= 1.0:
        raise ValueError(f"xi must be in [0,1], got {xi}")
    repeaters = g.repeaters
    n_hq = hq_count(xi, len(repeaters))
    hq_idx = set(rng.choice(len(repeaters), size=n_hq, replace=False).tolist())
    eta = {
        rep: (eta_high if i in hq_idx else eta_low)
        for i, rep in enumerate(repeaters)
    }
    return QualityAssignment(eta, SCHEME_TWO_CLASS, eta_high, eta_low)


def assign_continuous(
    g: NetworkGraph,
    a: float,
    rng: np.random.Generator,
    eta_high: float = ETA_HIGH_DEFAULT,
    eta_low: float = ETA_LOW_DEFAULT,
) -> QualityAssignment:
    """Draw eta_i = ln(x_i)/a with x_i ~ U(e^(a*eta_low), e^(a*eta_high)).

    Larger a biases the draw toward the high-efficiency end of the range.
    """
    if a <= 0:
        raise ValueError(f"bias parameter a must be > 0, got {a}")
    repeaters = g.repeaters
    x = rng.uniform(
        math.exp(a * eta_low), math.exp(a * eta_high), size=len(repeaters)
    )
    eta = {rep: float(np.log(xi) / a) for rep, xi in zip(repeaters, x)}
    return QualityAssignment(eta, SCHEME_CONTINUOUS, eta_high, eta_low)
