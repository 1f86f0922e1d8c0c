"""End-to-end path fidelity and the (optionally noisy) estimate oracle.

A device-to-device path over n interior repeaters with per-repeater
efficiency eta_i and uniform initial link fidelity F has fidelity

    F_p = 1/4 * (1 + 3 * prod_i [(4*eta_i^2 - 1)/3] * [(4F - 1)/3]^(n+1))

i.e. one measurement factor per repeater and one link factor per edge.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .graph import ROLE_REPEATER, NetworkGraph
from .quality import SCHEME_TWO_CLASS, QualityAssignment

F_INIT_DEFAULT = 0.975
F_THRESHOLD_DEFAULT = 0.53


class UnsupportedNoiseScheme(ValueError):
    """Noise perturbation is only defined for the two-class quality scheme."""


@dataclass(frozen=True)
class FidelityParams:
    f_init: float = F_INIT_DEFAULT
    f_threshold: float = F_THRESHOLD_DEFAULT

    def __post_init__(self):
        if not 0.25 < self.f_init <= 1.0:
            raise ValueError(f"f_init must be in (1/4, 1], got {self.f_init}")


def _interior_repeaters(nodes: Sequence[int], g: NetworkGraph) -> list[int]:
    interior = list(nodes[1:-1])
    for v in interior:
        if g.role_of(v) != ROLE_REPEATER:
            raise ValueError(f"interior node {v} is not a repeater")
    return interior


def fidelity_from_etas(etas: Iterable[float], f_init: float) -> float:
    """Eq.-3-style composition from an explicit list of repeater etas."""
    link = (4.0 * f_init - 1.0) / 3.0
    prod = link  # one more link than repeaters
    for eta in etas:
        prod *= ((4.0 * eta * eta - 1.0) / 3.0) * link
    return 0.25 * (1.0 + 3.0 * prod)


def path_fidelity(
    nodes: Sequence[int],
    g: NetworkGraph,
    q: QualityAssignment,
    p: FidelityParams,
) -> float:
    """Exact end-to-end fidelity of a simple device-to-device path."""
    if len(nodes) < 2:
        raise ValueError("path must contain at least one edge")
    etas = [q.eta(v) for v in _interior_repeaters(nodes, g)]
    return fidelity_from_etas(etas, p.f_init)


class NoiseModel:
    """Frozen Gaussian perturbation of the fidelity estimate.

    The unit draw for a path depends only on (seed, path nodes), so
    repeated queries within one routing period return the same value and
    evaluation order never changes results. The standard deviation is
    |F1 - F2| / lambda, where F2 swaps one HQ repeater's eta for the LQ
    value (or vice versa on an all-LQ path; zero on a repeater-free path).
    """

    def __init__(self, lam: float, seed: int):
        if lam <= 0:
            raise ValueError(f"lambda must be > 0, got {lam}")
        self.lam = float(lam)
        self.seed = int(seed)

    def unit_draw(self, nodes: Sequence[int]) -> float:
        key = tuple(nodes) if nodes[0] <= nodes[-1] else tuple(reversed(nodes))
        ss = np.random.SeedSequence([self.seed, *key])
        return float(np.random.default_rng(ss).standard_normal())

    def sigma(
        self,
        nodes: Sequence[int],
        g: NetworkGraph,
        q: QualityAssignment,
        p: FidelityParams,
    ) -> float:
        if q.scheme != SCHEME_TWO_CLASS:
            raise UnsupportedNoiseScheme(
                "noisy estimates are defined only for the two-class scheme"
            )
        etas = [q.eta(v) for v in _interior_repeaters(nodes, g)]
        if not etas:
            return 0.0
        f1 = fidelity_from_etas(etas, p.f_init)
        swapped = list(etas)
        if q.eta_high in swapped:
            swapped[swapped.index(q.eta_high)] = q.eta_low
        else:
            swapped[swapped.index(q.eta_low)] = q.eta_high
        f2 = fidelity_from_etas(swapped, p.f_init)
        return abs(f1 - f2) / self.lam


def estimated_fidelity(
    nodes: Sequence[int],
    g: NetworkGraph,
    q: QualityAssignment,
    p: FidelityParams,
    noise: NoiseModel | None,
) -> float:
    """Fidelity as seen by the controller: exact, or noise-perturbed.

    Noisy values are clamped to [0, 1] to stay in the physical range.
    """
    exact = path_fidelity(nodes, g, q, p)
    if noise is None:
        return exact
    sigma = noise.sigma(nodes, g, q, p)
    if sigma == 0.0:
        return exact
    return min(1.0, max(0.0, exact + sigma * noise.unit_draw(nodes)))


def feasible(
    nodes: Sequence[int],
    g: NetworkGraph,
    q: QualityAssignment,
    p: FidelityParams,
    noise: NoiseModel | None,
) -> bool:
    return estimated_fidelity(nodes, g, q, p, noise) >= p.f_threshold
