import numpy as np
import pytest

from conftest import ETA_H, ETA_L, build_graph, exhaustive_simple_paths, two_class
from qroute.fidelity import FidelityParams, estimated_fidelity, fidelity_from_etas
from qroute.graph import ROLE_DEST, ROLE_REPEATER, ROLE_SOURCE
from qroute.policy import (
    PolicySpec,
    ka_costs,
    parse_policy,
    select_path,
    select_with_oracle,
)
from test_pathfind import random_test_graph

ALL_POLICIES = [
    PolicySpec("sp"),
    PolicySpec("ka"),
    PolicySpec("ksp"),
    PolicySpec("kx", x=0),
    PolicySpec("kx", x=1),
]


def oracle_tie_set(spec, g, q, p, s, d):
    """Brute-force optimal set per policy over all simple paths."""
    paths = exhaustive_simple_paths(g, s, d)
    fid = {n: estimated_fidelity(n, g, q, p, None) for n in paths}
    feas = [n for n in paths if fid[n] >= p.f_threshold]
    if not feas:
        return set()
    if spec.kind == "sp":
        best = min(len(n) for n in feas)
        return {n for n in feas if len(n) == best}
    if spec.kind == "ka":
        costs = ka_costs(spec, q)
        cost = {n: sum(costs.get(v, 0.0) for v in n) for n in feas}
        best = min(cost.values())
        return {n for n in feas if cost[n] == best}
    if spec.kind == "ksp":
        best = min(fid[n] for n in feas)
        return {n for n in feas if fid[n] == best}
    # kx
    l_b = min(len(n) for n in feas)
    allowed = [n for n in feas if len(n) <= l_b + spec.x]
    best = min(fid[n] for n in allowed)
    return {n for n in allowed if fid[n] == best}


class TestParsePolicy:
    def test_names(self):
        assert parse_policy("sp").kind == "sp"
        assert parse_policy("kx0") == PolicySpec("kx", x=0)
        assert parse_policy("kx1").x == 1
        assert parse_policy("ksp", k=50).k == 50

    def test_unknown(self):
        with pytest.raises(ValueError):
            parse_policy("bogus")

    def test_validation(self):
        with pytest.raises(ValueError):
            PolicySpec("sp", k=0)
        with pytest.raises(ValueError):
            PolicySpec("kx", x=-1)


class TestDiamondExamples:
    """S(0) - A(1, HQ) - D(3) vs S(0) - B(2, LQ) - D(3)."""

    def run(self, spec, diamond, seed=0):
        g, q = diamond
        return select_path(
            spec, g, None, q, FidelityParams(), None, 0, 3,
            np.random.default_rng(seed),
        )

    def test_sp_uniform_over_both(self, diamond):
        seen = {self.run(PolicySpec("sp"), diamond, seed).nodes
                for seed in range(50)}
        assert seen == {(0, 1, 3), (0, 2, 3)}

    def test_ksp_picks_lower_fidelity(self, diamond):
        assert self.run(PolicySpec("ksp"), diamond).nodes == (0, 2, 3)

    def test_kx0_picks_lower_fidelity(self, diamond):
        assert self.run(PolicySpec("kx", x=0), diamond).nodes == (0, 2, 3)

    def test_ka_picks_cheap_lq(self, diamond):
        assert self.run(PolicySpec("ka"), diamond).nodes == (0, 2, 3)

    def test_all_blocked_when_infeasible(self):
        # every route crosses two LQ repeaters -> 0.433188 < 0.53
        g = build_graph(
            [ROLE_SOURCE, ROLE_REPEATER, ROLE_REPEATER, ROLE_DEST],
            [(0, 1), (1, 2), (2, 3)],
        )
        q = two_class({1: ETA_L, 2: ETA_L})
        for spec in ALL_POLICIES:
            got = select_path(
                spec, g, None, q, FidelityParams(), None, 0, 3,
                np.random.default_rng(0),
            )
            assert got is None


class TestLengthPreference:
    def make_two_lane(self):
        # two all-HQ feasible routes of node lengths 3 and 5
        g = build_graph(
            [ROLE_SOURCE, ROLE_REPEATER, ROLE_REPEATER, ROLE_REPEATER,
             ROLE_REPEATER, ROLE_DEST],
            [(0, 1), (1, 5), (0, 2), (2, 3), (3, 4), (4, 5)],
        )
        q = two_class({i: ETA_H for i in range(1, 5)})
        return g, q

    def test_ksp_takes_longer_lower_fidelity_route(self):
        g, q = self.make_two_lane()
        path = select_path(
            PolicySpec("ksp"), g, None, q, FidelityParams(), None, 0, 5,
            np.random.default_rng(0),
        )
        assert path.length == 5

    def test_kx0_takes_shortest_feasible(self):
        g, q = self.make_two_lane()
        path = select_path(
            PolicySpec("kx", x=0), g, None, q, FidelityParams(), None, 0, 5,
            np.random.default_rng(0),
        )
        assert path.length == 3


class TestOracleEquivalence:
    @pytest.mark.parametrize("spec", ALL_POLICIES, ids=lambda s: s.name)
    def test_matches_brute_force(self, spec):
        p = FidelityParams()
        # k large enough to cover every simple path on <= 10 nodes
        wide = PolicySpec(spec.kind, k=10_000, x=spec.x, k_enum=10_000)
        for seed in range(250):
            g, s, d = random_test_graph(seed)
            rng = np.random.default_rng(seed)
            n_rep = len(g.repeaters)
            etas = {
                v: (ETA_H if rng.random() < 0.7 else ETA_L)
                for v in g.repeaters
            }
            q = two_class(etas)
            tie_set = oracle_tie_set(wide, g, q, p, s, d)
            got = select_path(wide, g, None, q, p, None, s, d, rng)
            if not tie_set:
                assert got is None
            else:
                assert got is not None
                assert got.nodes in tie_set

    def test_ksp_min_below_kx0_min(self):
        # argmin property: KSP fidelity <= KX(0) fidelity <= any feasible
        # candidate of length L_b
        p = FidelityParams()
        rng_master = np.random.default_rng(0)
        checked = 0
        for seed in range(250):
            g, s, d = random_test_graph(seed)
            etas = {
                v: (ETA_H if rng_master.random() < 0.7 else ETA_L)
                for v in g.repeaters
            }
            q = two_class(etas)
            ksp = select_path(
                PolicySpec("ksp", k=10_000), g, None, q, p, None, s, d,
                np.random.default_rng(seed),
            )
            kx0 = select_path(
                PolicySpec("kx", k=10_000), g, None, q, p, None, s, d,
                np.random.default_rng(seed),
            )
            if ksp is None or kx0 is None:
                assert ksp is None and kx0 is None
                continue
            f_ksp = estimated_fidelity(ksp.nodes, g, q, p, None)
            f_kx0 = estimated_fidelity(kx0.nodes, g, q, p, None)
            assert f_ksp <= f_kx0 + 1e-12
            checked += 1
        assert checked > 50


class TestInvariants:
    def test_returned_path_always_feasible(self):
        p = FidelityParams()
        for seed in range(100):
            g, s, d = random_test_graph(seed)
            rng = np.random.default_rng(seed)
            q = two_class({
                v: (ETA_H if rng.random() < 0.5 else ETA_L)
                for v in g.repeaters
            })
            for spec in ALL_POLICIES:
                got = select_path(spec, g, None, q, p, None, s, d, rng)
                if got is not None:
                    assert estimated_fidelity(got.nodes, g, q, p, None) >= (
                        p.f_threshold
                    )

    def test_kx0_returns_minimal_feasible_length(self):
        p = FidelityParams()
        for seed in range(100):
            g, s, d = random_test_graph(seed)
            rng = np.random.default_rng(seed)
            q = two_class({
                v: (ETA_H if rng.random() < 0.5 else ETA_L)
                for v in g.repeaters
            })
            wide = PolicySpec("kx", k=10_000, x=0)
            got = select_path(wide, g, None, q, p, None, s, d, rng)
            if got is None:
                continue
            feas_lens = [
                len(n)
                for n in exhaustive_simple_paths(g, s, d)
                if estimated_fidelity(n, g, q, p, None) >= p.f_threshold
            ]
            assert got.length == min(feas_lens)

    def test_uniform_eta_policies_agree_on_length(self, diamond):
        g, _ = diamond
        q = two_class({1: ETA_H, 2: ETA_H})
        p = FidelityParams()
        for name in ("sp", "ka", "kx0"):
            got = select_path(
                parse_policy(name), g, None, q, p, None, 0, 3,
                np.random.default_rng(1),
            )
            assert got.length == 3


class TestGreyBoxPurity:
    def test_quality_blind_oracle_gives_identical_decisions(self):
        # KSP/KX must be computable from topology + fidelity estimates only
        p = FidelityParams()
        for seed in range(50):
            g, s, d = random_test_graph(seed)
            rng = np.random.default_rng(seed)
            q = two_class({
                v: (ETA_H if rng.random() < 0.6 else ETA_L)
                for v in g.repeaters
            })
            # precomputed estimate table, no quality object in sight
            table = {
                n: estimated_fidelity(n, g, q, p, None)
                for n in exhaustive_simple_paths(g, s, d)
            }
            for spec in (PolicySpec("ksp"), PolicySpec("kx", x=0),
                         PolicySpec("kx", x=1)):
                blind = select_with_oracle(
                    spec, g, None, table.__getitem__, p.f_threshold, s, d,
                    np.random.default_rng(seed),
                )
                full = select_path(
                    spec, g, None, q, p, None, s, d,
                    np.random.default_rng(seed),
                )
                assert (blind is None) == (full is None)
                if blind is not None:
                    assert blind.nodes == full.nodes

    def test_ka_requires_two_class(self):
        from qroute.quality import QualityAssignment

        g = build_graph(
            [ROLE_SOURCE, ROLE_REPEATER, ROLE_DEST], [(0, 1), (1, 2)]
        )
        q = QualityAssignment({1: 0.9}, "continuous", ETA_H, ETA_L)
        with pytest.raises(ValueError):
            select_path(
                PolicySpec("ka"), g, None, q, FidelityParams(), None, 0, 2,
                np.random.default_rng(0),
            )
