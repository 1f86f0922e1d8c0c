import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qroute.metrics import (
    MetricsError,
    aggregate,
    blocking_probability,
    bp_per_edge,
    fidelity_by_order,
    fit_gamma,
    jain_index,
    path_length_pmf,
)


def make_rows(statuses, replica=(0, 0), policy="sp", lengths=None,
              fidelities=None, lam=None):
    rows = []
    for i, status in enumerate(statuses):
        rows.append({
            "policy": policy, "topology": "random", "xi": 0.8, "a": None,
            "beta": 0.275, "lambda": lam, "n_sd": len(statuses),
            "replica_topo": replica[0], "replica_quality": replica[1],
            "order_index": i + 1, "pair_id": i, "status": status,
            "path_len": (lengths[i] if lengths else 7)
            if status == "served" else None,
            "fidelity_true": (fidelities[i] if fidelities else 0.6)
            if status == "served" else None,
            "fidelity_est": (fidelities[i] if fidelities else 0.6)
            if status == "served" else None,
        })
    return rows


class TestBlockingProbability:
    def test_five_row_fixture(self):
        rows = make_rows(["served", "served", "blocked", "served", "served"])
        mean, ci = blocking_probability(rows)
        assert mean == pytest.approx(0.2)
        assert ci is None  # single replica

    def test_boundaries(self):
        assert blocking_probability(make_rows(["served"] * 4))[0] == 0.0
        assert blocking_probability(make_rows(["blocked"] * 4))[0] == 1.0

    def test_t_multiplier_df99(self):
        from scipy import stats

        assert stats.t.ppf(0.975, 99) == pytest.approx(1.984, abs=1e-3)

    def test_ci_over_replicas(self):
        rows = []
        for t in range(100):
            statuses = ["blocked"] * (t % 2) + ["served"] * (5 - t % 2)
            rows += make_rows(statuses, replica=(t, 0))
        mean, ci = blocking_probability(rows)
        assert mean == pytest.approx(0.1)
        s = np.std([0.2] * 50 + [0.0] * 50, ddof=1)
        assert ci == pytest.approx(1.9842 * s / 10, rel=1e-3)

    def test_mean_equals_pooled_for_equal_nsd(self):
        rows = make_rows(["served", "blocked", "served", "served", "blocked"],
                         replica=(0, 0))
        rows += make_rows(["served"] * 5, replica=(0, 1))
        mean, _ = blocking_probability(rows)
        pooled = sum(1 for r in rows if r["status"] == "blocked") / len(rows)
        assert mean == pytest.approx(pooled)

    def test_empty_rejected(self):
        with pytest.raises(MetricsError):
            blocking_probability([])


class TestBpPerEdge:
    def test_division(self):
        rows = make_rows(["blocked"] * 9 + ["served"] * 41)
        assert bp_per_edge(rows, 45) == pytest.approx(0.18 / 45)

    def test_zero_bp(self):
        assert bp_per_edge(make_rows(["served"] * 5), 45) == 0.0

    def test_invalid_edge_count(self):
        with pytest.raises(MetricsError):
            bp_per_edge(make_rows(["served"]), 0)


class TestPmf:
    def test_single_length(self):
        rows = make_rows(["served"] * 3)
        assert path_length_pmf(rows) == {7: 1.0}

    def test_no_served(self):
        assert path_length_pmf(make_rows(["blocked"] * 3)) == {}

    def test_normalization(self):
        rows = make_rows(["served"] * 4, lengths=[3, 3, 5, 7])
        pmf = path_length_pmf(rows)
        assert sum(pmf.values()) == pytest.approx(1.0)
        assert pmf[3] == pytest.approx(0.5)


class TestJain:
    def test_all_equal(self):
        assert jain_index([3, 3, 3, 3, 3]) == pytest.approx(1.0)

    def test_single_winner(self):
        assert jain_index([5, 0, 0, 0, 0]) == pytest.approx(0.2)

    def test_two_one(self):
        assert jain_index([2, 1]) == pytest.approx(0.9)

    def test_all_zero_undefined(self):
        assert jain_index([0, 0, 0]) is None

    @given(
        x=st.lists(st.integers(0, 50), min_size=2, max_size=10).filter(
            lambda v: any(v)
        ),
        c=st.floats(0.01, 100.0),
    )
    @settings(max_examples=200, deadline=None)
    def test_scale_invariant_and_bounded(self, x, c):
        j = jain_index(x)
        assert jain_index([c * v for v in x]) == pytest.approx(j, rel=1e-9)
        assert 1 / len(x) - 1e-12 <= j <= 1 + 1e-12


class TestFidelityByOrder:
    def test_singletons(self):
        rows = make_rows(["served", "served"], fidelities=[0.6, 0.7])
        out = fidelity_by_order(rows)
        assert out[1]["count"] == 1
        assert out[1]["mean"] == pytest.approx(0.6)
        assert out[2]["mean"] == pytest.approx(0.7)

    def test_blocked_excluded(self):
        rows = make_rows(["served", "blocked"], fidelities=[0.6, 0.7])
        assert set(fidelity_by_order(rows)) == {1}


class TestFitGamma:
    def test_recovers_synthetic_exponent(self):
        ne0, bpe0 = 45.0, 0.004
        points = [(ne0, bpe0)] + [
            (ne, bpe0 * (ne0 / ne) ** 1.8) for ne in (60.0, 75.0, 120.0)
        ]
        gamma, r2 = fit_gamma(points)
        assert gamma == pytest.approx(1.8, abs=1e-9)
        assert r2 == pytest.approx(1.0, abs=1e-12)

    def test_identical_points_rejected(self):
        with pytest.raises(MetricsError):
            fit_gamma([(45.0, 0.004), (45.0, 0.004)])

    def test_nonpositive_excluded(self):
        with pytest.raises(MetricsError):
            fit_gamma([(45.0, 0.004), (60.0, 0.0)])

    def test_noisy_fit_reasonable(self):
        rng = np.random.default_rng(0)
        ne0, bpe0 = 45.0, 0.004
        points = [(ne0, bpe0)] + [
            (ne, bpe0 * (ne0 / ne) ** 1.8 * math.exp(rng.normal(0, 0.01)))
            for ne in (60.0, 75.0, 120.0)
        ]
        gamma, r2 = fit_gamma(points)
        assert gamma == pytest.approx(1.8, abs=0.1)
        assert r2 > 0.95


class TestAggregate:
    def test_metric_rows_and_pmf(self):
        rows = make_rows(["served", "served", "blocked", "served", "served"])
        agg, pmf, order = aggregate(rows, f_threshold=0.53, edge_count=45)
        metrics = {r["metric"]: r["value"] for r in agg}
        assert metrics["bp"] == pytest.approx(0.2)
        assert metrics["bpe"] == pytest.approx(0.2 / 45)
        assert sum(r["probability"] for r in pmf) == pytest.approx(1.0)
        assert len(order) == 4  # one per served theta

    def test_violation_rate_only_with_noise(self):
        rows = make_rows(["served"] * 5, fidelities=[0.6, 0.5, 0.6, 0.6, 0.4],
                         lam=8.0)
        agg, _, _ = aggregate(rows, f_threshold=0.53)
        metrics = {r["metric"]: r["value"] for r in agg}
        assert metrics["violation_rate"] == pytest.approx(0.4)

    def test_jain_present(self):
        rows = make_rows(["served", "blocked", "served", "served", "served"])
        agg, _, _ = aggregate(rows)
        metrics = {r["metric"]: r["value"] for r in agg}
        assert metrics["jain"] == pytest.approx(jain_index([1, 0, 1, 1, 1]))

    def test_empty_rejected(self):
        with pytest.raises(MetricsError):
            aggregate([])
