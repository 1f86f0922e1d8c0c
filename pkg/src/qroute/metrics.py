"""Aggregation of raw pair-decision rows into performance figures.

Replica means (one blocking fraction per topology x quality replica) are
the unit for t-Student 95% confidence intervals. Jain's index is
computed per topology replica over the per-pair served counts across its
quality replicas, then averaged.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from typing import Iterable, Sequence

import numpy as np
from scipy import stats

GROUP_KEYS = ["policy", "topology", "xi", "a", "beta", "lambda", "n_sd"]
ORDER_QUANTILES = (0.05, 0.25, 0.50, 0.75, 0.95)

AGG_COLUMNS = GROUP_KEYS + ["metric", "value", "ci_half"]
PMF_COLUMNS = GROUP_KEYS + ["path_len", "probability"]
ORDER_COLUMNS = GROUP_KEYS + [
    "theta", "count", "mean", "q05", "q25", "q50", "q75", "q95",
]


class MetricsError(ValueError):
    pass


def _t_ci_half(values: Sequence[float]) -> float | None:
    n = len(values)
    if n < 2:
        return None
    s = float(np.std(values, ddof=1))
    t_mult = float(stats.t.ppf(0.975, n - 1))
    return t_mult * s / math.sqrt(n)


def _replica_key(row: dict) -> tuple[int, int]:
    return (row["replica_topo"], row["replica_quality"])


def blocking_probability(rows: list[dict]) -> tuple[float, float | None]:
    """Mean of per-replica blocked fractions and its 95% t-CI half-width."""
    if not rows:
        raise MetricsError("no rows")
    per_replica: dict[tuple[int, int], list[str]] = defaultdict(list)
    for row in rows:
        per_replica[_replica_key(row)].append(row["status"])
    fractions = [
        sum(1 for s in statuses if s == "blocked") / len(statuses)
        for statuses in per_replica.values()
    ]
    return float(np.mean(fractions)), _t_ci_half(fractions)


def bp_per_edge(rows: list[dict], edge_count: int) -> float:
    """Blocking probability normalized by repeater-graph edge count."""
    if edge_count <= 0:
        raise MetricsError(f"edge_count must be > 0, got {edge_count}")
    mean, _ = blocking_probability(rows)
    return mean / edge_count


def path_length_pmf(rows: list[dict]) -> dict[int, float]:
    """Empirical distribution of L_p over served rows only."""
    lengths = [row["path_len"] for row in rows if row["status"] == "served"]
    if not lengths:
        return {}
    counts = Counter(lengths)
    total = len(lengths)
    return {length: counts[length] / total for length in sorted(counts)}


def jain_index(served_counts: Iterable[float]) -> float | None:
    """Jain's fairness (sum x)^2 / (n * sum x^2); None when all x_i = 0."""
    x = np.asarray(list(served_counts), dtype=float)
    if x.size == 0 or not x.any():
        return None
    return float(x.sum() ** 2 / (x.size * (x**2).sum()))


def fidelity_by_order(rows: list[dict]) -> dict[int, dict]:
    """Per serving position theta: count, mean, and quantiles of the true
    fidelity of served pairs (source data for violin plots)."""
    by_theta: dict[int, list[float]] = defaultdict(list)
    for row in rows:
        if row["status"] == "served":
            by_theta[row["order_index"]].append(row["fidelity_true"])
    out = {}
    for theta in sorted(by_theta):
        vals = np.asarray(by_theta[theta])
        qs = np.quantile(vals, ORDER_QUANTILES)
        out[theta] = {
            "count": int(vals.size),
            "mean": float(vals.mean()),
            "quantiles": {p: float(v) for p, v in zip(ORDER_QUANTILES, qs)},
        }
    return out


def fit_gamma(
    points: list[tuple[float, float]], baseline_index: int = 0
) -> tuple[float, float]:
    """Fit the edge-count scaling exponent of BP/E.

    Least squares on log(bpe_i / bpe_0) = gamma * log(n_e_0 / n_e_i) with
    the designated baseline point (n_e_0, bpe_0). Points with bpe <= 0
    are excluded; fewer than 2 usable points or zero log-span is an error.
    Returns (gamma, r_squared).
    """
    if baseline_index >= len(points) or points[baseline_index][1] <= 0:
        raise MetricsError("baseline point must have positive bpe")
    ne0, bpe0 = points[baseline_index]
    others = [
        (ne, bpe)
        for i, (ne, bpe) in enumerate(points)
        if i != baseline_index and bpe > 0 and ne > 0
    ]
    if not others:
        raise MetricsError("need at least 2 points with positive bpe")
    z = np.array([math.log(ne0 / ne) for ne, _ in others])
    y = np.array([math.log(bpe / bpe0) for _, bpe in others])
    if not np.any(z != 0):
        raise MetricsError("zero log-span between baseline and other points")
    gamma = float((z * y).sum() / (z * z).sum())
    residuals = y - gamma * z
    ss_res = float((residuals**2).sum())
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0 - ss_res
    return gamma, r2


def _group_rows(rows: list[dict]) -> dict[tuple, list[dict]]:
    groups: dict[tuple, list[dict]] = defaultdict(list)
    for row in rows:
        groups[tuple(row[k] for k in GROUP_KEYS)].append(row)
    return groups


def _jain_stats(rows: list[dict]) -> tuple[float, float | None] | None:
    by_topo: dict[int, Counter] = defaultdict(Counter)
    for row in rows:
        if row["status"] == "served":
            by_topo[row["replica_topo"]][row["pair_id"]] += 1
    topo_ids = sorted({row["replica_topo"] for row in rows})
    n_pairs = len({row["pair_id"] for row in rows})
    values = []
    for t in topo_ids:
        counts = [by_topo[t].get(i, 0) for i in range(n_pairs)]
        j = jain_index(counts)
        if j is not None:
            values.append(j)
    if not values:
        return None
    return float(np.mean(values)), _t_ci_half(values)


def _mean_path_len(rows: list[dict]) -> tuple[float, float | None] | None:
    per_replica: dict[tuple[int, int], list[int]] = defaultdict(list)
    for row in rows:
        if row["status"] == "served":
            per_replica[_replica_key(row)].append(row["path_len"])
    if not per_replica:
        return None
    means = [float(np.mean(v)) for v in per_replica.values()]
    return float(np.mean(means)), _t_ci_half(means)


def aggregate(
    rows: list[dict],
    f_threshold: float | None = None,
    edge_count: int | None = None,
) -> tuple[list[dict], list[dict], list[dict]]:
    """Produce the three aggregated tables: metrics, PMF, and per-order
    fidelity distributions, one block per (policy, grid point).

    ``edge_count`` enables the bpe metric; ``f_threshold`` enables the
    threshold-violation rate on noisy runs.
    """
    if not rows:
        raise MetricsError("no raw rows to aggregate")
    metric_rows, pmf_rows, order_rows = [], [], []
    for key, group in sorted(_group_rows(rows).items(), key=lambda kv: _sort_key(kv[0])):
        base = dict(zip(GROUP_KEYS, key))

        def emit(metric: str, value: float, ci_half: float | None):
            metric_rows.append({**base, "metric": metric,
                                "value": value, "ci_half": ci_half})

        bp_mean, bp_ci = blocking_probability(group)
        emit("bp", bp_mean, bp_ci)
        if edge_count is not None:
            emit("bpe", bp_mean / edge_count, None)
        jain = _jain_stats(group)
        if jain is not None:
            emit("jain", jain[0], jain[1])
        mpl = _mean_path_len(group)
        if mpl is not None:
            emit("mean_path_len", mpl[0], mpl[1])
        if base["lambda"] is not None and f_threshold is not None:
            served = [r for r in group if r["status"] == "served"]
            if served:
                viol = sum(
                    1 for r in served if r["fidelity_true"] < f_threshold
                ) / len(served)
                emit("violation_rate", viol, None)

        for length, prob in path_length_pmf(group).items():
            pmf_rows.append({**base, "path_len": length, "probability": prob})
        for theta, summary in fidelity_by_order(group).items():
            order_rows.append({
                **base, "theta": theta,
                "count": summary["count"], "mean": summary["mean"],
                **{
                    f"q{int(p * 100):02d}": v
                    for p, v in summary["quantiles"].items()
                },
            })
    return metric_rows, pmf_rows, order_rows


def _sort_key(key: tuple) -> tuple:
    return tuple((v is None, v) for v in key)
