"""Command-line entry points: run | topology | report."""

from __future__ import annotations

import argparse
import dataclasses
import sys
import time
from pathlib import Path

from . import csvio, metrics
from .config import ConfigError, known_edge_count, load_config
from .engine import RAW_COLUMNS, build_topology, grid_points, run_experiment
from .graph import TopologyError

RAW_NAME = "raw.csv"
AGG_NAME = "aggregated.csv"
PMF_NAME = "pmf.csv"
ORDER_NAME = "order_fidelity.csv"


def _add_common(parser: argparse.ArgumentParser):
    parser.add_argument("--config", required=True, help="YAML config file")
    parser.add_argument("--seed", type=int, default=None,
                        help="override the master seed")
    parser.add_argument("--out-dir", default=".", help="output directory")


def _write_aggregates(out_dir: Path, raw_rows, f_threshold, edge_count):
    agg, pmf, order = metrics.aggregate(
        raw_rows, f_threshold=f_threshold, edge_count=edge_count
    )
    csvio.write_csv(out_dir / AGG_NAME, metrics.AGG_COLUMNS, agg)
    csvio.write_csv(out_dir / PMF_NAME, metrics.PMF_COLUMNS, pmf)
    csvio.write_csv(out_dir / ORDER_NAME, metrics.ORDER_COLUMNS, order)


def cmd_run(args) -> int:
    config = load_config(args.config, seed_override=args.seed)
    if args.policy:
        keep = set(args.policy)
        policies = tuple(p for p in config.policies if p.name in keep)
        if not policies:
            print(f"error: no configured policy matches {sorted(keep)}",
                  file=sys.stderr)
            return 2
        config = dataclasses.replace(config, policies=policies)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    started = time.monotonic()
    rows = run_experiment(config, jobs=args.jobs)
    csvio.write_csv(out_dir / RAW_NAME, RAW_COLUMNS, rows)
    # aggregate from the written file so `report` is exactly reproducible
    raw_rows = csvio.read_raw_csv(out_dir / RAW_NAME)
    _write_aggregates(
        out_dir, raw_rows, config.fidelity.f_threshold, known_edge_count(config)
    )
    elapsed = time.monotonic() - started
    n_grid = len(grid_points(config))
    print(
        f"run complete: {n_grid} grid points x {config.n_topology}x"
        f"{config.n_quality} replicas, {len(config.policies)} policies, "
        f"{len(rows)} raw rows, {elapsed:.1f}s"
    )
    print(f"wrote {out_dir / RAW_NAME}, {out_dir / AGG_NAME}, "
          f"{out_dir / PMF_NAME}, {out_dir / ORDER_NAME}")
    return 0


def cmd_topology(args) -> int:
    config = load_config(args.config, seed_override=args.seed)
    point = grid_points(config)[0]
    g = build_topology(config, point, args.replica)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    out = out_dir / "topology.json"
    out.write_text(g.to_json() + "\n")
    print(f"wrote {out} ({len(g.nodes)} nodes, {len(g.edges)} edges)")
    return 0


def cmd_report(args) -> int:
    raw_rows = csvio.read_raw_csv(args.raw)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_aggregates(out_dir, raw_rows, args.threshold, args.edges)
    print(f"wrote {out_dir / AGG_NAME}, {out_dir / PMF_NAME}, "
          f"{out_dir / ORDER_NAME}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qroute",
        description="Entanglement routing simulator for quantum repeater "
                    "networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run the Monte Carlo experiment")
    _add_common(p_run)
    p_run.add_argument("--jobs", type=int, default=1,
                       help="parallel workers over topology replicas")
    p_run.add_argument("--policy", action="append", default=None,
                       help="restrict to named policies (repeatable): "
                            "sp | ka | ksp | kx0 | kx1")
    p_run.set_defaults(func=cmd_run)

    p_topo = sub.add_parser("topology", help="emit one generated graph as JSON")
    _add_common(p_topo)
    p_topo.add_argument("--replica", type=int, default=0,
                        help="topology replica index to emit")
    p_topo.set_defaults(func=cmd_topology)

    p_rep = sub.add_parser("report", help="re-aggregate an existing raw CSV")
    p_rep.add_argument("--raw", required=True, help="raw CSV path")
    p_rep.add_argument("--out-dir", default=".", help="output directory")
    p_rep.add_argument("--threshold", type=float, default=0.53,
                       help="fidelity threshold for the violation rate")
    p_rep.add_argument("--edges", type=int, default=None,
                       help="repeater-graph edge count for the bpe metric")
    p_rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, TopologyError, metrics.MetricsError,
            csvio.CsvError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
