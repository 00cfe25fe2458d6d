"""Command-line interface: scenario ingestion, command dispatch, and
result emission (CSV trajectories, JSON reports, SVG quick-looks).

Exit codes: 0 converged, 3 completed but unconverged, 1 usage/config
error, 2 numerical abort.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .config import ConfigError, ScenarioConfig, parse_config
from .evolution import detect_convergence, direction_field, simulate
from .experiments import SWEEPABLE, SweepSpec, kernel_study, run_sweep
from .fractional import FdeAbortError
from .game import FederationGame, MixedStrategyProfile
from . import svgplot

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NUMERICAL = 2
EXIT_UNCONVERGED = 3


def _fmt(v) -> str:
    if v is None:
        return ""
    return format(float(v), ".17g")


def _metadata(config: ScenarioConfig, alpha: float) -> dict:
    return {
        "config_hash": config.content_hash(),
        "alpha": alpha,
        "gamma": config.gamma,
        "steps": config.solver.steps,
        "version": __version__,
    }


def _meta_comment(meta: dict) -> str:
    return "# " + " ".join(f"{k}={v}" for k, v in meta.items())


def _game(config: ScenarioConfig) -> FederationGame:
    return FederationGame(config.eips, config.tasks,
                          literal_utilization_cost=config.utilization_cost_literal)


def _solver(config: ScenarioConfig, alpha: float | None):
    solver = config.solver
    if alpha is not None:
        solver = dataclasses.replace(solver, alpha=alpha)
    return solver


def _parse_grid(text: str) -> list[float]:
    try:
        lo, hi, step = (float(x) for x in text.split(":"))
    except ValueError:
        raise ValueError(f"grid must be lo:hi:step, got {text!r}")
    if step <= 0 or hi < lo:
        raise ValueError(f"grid must be increasing with positive step, got {text!r}")
    out, v = [], lo
    while v <= hi + 1e-9 * step:
        out.append(round(v, 12))
        v += step
    return out


def cmd_simulate(args) -> int:
    config = parse_config(args.config)
    solver = _solver(config, args.alpha)
    game = _game(config)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    try:
        traj = simulate(game, config.initial_mixed_profile(), solver, config.gamma)
    except FdeAbortError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    report = detect_convergence(traj)
    meta = _metadata(config, solver.alpha)

    header = ["t"] + [f"x_{i + 1}_{j}" for i, e in enumerate(config.eips)
                      for j in range(e.num_strategies)]
    lines = [_meta_comment(meta), ",".join(header)]
    for t, state in zip(traj.times, traj.states):
        lines.append(",".join([_fmt(t)] + [_fmt(v) for v in state]))
    (out / "trajectory.csv").write_text("\n".join(lines) + "\n")

    doc = {
        "equilibrium": [[float(v) for v in b] for b in report.equilibrium.blocks],
        "t_adjacency": report.t_adjacency,
        "t_neighborhood": report.t_neighborhood,
        "utilities": list(report.utilities),
        "residual": report.residual,
        **meta,
    }
    (out / "report.json").write_text(json.dumps(doc, indent=2) + "\n")

    series = {}
    for i, e in enumerate(config.eips):
        block = traj.states[:, sum(x.num_strategies for x in config.eips[:i]):][:, :e.num_strategies]
        series[f"x_{i + 1}_{e.max_workers}"] = block[:, -1].tolist()
    svgplot.line_plot(out / "trajectory.svg", traj.times.tolist(), series,
                      title=f"last-strategy shares, alpha={solver.alpha}",
                      xlabel="t", ylabel="share")
    return EXIT_OK if report.t_adjacency is not None else EXIT_UNCONVERGED


def cmd_sweep(args) -> int:
    config = parse_config(args.config)
    grid = _parse_grid(args.grid)
    if args.param in ("W1", "E1", "n", "k"):
        grid = [int(v) for v in grid]
    spec = SweepSpec(parameter=args.param, grid=tuple(grid), eips=config.eips,
                     tasks=config.tasks, solver=_solver(config, args.alpha),
                     gamma=config.gamma,
                     literal_utilization_cost=config.utilization_cost_literal)
    # each grid scenario must satisfy the config invariants up front
    problems = []
    for v in grid:
        eips, tasks = spec.scenario_at(v)
        for obj, kind in [(e, "eips") for e in eips] + [(t, "tasks") for t in tasks]:
            for err in obj.validation_errors():
                problems.append(f"{args.param}={v}: {kind}: {err}")
    if problems:
        raise ConfigError(problems)

    rows = run_sweep(spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = _metadata(config, spec.solver.alpha)
    cols = list(rows[0].keys())
    lines = [_meta_comment(meta), ",".join(cols)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) if isinstance(row[c], (int, float))
                              else str(row[c]) for c in cols))
    (out / "sweep.csv").write_text("\n".join(lines) + "\n")
    svgplot.line_plot(out / "sweep.svg", [float(r[args.param]) for r in rows],
                      {c: [float(r[c]) for r in rows]
                       for c in ("x1_last", "x2_last")},
                      title=f"sweep over {args.param}", xlabel=args.param,
                      ylabel="equilibrium share")
    return EXIT_OK


def _field_grid(config: ScenarioConfig, values) -> list[MixedStrategyProfile]:
    """Initial profiles with each provider's last-strategy mass set to a
    grid value and the remainder spread uniformly over the other levels.
    """
    import itertools
    profiles = []
    for combo in itertools.product(values, repeat=len(config.eips)):
        blocks = []
        for e, v in zip(config.eips, combo):
            b = np.full(e.num_strategies, (1.0 - v) / (e.num_strategies - 1))
            b[-1] = v
            blocks.append(b)
        profiles.append(MixedStrategyProfile(blocks))
    return profiles


def cmd_field(args) -> int:
    config = parse_config(args.config)
    solver = _solver(config, args.alpha)
    values = _parse_grid(args.grid_spec)
    grid = _field_grid(config, values)
    polylines = direction_field(_game(config), grid, solver, config.gamma,
                                stride=args.stride)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    meta = _metadata(config, solver.alpha)
    doc = {**meta,
           "grid_values": values,
           "stride": args.stride,
           "polylines": [[[float(v) for v in state] for state in line]
                         for line in polylines]}
    (out / "field.json").write_text(json.dumps(doc, indent=2) + "\n")
    # project onto the two last-strategy coordinates for the quick-look
    idx1 = config.eips[0].num_strategies - 1
    idx2 = sum(e.num_strategies for e in config.eips) - 1
    svgplot.polyline_plot(out / "field.svg",
                          [[(state[idx1], state[idx2]) for state in line]
                           for line in polylines],
                          title=f"direction field, alpha={solver.alpha}",
                          xlabel="x_1_last", ylabel="x_2_last")
    return EXIT_OK


def cmd_kernel(args) -> int:
    alphas = [float(v) for v in args.alphas.split(",")]
    deltas = _parse_grid(args.deltas)
    rows = kernel_study(alphas, deltas)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cols = list(rows[0].keys())
    lines = ["# " + f"version={__version__}", ",".join(cols)]
    for row in rows:
        lines.append(",".join(_fmt(row[c]) for c in cols))
    (out / "kernel.csv").write_text("\n".join(lines) + "\n")
    svgplot.line_plot(out / "kernel.svg", deltas,
                      {c: [float(r[c]) for r in rows] for c in cols[1:]},
                      title="memory weight vs time gap", xlabel="delta",
                      ylabel="weight")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cefsim",
        description="Deterministic simulator for the coded-edge-federation "
                    "evolutionary game with fractional replicator dynamics.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="integrate one trajectory and report convergence")
    p.add_argument("config")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="equilibrium sweep over one parameter")
    p.add_argument("config")
    p.add_argument("--param", required=True, choices=SWEEPABLE)
    p.add_argument("--grid", required=True, help="lo:hi:step")
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("field", help="direction field from a grid of initial profiles")
    p.add_argument("config")
    p.add_argument("--grid-spec", default="0.2:0.6:0.1", help="lo:hi:step for each provider's last-strategy mass")
    p.add_argument("--stride", type=int, default=200)
    p.add_argument("--alpha", type=float, default=None)
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_field)

    p = sub.add_parser("kernel", help="memory-kernel weight table")
    p.add_argument("--alphas", required=True, help="comma-separated orders")
    p.add_argument("--deltas", default="0.0001:0.05:0.0001", help="lo:hi:step")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_kernel)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ConfigError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_ERROR
    except FdeAbortError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
