"""Command-line entry point.

Subcommands: run (single trajectory), sweep (velocity / radial / rep-rate),
preset (emit a figure preset as a config file), oracle (hybrid vs brute-force
comparison).  Exit codes: 0 success, 2 config error, 3 integration failure,
4 invariant violation (including a failed oracle comparison), 5 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

import numpy as np

from .config import RunConfig, config_to_text, load_config, parse_config
from .csvio import emit_sweep_csv, emit_trajectory_csv
from .errors import (CombBlochError, ConfigError, IntegrationFailureError,
                     InvariantViolationError, SpanGuardError)
from .presets import PRESET_NAMES, preset
from .propagate import brute_force_run, run_train
from .sweeps import radial_sweep, rep_rate_scenarios, velocity_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_INTEGRATION = 3
EXIT_INVARIANT = 4
EXIT_IO = 5


def _common_options(parser):
    parser.add_argument("--config", help="path to a run configuration file")
    parser.add_argument("--preset", choices=PRESET_NAMES, metavar="NAME",
                        help=f"use a built-in preset ({', '.join(PRESET_NAMES)})")
    parser.add_argument("--out", help="output CSV path")
    parser.add_argument("--workers", type=int,
                        help="sweep worker processes (default: COMBBLOCH_WORKERS "
                             "or the CPU count)")
    parser.add_argument("--steps-per-cycle", type=int, dest="steps_per_cycle",
                        help="override steps_per_carrier_cycle")
    parser.add_argument("--window", type=float,
                        help="override window_half_width (multiples of tau0)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="combbloch",
        description="Pulse-train coherence simulator for a four-level "
                    "double-lambda atom (non-RWA optical Bloch equations).")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a single trajectory and write its CSV")
    _common_options(p_run)

    p_sweep = sub.add_parser("sweep", help="run a velocity/radial/rep-rate sweep")
    _common_options(p_sweep)

    p_preset = sub.add_parser("preset", help="show or emit a figure preset config")
    p_preset.add_argument("name", help=f"one of: {', '.join(PRESET_NAMES)}")
    p_preset.add_argument("--emit-config", metavar="PATH",
                          help="write the config file here instead of stdout")

    p_oracle = sub.add_parser(
        "oracle", help="compare the hybrid propagator against the uniform-step "
                       "brute-force integrator")
    _common_options(p_oracle)
    p_oracle.add_argument("--step-fs", type=float, dest="step_fs",
                          help="brute-force step in fs (default from config or policy)")
    p_oracle.add_argument("--tol", type=float, help="comparison tolerance per element")
    p_oracle.add_argument("--allow-long-span", action="store_true",
                          help="override the 10 ns brute-force span guard")
    return parser


def _load(args) -> RunConfig:
    if args.config and args.preset:
        raise ConfigError("give either --config or --preset, not both")
    if args.config:
        cfg = load_config(args.config)
    elif args.preset:
        # round-trip through the file format so --preset and --config runs of
        # the same preset are bit-identical
        cfg = parse_config(config_to_text(preset(args.preset)),
                           source=f"<preset {args.preset}>")
    else:
        raise ConfigError("a configuration is required (--config PATH or --preset NAME)")
    if args.workers is not None:
        cfg.workers = args.workers
    if args.steps_per_cycle is not None or args.window is not None:
        policy = replace(
            cfg.sim.policy,
            steps_per_carrier_cycle=(args.steps_per_cycle
                                     if args.steps_per_cycle is not None
                                     else cfg.sim.policy.steps_per_carrier_cycle),
            window_half_width=(args.window if args.window is not None
                               else cfg.sim.policy.window_half_width))
        cfg.sim = replace(cfg.sim, policy=policy)
    return cfg


def _out_path(args, cfg: RunConfig, fallback: str) -> str:
    return args.out or cfg.output_path or fallback


def _cmd_run(args) -> int:
    cfg = _load(args)
    if cfg.mode != "single":
        raise ConfigError(
            f"'run' executes single-trajectory configs; this one has mode "
            f"'{cfg.mode}' (use 'sweep' or 'oracle')")
    sim = cfg.sim
    traj = run_train(sim.initial, sim.pulse, sim.policy, sim.levels,
                     sim.decays, sim.radius)
    traj.validate()
    path = _out_path(args, cfg, "trajectory.csv")
    emit_trajectory_csv(traj, path)
    print(f"wrote {len(traj)} snapshots to {path} "
          f"(final |rho12| = {traj.abs_rho12[-1]:.6f})")
    return EXIT_OK


def _cmd_sweep(args) -> int:
    cfg = _load(args)
    sim = cfg.sim
    if cfg.mode == "velocity-sweep":
        result = velocity_sweep(cfg.velocity_grid, sim, workers=cfg.workers)
    elif cfg.mode == "radial-sweep":
        result = radial_sweep(cfg.radial_grid, sim, workers=cfg.workers)
    elif cfg.mode == "rep-rate":
        result = rep_rate_scenarios(cfg.scenarios, sim,
                                    target_avg=cfg.scenario_target_avg,
                                    workers=cfg.workers)
    else:
        raise ConfigError(
            f"'sweep' executes sweep configs; this one has mode '{cfg.mode}'")
    result.validate()
    path = _out_path(args, cfg, "sweep.csv")
    emit_sweep_csv(result, path)
    print(f"wrote {result.n_points} grid points to {path}")
    return EXIT_OK


def _cmd_preset(args) -> int:
    text = config_to_text(preset(args.name))
    if args.emit_config:
        with open(args.emit_config, "w", encoding="utf-8", newline="\n") as f:
            f.write(text)
        print(f"wrote preset '{args.name}' to {args.emit_config}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _cmd_oracle(args) -> int:
    cfg = _load(args)
    if cfg.mode not in ("oracle", "single"):
        raise ConfigError(
            f"'oracle' needs a single-trajectory or oracle-mode config; this one "
            f"has mode '{cfg.mode}'")
    sim = cfg.sim
    step_s = cfg.oracle_step_s
    if args.step_fs is not None:
        step_s = args.step_fs * 1e-15
    tol = args.tol if args.tol is not None else cfg.oracle_tolerance
    allow = args.allow_long_span or cfg.oracle_allow_long_span

    hybrid = run_train(sim.initial, sim.pulse, sim.policy, sim.levels,
                       sim.decays, sim.radius)
    brute = brute_force_run(sim.initial, sim.pulse, sim.policy, sim.levels,
                            sim.decays, sim.radius,
                            step_s=step_s, allow_long_span=allow)
    diff = float(np.max(np.abs(hybrid.states - brute.states)))
    print(f"oracle max |delta| = {diff:.3e} over {len(hybrid)} snapshots "
          f"(tolerance {tol:g})")
    if args.out:
        emit_trajectory_csv(hybrid, args.out)
        print(f"wrote hybrid trajectory to {args.out}")
    if diff > tol:
        raise InvariantViolationError(
            f"hybrid/brute-force disagreement {diff:.3e} exceeds tolerance {tol:g}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    handlers = {"run": _cmd_run, "sweep": _cmd_sweep,
                "preset": _cmd_preset, "oracle": _cmd_oracle}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"combbloch: error [config]: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationFailureError, SpanGuardError) as exc:
        print(f"combbloch: error [integration]: {exc}", file=sys.stderr)
        return EXIT_INTEGRATION
    except InvariantViolationError as exc:
        print(f"combbloch: error [invariant]: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"combbloch: error [io]: {exc}", file=sys.stderr)
        return EXIT_IO
    except CombBlochError as exc:
        print(f"combbloch: error [{exc.category}]: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
