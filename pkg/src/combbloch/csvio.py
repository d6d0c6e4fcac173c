"""CSV output of trajectories and sweeps, plus the matching readers.

Headers are part of the external interface and must match byte for byte.
Values are written with 17 significant digits, enough to reproduce every
double exactly on re-parse; identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv

import numpy as np

from .errors import ConfigError
from .propagate import Trajectory
from .sweeps import SweepResult

TRAJECTORY_HEADER = ("pulse", "time_s", "rho11", "rho22", "rho33", "rho44",
                     "re_rho12", "im_rho12", "abs_rho12", "trace_err", "herm_err")
SWEEP_HEADER = ("axis_value", "pulse", "abs_rho12")


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def emit_trajectory_csv(traj: Trajectory, path) -> None:
    """One row per snapshot: populations, ground coherence, and the trace and
    Hermiticity defects as diagnostics."""
    pops = traj.populations
    rho12 = traj.rho12
    abs12 = traj.abs_rho12
    terr = traj.trace_error
    herr = traj.hermiticity_defect
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(TRAJECTORY_HEADER)
        for k in range(len(traj)):
            writer.writerow([
                int(traj.pulse_index[k]), _fmt(traj.time_s[k]),
                _fmt(pops[k, 0]), _fmt(pops[k, 1]), _fmt(pops[k, 2]), _fmt(pops[k, 3]),
                _fmt(rho12[k].real), _fmt(rho12[k].imag), _fmt(abs12[k]),
                _fmt(terr[k]), _fmt(herr[k]),
            ])


def emit_sweep_csv(result: SweepResult, path) -> None:
    """Long form, one row per (grid point, pulse); feeds both line and
    contour plots without reshaping."""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(SWEEP_HEADER)
        for value, row in zip(result.grid, result.rows):
            axis_text = _fmt(value)
            for pulse, abs12 in enumerate(row):
                writer.writerow([axis_text, pulse, _fmt(abs12)])


def load_trajectory_csv(path) -> dict:
    """Read a trajectory CSV back into column arrays keyed by header name."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = tuple(next(reader, ()))
        if header != TRAJECTORY_HEADER:
            raise ConfigError(
                f"{path}: not a trajectory CSV (header {','.join(header)!r})")
        rows = [[float(x) for x in row] for row in reader]
    data = np.array(rows) if rows else np.empty((0, len(TRAJECTORY_HEADER)))
    return {name: data[:, k] for k, name in enumerate(TRAJECTORY_HEADER)}


def load_sweep_csv(path) -> dict:
    """Read a sweep CSV back into column arrays keyed by header name."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = tuple(next(reader, ()))
        if header != SWEEP_HEADER:
            raise ConfigError(
                f"{path}: not a sweep CSV (header {','.join(header)!r})")
        rows = [[float(x) for x in row] for row in reader]
    data = np.array(rows) if rows else np.empty((0, len(SWEEP_HEADER)))
    return {name: data[:, k] for k, name in enumerate(SWEEP_HEADER)}
