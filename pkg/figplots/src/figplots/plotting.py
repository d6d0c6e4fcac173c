"""Render simulator CSV output as figures.

Consumes exactly the two CSV schemas the simulator CLI emits (trajectory and
long-form sweep) and regenerates desk-scale analogs of the studied figures:
population/coherence time series, coherence-vs-velocity curves, velocity and
radial contour maps, and per-repetition-rate buildup curves.  The coherence
axis is clamped to its physical range [0, 0.5] everywhere.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

# Published CSV schemas of the simulator CLI (the interface contract).
TRAJECTORY_HEADER = ("pulse", "time_s", "rho11", "rho22", "rho33", "rho44",
                     "re_rho12", "im_rho12", "abs_rho12", "trace_err", "herm_err")
SWEEP_HEADER = ("axis_value", "pulse", "abs_rho12")

KINDS = ("trajectory", "velocity-curve", "velocity-contour", "radial-map",
         "rep-rate-curves")
_SWEEP_KINDS = ("velocity-curve", "velocity-contour", "radial-map",
                "rep-rate-curves")

EXIT_INPUT = 2
EXIT_OUTPUT = 5

FIGSIZE = (7.0, 4.5)
DPI = 130


class PlotError(Exception):
    def __init__(self, message, exit_code=EXIT_INPUT):
        super().__init__(message)
        self.exit_code = exit_code


@dataclass(frozen=True)
class PlotJob:
    """One rendering task: input CSV, figure kind, output image path."""

    input_path: str
    kind: str
    output_path: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PlotError(
                f"unknown kind {self.kind!r}; expected one of {', '.join(KINDS)}")


def detect_schema(header) -> str:
    if tuple(header) == TRAJECTORY_HEADER:
        return "trajectory"
    if tuple(header) == SWEEP_HEADER:
        return "sweep"
    for expected, name in ((TRAJECTORY_HEADER, "trajectory"), (SWEEP_HEADER, "sweep")):
        missing = [col for col in expected if col not in header]
        extra = [col for col in header if col not in expected]
        if missing and not extra:
            raise PlotError(
                f"{name} CSV is missing column{'s' if len(missing) > 1 else ''} "
                + ", ".join(f"'{m}'" for m in missing))
    raise PlotError(f"unrecognized CSV header: {','.join(header)}")


def load_columns(path):
    """(schema name, column arrays) of a simulator CSV."""
    p = Path(path)
    if not p.exists():
        raise PlotError(f"input file not found: {path}")
    with open(p, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if not header:
            raise PlotError(f"{path}: empty file, no header")
        schema = detect_schema(header)
        rows = [[float(x) for x in row] for row in reader if row]
    if not rows:
        raise PlotError(f"{path}: no data rows")
    data = np.asarray(rows)
    return schema, {name: data[:, k] for k, name in enumerate(header)}


def _check_kind_matches(job: PlotJob, schema: str):
    wants = "trajectory" if job.kind == "trajectory" else "sweep"
    if schema != wants:
        raise PlotError(
            f"kind '{job.kind}' needs a {wants} CSV but {job.input_path} "
            f"has the {schema} schema")


def _sweep_matrix(cols):
    """Long-form sweep rows -> (axis values, pulse numbers, |rho12| grid)."""
    axis = np.unique(cols["axis_value"])
    pulses = np.unique(cols["pulse"]).astype(int)
    grid = np.full((axis.size, pulses.size), np.nan)
    a_idx = np.searchsorted(axis, cols["axis_value"])
    p_idx = np.searchsorted(pulses, cols["pulse"].astype(int))
    grid[a_idx, p_idx] = cols["abs_rho12"]
    if np.isnan(grid).any():
        raise PlotError("sweep CSV is not a complete grid of "
                        "(axis_value, pulse) rows")
    return axis, pulses, grid


def _plot_trajectory(cols, ax_pop, ax_coh):
    pulse = cols["pulse"]
    for name, label in (("rho11", r"$\rho_{11}$"), ("rho22", r"$\rho_{22}$"),
                        ("rho33", r"$\rho_{33}$"), ("rho44", r"$\rho_{44}$")):
        ax_pop.plot(pulse, cols[name], label=label)
    ax_pop.set_xlabel("pulse number")
    ax_pop.set_ylabel("population")
    ax_pop.set_ylim(0.0, 1.0)
    ax_pop.legend(loc="best", fontsize=8)

    ax_coh.plot(pulse, cols["abs_rho12"], color="tab:red")
    ax_coh.set_xlabel("pulse number")
    ax_coh.set_ylabel(r"$|\rho_{12}|$")
    ax_coh.set_ylim(0.0, 0.5)


def plot(job: PlotJob) -> str:
    """Render one job; returns the output path.

    The input is never modified; rendering twice from the same bytes yields
    the same figure geometry.
    """
    schema, cols = load_columns(job.input_path)
    _check_kind_matches(job, schema)

    if job.kind == "trajectory":
        fig, (ax_pop, ax_coh) = plt.subplots(
            1, 2, figsize=FIGSIZE, dpi=DPI, constrained_layout=True)
        _plot_trajectory(cols, ax_pop, ax_coh)
    elif job.kind == "velocity-curve":
        axis, _, grid = _sweep_matrix(cols)
        fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI, constrained_layout=True)
        ax.plot(axis, grid[:, -1], color="tab:blue")
        ax.set_xlabel("velocity (m/s)")
        ax.set_ylabel(r"final $|\rho_{12}|$")
        ax.set_ylim(0.0, 0.5)
    elif job.kind == "velocity-contour":
        axis, pulses, grid = _sweep_matrix(cols)
        fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI, constrained_layout=True)
        mesh = ax.pcolormesh(pulses, axis, grid, vmin=0.0, vmax=0.5,
                             shading="nearest", cmap="viridis")
        ax.set_xlabel("pulse number")
        ax.set_ylabel("velocity (m/s)")
        fig.colorbar(mesh, ax=ax, label=r"$|\rho_{12}|$")
    elif job.kind == "radial-map":
        axis, pulses, grid = _sweep_matrix(cols)
        fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI, constrained_layout=True)
        mesh = ax.pcolormesh(pulses, axis * 1e6, grid, vmin=0.0, vmax=0.5,
                             shading="nearest", cmap="magma")
        ax.set_xlabel("pulse number")
        ax.set_ylabel("radial position (μm)")
        fig.colorbar(mesh, ax=ax, label=r"$|\rho_{12}|$")
    else:   # rep-rate-curves
        axis, pulses, grid = _sweep_matrix(cols)
        fig, ax = plt.subplots(figsize=FIGSIZE, dpi=DPI, constrained_layout=True)
        for k, rate in enumerate(axis):
            ax.plot(pulses, grid[k], label=f"{rate / 1e6:g} MHz")
        ax.set_xlabel("pulse number")
        ax.set_ylabel(r"$|\rho_{12}|$")
        ax.set_ylim(0.0, 0.5)
        ax.legend(loc="best", fontsize=8, title="repetition rate")

    try:
        fig.savefig(job.output_path)
    except OSError as exc:
        raise PlotError(f"cannot write {job.output_path}: {exc}",
                        exit_code=EXIT_OUTPUT)
    finally:
        plt.close(fig)
    return job.output_path
