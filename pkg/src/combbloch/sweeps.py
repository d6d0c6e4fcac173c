"""Doppler shifts and parameter sweeps over velocity, radius and repetition
frequency.

Grid points are independent runs; they can be dispatched to a process pool of
configurable size, and results are aggregated by grid index so the output does
not depend on worker count or completion order.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .bloch import DecayRates, DensityMatrix, LevelScheme
from .errors import InvariantViolationError
from .field import PulseTrainSpec, avg_rabi, peak_for_avg
from .propagate import IntegrationPolicy, Trajectory, run_train

SPEED_OF_LIGHT = 2.99792458e8

FIXED_PEAK = "fixed-peak"
FIXED_AVERAGE = "fixed-average"

AXIS_VELOCITY = "velocity_m_per_s"
AXIS_RADIUS = "radius_m"
AXIS_REP_RATE = "rep_rate_hz"

_WORKERS_ENV = "COMBBLOCH_WORKERS"


@dataclass(frozen=True)
class DopplerSpec:
    """Longitudinal velocity of an atom group and the reference carrier whose
    wave number sets the shift scale (non-relativistic regime only)."""

    velocity: float
    reference_carrier: float            # rad/s
    speed_of_light: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if abs(self.velocity) >= 1e-3 * self.speed_of_light:
            raise ValueError(
                f"|velocity| must stay below 1e-3*c (non-relativistic), got "
                f"{self.velocity!r} m/s")

    @property
    def wave_number(self) -> float:
        return self.reference_carrier / self.speed_of_light

    @property
    def detuning_hz_per_mps(self) -> float:
        """Optical frequency shift per unit velocity (Hz per m/s)."""
        return self.reference_carrier / (2.0 * np.pi * self.speed_of_light)


def doppler_shift(levels: LevelScheme, d: DopplerSpec) -> LevelScheme:
    """Level scheme seen by an atom group moving at d.velocity.

    All transition frequencies are scaled by (1 + V/c); the induced shift of
    the ground splitting is kHz-scale and physically consistent with shifting
    the optical lines by k*V.
    """
    scale = 1.0 + d.velocity / d.speed_of_light
    return LevelScheme(omega21=levels.omega21 * scale,
                       omega31=levels.omega31 * scale,
                       omega41=levels.omega41 * scale)


@dataclass(frozen=True, eq=False)
class SimConfig:
    """Everything one run_train needs: atom, drive, policy, geometry, start."""

    levels: LevelScheme
    decays: DecayRates
    pulse: PulseTrainSpec
    policy: IntegrationPolicy = IntegrationPolicy()
    radius: float = 0.0
    initial: DensityMatrix = field(default_factory=DensityMatrix.equal_ground_mixture)

    def run(self) -> Trajectory:
        return run_train(self.initial, self.pulse, self.policy,
                         self.levels, self.decays, self.radius)


@dataclass
class SweepResult:
    """Per-pulse |rho12| rows over an ordered grid, plus state diagnostics.

    ``rows[i]`` is the full per-pulse |rho12| sequence (snapshot 0 included)
    at grid point i; the final-value curve is derived from the last entries.
    """

    axis: str
    grid: np.ndarray
    rows: list
    max_trace_err: np.ndarray
    max_herm_defect: np.ndarray
    min_eigenvalue: np.ndarray

    @property
    def n_points(self) -> int:
        return len(self.grid)

    @property
    def final(self) -> np.ndarray:
        return np.array([row[-1] for row in self.rows]) if self.rows else np.empty(0)

    def matrix(self) -> np.ndarray:
        """Rows stacked 2D (requires equal pulse counts per point)."""
        return np.vstack(self.rows)

    def validate(self, *, trace_tol: float = 1e-9, herm_tol: float = 1e-12,
                 eig_tol: float = 1e-9) -> None:
        problems = []
        if self.n_points > 1 and np.any(np.diff(self.grid) <= 0):
            problems.append("grid not strictly increasing")
        for row in self.rows:
            if np.any(np.asarray(row) > 0.5 + 1e-9) or np.any(np.asarray(row) < 0.0):
                problems.append("|rho12| outside [0, 0.5 + 1e-9]")
                break
        if self.n_points:
            if self.max_trace_err.max(initial=0.0) > trace_tol:
                problems.append(f"max |trace-1| = {self.max_trace_err.max():.3e}")
            if self.max_herm_defect.max(initial=0.0) > herm_tol:
                problems.append(f"max hermiticity defect = {self.max_herm_defect.max():.3e}")
            if self.min_eigenvalue.min(initial=0.0) < -eig_tol:
                problems.append(f"min eigenvalue = {self.min_eigenvalue.min():.3e}")
        if problems:
            raise InvariantViolationError("; ".join(problems))


def resolve_workers(workers: int | None = None) -> int:
    """Worker count: explicit argument, else COMBBLOCH_WORKERS, else cpu count."""
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(_WORKERS_ENV)
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _reduce_run(job) -> tuple:
    config, velocity = job
    levels = config.levels
    if velocity != 0.0:
        d = DopplerSpec(velocity=velocity,
                        reference_carrier=config.pulse.carrier_freq)
        levels = doppler_shift(levels, d)
    traj = run_train(config.initial, config.pulse, config.policy,
                     levels, config.decays, config.radius)
    diag = traj.diagnostics()
    return (traj.abs_rho12, diag["max_trace_err"], diag["max_herm_defect"],
            diag["min_eigenvalue"])


def _map_jobs(jobs, workers):
    n = resolve_workers(workers)
    if n <= 1 or len(jobs) <= 1:
        return [_reduce_run(job) for job in jobs]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(_reduce_run, jobs, chunksize=max(1, len(jobs) // (4 * n))))


def _collect(axis, grid, results) -> SweepResult:
    return SweepResult(
        axis=axis,
        grid=np.asarray(grid, dtype=np.float64),
        rows=[res[0] for res in results],
        max_trace_err=np.array([res[1] for res in results]),
        max_herm_defect=np.array([res[2] for res in results]),
        min_eigenvalue=np.array([res[3] for res in results]),
    )


def _check_grid(grid, what) -> np.ndarray:
    g = np.asarray(grid, dtype=np.float64)
    if g.size == 0:
        raise ValueError(f"{what} grid must be nonempty")
    if g.size > 1 and np.any(np.diff(g) <= 0):
        raise ValueError(f"{what} grid must be strictly increasing")
    return g


def velocity_sweep(grid, config: SimConfig, *, workers: int | None = None) -> SweepResult:
    """run_train for every velocity group, with Doppler-shifted levels."""
    g = _check_grid(grid, "velocity")
    jobs = [(config, float(v)) for v in g]
    return _collect(AXIS_VELOCITY, g, _map_jobs(jobs, workers))


def radial_sweep(grid, config: SimConfig, *, workers: int | None = None) -> SweepResult:
    """run_train at every radial position within the beam cross-section."""
    g = _check_grid(grid, "radius")
    if g[0] < 0.0 or g[-1] > 3.0 * config.pulse.waist:
        raise ValueError(
            f"radius grid must lie within [0, 3*W0] = [0, {3.0 * config.pulse.waist!r}]")
    jobs = [(replace(config, radius=float(r)), 0.0) for r in g]
    results = _map_jobs(jobs, workers)
    return _collect(AXIS_RADIUS, g, results)


def scenario_pulse(config: SimConfig, rep_rate_hz: float, mode: str,
                   target_avg: float | None = None) -> PulseTrainSpec:
    """Pulse spec for one repetition-frequency scenario.

    fixed-peak keeps the base peak amplitude; fixed-average recomputes the
    peak so the on-axis average Rabi frequency matches ``target_avg``
    (default: the base train's).  The carrier stays comb-locked when the
    cycles-per-period count lands on an integer.
    """
    if mode not in (FIXED_PEAK, FIXED_AVERAGE):
        raise ValueError(
            f"amplitude mode must be '{FIXED_PEAK}' or '{FIXED_AVERAGE}', got {mode!r}")
    base = config.pulse
    period = 1.0 / rep_rate_hz
    if mode == FIXED_AVERAGE:
        target = avg_rabi(base, 0.0) if target_avg is None else target_avg
        peak = peak_for_avg(target, base.tau0, period)
    else:
        peak = base.peak_rabi
    q = base.carrier_freq * period / (2.0 * np.pi)
    q_int = round(q)
    if q_int > 0 and abs(q - q_int) <= 1e-9 * q:
        q = float(q_int)
    return replace(base, period=period, peak_rabi=peak, cycles_per_period=q)


def _scenario_job(config: SimConfig, rep_rate_hz, mode, target_avg):
    pulse = scenario_pulse(config, float(rep_rate_hz), mode, target_avg)
    return (replace(config, pulse=pulse), 0.0)


def rep_rate_scenarios(scenarios, config: SimConfig, *,
                       target_avg: float | None = None,
                       workers: int | None = None) -> SweepResult:
    """run_train per (repetition frequency, amplitude-mode) scenario.

    Scenarios are ordered by repetition frequency; an empty list yields an
    empty result.
    """
    entries = sorted(((float(nu), mode) for nu, mode in scenarios), key=lambda e: e[0])
    if not entries:
        return _collect(AXIS_REP_RATE, np.empty(0), [])
    g = _check_grid([nu for nu, _ in entries], "repetition-frequency")
    jobs = [_scenario_job(config, nu, mode, target_avg) for nu, mode in entries]
    return _collect(AXIS_REP_RATE, g, _map_jobs(jobs, workers))
