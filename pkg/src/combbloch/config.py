"""Run configuration: flat key = value files with section headers.

The file format accepts the units used in the source material (rad/fs, MHz,
fs, um, THz/GHz) and converts to SI on ingestion.  A RunConfig can be
serialized back to an equivalent file; parsing that file reproduces every
value through the same arithmetic path.

Schema (sections and keys):

  [run]       mode = single | velocity-sweep | radial-sweep | rep-rate | oracle
              radius_um (default 0), workers (optional)
  [levels]    comb indices n21, n43, n41 (resolved against [pulse] rep_rate_mhz)
              or absolute f21_ghz, f43_ghz, f41_thz
  [decays]    gamma41_per_s, gamma42_per_s, gamma31_per_s, gamma32_per_s
  [pulse]     rep_rate_mhz, peak_rabi_rad_per_fs, tau0_fs, w0_um, n_pulses,
              phase_step_rad (0), carrier_phase_rad (0),
              carrier_thz (default: locked to the 4-1 transition)
  [initial]   rho11, rho22, rho33, rho44, re_rho12, im_rho12
              (default: equal ground mixture, zero coherence)
  [policy]    window_half_width (5), steps_per_carrier_cycle (128)
  [sweep]     velocities_m_per_s or radii_um; ranges "start:stop:step"
              (inclusive) or comma lists
  [scenarios] rep_rates_mhz, amplitude_mode (fixed-peak | fixed-average),
              target_avg_rabi_rad_per_s (optional)
  [oracle]    step_fs (optional), tolerance (1e-6), allow_long_span (false)
  [output]    path (optional)
"""

from __future__ import annotations

import configparser
import io
import math
from dataclasses import dataclass

import numpy as np

from .bloch import DecayRates, DensityMatrix, LevelScheme
from .errors import ConfigError, InvariantViolationError
from .field import PulseTrainSpec
from .propagate import IntegrationPolicy
from .sweeps import FIXED_AVERAGE, FIXED_PEAK, SimConfig

TWO_PI = 2.0 * math.pi

MODES = ("single", "velocity-sweep", "radial-sweep", "rep-rate", "oracle")

# unit factors (file unit -> SI)
RAD_PER_FS = 1e15
MHZ = 1e6
GHZ = 1e9
THZ = 1e12
FS = 1e-15
UM = 1e-6

_REQUIRED = object()


@dataclass
class RunConfig:
    """A fully validated run: simulation inputs plus the selected run mode."""

    sim: SimConfig
    mode: str
    comb_indices: tuple[float, float, float] | None = None   # (n21, n43, n41)
    carrier_locked: bool = True
    velocity_grid: np.ndarray | None = None
    radial_grid: np.ndarray | None = None
    scenarios: tuple = ()
    scenario_target_avg: float | None = None
    oracle_step_s: float | None = None
    oracle_tolerance: float = 1e-6
    oracle_allow_long_span: bool = False
    workers: int | None = None
    output_path: str | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(
                f"mode must be one of {', '.join(MODES)}, got {self.mode!r}")
        if self.mode == "velocity-sweep" and self.velocity_grid is None:
            raise ConfigError("velocity-sweep mode needs velocities_m_per_s in [sweep]")
        if self.mode == "radial-sweep" and self.radial_grid is None:
            raise ConfigError("radial-sweep mode needs radii_um in [sweep]")
        if self.mode == "rep-rate" and not self.scenarios:
            raise ConfigError("rep-rate mode needs rep_rates_mhz in [scenarios]")


def _get(cp, section, key, cast=float, default=_REQUIRED):
    if not cp.has_option(section, key):
        if default is _REQUIRED:
            raise ConfigError(f"missing key '{key}' in section [{section}]")
        return default
    raw = cp.get(section, key)
    try:
        return cast(raw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(
            f"invalid value for '{key}' in section [{section}]: {raw!r} ({exc})")


def _bool(raw: str) -> bool:
    low = raw.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {raw!r}")


def _grid(raw: str) -> np.ndarray:
    """Parse 'start:stop:step' (inclusive) or a comma-separated list."""
    raw = raw.strip()
    if ":" in raw:
        parts = raw.split(":")
        if len(parts) != 3:
            raise ValueError("range must be start:stop:step")
        start, stop, step = (float(p) for p in parts)
        if step <= 0.0:
            raise ValueError("range step must be positive")
        count = int(math.floor((stop - start) / step + 0.5)) + 1
        return start + step * np.arange(count)
    return np.array([float(p) for p in raw.split(",") if p.strip()])


def _snap_integer(q: float) -> float:
    """Carrier cycles per period, snapped to an exact integer when it is one
    to rounding accuracy (comb-locked carrier)."""
    q_int = round(q)
    if q_int > 0 and abs(q - q_int) <= 1e-9 * abs(q):
        return float(q_int)
    return q


def parse_config(text: str, *, source: str = "<config>") -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {source}: {exc}")

    mode = _get(cp, "run", "mode", str)
    radius = _get(cp, "run", "radius_um", float, 0.0) * UM
    workers = _get(cp, "run", "workers", int, None)

    rep_rate = _get(cp, "pulse", "rep_rate_mhz") * MHZ
    if rep_rate <= 0.0:
        raise ConfigError("rep_rate_mhz must be positive")

    comb = None
    if cp.has_option("levels", "n21") or cp.has_option("levels", "n41") \
            or cp.has_option("levels", "n43"):
        n21 = _get(cp, "levels", "n21")
        n43 = _get(cp, "levels", "n43")
        n41 = _get(cp, "levels", "n41")
        comb = (n21, n43, n41)
        try:
            levels = LevelScheme.from_comb_indices(n21, n43, n41, rep_rate)
        except ValueError as exc:
            raise ConfigError(str(exc))
    else:
        f21 = _get(cp, "levels", "f21_ghz") * GHZ
        f43 = _get(cp, "levels", "f43_ghz") * GHZ
        f41 = _get(cp, "levels", "f41_thz") * THZ
        try:
            levels = LevelScheme(omega21=TWO_PI * f21,
                                 omega31=TWO_PI * (f41 - f43),
                                 omega41=TWO_PI * f41)
        except ValueError as exc:
            raise ConfigError(str(exc))

    try:
        decays = DecayRates(
            gamma41=_get(cp, "decays", "gamma41_per_s"),
            gamma42=_get(cp, "decays", "gamma42_per_s"),
            gamma31=_get(cp, "decays", "gamma31_per_s"),
            gamma32=_get(cp, "decays", "gamma32_per_s"))
    except ValueError as exc:
        raise ConfigError(str(exc))

    carrier_thz = _get(cp, "pulse", "carrier_thz", float, None)
    if carrier_thz is None:
        carrier_locked = True
        carrier_freq = levels.omega41
        cycles = comb[2] if comb is not None else \
            _snap_integer(carrier_freq / TWO_PI / rep_rate)
    else:
        carrier_locked = False
        carrier_freq = TWO_PI * carrier_thz * THZ
        cycles = _snap_integer(carrier_thz * THZ / rep_rate)

    try:
        pulse = PulseTrainSpec(
            peak_rabi=_get(cp, "pulse", "peak_rabi_rad_per_fs") * RAD_PER_FS,
            tau0=_get(cp, "pulse", "tau0_fs") * FS,
            waist=_get(cp, "pulse", "w0_um") * UM,
            period=1.0 / rep_rate,
            num_pulses=_get(cp, "pulse", "n_pulses", int),
            phase_step=_get(cp, "pulse", "phase_step_rad", float, 0.0),
            carrier_freq=carrier_freq,
            carrier_phase=_get(cp, "pulse", "carrier_phase_rad", float, 0.0),
            cycles_per_period=cycles)
    except ValueError as exc:
        raise ConfigError(str(exc))

    try:
        initial = DensityMatrix.from_populations(
            _get(cp, "initial", "rho11", float, 0.5),
            _get(cp, "initial", "rho22", float, 0.5),
            _get(cp, "initial", "rho33", float, 0.0),
            _get(cp, "initial", "rho44", float, 0.0),
            rho12=complex(_get(cp, "initial", "re_rho12", float, 0.0),
                          _get(cp, "initial", "im_rho12", float, 0.0)))
        initial.validate()
    except (ValueError, InvariantViolationError) as exc:
        raise ConfigError(f"invalid initial state: {exc}")

    try:
        policy = IntegrationPolicy(
            window_half_width=_get(cp, "policy", "window_half_width", float, 5.0),
            steps_per_carrier_cycle=_get(
                cp, "policy", "steps_per_carrier_cycle", int, 128))
    except ValueError as exc:
        raise ConfigError(str(exc))

    velocity_grid = None
    radial_grid = None
    if cp.has_option("sweep", "velocities_m_per_s"):
        velocity_grid = _get(cp, "sweep", "velocities_m_per_s", _grid)
    if cp.has_option("sweep", "radii_um"):
        radial_grid = _get(cp, "sweep", "radii_um", _grid) * UM

    scenarios = ()
    target_avg = None
    if cp.has_section("scenarios"):
        rates = _get(cp, "scenarios", "rep_rates_mhz", _grid)
        amp_mode = _get(cp, "scenarios", "amplitude_mode", str, FIXED_PEAK)
        if amp_mode not in (FIXED_PEAK, FIXED_AVERAGE):
            raise ConfigError(
                f"amplitude_mode must be '{FIXED_PEAK}' or '{FIXED_AVERAGE}', "
                f"got {amp_mode!r}")
        scenarios = tuple((float(nu) * MHZ, amp_mode) for nu in rates)
        target_avg = _get(cp, "scenarios", "target_avg_rabi_rad_per_s", float, None)

    sim = SimConfig(levels=levels, decays=decays, pulse=pulse, policy=policy,
                    radius=radius, initial=initial)
    step_fs = _get(cp, "oracle", "step_fs", float, None) if cp.has_section("oracle") else None
    return RunConfig(
        sim=sim, mode=mode, comb_indices=comb, carrier_locked=carrier_locked,
        velocity_grid=velocity_grid, radial_grid=radial_grid,
        scenarios=scenarios, scenario_target_avg=target_avg,
        oracle_step_s=None if step_fs is None else step_fs * FS,
        oracle_tolerance=(_get(cp, "oracle", "tolerance", float, 1e-6)
                          if cp.has_section("oracle") else 1e-6),
        oracle_allow_long_span=(_get(cp, "oracle", "allow_long_span", _bool, False)
                                if cp.has_section("oracle") else False),
        workers=workers,
        output_path=_get(cp, "output", "path", str, None)
                    if cp.has_section("output") else None)


def load_config(path) -> RunConfig:
    """Parse and fully validate a config file."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}")
    return parse_config(text, source=str(path))


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _grid_text(values) -> str:
    return ", ".join(_fmt(v) for v in np.asarray(values))


def config_to_text(cfg: RunConfig) -> str:
    """Serialize back to the file format; parsing the result reproduces the
    configuration (floats are written with 17 significant digits)."""
    sim = cfg.sim
    out = io.StringIO()
    w = out.write
    w("[run]\n")
    w(f"mode = {cfg.mode}\n")
    w(f"radius_um = {_fmt(sim.radius / UM)}\n")
    if cfg.workers is not None:
        w(f"workers = {cfg.workers}\n")

    w("\n[levels]\n")
    if cfg.comb_indices is not None:
        n21, n43, n41 = cfg.comb_indices
        w(f"n21 = {_fmt(n21)}\n")
        w(f"n43 = {_fmt(n43)}\n")
        w(f"n41 = {_fmt(n41)}\n")
    else:
        w(f"f21_ghz = {_fmt(sim.levels.omega21 / TWO_PI / GHZ)}\n")
        w(f"f43_ghz = {_fmt(sim.levels.omega43 / TWO_PI / GHZ)}\n")
        w(f"f41_thz = {_fmt(sim.levels.omega41 / TWO_PI / THZ)}\n")

    w("\n[decays]\n")
    w(f"gamma41_per_s = {_fmt(sim.decays.gamma41)}\n")
    w(f"gamma42_per_s = {_fmt(sim.decays.gamma42)}\n")
    w(f"gamma31_per_s = {_fmt(sim.decays.gamma31)}\n")
    w(f"gamma32_per_s = {_fmt(sim.decays.gamma32)}\n")

    w("\n[pulse]\n")
    w(f"rep_rate_mhz = {_fmt(sim.pulse.rep_rate / MHZ)}\n")
    w(f"peak_rabi_rad_per_fs = {_fmt(sim.pulse.peak_rabi / RAD_PER_FS)}\n")
    w(f"tau0_fs = {_fmt(sim.pulse.tau0 / FS)}\n")
    w(f"w0_um = {_fmt(sim.pulse.waist / UM)}\n")
    w(f"n_pulses = {sim.pulse.num_pulses}\n")
    w(f"phase_step_rad = {_fmt(sim.pulse.phase_step)}\n")
    w(f"carrier_phase_rad = {_fmt(sim.pulse.carrier_phase)}\n")
    if not cfg.carrier_locked:
        w(f"carrier_thz = {_fmt(sim.pulse.carrier_freq / TWO_PI / THZ)}\n")

    w("\n[initial]\n")
    pops = cfg.sim.initial.populations
    w(f"rho11 = {_fmt(pops[0])}\n")
    w(f"rho22 = {_fmt(pops[1])}\n")
    w(f"rho33 = {_fmt(pops[2])}\n")
    w(f"rho44 = {_fmt(pops[3])}\n")
    w(f"re_rho12 = {_fmt(cfg.sim.initial.rho12.real)}\n")
    w(f"im_rho12 = {_fmt(cfg.sim.initial.rho12.imag)}\n")

    w("\n[policy]\n")
    w(f"window_half_width = {_fmt(sim.policy.window_half_width)}\n")
    w(f"steps_per_carrier_cycle = {sim.policy.steps_per_carrier_cycle}\n")

    if cfg.velocity_grid is not None or cfg.radial_grid is not None:
        w("\n[sweep]\n")
        if cfg.velocity_grid is not None:
            w(f"velocities_m_per_s = {_grid_text(cfg.velocity_grid)}\n")
        if cfg.radial_grid is not None:
            w(f"radii_um = {_grid_text(np.asarray(cfg.radial_grid) / UM)}\n")

    if cfg.scenarios:
        w("\n[scenarios]\n")
        w(f"rep_rates_mhz = {_grid_text([nu / MHZ for nu, _ in cfg.scenarios])}\n")
        w(f"amplitude_mode = {cfg.scenarios[0][1]}\n")
        if cfg.scenario_target_avg is not None:
            w(f"target_avg_rabi_rad_per_s = {_fmt(cfg.scenario_target_avg)}\n")

    if cfg.mode == "oracle" or cfg.oracle_step_s is not None:
        w("\n[oracle]\n")
        if cfg.oracle_step_s is not None:
            w(f"step_fs = {_fmt(cfg.oracle_step_s / FS)}\n")
        w(f"tolerance = {_fmt(cfg.oracle_tolerance)}\n")
        w(f"allow_long_span = {'true' if cfg.oracle_allow_long_span else 'false'}\n")

    if cfg.output_path:
        w("\n[output]\n")
        w(f"path = {cfg.output_path}\n")
    return out.getvalue()


def save_config(cfg: RunConfig, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(config_to_text(cfg))
