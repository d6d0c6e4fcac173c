"""Pulse-train coherence simulator for a four-level double-lambda atom.

Integrates the non-RWA optical Bloch equations of the atom driven by a
femtosecond Gaussian pulse train, with a hybrid propagator (windowed RK4 plus
exact dead-time evolution), Doppler/radial/repetition-rate sweep engines, a
brute-force verification oracle, figure presets, and a CSV-emitting CLI.
"""

from .bloch import (DecayRates, DensityMatrix, DriveSample, LevelScheme,
                    bloch_rhs, rk4_step)
from .config import RunConfig, config_to_text, load_config, parse_config, save_config
from .csvio import (SWEEP_HEADER, TRAJECTORY_HEADER, emit_sweep_csv,
                    emit_trajectory_csv, load_sweep_csv, load_trajectory_csv)
from .errors import (CombBlochError, ConfigError, IntegrationFailureError,
                     InvariantViolationError, SpanGuardError)
from .field import (PulseTrainSpec, avg_rabi, carrier_phase_at_pulse, drive_at,
                    envelope, peak_for_avg, pulse_area)
from .presets import PRESET_NAMES, preset
from .propagate import (IntegrationPolicy, Trajectory, brute_force_run,
                        free_evolve, integrate_pulse, run_train)
from .sweeps import (DopplerSpec, SimConfig, SweepResult, doppler_shift,
                     radial_sweep, rep_rate_scenarios, velocity_sweep)

__version__ = "0.1.0"

__all__ = [
    "DecayRates", "DensityMatrix", "DriveSample", "LevelScheme",
    "bloch_rhs", "rk4_step",
    "PulseTrainSpec", "envelope", "drive_at", "pulse_area", "avg_rabi",
    "peak_for_avg", "carrier_phase_at_pulse",
    "IntegrationPolicy", "Trajectory", "free_evolve", "integrate_pulse",
    "run_train", "brute_force_run",
    "DopplerSpec", "SimConfig", "SweepResult", "doppler_shift",
    "velocity_sweep", "radial_sweep", "rep_rate_scenarios",
    "RunConfig", "load_config", "parse_config", "config_to_text", "save_config",
    "preset", "PRESET_NAMES",
    "TRAJECTORY_HEADER", "SWEEP_HEADER", "emit_trajectory_csv", "emit_sweep_csv",
    "load_trajectory_csv", "load_sweep_csv",
    "CombBlochError", "ConfigError", "IntegrationFailureError",
    "InvariantViolationError", "SpanGuardError",
]
