"""Figure presets: ready-made RunConfigs for the eight studied scenarios.

All presets share the pulse shape (tau0 = 10 fs, W0 = 100 um, zero
pulse-to-pulse phase step), the uniform decay rates (2e7 s^-1 per channel,
25 ns excited lifetimes), the equal-ground-mixture initial state and a
carrier locked to the 4-1 transition.  The time-series scenarios sample the
beam at r = 50 um; the Doppler/radial studies use the axis with the peak
amplitude read as the local value.

Two atoms appear: the time-series scenarios use a 360 MHz splitting of the
excited pair, the Doppler/radial scenarios a 1.86 GHz splitting (which puts
level |3> one comb tooth away from resonance at V ~ 288 m/s for the 500 MHz
train).  The ground splitting is 3 GHz and the optical transition 375 THz
throughout.
"""

from __future__ import annotations

import math

import numpy as np

from .bloch import DecayRates, DensityMatrix, LevelScheme
from .config import RunConfig
from .errors import ConfigError
from .field import PulseTrainSpec, peak_for_avg
from .propagate import IntegrationPolicy
from .sweeps import FIXED_AVERAGE, FIXED_PEAK, SimConfig

F21_HZ = 3e9            # ground splitting
F41_HZ = 375e12         # optical 4-1 transition
F43_SERIES_HZ = 360e6   # excited splitting, time-series scenarios
F43_DOPPLER_HZ = 1.86e9  # excited splitting, Doppler/radial scenarios

TAU0 = 10e-15
WAIST = 100e-6
GAMMA = 2e7
SAMPLE_RADIUS = 50e-6

SQRT_PI = math.sqrt(math.pi)
PEAK_AREA_PI_20 = SQRT_PI / 200.0 * 1e15    # pulse area pi/20 at tau0 = 10 fs
AVG_RABI_REF = PEAK_AREA_PI_20 * TAU0 * SQRT_PI / 10e-9   # = (pi/20) / 10 ns

VELOCITY_GROUPS = (0.0, 100.0, 145.0, 200.0, 288.0)
VELOCITY_GRID = 4.0 * np.arange(201)          # 0..800 m/s, two periods
RADIAL_GRID_M = 1e-6 * np.arange(151)         # 0..150 um


def _snap(n: float) -> float:
    """Comb index snapped to an exact integer when it is one to rounding
    accuracy (keeps the per-pulse carrier phase exactly repeating)."""
    n_int = round(n)
    if n_int > 0 and abs(n - n_int) <= 1e-9 * abs(n):
        return float(n_int)
    return n


def _config(nu_hz: float, f43_hz: float, peak: float, num_pulses: int,
            radius: float, mode: str, **extra) -> RunConfig:
    n21 = _snap(F21_HZ / nu_hz)
    n43 = _snap(f43_hz / nu_hz)
    n41 = _snap(F41_HZ / nu_hz)
    levels = LevelScheme.from_comb_indices(n21, n43, n41, nu_hz)
    pulse = PulseTrainSpec(
        peak_rabi=peak, tau0=TAU0, waist=WAIST, period=1.0 / nu_hz,
        num_pulses=num_pulses, phase_step=0.0,
        carrier_freq=levels.omega41, carrier_phase=0.0,
        cycles_per_period=n41)
    sim = SimConfig(levels=levels, decays=DecayRates.uniform(GAMMA), pulse=pulse,
                    policy=IntegrationPolicy(), radius=radius,
                    initial=DensityMatrix.equal_ground_mixture())
    return RunConfig(sim=sim, mode=mode, comb_indices=(n21, n43, n41),
                     carrier_locked=True, **extra)


def _fig2a() -> RunConfig:
    return _config(100e6, F43_SERIES_HZ, PEAK_AREA_PI_20, 250,
                   SAMPLE_RADIUS, "single")


def _fig2b() -> RunConfig:
    return _config(120e6, F43_SERIES_HZ, PEAK_AREA_PI_20, 250,
                   SAMPLE_RADIUS, "single")


def _fig2c() -> RunConfig:
    return _config(375e12 / 3.4e6, F43_SERIES_HZ, PEAK_AREA_PI_20, 250,
                   SAMPLE_RADIUS, "single")


def _fig3() -> RunConfig:
    scen = tuple((nu, FIXED_PEAK) for nu in (100e6, 500e6, 1000e6))
    return _config(100e6, F43_SERIES_HZ, PEAK_AREA_PI_20, 2000,
                   SAMPLE_RADIUS, "rep-rate", scenarios=scen)


def _fig4() -> RunConfig:
    scen = tuple((nu, FIXED_AVERAGE) for nu in (10e6, 20e6, 25e6, 40e6))
    return _config(25e6, F43_SERIES_HZ, peak_for_avg(AVG_RABI_REF, TAU0, 40e-9),
                   100, SAMPLE_RADIUS, "rep-rate",
                   scenarios=scen, scenario_target_avg=AVG_RABI_REF)


def _fig5() -> RunConfig:
    return _config(500e6, F43_DOPPLER_HZ, PEAK_AREA_PI_20, 600, 0.0,
                   "velocity-sweep", velocity_grid=np.array(VELOCITY_GROUPS))


def _fig6() -> RunConfig:
    return _config(500e6, F43_DOPPLER_HZ, PEAK_AREA_PI_20, 300, 0.0,
                   "velocity-sweep", velocity_grid=VELOCITY_GRID.copy())


def _fig7() -> RunConfig:
    return _config(20e6, F43_DOPPLER_HZ, peak_for_avg(AVG_RABI_REF, TAU0, 50e-9),
                   40, 0.0, "velocity-sweep", velocity_grid=VELOCITY_GRID.copy())


def _fig8a() -> RunConfig:
    return _config(20e6, F43_DOPPLER_HZ, peak_for_avg(AVG_RABI_REF, TAU0, 50e-9),
                   40, 0.0, "radial-sweep", radial_grid=RADIAL_GRID_M.copy())


def _fig8b() -> RunConfig:
    return _config(100e6, F43_DOPPLER_HZ, peak_for_avg(AVG_RABI_REF, TAU0, 10e-9),
                   200, 0.0, "radial-sweep", radial_grid=RADIAL_GRID_M.copy())


def _fig8c() -> RunConfig:
    return _config(500e6, F43_DOPPLER_HZ, peak_for_avg(AVG_RABI_REF, TAU0, 2e-9),
                   1000, 0.0, "radial-sweep", radial_grid=RADIAL_GRID_M.copy())


_BUILDERS = {
    "fig2a": _fig2a, "fig2b": _fig2b, "fig2c": _fig2c,
    "fig3": _fig3, "fig4": _fig4,
    "fig5": _fig5, "fig6": _fig6, "fig7": _fig7,
    "fig8a": _fig8a, "fig8b": _fig8b, "fig8c": _fig8c,
}

PRESET_NAMES = tuple(_BUILDERS)


def preset(name: str) -> RunConfig:
    """The parameter set behind one of the studied figures."""
    try:
        builder = _BUILDERS[name]
    except KeyError:
        raise ConfigError(
            f"unknown preset {name!r}; valid presets: {', '.join(PRESET_NAMES)}")
    return builder()
