"""Gaussian pulse-train field: envelope, instantaneous Rabi drive, and the
scalar diagnostics (pulse area, average Rabi frequency).

The combined drive at radius r is

    Omega(r, t) = peak_rabi * sum_n g(r, t - n*T) * cos(omega0*t - Phi + n*dtheta)

with g(r, t) = exp(-((r/W0)^2 + (t/tau0)^2)).  The carrier is referenced to
global time (phase-coherent comb); the per-pulse carrier phase is therefore
computed as 2*pi*frac(n*q) with q the number of carrier cycles per repetition
period, which stays exact for comb-locked carriers instead of losing
precision to fmod(omega0*t, 2*pi) at large t.  All four transitions share the
same real Rabi amplitude.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .bloch import DriveSample

TWO_PI = 2.0 * math.pi
SQRT_PI = math.sqrt(math.pi)

# A pulse is evaluated only within +/- window_half_width * tau0 of its center
# (default 5: tail < 1.4e-11 of the peak, far below every tolerance).
DEFAULT_WINDOW_HALF_WIDTH = 5.0


@dataclass(frozen=True)
class PulseTrainSpec:
    """Envelope, carrier, repetition, phase and amplitude of the drive train.

    peak_rabi        on-axis peak Rabi amplitude (rad/s); absorbs mu*E0/hbar
    tau0             temporal 1/e half-width of a pulse (s)
    waist            spatial 1/e half-width W0 (m)
    period           repetition period T (s); the train repetition frequency
                     is 1/T
    num_pulses       number of pulses N (pulse n is centered at t = n*T)
    phase_step       pulse-to-pulse carrier phase shift (rad)
    carrier_freq     carrier angular frequency omega0 (rad/s)
    carrier_phase    fixed carrier phase offset Phi (rad)
    cycles_per_period  optional exact carrier cycles per period (omega0*T/2pi);
                     set it for comb-locked carriers so the per-pulse phase is
                     exact at any pulse index
    """

    peak_rabi: float
    tau0: float
    waist: float
    period: float
    num_pulses: int
    phase_step: float = 0.0
    carrier_freq: float = 0.0
    carrier_phase: float = 0.0
    cycles_per_period: float | None = None

    def __post_init__(self):
        for name in ("tau0", "waist", "period", "carrier_freq"):
            if getattr(self, name) <= 0.0:
                raise ValueError(f"{name} must be positive, got {getattr(self, name)!r}")
        if self.num_pulses < 0:
            raise ValueError(f"num_pulses must be >= 0, got {self.num_pulses!r}")
        if self.period < 100.0 * self.tau0:
            raise ValueError(
                f"period must be >= 100*tau0 (pulses well separated), got "
                f"period={self.period!r}, tau0={self.tau0!r}")
        if self.cycles_per_period is not None:
            q_implied = self.carrier_freq * self.period / TWO_PI
            if abs(self.cycles_per_period - q_implied) > 1e-6 * max(1.0, abs(q_implied)):
                raise ValueError(
                    f"cycles_per_period={self.cycles_per_period!r} inconsistent with "
                    f"carrier_freq*period/(2*pi)={q_implied!r}")

    @property
    def rep_rate(self) -> float:
        """Repetition frequency 1/T (Hz)."""
        return 1.0 / self.period

    @property
    def carrier_cycles_per_period(self) -> float:
        if self.cycles_per_period is not None:
            return self.cycles_per_period
        return self.carrier_freq * self.period / TWO_PI


def envelope(r: float, t: float, spec: PulseTrainSpec):
    """Single-pulse Gaussian envelope g(r, t), t relative to the pulse center."""
    x = np.asarray(t) / spec.tau0
    u = r / spec.waist
    return np.exp(-(u * u + x * x))


def carrier_phase_at_pulse(pulse_index: int, spec: PulseTrainSpec) -> float:
    """Carrier phase offset of pulse n at its center, reduced mod 2*pi.

    Equals (omega0*n*T - Phi + n*dtheta) mod 2*pi, computed from the carrier
    cycle count so comb-locked trains (integer cycles per period) get an
    exactly repeating phase.
    """
    q = spec.carrier_cycles_per_period
    m = pulse_index * q
    frac = m - math.floor(m)
    return math.remainder(
        TWO_PI * frac + pulse_index * spec.phase_step - spec.carrier_phase, TWO_PI)


def drive_values(r: float, s, pulse_index: int, spec: PulseTrainSpec):
    """Rabi drive of pulse ``pulse_index`` at local times ``s`` from its center."""
    s = np.asarray(s, dtype=np.float64)
    amp = spec.peak_rabi * math.exp(-((r / spec.waist) ** 2))
    theta = carrier_phase_at_pulse(pulse_index, spec)
    return amp * np.exp(-((s / spec.tau0) ** 2)) * np.cos(spec.carrier_freq * s + theta)


def drive_at(r: float, t: float, spec: PulseTrainSpec,
             window_half_width: float = DEFAULT_WINDOW_HALF_WIDTH) -> DriveSample:
    """Instantaneous Rabi drive of the whole train at global time t.

    Only pulses whose +/- window_half_width*tau0 window overlaps t contribute;
    outside every window the drive is exactly zero.  All four transitions are
    equal.
    """
    total = 0.0
    if spec.num_pulses > 0:
        n0 = int(math.floor(t / spec.period + 0.5))
        w = window_half_width * spec.tau0
        for n in range(max(0, n0 - 1), min(spec.num_pulses, n0 + 2)):
            s = t - n * spec.period
            if abs(s) <= w:
                total += float(drive_values(r, s, n, spec))
    return DriveSample.uniform(total)


def pulse_area(spec: PulseTrainSpec, r: float = 0.0) -> float:
    """Envelope pulse area at radius r: peak_rabi * exp(-(r/W0)^2) * tau0 * sqrt(pi).

    Carrier excluded (time integral of the envelope Rabi amplitude).
    """
    return spec.peak_rabi * math.exp(-((r / spec.waist) ** 2)) * spec.tau0 * SQRT_PI


def avg_rabi(spec: PulseTrainSpec, r: float = 0.0) -> float:
    """Average Rabi frequency: single-pulse envelope area divided by the period."""
    return pulse_area(spec, r) / spec.period


def peak_for_avg(target_avg: float, tau0: float, period: float) -> float:
    """Peak Rabi amplitude giving the requested average Rabi frequency.

    Inverse of avg_rabi at r = 0: peak = target_avg * T / (tau0 * sqrt(pi)).
    """
    if tau0 <= 0.0:
        raise ValueError(f"tau0 must be positive, got {tau0!r}")
    if target_avg < 0.0:
        raise ValueError(f"target_avg must be >= 0, got {target_avg!r}")
    return target_avg * period / (tau0 * SQRT_PI)
