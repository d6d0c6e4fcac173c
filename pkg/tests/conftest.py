import numpy as np
import pytest

from combbloch import DecayRates, DensityMatrix, LevelScheme, PulseTrainSpec


@pytest.fixture
def toy_levels():
    """GHz-scale scheme: slow enough for uniform-step references, same
    structure as the studied atom."""
    return LevelScheme(omega21=2 * np.pi * 3e9,
                       omega31=2 * np.pi * (300e9 - 1.86e9),
                       omega41=2 * np.pi * 300e9)


@pytest.fixture
def decays():
    return DecayRates.uniform(2e7)


@pytest.fixture
def ground_mixture():
    return DensityMatrix.equal_ground_mixture()


def random_density_matrix(rng) -> np.ndarray:
    """Random Hermitian PSD unit-trace 4x4."""
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = a @ a.conj().T
    return rho / np.trace(rho).real


def toy_pulse(num_pulses=1, peak=None, period=2e-12, carrier=2 * np.pi * 300e9,
              cycles=None, **kw) -> PulseTrainSpec:
    """Picosecond-period train against the toy scheme (fast to brute-force)."""
    if peak is None:
        peak = np.sqrt(np.pi) / 200 * 1e15
    return PulseTrainSpec(peak_rabi=peak, tau0=10e-15, waist=100e-6,
                          period=period, num_pulses=num_pulses,
                          carrier_freq=carrier, cycles_per_period=cycles, **kw)
