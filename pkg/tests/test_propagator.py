import math
from dataclasses import replace

import numpy as np
import pytest

from combbloch import (DecayRates, DensityMatrix, DriveSample,
                       IntegrationPolicy, LevelScheme, PulseTrainSpec,
                       SpanGuardError, bloch_rhs, brute_force_run, drive_at,
                       free_evolve, integrate_pulse, rk4_step, run_train)
from combbloch.propagate import _generator_matrices, unvec16, vec16, window_grid
from conftest import random_density_matrix, toy_pulse

POLICY = IntegrationPolicy()


def locked_toy():
    """ps-period comb-locked train and its GHz-scale atom: brute-forceable in
    well under a second."""
    levels = LevelScheme.from_comb_indices(n21=0.1, n43=2.0, n41=60.0,
                                           rep_rate_hz=0.5e12)
    decays = DecayRates.uniform(2.5e12)   # strong decay: acts within a period
    pulse = PulseTrainSpec(peak_rabi=math.sqrt(math.pi) / 200 * 1e15,
                           tau0=10e-15, waist=100e-6, period=2e-12,
                           num_pulses=3, carrier_freq=levels.omega41,
                           cycles_per_period=60.0)
    return levels, decays, pulse


class TestPolicy:
    def test_validation(self):
        with pytest.raises(ValueError):
            IntegrationPolicy(window_half_width=2.0)
        with pytest.raises(ValueError):
            IntegrationPolicy(steps_per_carrier_cycle=8)
        with pytest.raises(ValueError):
            IntegrationPolicy(snapshot_point="mid-window")


class TestRepresentation:
    def test_vec_unvec_round_trip(self):
        rng = np.random.default_rng(11)
        rho = random_density_matrix(rng)
        back = unvec16(vec16(rho))
        assert np.max(np.abs(back - rho)) <= 1e-15
        assert np.max(np.abs(back - back.conj().T)) == 0.0

    def test_generator_matches_rhs(self, toy_levels, decays):
        A, B = _generator_matrices(toy_levels, decays)
        rng = np.random.default_rng(2)
        for _ in range(5):
            rho = random_density_matrix(rng)
            om = rng.normal(scale=1e12)
            lhs = (A + om * B) @ vec16(rho)
            rhs = vec16(bloch_rhs(rho, DriveSample.uniform(om), toy_levels, decays))
            scale = np.max(np.abs(rhs))
            assert np.max(np.abs(lhs - rhs)) <= 1e-13 * scale


class TestFreeEvolve:
    def test_zero_interval_is_identity(self, toy_levels, decays):
        rng = np.random.default_rng(4)
        rho = random_density_matrix(rng)
        out = free_evolve(rho, 0.0, toy_levels, decays)
        assert np.max(np.abs(out.matrix - rho)) == 0.0

    def test_negative_interval_rejected(self, toy_levels, decays, ground_mixture):
        with pytest.raises(ValueError):
            free_evolve(ground_mixture, -1e-9, toy_levels, decays)

    def test_branching_decay(self, toy_levels):
        dec = DecayRates.uniform(2e7)
        state = DensityMatrix.from_populations(0, 0, 0, 1.0)
        out = free_evolve(state, 25e-9, toy_levels, dec)
        assert out.populations[3] == pytest.approx(math.exp(-1.0), rel=1e-14)
        assert out.populations[0] == pytest.approx((1 - math.exp(-1.0)) / 2, rel=1e-14)
        assert out.populations[1] == pytest.approx((1 - math.exp(-1.0)) / 2, rel=1e-14)

    def test_matches_uniform_rk4_reference(self, decays):
        # GHz-scale levels keep the 1e5-step uniform RK4 reference
        # dispersion-free over 2 ns
        from combbloch import _kernels
        from combbloch.propagate import _generator_matrices

        levels = LevelScheme(omega21=2 * np.pi * 5e8, omega31=2 * np.pi * 8e9,
                             omega41=2 * np.pi * 1e10)
        rng = np.random.default_rng(9)
        rho = random_density_matrix(rng)
        out = free_evolve(rho, 2e-9, levels, decays)

        n = 100000
        h = 2e-9 / n
        A, B = _generator_matrices(levels, decays)
        R0 = _kernels.rk4_window_matrix(A, B, np.zeros(3), h)
        ref = _kernels.rk4_uniform_train(
            A, B, R0, vec16(rho), 0.0, h, n, np.array([n], dtype=np.int64),
            0.0, 10e-15, 1e-9, 0, 0.0, 0.0, levels.omega41, 0.0)
        assert np.max(np.abs(out.matrix - unvec16(ref[0]))) <= 1e-9

    def test_composition(self, toy_levels, decays):
        rng = np.random.default_rng(13)
        rho = random_density_matrix(rng)
        dt = 2.0 ** -30     # ~0.93 ns; power of two keeps omega*dt exact
        once = free_evolve(free_evolve(rho, dt, toy_levels, decays),
                           dt, toy_levels, decays)
        twice = free_evolve(rho, 2 * dt, toy_levels, decays)
        assert np.max(np.abs(once.matrix - twice.matrix)) <= 1e-12

    def test_ground_coherence_magnitude_invariant(self, toy_levels, decays):
        state = DensityMatrix.from_populations(0.5, 0.5, 0, 0, rho12=0.3 + 0.2j)
        mag = abs(0.3 + 0.2j)
        for dt in (1e-10, 3.7e-9, 2e-8):
            out = free_evolve(state, dt, toy_levels, decays)
            assert abs(out.abs_rho12 - mag) <= 1e-12


class TestIntegratePulse:
    def test_zero_drive_equals_free_evolution(self, toy_levels, decays):
        rng = np.random.default_rng(21)
        rho = DensityMatrix(random_density_matrix(rng))
        pulse = toy_pulse(num_pulses=1, peak=0.0)
        w, _, _ = window_grid(pulse, POLICY)
        out = integrate_pulse(rho, 0, pulse, POLICY, toy_levels, decays, 0.0)
        ref = free_evolve(rho, 2 * w, toy_levels, decays)
        assert np.max(np.abs(out.matrix - ref.matrix)) <= 1e-12

    def test_matches_rk4_step_composition(self, toy_levels, decays):
        # the cached window map is the same RK4 recursion; composition of the
        # public single-step op over the same grid must agree to rounding
        pulse = toy_pulse(num_pulses=1)
        w, h, n = window_grid(pulse, POLICY)
        state = DensityMatrix.equal_ground_mixture()
        out = integrate_pulse(state, 0, pulse, POLICY, toy_levels, decays, 0.0)

        drive = lambda t: drive_at(0.0, t, pulse,
                                   window_half_width=POLICY.window_half_width)
        ref = state
        for k in range(n):
            ref = rk4_step(ref, -w + k * h, h, drive, toy_levels, decays)
        assert np.max(np.abs(out.matrix - ref.matrix)) <= 1e-10

    def test_step_halving_converged(self, toy_levels, decays):
        pulse = toy_pulse(num_pulses=1)
        state = DensityMatrix.equal_ground_mixture()
        out = integrate_pulse(state, 0, pulse, POLICY, toy_levels, decays, 0.0)
        fine = integrate_pulse(state, 0, pulse,
                               replace(POLICY, steps_per_carrier_cycle=256),
                               toy_levels, decays, 0.0)
        assert np.max(np.abs(out.matrix - fine.matrix)) < 1e-10

    def test_single_resonant_pulse_against_oracle(self, toy_levels, decays):
        pulse = toy_pulse(num_pulses=1, cycles=0.6)
        state = DensityMatrix.equal_ground_mixture()
        hybrid = run_train(state, pulse, POLICY, toy_levels, decays, 0.0)
        brute = brute_force_run(state, pulse, POLICY, toy_levels, decays, 0.0,
                                step_s=0.04e-15)
        assert np.max(np.abs(hybrid.states[-1] - brute.states[-1])) <= 1e-8


class TestRunTrain:
    def test_zero_pulses_keeps_initial(self, toy_levels, decays, ground_mixture):
        traj = run_train(ground_mixture, toy_pulse(num_pulses=0), POLICY,
                         toy_levels, decays, 0.0)
        assert len(traj) == 1
        assert traj.pulse_index[0] == 0
        np.testing.assert_array_equal(traj.states[0], ground_mixture.matrix)

    def test_equals_explicit_op_composition(self):
        levels, decays, pulse = locked_toy()
        init = DensityMatrix.equal_ground_mixture()
        traj = run_train(init, pulse, POLICY, levels, decays, 0.0)

        w, _, _ = window_grid(pulse, POLICY)
        dead = pulse.period - 2 * w
        state = init
        for n in range(pulse.num_pulses):
            state = integrate_pulse(state, n, pulse, POLICY, levels, decays, 0.0)
            assert np.max(np.abs(traj.states[n + 1] - state.matrix)) <= 1e-12
            if n < pulse.num_pulses - 1:
                state = free_evolve(state, dead, levels, decays)

    def test_snapshot_offset_does_not_move_ground_coherence(self):
        levels, decays, pulse = locked_toy()
        traj = run_train(DensityMatrix.equal_ground_mixture(), pulse, POLICY,
                         levels, decays, 0.0)
        final = traj.final_state()
        for offset in (0.1e-12, 0.9e-12):
            shifted = free_evolve(final, offset, levels, decays)
            assert abs(shifted.abs_rho12 - final.abs_rho12) <= 1e-12

    def test_invalid_initial_rejected(self, toy_levels, decays):
        from combbloch import InvariantViolationError
        bad = DensityMatrix(np.diag([0.9, 0.9, 0.0, 0.0]).astype(complex))
        with pytest.raises(InvariantViolationError):
            run_train(bad, toy_pulse(num_pulses=1), POLICY, toy_levels, decays, 0.0)

    def test_trajectory_diagnostics_within_bounds(self):
        levels, decays, pulse = locked_toy()
        traj = run_train(DensityMatrix.equal_ground_mixture(), pulse, POLICY,
                         levels, decays, 0.0)
        traj.validate()
        d = traj.diagnostics()
        assert d["max_herm_defect"] == 0.0
        assert d["max_trace_err"] <= 1e-12

    def test_first_pulse_reaching(self):
        levels, decays, pulse = locked_toy()
        traj = run_train(DensityMatrix.equal_ground_mixture(), pulse, POLICY,
                         levels, decays, 0.0)
        assert traj.first_pulse_reaching(2.0) is None
        assert traj.first_pulse_reaching(0.0) == 0


class TestBruteForce:
    def test_zero_pulses_identity(self, toy_levels, decays, ground_mixture):
        traj = brute_force_run(ground_mixture, toy_pulse(num_pulses=0), POLICY,
                               toy_levels, decays, 0.0)
        assert len(traj) == 1
        np.testing.assert_array_equal(traj.states[0], ground_mixture.matrix)

    def test_zero_drive_matches_free_evolution(self, decays):
        levels = LevelScheme(omega21=2 * np.pi * 5e8, omega31=2 * np.pi * 8e9,
                             omega41=2 * np.pi * 1e10)
        rng = np.random.default_rng(17)
        rho = random_density_matrix(rng)
        pulse = PulseTrainSpec(peak_rabi=0.0, tau0=10e-15, waist=1e-4,
                               period=1e-9, num_pulses=1,
                               carrier_freq=levels.omega41)
        traj = brute_force_run(rho, pulse, POLICY, levels, decays,
                               step_s=1e-14)
        w = POLICY.window_half_width * pulse.tau0
        ref = free_evolve(rho, 2 * w, levels, decays)
        assert np.max(np.abs(traj.states[1] - ref.matrix)) <= 1e-9

    def test_span_guard(self, toy_levels, decays, ground_mixture):
        pulse = toy_pulse(num_pulses=3, period=2e-8,
                          carrier=2 * np.pi * 300e9, cycles=None)
        with pytest.raises(SpanGuardError):
            brute_force_run(ground_mixture, pulse, POLICY, toy_levels, decays,
                            step_s=1e-12)
        traj = brute_force_run(ground_mixture, pulse, POLICY, toy_levels,
                               decays, step_s=1e-12, allow_long_span=True)
        assert len(traj) == 4

    def test_hybrid_agreement_on_locked_train(self):
        levels, decays, pulse = locked_toy()
        init = DensityMatrix.equal_ground_mixture()
        hybrid = run_train(init, pulse, POLICY, levels, decays, 0.0)
        brute = brute_force_run(init, pulse, POLICY, levels, decays, 0.0,
                                step_s=0.04e-15)
        assert np.max(np.abs(hybrid.states - brute.states)) <= 1e-6


class TestRichardson:
    def test_order_at_least_3_9_on_reference_preset(self):
        from combbloch import preset
        sim = preset("fig2a").sim
        pulse = replace(sim.pulse, num_pulses=1)

        def final(spc):
            pol = replace(sim.policy, steps_per_carrier_cycle=spc)
            return run_train(sim.initial, pulse, pol, sim.levels, sim.decays,
                             sim.radius).states[-1]

        e1 = np.max(np.abs(final(128) - final(256)))
        e2 = np.max(np.abs(final(256) - final(512)))
        assert np.log2(e1 / e2) >= 3.9


class TestIntegrationFailure:
    def test_integrate_pulse_reports_pulse_index(self, toy_levels, decays):
        pulse = toy_pulse(num_pulses=1, peak=1e30)   # blows up the RK4 update
        from combbloch import IntegrationFailureError
        with pytest.raises(IntegrationFailureError) as err:
            integrate_pulse(DensityMatrix.equal_ground_mixture(), 0, pulse,
                            POLICY, toy_levels, decays, 0.0)
        assert err.value.pulse_index == 0
