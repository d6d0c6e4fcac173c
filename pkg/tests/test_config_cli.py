import math

import numpy as np
import pytest

from combbloch import (ConfigError, PRESET_NAMES, SWEEP_HEADER,
                       TRAJECTORY_HEADER, config_to_text, emit_sweep_csv,
                       emit_trajectory_csv, load_config, load_sweep_csv,
                       load_trajectory_csv, parse_config, preset, run_train)
from combbloch.cli import main
from combbloch.sweeps import SweepResult

BASE_TEXT = """
[run]
mode = single
radius_um = 50.0

[levels]
n21 = 30.0
n43 = 3.6
n41 = 3750000.0

[decays]
gamma41_per_s = 2e7
gamma42_per_s = 2e7
gamma31_per_s = 2e7
gamma32_per_s = 2e7

[pulse]
rep_rate_mhz = 100.0
peak_rabi_rad_per_fs = 0.0088622692545275805
tau0_fs = 10.0
w0_um = 100.0
n_pulses = 5
"""


class TestParsing:
    def test_comb_index_resolution(self):
        cfg = parse_config(BASE_TEXT)
        assert cfg.sim.levels.omega21 == pytest.approx(2 * math.pi * 3e9, rel=1e-12)
        assert cfg.sim.pulse.cycles_per_period == 3750000.0
        assert cfg.sim.radius == pytest.approx(50e-6, rel=1e-12)

    def test_absolute_frequencies(self):
        text = BASE_TEXT.replace(
            "n21 = 30.0\nn43 = 3.6\nn41 = 3750000.0",
            "f21_ghz = 3.0\nf43_ghz = 0.36\nf41_thz = 375.0")
        cfg = parse_config(text)
        assert cfg.comb_indices is None
        assert cfg.sim.levels.omega41 == pytest.approx(2 * math.pi * 375e12, rel=1e-12)
        # locked carrier cycle count snaps to the integer tooth number
        assert cfg.sim.pulse.cycles_per_period == 3750000.0

    def test_missing_tau0_names_field(self):
        text = BASE_TEXT.replace("tau0_fs = 10.0\n", "")
        with pytest.raises(ConfigError, match="tau0"):
            parse_config(text)

    def test_negative_gamma_rejected(self):
        text = BASE_TEXT.replace("gamma41_per_s = 2e7", "gamma41_per_s = -1")
        with pytest.raises(ConfigError, match="gamma41"):
            parse_config(text)

    def test_bad_mode(self):
        with pytest.raises(ConfigError, match="mode"):
            parse_config(BASE_TEXT.replace("mode = single", "mode = batch"))

    def test_sweep_mode_needs_grid(self):
        with pytest.raises(ConfigError, match="velocities"):
            parse_config(BASE_TEXT.replace("mode = single", "mode = velocity-sweep"))

    def test_malformed_file(self):
        with pytest.raises(ConfigError, match="parse"):
            parse_config("run]\nmode =")

    def test_bad_value_names_key(self):
        with pytest.raises(ConfigError, match="rep_rate_mhz"):
            parse_config(BASE_TEXT.replace("rep_rate_mhz = 100.0",
                                           "rep_rate_mhz = fast"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            load_config(tmp_path / "nope.cfg")

    def test_grid_grammar(self):
        text = BASE_TEXT.replace("mode = single", "mode = velocity-sweep") + \
            "\n[sweep]\nvelocities_m_per_s = 0:800:4\n"
        cfg = parse_config(text)
        assert cfg.velocity_grid.shape == (201,)
        assert cfg.velocity_grid[-1] == 800.0

    def test_unit_round_trip_relative_1e_12(self):
        cfg = parse_config(BASE_TEXT)
        text = config_to_text(cfg)
        cfg2 = parse_config(text)
        assert cfg2.sim.pulse.peak_rabi == pytest.approx(cfg.sim.pulse.peak_rabi,
                                                         rel=1e-12)
        assert cfg2.sim.pulse.tau0 == pytest.approx(cfg.sim.pulse.tau0, rel=1e-12)
        assert cfg2.sim.levels.omega21 == pytest.approx(cfg.sim.levels.omega21,
                                                        rel=1e-12)
        assert cfg2.sim.radius == pytest.approx(cfg.sim.radius, rel=1e-12)

    def test_emit_parse_emit_is_stable(self):
        cfg = parse_config(BASE_TEXT)
        text1 = config_to_text(cfg)
        text2 = config_to_text(parse_config(text1))
        assert text1 == text2


class TestPresets:
    def test_fig2a_parameters(self):
        cfg = preset("fig2a")
        assert cfg.mode == "single"
        assert cfg.sim.pulse.rep_rate == pytest.approx(100e6, rel=1e-12)
        assert cfg.comb_indices == (30.0, 3.6, 3750000.0)
        assert cfg.sim.pulse.peak_rabi == pytest.approx(
            math.sqrt(math.pi) / 200 * 1e15, rel=1e-12)
        assert cfg.sim.pulse.tau0 == pytest.approx(10e-15, rel=1e-12)
        assert cfg.sim.pulse.waist == pytest.approx(100e-6, rel=1e-12)
        assert cfg.sim.radius == pytest.approx(50e-6, rel=1e-12)
        assert cfg.sim.pulse.num_pulses == 250
        assert cfg.sim.pulse.phase_step == 0.0
        assert cfg.sim.decays.gamma41 == 2e7

    def test_fig2b_parameters(self):
        cfg = preset("fig2b")
        n21, n43, n41 = cfg.comb_indices
        assert (n21, n43, n41) == (25.0, 3.0, 3125000.0)
        assert cfg.sim.pulse.carrier_freq == cfg.sim.levels.omega41

    def test_fig7_parameters(self):
        from combbloch import avg_rabi
        cfg = preset("fig7")
        assert cfg.sim.pulse.rep_rate == pytest.approx(20e6, rel=1e-12)
        assert cfg.sim.pulse.num_pulses == 40
        assert avg_rabi(cfg.sim.pulse, 0.0) == pytest.approx(
            1.5707963267948967e7, rel=1e-12)

    def test_unknown_name_lists_valid(self):
        with pytest.raises(ConfigError, match="fig2a"):
            preset("fig9")

    @pytest.mark.parametrize("name", PRESET_NAMES)
    def test_all_presets_serialize_and_reload(self, name):
        cfg = preset(name)
        text = config_to_text(cfg)
        cfg2 = parse_config(text)
        assert cfg2.mode == cfg.mode
        assert cfg2.sim.pulse.num_pulses == cfg.sim.pulse.num_pulses
        assert cfg2.sim.pulse.peak_rabi == pytest.approx(cfg.sim.pulse.peak_rabi,
                                                         rel=1e-12)
        assert config_to_text(cfg2) == text


class TestCsv:
    def _small_traj(self):
        cfg = parse_config(BASE_TEXT).sim
        return run_train(cfg.initial, cfg.pulse, cfg.policy, cfg.levels,
                         cfg.decays, cfg.radius)

    def test_trajectory_row_count_and_header(self, tmp_path):
        traj = self._small_traj()
        path = tmp_path / "traj.csv"
        emit_trajectory_csv(traj, path)
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(TRAJECTORY_HEADER)
        assert len(lines) == len(traj) + 1

    def test_trajectory_round_trip_bit_for_bit(self, tmp_path):
        traj = self._small_traj()
        p1 = tmp_path / "a.csv"
        p2 = tmp_path / "b.csv"
        emit_trajectory_csv(traj, p1)
        cols = load_trajectory_csv(p1)
        np.testing.assert_array_equal(cols["abs_rho12"], traj.abs_rho12)
        np.testing.assert_array_equal(cols["rho44"], traj.populations[:, 3])
        # printing the reloaded values reproduces the same bytes
        emit_trajectory_csv(traj, p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_empty_sweep_is_header_only(self, tmp_path):
        res = SweepResult(axis="velocity_m_per_s", grid=np.empty(0), rows=[],
                          max_trace_err=np.empty(0), max_herm_defect=np.empty(0),
                          min_eigenvalue=np.empty(0))
        path = tmp_path / "empty.csv"
        emit_sweep_csv(res, path)
        assert path.read_text() == ",".join(SWEEP_HEADER) + "\n"

    def test_sweep_round_trip(self, tmp_path):
        res = SweepResult(axis="radius_m", grid=np.array([0.0, 1e-6]),
                          rows=[np.array([0.0, 0.1]), np.array([0.0, 0.2])],
                          max_trace_err=np.zeros(2), max_herm_defect=np.zeros(2),
                          min_eigenvalue=np.zeros(2))
        path = tmp_path / "sweep.csv"
        emit_sweep_csv(res, path)
        cols = load_sweep_csv(path)
        np.testing.assert_array_equal(cols["axis_value"], [0, 0, 1e-6, 1e-6])
        np.testing.assert_array_equal(cols["pulse"], [0, 1, 0, 1])
        np.testing.assert_array_equal(cols["abs_rho12"], [0, 0.1, 0, 0.2])

    def test_wrong_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ConfigError):
            load_trajectory_csv(path)


class TestCli:
    def _write_config(self, tmp_path, text=BASE_TEXT):
        p = tmp_path / "run.cfg"
        p.write_text(text)
        return p

    def test_run_writes_csv(self, tmp_path, capsys):
        cfg = self._write_config(tmp_path)
        out = tmp_path / "traj.csv"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 0
        assert out.exists()
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(TRAJECTORY_HEADER)
        assert len(lines) == 7   # 5 pulses + initial + header

    def test_byte_identical_reruns(self, tmp_path):
        cfg = self._write_config(tmp_path)
        out1 = tmp_path / "a.csv"
        out2 = tmp_path / "b.csv"
        assert main(["run", "--config", str(cfg), "--out", str(out1)]) == 0
        assert main(["run", "--config", str(cfg), "--out", str(out2)]) == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_missing_config_is_exit_2(self, capsys):
        assert main(["run"]) == 2
        assert "[config]" in capsys.readouterr().err

    def test_unreadable_config_is_exit_2(self, tmp_path):
        assert main(["run", "--config", str(tmp_path / "no.cfg")]) == 2

    def test_mode_mismatch_is_exit_2(self, tmp_path, capsys):
        cfg = self._write_config(tmp_path)
        assert main(["sweep", "--config", str(cfg)]) == 2

    def test_unwritable_output_is_exit_5(self, tmp_path):
        cfg = self._write_config(tmp_path)
        out = tmp_path / "missing-dir" / "x.csv"
        assert main(["run", "--config", str(cfg), "--out", str(out)]) == 5

    def test_preset_emit_and_run(self, tmp_path):
        cfg_path = tmp_path / "fig2a.cfg"
        assert main(["preset", "fig2a", "--emit-config", str(cfg_path)]) == 0
        loaded = load_config(cfg_path)
        assert loaded.sim.pulse.num_pulses == 250

    def test_preset_stdout(self, capsys):
        assert main(["preset", "fig2b"]) == 0
        out = capsys.readouterr().out
        assert "rep_rate_mhz = 120" in out

    def test_unknown_preset_exit_2(self, capsys):
        assert main(["preset", "fig99"]) == 2
        assert "valid presets" in capsys.readouterr().err

    def test_policy_overrides(self, tmp_path):
        cfg = self._write_config(tmp_path)
        out = tmp_path / "c.csv"
        assert main(["run", "--config", str(cfg), "--out", str(out),
                     "--steps-per-cycle", "64", "--window", "6"]) == 0

    def test_sweep_command(self, tmp_path):
        text = BASE_TEXT.replace("mode = single", "mode = velocity-sweep") + \
            "\n[sweep]\nvelocities_m_per_s = 0, 200\n"
        cfg = self._write_config(tmp_path, text)
        out = tmp_path / "sweep.csv"
        assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(SWEEP_HEADER)
        assert len(lines) == 1 + 2 * 6    # 2 grid points x (5 pulses + initial)

    def test_oracle_command_passes_on_locked_toy(self, tmp_path):
        text = """
[run]
mode = oracle
radius_um = 0.0

[levels]
n21 = 0.1
n43 = 2.0
n41 = 60.0

[decays]
gamma41_per_s = 2.5e12
gamma42_per_s = 2.5e12
gamma31_per_s = 2.5e12
gamma32_per_s = 2.5e12

[pulse]
rep_rate_mhz = 500000.0
peak_rabi_rad_per_fs = 0.0088622692545275805
tau0_fs = 10.0
w0_um = 100.0
n_pulses = 3

[oracle]
step_fs = 0.04
tolerance = 1e-6
"""
        cfg = self._write_config(tmp_path, text)
        assert main(["oracle", "--config", str(cfg)]) == 0

    def test_oracle_failure_is_exit_4(self, tmp_path, capsys):
        text = BASE_TEXT.replace("n_pulses = 5", "n_pulses = 2")
        cfg = self._write_config(tmp_path, text)
        # optical-scale levels: a uniform-step oracle at this step disperses,
        # so an absurdly tight tolerance must fail with the invariant code
        code = main(["oracle", "--config", str(cfg), "--step-fs", "0.5",
                     "--tol", "1e-30", "--allow-long-span"])
        assert code == 4
        assert "[invariant]" in capsys.readouterr().err

    def test_oracle_span_guard_is_exit_3(self, capsys):
        # fig2a spans 2.5 us, far past the 10 ns brute-force guard
        assert main(["oracle", "--preset", "fig2a"]) == 3
        assert "[integration]" in capsys.readouterr().err
