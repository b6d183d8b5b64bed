import json

import numpy as np
import pytest

from modqed.errors import ConfigurationError
from modqed.harness.cli import main as cli_main
from modqed.harness.config import build_config, load_config
from modqed.harness.runner import compare, read_trajectory_csv, run, write_trajectory_csv
from modqed.harness.sweep import load_sweep, sweep
from modqed.modulation import ModulationTarget

BASE = """
omega = 1.0
Omega0_over_omega = 1.004
g0_over_omega = 0.04
epsilon_over_omega = 0.1
s = [1.0]
t_end = 100.0
n_max = 5
initial_state = "g,0"

[resonance]
kind = "ajc"
xi_over_omega = -0.054568542494923804
"""


def write(tmp_path, text, name="exp.toml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def with_top_level(text, extra):
    """Insert top-level keys before any table header."""
    return text.replace('initial_state = "g,0"', 'initial_state = "g,0"\n' + extra)


class TestConfigLoading:
    def test_base_round_trip(self, tmp_path):
        cfg = load_config(write(tmp_path, BASE))
        assert cfg.params.Omega0 == 1.004
        assert cfg.params.g0 == 0.04
        assert cfg.profile.epsilon == 0.1
        assert cfg.space.n_max == 5
        assert cfg.t_end == 100.0
        assert cfg.frame == "interaction"
        assert cfg.resonance is not None
        # eta solves Delta_+ - xi for the requested shift
        assert cfg.profile.eta == pytest.approx(2.004 + 0.054568542494923804)

    def test_resonance_in_delta_units(self, tmp_path):
        text = """
omega = 1.0
Omega0_over_omega = 1.4
g0_over_omega = 0.02
epsilon_over_omega = 0.2
s = [1.0]
t_end = 50.0
n_max = 4
initial_state = "g,0"

[resonance]
kind = "ajc"
xi_in_delta_units = -2.0
"""
        cfg = load_config(write(tmp_path, text))
        # delta = g0^2/Delta_- = 1e-3, so xi = -2e-3 and eta = 2.4 + 2e-3
        assert cfg.resonance.xi == pytest.approx(-2e-3)
        assert cfg.profile.eta == pytest.approx(2.402)

    def test_explicit_eta(self, tmp_path):
        text = BASE.replace('[resonance]\nkind = "ajc"\nxi_over_omega = -0.054568542494923804',
                            "").replace("s = [1.0]", "s = [1.0]\neta_over_omega = 2.05")
        cfg = load_config(write(tmp_path, text))
        assert cfg.profile.eta == 2.05
        assert cfg.resonance is None

    def test_eta_and_resonance_conflict(self, tmp_path):
        text = BASE.replace("s = [1.0]", "s = [1.0]\neta_over_omega = 2.05")
        with pytest.raises(ConfigurationError):
            load_config(write(tmp_path, text))

    def test_driven_needs_eta_source(self, tmp_path):
        text = "\n".join(line for line in BASE.splitlines()
                         if not line.startswith(("[resonance]", "kind", "xi_over")))
        with pytest.raises(ConfigurationError):
            load_config(write(tmp_path, text))

    def test_undriven_needs_no_eta(self, tmp_path):
        text = "\n".join(line for line in BASE.splitlines()
                         if not line.startswith(("[resonance]", "kind", "xi_over")))
        text = text.replace("epsilon_over_omega = 0.1", "epsilon_over_omega = 0.0")
        cfg = load_config(write(tmp_path, text))
        assert cfg.profile.epsilon == 0.0

    def test_unknown_keys_rejected(self, tmp_path):
        with pytest.raises(ConfigurationError, match="unknown"):
            load_config(write(tmp_path, with_top_level(BASE, "stray = 3")))
        with pytest.raises(ConfigurationError, match="unknown"):
            load_config(write(tmp_path, BASE.replace(
                'kind = "ajc"', 'kind = "ajc"\ncolour = "red"')))
        with pytest.raises(ConfigurationError, match="unknown"):
            load_config(write(tmp_path, BASE + "\n[integrator]\nstepper = 5\n"))

    def test_omega_must_be_unity(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(write(tmp_path, BASE.replace("omega = 1.0", "omega = 2.0")))

    def test_xi_forms_exclusive(self, tmp_path):
        text = BASE.replace("xi_over_omega = -0.054568542494923804",
                            "xi_over_omega = -0.05\nxi_in_delta_units = -2.0")
        with pytest.raises(ConfigurationError):
            load_config(write(tmp_path, text))

    def test_superposition_initial_state(self, tmp_path):
        text = BASE.replace(
            'initial_state = "g,0"',
            'initial_state = [{state = "g,0", re = 1.0}, {state = "e,1", im = 1.0}]')
        cfg = load_config(write(tmp_path, text))
        amps = cfg.initial_state.amplitudes
        nz = np.flatnonzero(np.abs(amps) > 1e-15)
        assert list(nz) == [0, 7]
        assert abs(amps[0]) == pytest.approx(1 / np.sqrt(2))
        assert amps[7].imag == pytest.approx(1 / np.sqrt(2))

    def test_zero_superposition_rejected(self, tmp_path):
        text = BASE.replace('initial_state = "g,0"',
                            'initial_state = [{state = "g,0", re = 0.0}]')
        with pytest.raises(ConfigurationError):
            load_config(write(tmp_path, text))

    def test_bad_state_label(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(write(tmp_path, BASE.replace('"g,0"', '"q,0"')))

    def test_missing_n_max(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(write(tmp_path, BASE.replace("n_max = 5\n", "")))

    def test_bad_frame(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(write(tmp_path, with_top_level(BASE, 'frame = "rotating"')))

    def test_lab_frame_allowed_for_atom_target(self, tmp_path):
        cfg = load_config(write(tmp_path, with_top_level(BASE, 'frame = "lab"')))
        assert cfg.frame == "lab"

    def test_coupling_target_lab_frame_conflict(self, tmp_path):
        text = with_top_level(BASE, 'target = "coupling"\nframe = "lab"')
        with pytest.raises(ConfigurationError):
            load_config(write(tmp_path, text))

    def test_coupling_target_parsed(self, tmp_path):
        cfg = load_config(write(tmp_path, with_top_level(BASE, 'target = "coupling"')))
        assert cfg.profile.target is ModulationTarget.COUPLING

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(tmp_path / "absent.toml")

    def test_invalid_toml(self, tmp_path):
        with pytest.raises(ConfigurationError):
            load_config(write(tmp_path, "omega = = 1\n"))

    def test_integrator_overrides(self, tmp_path):
        text = BASE + "\n[integrator]\nmethod = \"rk4\"\nmax_step = 0.02\n"
        cfg = load_config(write(tmp_path, text))
        assert cfg.integrator.max_step == 0.02

    def test_output_path_relative_to_config(self, tmp_path):
        text = BASE + '\n[output]\ncsv = "out/traj.csv"\n'
        cfg = load_config(write(tmp_path, text))
        assert cfg.csv_path == tmp_path / "out" / "traj.csv"


class TestRunner:
    def test_run_and_csv_round_trip(self, tmp_path):
        cfg = load_config(write(tmp_path, BASE))
        csv_path = tmp_path / "traj.csv"
        traj = run(cfg, csv_path=csv_path)
        data = read_trajectory_csv(csv_path)
        assert np.array_equal(data["t"], traj.times)
        assert np.array_equal(data["n_mean"], traj.n_mean)
        assert np.array_equal(data["P_g"], traj.p_g)
        assert np.array_equal(data["P_g_2"], traj.population("g", 2))
        assert np.array_equal(data["P_e_5"], traj.population("e", 5))

    def test_csv_header_layout(self, tmp_path):
        cfg = load_config(write(tmp_path, BASE.replace("n_max = 5", "n_max = 4")))
        csv_path = tmp_path / "t.csv"
        run(cfg, csv_path=csv_path)
        header = csv_path.read_text().splitlines()[0].split(",")
        expected = (["t", "norm_error", "n_mean", "P_g", "P_e"]
                    + [f"P_g_{m}" for m in range(5)] + [f"P_e_{m}" for m in range(5)])
        assert header == expected

    def test_reruns_byte_identical(self, tmp_path):
        cfg = load_config(write(tmp_path, BASE))
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        run(cfg, csv_path=p1)
        run(cfg, csv_path=p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_write_helper_matches_run_output(self, tmp_path):
        cfg = load_config(write(tmp_path, BASE))
        traj = run(cfg, csv_path=tmp_path / "direct.csv")
        write_trajectory_csv(traj, tmp_path / "again.csv")
        assert (tmp_path / "direct.csv").read_bytes() == (tmp_path / "again.csv").read_bytes()

    def test_configured_output_used(self, tmp_path):
        text = BASE + '\n[output]\ncsv = "auto.csv"\n'
        cfg = load_config(write(tmp_path, text))
        run(cfg)
        assert (tmp_path / "auto.csv").exists()


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
class TestCompare:
    def test_report_structure(self, tmp_path):
        cfg = load_config(write(tmp_path, BASE.replace("t_end = 100.0", "t_end = 300.0")))
        report = compare(cfg)
        assert set(report.rms) == {"n_mean", "P_g", "P_e"}
        assert report.threshold == 0.1
        assert report.sup_distance < 0.1
        assert not report.exceeded
        assert report.validity_horizon == cfg.t_end
        assert np.array_equal(report.exact.times, report.effective.times)

    def test_negligible_coupling_agrees_exactly(self, tmp_path):
        text = BASE.replace("g0_over_omega = 0.04", "g0_over_omega = 1e-12")
        text = text.replace("xi_over_omega = -0.054568542494923804", "xi_over_omega = 0.0")
        cfg = load_config(write(tmp_path, text))
        report = compare(cfg)
        assert report.sup_distance < 1e-9

    def test_requires_resonance_block(self, tmp_path):
        text = BASE.replace('[resonance]\nkind = "ajc"\nxi_over_omega = -0.054568542494923804',
                            "").replace("s = [1.0]", "s = [1.0]\neta_over_omega = 2.05")
        cfg = load_config(write(tmp_path, text))
        with pytest.raises(ConfigurationError):
            compare(cfg)


SWEEP = """
max_runs = 8
fit_observable = "P_e_1"
output = "grid.csv"

[base]
omega = 1.0
Omega0_over_omega = 1.004
g0_over_omega = 0.04
epsilon_over_omega = 0.1
s = [1.0]
t_end = 60.0
n_max = 5
initial_state = "g,0"

[base.resonance]
kind = "ajc"
xi_over_omega = -0.054568542494923804

[axes]
"resonance.xi_over_omega" = [-0.06, -0.05]
"""


class TestSweep:
    def test_grid_runs_and_orders_rows(self, tmp_path):
        path = write(tmp_path, SWEEP, "sweep.toml")
        header, rows, output = sweep(path, workers=1)
        assert header[0] == "resonance.xi_over_omega"
        assert [r["resonance.xi_over_omega"] for r in rows] == [-0.06, -0.05]
        assert all(r["status"] == "ok" for r in rows)
        assert output == tmp_path / "grid.csv"
        assert output.exists()

    def test_single_point_matches_direct_run(self, tmp_path):
        text = SWEEP.replace('"resonance.xi_over_omega" = [-0.06, -0.05]',
                             '"resonance.xi_over_omega" = [-0.05]')
        _, rows, _ = sweep(write(tmp_path, text, "sweep.toml"), workers=1)
        base = BASE.replace("-0.054568542494923804", "-0.05").replace(
            "t_end = 100.0", "t_end = 60.0")
        traj = run(load_config(write(tmp_path, base, "point.toml")))
        assert rows[0]["max_n_mean"] == pytest.approx(float(traj.n_mean.max()), rel=1e-12)
        assert rows[0]["final_n_mean"] == pytest.approx(float(traj.n_mean[-1]), rel=1e-12)

    def test_worker_count_does_not_change_bytes(self, tmp_path):
        p1 = write(tmp_path, SWEEP.replace('output = "grid.csv"', 'output = "s1.csv"'),
                   "s1.toml")
        p2 = write(tmp_path, SWEEP.replace('output = "grid.csv"', 'output = "s2.csv"'),
                   "s2.toml")
        sweep(p1, workers=1)
        sweep(p2, workers=2)
        assert (tmp_path / "s1.csv").read_bytes() == (tmp_path / "s2.csv").read_bytes()

    def test_failing_point_reported_not_fatal(self, tmp_path):
        text = SWEEP.replace('"resonance.xi_over_omega" = [-0.06, -0.05]',
                             '"n_max" = [5, 0]')
        _, rows, _ = sweep(write(tmp_path, text, "sweep.toml"), workers=1)
        assert rows[0]["status"] == "ok"
        assert rows[1]["status"] == "error"
        assert "n_max" in rows[1]["error"] or "Configuration" in rows[1]["error"]

    def test_grid_budget_enforced(self, tmp_path):
        text = SWEEP.replace("max_runs = 8", "max_runs = 1")
        with pytest.raises(ConfigurationError):
            load_sweep(write(tmp_path, text, "sweep.toml"))

    def test_base_required(self, tmp_path):
        text = 'max_runs = 4\n\n[axes]\n"t_end" = [1.0]\n'
        with pytest.raises(ConfigurationError):
            load_sweep(write(tmp_path, text, "sweep.toml"))

    def test_axes_required(self, tmp_path):
        text = SWEEP.split("[axes]")[0]
        with pytest.raises(ConfigurationError):
            load_sweep(write(tmp_path, text, "sweep.toml"))


class TestCli:
    def test_simulate_writes_csv(self, tmp_path, capsys):
        cfg = write(tmp_path, BASE)
        out = tmp_path / "run.csv"
        assert cli_main(["simulate", str(cfg), "--output", str(out)]) == 0
        assert out.exists()
        capsys.readouterr()

    def test_missing_config_exits_2(self, tmp_path, capsys):
        assert cli_main(["simulate", str(tmp_path / "nope.toml")]) == 2
        assert "nope" in capsys.readouterr().err

    def test_bad_toml_exits_2(self, tmp_path, capsys):
        cfg = write(tmp_path, "omega = = 1\n")
        assert cli_main(["simulate", str(cfg)]) == 2
        capsys.readouterr()

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_resonance_listing(self, tmp_path, capsys):
        cfg = write(tmp_path, BASE)
        assert cli_main(["resonance", str(cfg), "--k-max", "2"]) == 0
        out = capsys.readouterr().out
        assert "ajc" in out and "dce" in out

    @pytest.mark.filterwarnings("ignore::RuntimeWarning")
    def test_compare_json(self, tmp_path, capsys):
        cfg = write(tmp_path, BASE.replace("t_end = 100.0", "t_end = 50.0"))
        assert cli_main(["compare", str(cfg), "--json"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert "sup_distance" in payload
        assert payload["threshold"] == 0.1

    def test_sweep_command(self, tmp_path, capsys):
        path = write(tmp_path, SWEEP, "sweep.toml")
        assert cli_main(["sweep", str(path), "--workers", "1"]) == 0
        assert (tmp_path / "grid.csv").exists()
        capsys.readouterr()
