"""End-to-end checks of the command line interface.

Every test shells out to ``python -m movingwell.cli`` so the argparse
layer, exit codes, and CSV files are exercised exactly as a user sees
them.  Heavy solver commands run at reduced resolution; the physics at
full resolution is covered elsewhere.
"""

import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

REPO = Path(__file__).resolve().parents[1]
CONFIGS = REPO / "configs"

GAMMA0 = 2.8655985682520457


def run_cli(*args, cwd=None):
    return subprocess.run(
        [sys.executable, "-m", "movingwell.cli", *args],
        capture_output=True,
        text=True,
        cwd=cwd or REPO,
    )


def write_cfg(tmp_path, text, name="scenario.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def read_rows(path):
    return np.loadtxt(path, delimiter=",", skiprows=2, ndmin=2)


class TestThetaCheck:
    def test_passes_and_writes_csv(self, tmp_path):
        res = run_cli("theta-check", "--config", str(CONFIGS / "theta.cfg"),
                      "--out", str(tmp_path))
        assert res.returncode == 0, res.stderr
        assert "max_rel_err" in res.stdout
        lines = (tmp_path / "theta_check.csv").read_text().splitlines()
        assert lines[0].startswith("# config: ")
        assert lines[1] == "kind,z_re,z_im,kappa_re,kappa_im,rel_err"
        rows = read_rows(tmp_path / "theta_check.csv")
        assert rows.shape[0] == 200
        assert rows[:, 5].max() < 1e-12

    def test_reruns_are_byte_identical(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        for out in (a, b):
            res = run_cli("theta-check", "--config", str(CONFIGS / "theta.cfg"),
                          "--out", str(out))
            assert res.returncode == 0
        assert (a / "theta_check.csv").read_bytes() == (b / "theta_check.csv").read_bytes()

    def test_seed_changes_the_draw(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        run_cli("theta-check", "--config", str(CONFIGS / "theta.cfg"), "--out", str(a))
        run_cli("theta-check", "--config", str(CONFIGS / "theta.cfg"), "--out", str(b),
                "--seed", "777")
        assert (a / "theta_check.csv").read_bytes() != (b / "theta_check.csv").read_bytes()

    def test_unreachable_tolerance_exits_3(self, tmp_path):
        cfg = write_cfg(tmp_path, "theta.samples=50\ntolerances.theta_tol=1e-16\n")
        res = run_cli("theta-check", "--config", cfg, "--out", str(tmp_path))
        assert res.returncode == 3


class TestConfigErrors:
    def test_missing_required_key(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            "trajectory.kind=linear\ntrajectory.L0=100\ntrajectory.q=2\ntime.t=5\n",
        )
        res = run_cli("locality", "--config", cfg, "--out", str(tmp_path))
        assert res.returncode == 2
        assert "gaussian.d" in res.stderr

    def test_malformed_line_reports_location(self, tmp_path):
        cfg = write_cfg(tmp_path, "theta.samples=10\nno equals sign\n")
        res = run_cli("theta-check", "--config", cfg, "--out", str(tmp_path))
        assert res.returncode == 2
        assert ":2:" in res.stderr

    def test_non_numeric_value(self, tmp_path):
        cfg = write_cfg(tmp_path, "theta.samples=ten\n")
        res = run_cli("theta-check", "--config", cfg, "--out", str(tmp_path))
        assert res.returncode == 2
        assert "theta.samples" in res.stderr

    def test_missing_file(self, tmp_path):
        res = run_cli("theta-check", "--config", str(tmp_path / "nope.cfg"),
                      "--out", str(tmp_path))
        assert res.returncode == 2

    def test_unused_keys_are_noted(self, tmp_path):
        cfg = write_cfg(tmp_path, "theta.samples=20\nbogus.key=1\n")
        res = run_cli("theta-check", "--config", cfg, "--out", str(tmp_path))
        assert res.returncode == 0
        assert "unused config keys: bogus.key" in res.stderr


class TestLocality:
    def test_moving_wall_matches_static_box(self, tmp_path):
        res = run_cli("locality", "--config", str(CONFIGS / "locality.cfg"),
                      "--out", str(tmp_path))
        assert res.returncode == 0, res.stderr
        rows = read_rows(tmp_path / "locality.csv")
        assert rows.shape[0] == 3
        assert rows[:, 1].max() < 1e-10     # sup error
        assert np.all(rows[:, 4] == 0.0)    # verdict pass

    def test_scaled_pair(self, tmp_path):
        res = run_cli("locality", "--config", str(CONFIGS / "locality_scaled.cfg"),
                      "--out", str(tmp_path))
        assert res.returncode == 0, res.stderr
        assert "verdict=pass" in res.stdout

    def test_wide_packet_warns_and_strict_escalates(self, tmp_path):
        text = (
            "trajectory.kind=linear\ntrajectory.L0=20\ntrajectory.q=2\n"
            "gaussian.d=2.02\ntime.t=1\ngrid.x_min=-9\ngrid.x_max=9\n"
        )
        cfg = write_cfg(tmp_path, text)
        res = run_cli("locality", "--config", cfg, "--out", str(tmp_path / "a"))
        assert res.returncode == 0
        assert "LocalizationWarning" in res.stderr
        assert "verdict=warn" in res.stdout
        strict = run_cli("locality", "--config", cfg, "--out", str(tmp_path / "b"),
                         "--strict")
        assert strict.returncode == 3


class TestEvolve:
    def test_snapshots_and_plot_script(self, tmp_path):
        res = run_cli("evolve", "--config", str(CONFIGS / "evolve.cfg"),
                      "--out", str(tmp_path))
        assert res.returncode == 0, res.stderr
        for i in range(3):
            assert (tmp_path / f"evolve_{i:03d}.csv").exists()
        lines = (tmp_path / "evolve_000.csv").read_text().splitlines()
        assert lines[1] == "x,re_psi,im_psi,abs2"
        assert "__t=" in lines[0]
        script = tmp_path / "evolve_plot.py"
        compile(script.read_text(), str(script), "exec")

    def test_sum_and_theta_routes_agree(self, tmp_path):
        base = (
            "trajectory.kind=smooth_periodic\ntrajectory.L0=100\n"
            "trajectory.q=0.1\ntrajectory.omega=1\n"
            "gaussian.d=1\ngaussian.x0=10\ngaussian.p0=2\ntime.t=3\n"
        )
        outs = {}
        for route in ("sum", "theta_general"):
            cfg = write_cfg(tmp_path, base + f"evolve.route={route}\n", f"{route}.cfg")
            out = tmp_path / route
            res = run_cli("evolve", "--config", cfg, "--out", str(out))
            assert res.returncode == 0, res.stderr
            outs[route] = read_rows(out / "evolve_000.csv")
        diff = np.abs(outs["sum"][:, 3] - outs["theta_general"][:, 3]).max()
        assert diff < 1e-12

    def test_cycle_route_needs_reversing_wall(self, tmp_path):
        cfg = write_cfg(
            tmp_path,
            "trajectory.kind=linear\ntrajectory.L0=100\ntrajectory.q=2\n"
            "gaussian.d=1\nevolve.route=cycle\ntime.t=4\n",
        )
        res = run_cli("evolve", "--config", cfg, "--out", str(tmp_path))
        assert res.returncode == 2


class TestCycle:
    def test_full_cycle_closes(self, tmp_path):
        res = run_cli("cycle", "--config", str(CONFIGS / "cycle.cfg"),
                      "--out", str(tmp_path))
        assert res.returncode == 0, res.stderr
        assert "route_diff" in res.stdout and "static_diff" in res.stdout
        assert (tmp_path / "cycle_closed.csv").exists()
        assert (tmp_path / "cycle_reexpansion.csv").exists()


class TestPhase:
    def test_table_reproduces_ground_mode(self, tmp_path):
        res = run_cli("phase", "--config", str(CONFIGS / "phase.cfg"),
                      "--out", str(tmp_path))
        assert res.returncode == 0, res.stderr
        rows = read_rows(tmp_path / "phase.csv")
        assert rows.shape == (11, 7)
        assert rows[0, 4] == pytest.approx(GAMMA0, rel=1e-12)
        # clock + dynamical + geometric must cancel, per the quadrature check
        assert rows[:, 6].max() < 1e-6


class TestFig1:
    def test_dataset_shape_and_scaling(self, tmp_path):
        res = run_cli("fig1", "--config", str(CONFIGS / "fig1.cfg"),
                      "--out", str(tmp_path))
        assert res.returncode == 0, res.stderr
        lines = (tmp_path / "fig1.csv").read_text().splitlines()
        assert lines[1] == "Lbar0,n,gamma_mod_2pi,gamma"
        rows = read_rows(tmp_path / "fig1.csv")
        assert rows.shape == (4 * 31, 4)
        assert rows[0, 3] == pytest.approx(GAMMA0, rel=1e-12)
        # box-size scaling: gamma grows with the square of the size
        g100 = rows[rows[:, 0] == 100][:, 3]
        g400 = rows[rows[:, 0] == 400][:, 3]
        assert g400 == pytest.approx(16 * g100, rel=1e-9)
        compile((tmp_path / "fig1_plot.py").read_text(), "fig1_plot.py", "exec")


class TestSolverCommands:
    def test_fig2_reduced_resolution(self, tmp_path):
        text = (
            "trajectory.kind=smooth_periodic\ntrajectory.L0=100\n"
            "trajectory.q=0.1\ntrajectory.omega=1\ngaussian.d=1\n"
            "solver.n_points=1024\nsolver.n_steps=6284\n"
            "solver.x_min=-40\nsolver.x_max=40\ntolerances.fig2_tol=0.02\n"
        )
        cfg = write_cfg(tmp_path, text)
        res = run_cli("fig2", "--config", cfg, "--out", str(tmp_path))
        assert res.returncode == 0, res.stderr
        lines = (tmp_path / "fig2.csv").read_text().splitlines()
        assert lines[1] == "x,abs2_confined,abs2_unconfined"

    def test_oracle_compare_reduced_resolution(self, tmp_path):
        text = (
            "trajectory.kind=linear\ntrajectory.L0=100\ntrajectory.q=2\n"
            "gaussian.d=1\ntime.t=2\nsolver.n_points=1024\n"
            "solver.n_steps=2000\ntolerances.oracle_tol=1e-2\n"
        )
        cfg = write_cfg(tmp_path, text)
        res = run_cli("oracle-compare", "--config", cfg, "--out", str(tmp_path))
        assert res.returncode == 0, res.stderr
        assert "rel_l2" in res.stdout
        rows = read_rows(tmp_path / "oracle_compare.csv")
        assert rows.shape[1] == 6


class TestSampleConfigs:
    def test_all_samples_parse(self):
        from movingwell.config import parse_config

        files = sorted(CONFIGS.glob("*.cfg"))
        assert len(files) >= 10
        for f in files:
            parse_config(str(f))
