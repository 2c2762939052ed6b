"""End-to-end CLI runs: schemas, determinism, exit codes, overrides."""

import json

import pytest

import bsv_tunnel
from bsv_tunnel.cli import main
from bsv_tunnel.config import parse_config_text
from bsv_tunnel.csvio import read_csv


def run_cli(argv, capsys):
    code = main(argv)
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def write_cfg(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


# ---------------------------------------------------------------------------
# Modes end to end

def test_trajectories_mode(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "r = 1.0\nn_realizations = 2\nn_time_samples = 9\n")
    out = tmp_path / "o"
    code, stdout, _ = run_cli(["trajectories", "--config", cfg,
                               "--out", str(out)], capsys)
    assert code == 0
    printed = stdout.strip().splitlines()
    assert str(out / "trajectories.csv") in printed
    assert str(out / "rho_grid.csv") in printed
    h, cols, rows = read_csv(out / "trajectories.csv")
    assert cols == ["t", "realization_id", "X", "P", "E"]
    # pinned realization 0 plus 2 sampled, 9 samples each
    assert len(rows) == 3 * 9
    assert sorted({int(r[1]) for r in rows}) == [0, 1, 2]
    assert rows[0][2] == -2.32
    h2, cols2, rows2 = read_csv(out / "rho_grid.csv")
    assert cols2 == ["t", "X", "rho"] and h2 == h
    assert len(rows2) == 9 * 161
    meta = json.loads((out / "trajectories.csv.meta.json").read_text())
    assert meta["config_hash"] == h
    assert meta["mode"] == "trajectories"
    assert meta["version"] == bsv_tunnel.__version__
    eff = parse_config_text(meta["effective_config"])
    assert eff.r == 1.0 and eff.config_hash() == h


def test_phase_space_mode(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "r = 2.0\nn_time_samples = 33\nx_i = -1.3\n")
    out = tmp_path / "o"
    code, stdout, _ = run_cli(["field_phase_space", "--config", cfg,
                               "--out", str(out)], capsys)
    assert code == 0
    _h, cols, rows = read_csv(out / "phase_space.csv")
    assert cols == ["t", "X", "P"]
    assert len(rows) == 33
    assert rows[0][1] == -1.3 and rows[0][2] == 0.0


def test_tunnel_scan_mode(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "r = 12.0\nn_nodes = 7\n")
    out = tmp_path / "o"
    code, _stdout, _ = run_cli(["tunnel_scan", "--config", cfg,
                                "--out", str(out)], capsys)
    assert code == 0
    _h, cols, rows = read_csv(out / "tunnel_scan.csv")
    assert cols == ["X_i", "rho", "P", "rho_P", "re_t0", "im_t0", "im_S",
                    "converged"]
    assert len(rows) == 7
    assert all(row[7] == 1.0 for row in rows)
    xs = [row[0] for row in rows]
    assert xs == sorted(xs)


def test_exit_trajectories_mode(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "r = 12.0\nlevels_n = 3\nexit_n_samples = 16\n"
                              "n_nodes = 7\n")
    out = tmp_path / "o"
    code, _stdout, _ = run_cli(["exit_trajectories", "--config", cfg,
                                "--out", str(out)], capsys)
    assert code == 0
    _h, cols, rows = read_csv(out / "exit_traj.csv")
    assert cols == ["level_l", "t", "x", "v"]
    levels = sorted({int(r[0]) for r in rows})
    assert levels == [0, 1, 2]
    meta = json.loads((out / "exit_traj.csv.meta.json").read_text())
    fan = meta["levels"]
    assert [d["level_l"] for d in fan] == [0, 1, 2]
    # level 0 is the peak; deeper levels sit at larger |X_i|
    assert fan[1]["X_i"] < fan[0]["X_i"] < 0.0


# ---------------------------------------------------------------------------
# Determinism and overrides

PTOT_CFG = "mode = ptot_scan\nr_list = 11,18\nn_nodes = 11\n"


def test_ptot_scan_worker_independence(tmp_path, capsys):
    cfg = write_cfg(tmp_path, PTOT_CFG)
    outs = {}
    for w in (1, 2):
        out = tmp_path / f"w{w}"
        code, _stdout, _ = run_cli(["ptot_scan", "--config", cfg,
                                    "--out", str(out), "--workers", str(w)],
                                   capsys)
        assert code == 0
        outs[w] = (out / "ptot_scan.csv").read_bytes()
    assert outs[1] == outs[2]
    _h, cols, rows = read_csv(tmp_path / "w1" / "ptot_scan.csv")
    assert cols == ["r", "sigma", "X_peak", "E_peak", "gamma_peak", "P_tot",
                    "n_failed_nodes"]
    assert [row[0] for row in rows] == [11.0, 18.0]
    assert all(row[6] == 0.0 for row in rows)


def test_repeat_run_byte_identical(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "n_realizations = 3\nn_time_samples = 9\n")
    blobs = []
    for tag in ("a", "b"):
        out = tmp_path / tag
        code, _stdout, _ = run_cli(["trajectories", "--config", cfg,
                                    "--out", str(out)], capsys)
        assert code == 0
        blobs.append((out / "trajectories.csv").read_bytes())
    assert blobs[0] == blobs[1]


def test_seed_override_changes_samples(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "n_realizations = 3\nn_time_samples = 9\n")
    blobs = {}
    for seed in (1, 2):
        out = tmp_path / f"s{seed}"
        code, _stdout, _ = run_cli(["trajectories", "--config", cfg,
                                    "--out", str(out), "--seed", str(seed)],
                                   capsys)
        assert code == 0
        blobs[seed] = (out / "trajectories.csv").read_bytes()
    assert blobs[1] != blobs[2]


def test_env_out_honored_and_beaten_by_flag(tmp_path, capsys, monkeypatch):
    cfg = write_cfg(tmp_path, "n_realizations = 1\nn_time_samples = 5\n")
    env_dir = tmp_path / "env_out"
    monkeypatch.setenv("BSV_TUNNEL_OUT", str(env_dir))
    code, _stdout, _ = run_cli(["trajectories", "--config", cfg], capsys)
    assert code == 0
    assert (env_dir / "trajectories.csv").exists()

    flag_dir = tmp_path / "flag_out"
    code, _stdout, _ = run_cli(["trajectories", "--config", cfg,
                                "--out", str(flag_dir)], capsys)
    assert code == 0
    assert (flag_dir / "trajectories.csv").exists()


def test_env_workers_validated(tmp_path, capsys, monkeypatch):
    cfg = write_cfg(tmp_path, "n_realizations = 1\nn_time_samples = 5\n")
    monkeypatch.setenv("BSV_TUNNEL_WORKERS", "lots")
    code, _stdout, err = run_cli(["trajectories", "--config", cfg,
                                  "--out", str(tmp_path / "o")], capsys)
    assert code == 2
    assert "BSV_TUNNEL_WORKERS" in json.loads(err)["detail"]


# ---------------------------------------------------------------------------
# Exit codes

def test_missing_config_file_is_config_error(tmp_path, capsys):
    code, _stdout, err = run_cli(["trajectories", "--config",
                                  str(tmp_path / "nope.cfg")], capsys)
    assert code == 2
    payload = json.loads(err)
    assert "error" in payload and "detail" in payload


def test_bad_key_is_config_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "bogus = 1\n")
    code, _stdout, err = run_cli(["trajectories", "--config", cfg], capsys)
    assert code == 2
    assert "bogus" in json.loads(err)["detail"]


def test_invalid_value_is_config_error(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "r = -1\n")
    code, _stdout, err = run_cli(["trajectories", "--config", cfg], capsys)
    assert code == 2
    assert "r >= 0" in json.loads(err)["detail"]


def test_unknown_mode_is_usage_error(capsys):
    assert main(["warp_drive"]) == 2


def test_failed_scan_rows_exit_numerical(tmp_path, capsys):
    cfg = write_cfg(tmp_path, "mode = ptot_scan\nr_list = 0\nn_nodes = 7\n")
    out = tmp_path / "o"
    code, stdout, err = run_cli(["ptot_scan", "--config", cfg,
                                 "--out", str(out)], capsys)
    assert code == 3
    assert json.loads(err)["error"] == "RowFailures"
    # the flagged CSV is still written for inspection
    _h, _cols, rows = read_csv(out / "ptot_scan.csv")
    assert len(rows) == 1 and rows[0][6] == -1.0
