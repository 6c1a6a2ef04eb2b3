"""End-to-end command-line runs against the bundled configs."""

import json
from pathlib import Path

import numpy as np
import pytest

from krylov_ff.cli import RunConfig, main

REPO = Path(__file__).resolve().parent.parent
HEISENBERG = str(REPO / "configs" / "heisenberg4.txt")
TWOLEVEL = str(REPO / "configs" / "twolevel.txt")
DIPOLE_X = str(REPO / "configs" / "dipole_x.txt")


def read_csv(path):
    rows = [line.split(",") for line in Path(path).read_text().splitlines()]
    return rows[0], np.array([[float(x) for x in row] for row in rows[1:]])


def artifact_bytes(directory):
    return {
        str(p.relative_to(directory)): p.read_bytes()
        for p in sorted(Path(directory).rglob("*"))
        if p.is_file()
    }


def base_args(tmp_path, **extra):
    args = [
        "--hamiltonian", HEISENBERG,
        "--initial-state", "0101",
        "--max-references", "2",
        "--exact-sampling",
        "--t-max", "10",
        "--grid-points", "101",
        "--out", str(tmp_path / "run"),
    ]
    for key, value in extra.items():
        args += [f"--{key.replace('_', '-')}", str(value)]
    return args


def test_autocorrelation_run_artifacts(tmp_path):
    assert main(base_args(tmp_path)) == 0
    out = tmp_path / "run"
    summary = json.loads((out / "summary.json").read_text())
    assert summary["stop_reason"] in ("converged", "max_references")
    rounds = summary["rounds_executed"]
    assert rounds >= 1
    for index in range(1, rounds + 1):
        header, data = read_csv(out / f"round_{index}.csv")
        assert header == ["t", "re_C", "im_C", "abs2_C", "fidelity"]
        assert data.shape == (101, 5)
        assert data[0, 0] == 0.0
        assert data[-1, 0] == 10.0
        assert data[0, 3] == pytest.approx(1.0, abs=1e-9)
    assert (out / "rounds.jsonl").exists()
    assert (out / "model.json").exists()
    assert summary["final_fidelity_at_t_max"] > 0.99
    assert "timing" not in summary  # artifacts must be rerun-identical


def test_no_oracle_drops_fidelity_column(tmp_path):
    assert main(base_args(tmp_path) + ["--no-oracle"]) == 0
    header, data = read_csv(tmp_path / "run" / "round_1.csv")
    assert header == ["t", "re_C", "im_C", "abs2_C"]
    assert data.shape == (101, 4)


def test_rerun_is_byte_identical(tmp_path):
    argv = [
        "--config", str(REPO / "configs" / "heisenberg4_autocorr.json"),
        "--hamiltonian", HEISENBERG,
    ]
    assert main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert main(argv + ["--out", str(tmp_path / "b")]) == 0
    a = artifact_bytes(tmp_path / "a")
    b = artifact_bytes(tmp_path / "b")
    assert a.keys() == b.keys()
    assert all(a[name] == b[name] for name in a)


def test_flags_override_config(tmp_path):
    argv = [
        "--config", str(REPO / "configs" / "heisenberg4_autocorr.json"),
        "--hamiltonian", HEISENBERG,
        "--max-references", "1",
        "--out", str(tmp_path / "run"),
    ]
    assert main(argv) == 0
    summary = json.loads((tmp_path / "run" / "summary.json").read_text())
    assert summary["stop_reason"] == "max_references"
    assert summary["rounds_executed"] == 1
    assert summary["config"]["max_references"] == 1
    assert summary["config"]["seed"] == 7  # from the config file


def test_dipole_spectrum_run(tmp_path):
    argv = [
        "--hamiltonian", TWOLEVEL,
        "--dipole-x", DIPOLE_X,
        "--krylov-dim", "2",
        "--exact-sampling",
        "--gamma", "0.015",
        "--t-max", "20",
        "--out", str(tmp_path / "run"),
    ]
    assert main(argv) == 0
    out = tmp_path / "run"
    header, data = read_csv(out / "spectrum.csv")
    assert header == ["omega", "re_I_x", "re_I_y", "re_I_z", "f"]
    omega, re_x, re_y, f = data[:, 0], data[:, 1], data[:, 2], data[:, 4]
    assert np.all(re_y == 0)
    peak = omega[np.argmax(re_x)]
    assert abs(peak - 1.0) <= omega[1] - omega[0] + 1e-12
    assert re_x.max() == pytest.approx(2.0 / 0.015, rel=0.05)
    assert f[0] == 0.0
    assert (out / "x" / "round_1.csv").exists()
    summary = json.loads((out / "summary.json").read_text())
    assert summary["channels"]["x"]["ground_energy"] == pytest.approx(0.0, abs=1e-12)
    assert summary["channels"]["x"]["norm_factor"] == pytest.approx(1.0, abs=1e-12)


def test_observable_output(tmp_path):
    obs_path = tmp_path / "obs.txt"
    obs_path.write_text("1 ZIII\n")
    assert main(base_args(tmp_path, observable=str(obs_path))) == 0
    header, data = read_csv(tmp_path / "run" / "observable.csv")
    assert header == ["t", "O"]
    assert data.shape == (101, 2)
    assert abs(data[0, 1]) <= 1.0 + 1e-9


def test_noise_flag_round_trip(tmp_path):
    args = base_args(tmp_path, noise_sigma="1e-5", svd_threshold="1e-4", seed="9")
    assert main(args) == 0
    summary = json.loads((tmp_path / "run" / "summary.json").read_text())
    assert summary["config"]["noise_sigma"] == 1e-5
    assert summary["final_fidelity_at_t_max"] > 0.9


def test_missing_hamiltonian_fails(tmp_path, capsys):
    assert main(["--initial-state", "01", "--out", str(tmp_path / "x")]) == 1
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "ValueError"


def test_bad_pauli_file_fails_with_context(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1.0 Q\n")
    code = main(
        ["--hamiltonian", str(bad), "--initial-state", "0", "--out", str(tmp_path / "x")]
    )
    assert code == 1
    err = json.loads(capsys.readouterr().err.strip())
    assert err["error"] == "PauliParseError"
    assert "bad.txt" in err["message"]


def test_wrong_bitstring_length_fails(tmp_path, capsys):
    code = main(
        ["--hamiltonian", HEISENBERG, "--initial-state", "01", "--out", str(tmp_path / "x")]
    )
    assert code == 1
    assert json.loads(capsys.readouterr().err.strip())["error"] == "StateFormatError"


def test_unknown_config_key_rejected(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{"hamiltonian": "h.txt", "somethign": 1}')
    assert main(["--config", str(cfg)]) == 2
    assert "somethign" in json.loads(capsys.readouterr().err.strip())["message"]


def test_dipole_conflicts_with_explicit_state(tmp_path, capsys):
    argv = [
        "--hamiltonian", TWOLEVEL,
        "--dipole-x", DIPOLE_X,
        "--initial-state", "0",
        "--out", str(tmp_path / "x"),
    ]
    assert main(argv) == 1
    assert json.loads(capsys.readouterr().err.strip())["error"] == "ValueError"


def test_ground_dipole_state_spec_accepted(tmp_path):
    argv = [
        "--hamiltonian", TWOLEVEL,
        "--dipole-x", DIPOLE_X,
        "--initial-state", "ground+dipole",
        "--krylov-dim", "2",
        "--exact-sampling",
        "--out", str(tmp_path / "run"),
    ]
    assert main(argv) == 0


def test_run_config_mode_normalization():
    cfg = RunConfig.from_sources(None, {"mode": "symmetry-eigvec"})
    assert cfg.mode == "symmetry_eigvec"


def test_run_config_defaults():
    cfg = RunConfig()
    assert cfg.tau == 0.1
    assert cfg.krylov_dim == 6
    assert cfg.svd_threshold == 1e-9
    assert cfg.gamma == 1.5e-2
    assert cfg.shots == 1000
    assert cfg.oracle is True


def test_symmetry_mode_cli(tmp_path):
    args = base_args(tmp_path) + ["--mode", "symmetry-eigvec"]
    assert main(args) == 0
    summary = json.loads((tmp_path / "run" / "summary.json").read_text())
    assert summary["config"]["mode"] == "symmetry_eigvec"
