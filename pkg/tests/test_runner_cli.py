import importlib.util
import json
import sys
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from benjaminbox import cli
from benjaminbox.common import read_json, read_table
from benjaminbox.config import apply_overrides, from_mapping, load_config, preset, with_output_dir
from benjaminbox.errors import RunStatus
from benjaminbox.initial import bo_soliton, bo_soliton_peak
from benjaminbox.runner import MANIFEST_NAME, kernel_dump, run_experiment


def _zero_config(tmp_path, **extra):
    data = {
        "alpha": 1.0,
        "beta": 0.0,
        "gamma": 0.0,
        "lambda": 1.0,
        "l": 30.0,
        "N": 63,
        "dt": 1e-2,
        "t_end": 0.1,
        "scheme": "euler-box",
        "initial": "zero",
        "snapshot_every": 5,
        "invariants_every": 2,
        "output_dir": str(tmp_path / "zero"),
    }
    data.update(extra)
    return from_mapping(data)


def test_zero_field_run(tmp_path):
    cfg = _zero_config(tmp_path)
    result = run_experiment(cfg)
    assert result.status == RunStatus.COMPLETED and result.ok
    assert result.steps_completed == 10
    assert result.t_final == pytest.approx(0.1)

    out = result.out_dir
    inv = read_table(out / "invariants.csv")
    assert list(inv.columns) == ["t", "mass", "momentum", "energy"]
    assert len(inv) == 6
    assert (inv[["mass", "momentum", "energy"]].to_numpy() == 0.0).all()

    assert list(read_table(out / "steepness.csv").columns) == ["t", "max_abs_ux"]

    for step in (0, 5, 10):
        snap = read_table(out / f"snapshot_{step}.csv")
        assert list(snap.columns) == ["x", "u"]
        assert len(snap) == 63
        np.testing.assert_allclose(snap["x"], np.arange(63) * 30.0 / 63, rtol=0, atol=1e-14)
        assert (snap["u"] == 0.0).all()

    assert (out / "plot_run.py").is_file()
    manifest = read_json(out / MANIFEST_NAME)
    assert manifest["status"] == "completed"
    assert manifest["steps_completed"] == 10
    assert manifest["config"]["lambda"] == 1.0
    assert set(manifest["files"]) >= {"invariants.csv", "snapshot_10.csv"}
    assert "numpy" in manifest["versions"]


def test_manifest_rerun_is_bit_identical(tmp_path):
    cfg = with_output_dir(
        from_mapping(
            {
                "alpha": 1.0,
                "beta": 0.0,
                "gamma": 0.0,
                "lambda": 1.0,
                "l": 30.0,
                "N": 63,
                "dt": 1e-2,
                "t_end": 0.5,
                "scheme": "euler-box",
                "initial": "bo-soliton",
                "invariants_every": 5,
            }
        ),
        tmp_path / "first",
    )
    first = run_experiment(cfg)
    again = load_config(first.out_dir / MANIFEST_NAME)
    second = run_experiment(again, out_dir=tmp_path / "second")
    assert (first.out_dir / "invariants.csv").read_bytes() == (
        second.out_dir / "invariants.csv"
    ).read_bytes()
    assert (first.out_dir / "snapshot_50.csv").read_bytes() == (
        second.out_dir / "snapshot_50.csv"
    ).read_bytes()


def test_nonfinite_run_stops(tmp_path):
    # far beyond the explicit stability limit
    cfg = _zero_config(
        tmp_path, initial="cosine", amplitude=5.0, mode=20, scheme="heun", N=64, dt=5.0, t_end=5000.0
    )
    result = run_experiment(cfg)
    assert result.status == RunStatus.NONFINITE
    assert result.ok
    assert result.steps_completed < 1000
    inv = read_table(result.out_dir / "invariants.csv")
    assert np.isfinite(inv.to_numpy()).all()


def test_newton_failure_is_recorded(tmp_path):
    cfg = apply_overrides(
        preset("bo-soliton", scheme="preissmann"),
        ["N=63", "dt=0.01", "t_end=0.1", "newton_max_iter=1"],
    )
    result = run_experiment(cfg, out_dir=tmp_path / "fail")
    assert result.status == RunStatus.NEWTON_FAILURE
    assert not result.ok
    assert result.failed_step == 1
    assert result.steps_completed == 0
    assert result.message

    manifest = read_json(tmp_path / "fail" / MANIFEST_NAME)
    assert manifest["status"] == "newton_failure"
    assert manifest["failed_step"] == 1
    assert (tmp_path / "fail" / "snapshot_0.csv").is_file()


def test_kernel_dump_frames(tmp_path):
    df = kernel_dump(4)
    assert list(df.columns) == ["n", "kernel", "sgn_diag", "wave_diag"]
    np.testing.assert_allclose(df["kernel"], [0.0, 0.5, 0.0, -0.5], atol=1e-15)
    np.testing.assert_array_equal(df["wave_diag"], [0, 1, 0, -1])
    np.testing.assert_array_equal(kernel_dump(3)["sgn_diag"], [0, 1, -1])

    path = tmp_path / "k.csv"
    kernel_dump(5, path)
    assert path.read_text(encoding="utf-8").splitlines()[0] == "n,kernel,sgn_diag,wave_diag"


# -----------------------------
# CLI
# -----------------------------


def test_cli_kernel_dump_stdout(capsys):
    assert cli.main(["kernel-dump", "--n", "4"]) == cli.EXIT_OK
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "n,kernel,sgn_diag,wave_diag"
    assert len(lines) == 5


def test_cli_error_line(tmp_path, capsys):
    bad = tmp_path / "bad.yaml"
    bad.write_text("alpha: 1\n", encoding="utf-8")
    assert cli.main(["run", "--config", str(bad)]) == cli.EXIT_ERROR
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "config"
    assert "missing" in err["message"]

    assert cli.main(["run", "--config", str(tmp_path / "absent.yaml")]) == cli.EXIT_ERROR
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "io"


def test_cli_parity_error(tmp_path, capsys):
    code = cli.main(
        ["preset", "bo-soliton", "--scheme", "preissmann", "--override", "N=64", "--out", str(tmp_path)]
    )
    assert code == cli.EXIT_ERROR
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "parity"


def test_cli_newton_failure_line(tmp_path, capsys):
    code = cli.main(
        [
            "preset",
            "bo-soliton",
            "--scheme",
            "preissmann",
            "--override",
            "N=63",
            "--override",
            "dt=0.01",
            "--override",
            "t_end=0.1",
            "--override",
            "newton_max_iter=1",
            "--out",
            str(tmp_path),
        ]
    )
    assert code == cli.EXIT_RUN_FAILED
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"] == "newton_divergence"
    assert err["step"] == 1
    assert err["message"]

    manifest = read_json(tmp_path / MANIFEST_NAME)
    assert manifest["status"] == "newton_failure"
    assert manifest["failed_step"] == 1


def test_cli_preset_emit(tmp_path):
    target = tmp_path / "wave.yaml"
    code = cli.main(["preset", "wave-breaking", "--override", "N=256", "--emit", str(target)])
    assert code == cli.EXIT_OK
    cfg = load_config(target)
    assert cfg.N == 256 and cfg.dt == 1e-6 and cfg.initial == "cosine"


def test_cli_run_from_config(tmp_path):
    target = tmp_path / "cfg.yaml"
    cli.main(
        [
            "preset",
            "bo-soliton",
            "--override",
            "N=63",
            "--override",
            "dt=0.01",
            "--override",
            "t_end=0.1",
            "--emit",
            str(target),
        ]
    )
    out = tmp_path / "run"
    assert cli.main(["run", "--config", str(target), "--out", str(out)]) == cli.EXIT_OK
    assert read_json(out / MANIFEST_NAME)["status"] == "completed"


def test_cli_convergence_hilbert(tmp_path):
    out = tmp_path / "conv.csv"
    assert cli.main(["convergence", "--target", "hilbert", "--out", str(out)]) == cli.EXIT_OK
    table = read_table(out)
    assert set(table["case"]) == {
        "hilbert/exp-sin/even",
        "hilbert/exp-sin/odd",
        "hilbert/cubic-series/even",
        "hilbert/cubic-series/odd",
    }


def _load_summarize_runs():
    path = Path(__file__).resolve().parents[1] / "scripts" / "summarize_runs.py"
    spec = importlib.util.spec_from_file_location("summarize_runs", path)
    module = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(module)
    return module


def test_wave_breaking_smoke_and_summary(tmp_path, monkeypatch):
    runs = tmp_path / "runs"
    code = cli.main(
        [
            "preset",
            "wave-breaking",
            "--override",
            "N=64",
            "--override",
            "t_end=1.0e-5",
            "--out",
            str(runs / "wave"),
        ]
    )
    assert code == cli.EXIT_OK
    manifest = read_json(runs / "wave" / MANIFEST_NAME)
    assert manifest["status"] == "completed"
    assert manifest["steps_completed"] == 10

    summarize_runs = _load_summarize_runs()
    out = tmp_path / "summary.tsv"
    monkeypatch.setattr(sys, "argv", ["summarize_runs.py", "--runs", str(runs), "--out", str(out)])
    summarize_runs.main()

    table = pd.read_csv(out, sep="\t")
    assert len(table) == 1
    row = table.iloc[0]
    assert row["run"] == "wave"
    assert row["scheme"] == "euler-box"
    assert row["initial"] == "cosine"
    assert row["N"] == 64
    assert row["status"] == "completed"
    assert row["steps"] == 10
    for col in ("mass_drift", "momentum_drift", "energy_drift", "max_abs_ux_final"):
        assert np.isfinite(row[col])
    assert row["energy_drift"] < 1e-3
    assert row["max_abs_ux_final"] > 0.0


# -----------------------------
# Preset experiments
# -----------------------------


@pytest.mark.slow
def test_bo_soliton_preset_fidelity(tmp_path):
    result = run_experiment(preset("bo-soliton"), out_dir=tmp_path / "bo")
    assert result.status == RunStatus.COMPLETED
    snap = read_table(tmp_path / "bo" / "snapshot_4000.csv")
    exact = bo_soliton(snap["x"].to_numpy(), 10.0, 0.25, 30.0)
    assert np.max(np.abs(snap["u"].to_numpy() - exact)) <= 0.05 * bo_soliton_peak(0.25, 30.0)


def _local_maxima_above(u, level):
    left, right = np.roll(u, 1), np.roll(u, -1)
    return int(np.count_nonzero((u > left) & (u >= right) & (u > level)))


@pytest.mark.slow
def test_gaussian_split_preset(tmp_path):
    result = run_experiment(preset("gaussian-split"), out_dir=tmp_path / "split")
    assert result.status == RunStatus.COMPLETED
    inv = read_table(tmp_path / "split" / "invariants.csv")
    mass, energy = inv["mass"].to_numpy(), inv["energy"].to_numpy()
    assert np.max(np.abs(mass - mass[0])) <= 1e-10 * abs(mass[0])
    assert np.max(np.abs(energy - energy[0])) <= 1e-4 * abs(energy[0])
    snap = read_table(tmp_path / "split" / "snapshot_2000.csv")
    assert _local_maxima_above(snap["u"].to_numpy(), 0.5) >= 2
