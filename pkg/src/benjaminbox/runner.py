# -*- coding: utf-8 -*-
"""
benjaminbox.runner

Run driver for one RunConfig:

- integrates with the configured scheme, sampling invariants and
  steepness every `invariants_every` steps and u(x) every `snapshot_every`
- writes invariants.csv, steepness.csv, snapshot_<step>.csv,
  run_manifest.json and a plot_run.py script into the output directory
- stops without writing non-finite values (status "nonfinite") and
  records the failing step on Newton failure (status "newton_failure")
"""

from __future__ import annotations

import platform
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional

import numpy as np
import pandas as pd
import scipy
from tqdm import tqdm

from benjaminbox import __version__
from benjaminbox.common import file_hashes, write_json, write_table, FLOAT_FORMAT
from benjaminbox.config import RunConfig, to_mapping
from benjaminbox.diagnostics import invariants, max_slope
from benjaminbox.errors import NewtonConvergenceError, RunStatus, SingularMatrixError
from benjaminbox.initial import make_initial
from benjaminbox.integrators import make_stepper
from benjaminbox.spectral import hilbert_kernel, spectral_symbols

MANIFEST_NAME = "run_manifest.json"
PLOT_SCRIPT_NAME = "plot_run.py"


@dataclass
class RunResult:
    status: RunStatus
    out_dir: Path
    steps_completed: int
    t_final: float
    failed_step: Optional[int] = None
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status != RunStatus.NEWTON_FAILURE


class _Samples:
    def __init__(self) -> None:
        self.t: List[float] = []
        self.mass: List[float] = []
        self.momentum: List[float] = []
        self.energy: List[float] = []
        self.slope: List[float] = []

    def add(self, u, cfg: RunConfig, grid, t: float) -> None:
        rec = invariants(u, cfg.params, grid, t)
        self.t.append(rec.t)
        self.mass.append(rec.mass)
        self.momentum.append(rec.momentum)
        self.energy.append(rec.energy)
        self.slope.append(max_slope(u, grid))


def _versions() -> Dict[str, str]:
    return {
        "benjaminbox": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "pandas": pd.__version__,
    }


def run_experiment(
    cfg: RunConfig,
    out_dir: Optional[Path] = None,
    progress: bool = False,
) -> RunResult:
    t_start = time.perf_counter()
    cfg = cfg.validate()
    out = Path(out_dir) if out_dir is not None else Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    grid = cfg.grid
    u0 = make_initial(cfg.initial, grid, cfg.t0, **cfg.initial_options())
    stepper = make_stepper(
        cfg.scheme, u0, cfg.params, grid, cfg.dt, cfg.newton, cfg.diff, cfg.t0
    )
    n_steps = cfg.n_steps
    print(
        f"[run] scheme={cfg.scheme} N={grid.N} dt={cfg.dt:g} steps={n_steps} -> {out}"
    )

    samples = _Samples()
    samples.add(u0, cfg, grid, cfg.t0)
    snapshots = {0: u0.copy()}

    status = RunStatus.COMPLETED
    failed_step: Optional[int] = None
    message = ""
    t_setup = time.perf_counter()

    state = stepper.state
    for _ in tqdm(range(n_steps), disable=not progress, desc=cfg.scheme, unit="step"):
        try:
            state = stepper.advance()
        except (NewtonConvergenceError, SingularMatrixError) as exc:
            status = RunStatus.NEWTON_FAILURE
            failed_step = state.step + 1
            message = str(exc)
            print(f"[run] newton failure at step {failed_step}: {exc}")
            break
        if not np.all(np.isfinite(state.u)):
            status = RunStatus.NONFINITE
            failed_step = state.step
            message = f"solution left the finite range at step {state.step} (t={state.t:g})"
            print(f"[run] {message}")
            break
        last = state.step == n_steps
        if state.step % cfg.invariants_every == 0 or last:
            samples.add(state.u, cfg, grid, state.t)
        if state.step % cfg.snapshot_every == 0 or last:
            snapshots[state.step] = state.u.copy()

    # on a non-finite step the stepper already holds the bad state
    steps_done = state.step - 1 if status == RunStatus.NONFINITE else state.step
    t_final = cfg.t0 + steps_done * cfg.dt
    if steps_done not in snapshots and status == RunStatus.NEWTON_FAILURE:
        snapshots[steps_done] = state.u.copy()
    t_integrate = time.perf_counter()

    outputs = _write_outputs(out, grid, samples, snapshots)
    t_write = time.perf_counter()

    manifest = {
        "builder": "benjaminbox_run",
        "config": to_mapping(cfg),
        "status": status.value,
        "steps_requested": n_steps,
        "steps_completed": steps_done,
        "t_final": t_final,
        "failed_step": failed_step,
        "message": message,
        "newton": {
            "iterations_total": state.newton_iterations,
            "max_residual": state.newton_max_residual,
        },
        "versions": _versions(),
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
        "timings_s": {
            "setup": t_setup - t_start,
            "integrate": t_integrate - t_setup,
            "write": t_write - t_integrate,
        },
        "files": file_hashes(outputs),
    }
    write_json(out / MANIFEST_NAME, manifest)
    print(f"[run] status={status.value} steps={steps_done} t={t_final:g}")
    print(f"[DONE] manifest: {out / MANIFEST_NAME}")
    return RunResult(
        status=status,
        out_dir=out,
        steps_completed=steps_done,
        t_final=t_final,
        failed_step=failed_step,
        message=message,
    )


def _write_outputs(out: Path, grid, samples: _Samples, snapshots: Dict[int, np.ndarray]) -> List[Path]:
    written = []
    path = out / "invariants.csv"
    write_table(
        path,
        {
            "t": np.asarray(samples.t),
            "mass": np.asarray(samples.mass),
            "momentum": np.asarray(samples.momentum),
            "energy": np.asarray(samples.energy),
        },
    )
    written.append(path)

    path = out / "steepness.csv"
    write_table(path, {"t": np.asarray(samples.t), "max_abs_ux": np.asarray(samples.slope)})
    written.append(path)

    for step, u in sorted(snapshots.items()):
        path = out / f"snapshot_{step}.csv"
        write_table(path, {"x": grid.x, "u": u})
        written.append(path)

    path = out / PLOT_SCRIPT_NAME
    path.write_text(PLOT_SCRIPT, encoding="utf-8")
    written.append(path)
    return written


# -----------------------------
# Kernel dump
# -----------------------------


def kernel_dump(N: int, path: Optional[Path] = None) -> pd.DataFrame:
    """Kernel coefficients and Fourier symbols for N points (columns n, kernel, sgn_diag, wave_diag)."""
    kernel = hilbert_kernel(N)
    sym = spectral_symbols(N)
    df = pd.DataFrame(
        {
            "n": np.arange(N),
            "kernel": kernel.coeffs,
            "sgn_diag": sym.sgn_diag,
            "wave_diag": sym.wave_diag,
        }
    )
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return df


PLOT_SCRIPT = '''\
"""Render the outputs of one benjaminbox run (needs matplotlib and pandas)."""

import argparse
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--run", default=str(Path(__file__).resolve().parent))
    ap.add_argument("--out", default=None, help="PNG path (default: <run>/run.png)")
    args = ap.parse_args()

    run = Path(args.run)
    snaps = sorted(run.glob("snapshot_*.csv"), key=lambda p: int(p.stem.split("_")[1]))
    inv = pd.read_csv(run / "invariants.csv")
    steep = pd.read_csv(run / "steepness.csv")

    fig, (ax_u, ax_q, ax_s) = plt.subplots(3, 1, figsize=(8, 10))
    for p in snaps:
        df = pd.read_csv(p)
        ax_u.plot(df["x"], df["u"], lw=0.8, label=p.stem.split("_")[1])
    ax_u.set_xlabel("x")
    ax_u.set_ylabel("u")
    if len(snaps) <= 12:
        ax_u.legend(title="step", fontsize="small")

    for name in ("mass", "momentum", "energy"):
        q = inv[name]
        ax_q.plot(inv["t"], q - q.iloc[0], label=name)
    ax_q.set_xlabel("t")
    ax_q.set_ylabel("q(t) - q(0)")
    ax_q.legend()

    ax_s.plot(steep["t"], steep["max_abs_ux"])
    ax_s.set_xlabel("t")
    ax_s.set_ylabel("max |u_x|")

    fig.tight_layout()
    out = Path(args.out) if args.out else run / "run.png"
    fig.savefig(out, dpi=150)
    print(f"[DONE] figure written to {out}")


if __name__ == "__main__":
    main()
'''
