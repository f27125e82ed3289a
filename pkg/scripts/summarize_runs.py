"""Collect run_manifest.json + invariants.csv from run directories into one table."""

import argparse
from pathlib import Path

import pandas as pd

from benjaminbox.common import read_json, read_table
from benjaminbox.diagnostics import relative_drift


def summarize_invariants(run_dir: Path):
    """Relative drift of each invariant and the final max |u_x|."""
    inv_path = run_dir / "invariants.csv"
    if not inv_path.exists():
        return {}
    inv = read_table(inv_path)
    out = {f"{q}_drift": relative_drift(inv[q].to_numpy()) for q in ("mass", "momentum", "energy")}
    steep_path = run_dir / "steepness.csv"
    if steep_path.exists():
        steep = read_table(steep_path)
        out["max_abs_ux_final"] = float(steep["max_abs_ux"].iloc[-1])
    return out


def find_manifests(roots):
    found = []
    for root in map(Path, roots):
        direct = root / "run_manifest.json"
        found.extend([direct] if direct.exists() else sorted(root.glob("*/run_manifest.json")))
    return found


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument(
        "--runs", nargs="+", required=True, help="run directories, or parents holding one sub-directory per run"
    )
    ap.add_argument("--out", required=True, help="TSV summary output")
    args = ap.parse_args()

    rows = []
    for manifest_path in find_manifests(args.runs):
        m = read_json(manifest_path)
        cfg = m.get("config", {})
        row = {
            "run": manifest_path.parent.name,
            "scheme": cfg.get("scheme"),
            "initial": cfg.get("initial"),
            "N": cfg.get("N"),
            "dt": cfg.get("dt"),
            "status": m.get("status"),
            "steps": m.get("steps_completed"),
            "t_final": m.get("t_final"),
            "failed_step": m.get("failed_step"),
            "newton_iterations": m.get("newton", {}).get("iterations_total"),
            "integrate_s": m.get("timings_s", {}).get("integrate"),
        }
        row.update(summarize_invariants(manifest_path.parent))
        rows.append(row)

    if not rows:
        print(f"[WARN] no run_manifest.json found under {args.runs}")
        return

    df = pd.DataFrame(rows)
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(args.out, sep="\t", index=False)
    print(f"[DONE] Summary written to {args.out}")
    print(df.head(10).to_string(index=False))


if __name__ == "__main__":
    main()
