from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import pandas as pd

from benjaminbox.common import FLOAT_FORMAT
from benjaminbox.config import (
    PRESETS,
    apply_overrides,
    dump_config,
    load_config,
    preset,
    with_output_dir,
)
from benjaminbox.diagnostics import (
    ConvergenceReport,
    cubic_sine_series,
    cubic_sine_series_hilbert,
    hilbert_convergence,
    scheme_convergence,
)
from benjaminbox.errors import BenjaminBoxError, ErrorKind
from benjaminbox.integrators import SCHEMES
from benjaminbox.runner import RunResult, kernel_dump, run_experiment

EXIT_OK = 0
EXIT_RUN_FAILED = 1
EXIT_ERROR = 2

SCHEME_LEVELS = {
    "euler-box": (64, 128, 256),
    "heun": (64, 128, 256),
    "rk4": (64, 128, 256),
    "tvm": (64, 128, 256),
    "preissmann": (63, 127, 255),
}


def _error_line(kind: str, message: str, **extra) -> None:
    print(json.dumps({"error": kind, "message": message, **extra}), file=sys.stderr)


def _finish(result: RunResult) -> int:
    if result.ok:
        return EXIT_OK
    _error_line(ErrorKind.NEWTON_DIVERGENCE.value, result.message, step=result.failed_step)
    return EXIT_RUN_FAILED


def _print_report(label: str, report: ConvergenceReport) -> pd.DataFrame:
    df = pd.DataFrame(report.as_rows())
    df.insert(0, "case", label)
    order = "n/a (round-off)" if report.order is None else f"{report.order:.3f}"
    print(f"[convergence] {label}: order={order}")
    print(df.to_string(index=False))
    return df


# -----------------------------
# Subcommands
# -----------------------------


def cmd_run(args: argparse.Namespace) -> int:
    cfg = with_output_dir(load_config(Path(args.config)), args.out)
    result = run_experiment(cfg, progress=args.progress)
    return _finish(result)


def cmd_preset(args: argparse.Namespace) -> int:
    cfg = preset(args.name, scheme=args.scheme, full_scale=args.full_scale)
    cfg = with_output_dir(apply_overrides(cfg, args.override or []), args.out)
    if args.emit:
        dump_config(cfg, Path(args.emit))
        print(f"[preset] {args.name} written to {args.emit}")
        return EXIT_OK
    print(f"[preset] {args.name} scheme={cfg.scheme} N={cfg.N} t_end={cfg.t_end:g}")
    result = run_experiment(cfg, progress=args.progress)
    return _finish(result)


def cmd_convergence(args: argparse.Namespace) -> int:
    frames = []
    if args.target == "hilbert":
        l = 30.0
        smooth = lambda x: np.exp(np.sin(2.0 * np.pi * x / l))
        for parity, Ns in (("even", (64, 128, 256)), ("odd", (65, 129, 257))):
            frames.append(
                _print_report(
                    f"hilbert/exp-sin/{parity}",
                    hilbert_convergence(smooth, l, Ns),
                )
            )
            frames.append(
                _print_report(
                    f"hilbert/cubic-series/{parity}",
                    hilbert_convergence(
                        lambda x: cubic_sine_series(x, l),
                        l,
                        Ns,
                        reference=lambda x: cubic_sine_series_hilbert(x, l),
                    ),
                )
            )
    else:
        Ns = SCHEME_LEVELS[args.scheme]
        report = scheme_convergence(args.scheme, Ns, dt0=args.dt0, t_end=args.t_end)
        frames.append(_print_report(f"scheme/{args.scheme}", report))

    if args.out:
        out = Path(args.out)
        out.parent.mkdir(parents=True, exist_ok=True)
        pd.concat(frames).to_csv(out, index=False, float_format=FLOAT_FORMAT)
        print(f"[DONE] convergence table written to {out}")
    return EXIT_OK


def cmd_kernel_dump(args: argparse.Namespace) -> int:
    if args.out:
        kernel_dump(args.n, Path(args.out))
        print(f"[DONE] kernel written to {args.out}")
    else:
        kernel_dump(args.n).to_csv(
            sys.stdout, index=False, float_format=FLOAT_FORMAT, lineterminator="\n"
        )
    return EXIT_OK


# -----------------------------
# Parser
# -----------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="benjaminbox",
        description="Box-scheme solvers for the periodic Benjamin and Benjamin-Ono equations.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one experiment from a config file or run manifest")
    p.add_argument("--config", required=True, help="flat YAML config or run_manifest.json")
    p.add_argument("--out", default=None, help="output directory (overrides output_dir)")
    p.add_argument("--progress", action="store_true", help="show a progress bar")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("preset", help="run a named experiment")
    p.add_argument("name", choices=sorted(PRESETS))
    p.add_argument("--scheme", choices=SCHEMES, default=None)
    p.add_argument(
        "--override",
        action="append",
        metavar="KEY=VALUE",
        help="override a config key (repeatable), e.g. --override t_end=5",
    )
    p.add_argument("--full-scale", action="store_true", help="use the long-horizon fine-grid settings")
    p.add_argument("--emit", default=None, help="write the resolved config as YAML instead of running")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--progress", action="store_true")
    p.set_defaults(func=cmd_preset)

    p = sub.add_parser("convergence", help="measure convergence orders")
    p.add_argument("--target", choices=("hilbert", "scheme"), required=True)
    p.add_argument("--scheme", choices=SCHEMES, default="euler-box")
    p.add_argument("--dt0", type=float, default=1e-2, help="time step on the coarsest grid")
    p.add_argument("--t-end", dest="t_end", type=float, default=2.0)
    p.add_argument("--out", default=None, help="CSV table of per-level errors")
    p.set_defaults(func=cmd_convergence)

    p = sub.add_parser("kernel-dump", help="print Hilbert kernel and Fourier symbols")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_kernel_dump)
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BenjaminBoxError as exc:
        _error_line(exc.kind.value, str(exc))
    except FileNotFoundError as exc:
        _error_line(ErrorKind.IO.value, str(exc))
    return EXIT_ERROR


if __name__ == "__main__":
    raise SystemExit(main())
