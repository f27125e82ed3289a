from __future__ import annotations

import hashlib
import json
from pathlib import Path
from typing import Iterable

import numpy as np
import pandas as pd

# 17 significant digits round-trip every float64 exactly.
FLOAT_FORMAT = "%.17g"


def write_json(path: Path, obj: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, ensure_ascii=False, indent=2), encoding="utf-8")


def read_json(path: Path) -> dict:
    return json.loads(path.read_text(encoding="utf-8"))


def sha256_file(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as f:
        for chunk in iter(lambda: f.read(1024 * 1024), b""):
            h.update(chunk)
    return h.hexdigest()


def file_hashes(paths: Iterable[Path]) -> dict[str, dict]:
    out: dict[str, dict] = {}
    for p in sorted(paths):
        if p.exists():
            out[p.name] = {"sha256": sha256_file(p), "bytes": p.stat().st_size}
    return out


def write_table(path: Path, columns: dict[str, np.ndarray]) -> int:
    """Write equal-length columns as CSV with full float precision."""
    path.parent.mkdir(parents=True, exist_ok=True)
    df = pd.DataFrame(columns)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
    return len(df)


def read_table(path: Path) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")
