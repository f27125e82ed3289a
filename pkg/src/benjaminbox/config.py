from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path
from typing import Any, Dict, Iterable, Mapping, Optional

import yaml

from benjaminbox.dynamics import Params
from benjaminbox.errors import ConfigError, ParityError
from benjaminbox.initial import INITIAL_CONDITIONS, soliton_parameter
from benjaminbox.integrators import SCHEMES
from benjaminbox.solvers import NewtonSettings
from benjaminbox.spectral import Grid, make_grid

DIFF_CHOICES = ("centered", "spectral")

# config keys that differ from the attribute name
_KEY_TO_ATTR = {"lambda": "lam"}
_ATTR_TO_KEY = {v: k for k, v in _KEY_TO_ATTR.items()}

REQUIRED_KEYS = (
    "alpha",
    "beta",
    "gamma",
    "lambda",
    "l",
    "N",
    "dt",
    "t_end",
    "scheme",
    "initial",
)


@dataclass(frozen=True)
class RunConfig:
    alpha: float
    beta: float
    gamma: float
    lam: float
    l: float
    N: int
    dt: float
    t_end: float
    scheme: str
    initial: str
    soliton_speed: float = 0.25
    amplitude: float = 1.0
    width: float = 16.0
    center: Optional[float] = None
    mode: int = 1
    snapshot_every: int = 400
    invariants_every: int = 40
    newton_tol: float = 1e-12
    newton_max_iter: int = 25
    jacobian_mode: str = "analytic"
    diff: str = "centered"
    output_dir: str = "runs/default"
    t0: float = 0.0

    # -----------------------------
    # Derived objects
    # -----------------------------
    @property
    def params(self) -> Params:
        return Params(alpha=self.alpha, beta=self.beta, gamma=self.gamma, lam=self.lam)

    @property
    def grid(self) -> Grid:
        return make_grid(self.l, self.N)

    @property
    def newton(self) -> NewtonSettings:
        return NewtonSettings(
            tol=self.newton_tol,
            max_iter=self.newton_max_iter,
            jacobian_mode=self.jacobian_mode,
        )

    @property
    def n_steps(self) -> int:
        return int(round((self.t_end - self.t0) / self.dt))

    def initial_options(self) -> Dict[str, Any]:
        return {
            "soliton_speed": self.soliton_speed,
            "amplitude": self.amplitude,
            "width": self.width,
            "center": self.center,
            "mode": self.mode,
        }

    def validate(self) -> "RunConfig":
        # constructing these runs their own checks
        grid, _, _ = self.grid, self.params, self.newton
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not self.t_end > self.t0:
            raise ConfigError(f"t_end must exceed t0, got t_end={self.t_end}, t0={self.t0}")
        if self.n_steps < 1:
            raise ConfigError(f"t_end - t0 is shorter than one step of dt={self.dt}")
        if self.scheme not in SCHEMES:
            raise ConfigError(f"unknown scheme {self.scheme!r}; expected one of {SCHEMES}")
        if self.initial not in INITIAL_CONDITIONS:
            raise ConfigError(
                f"unknown initial condition {self.initial!r}; "
                f"expected one of {sorted(INITIAL_CONDITIONS)}"
            )
        if self.diff not in DIFF_CHOICES:
            raise ConfigError(f"diff must be one of {DIFF_CHOICES}, got {self.diff!r}")
        if self.snapshot_every < 1 or self.invariants_every < 1:
            raise ConfigError("snapshot_every and invariants_every must be >= 1")
        if self.scheme == "preissmann" and grid.parity != "odd":
            raise ParityError(f"preissmann needs odd N, got N={self.N}")
        if self.scheme == "tvm":
            if grid.parity != "even":
                raise ParityError(f"tvm needs even N, got N={self.N}")
            if self.beta != 0.0 or self.gamma != 0.0:
                raise ConfigError("tvm is defined for beta = gamma = 0 only")
        if self.initial == "bo-soliton":
            soliton_parameter(self.soliton_speed, self.l)
        return self


# -----------------------------
# Mapping <-> RunConfig
# -----------------------------


def _coerce(key: str, value: Any, kind: type, optional: bool) -> Any:
    if value is None and optional:
        return None
    if kind is float:
        if isinstance(value, bool):
            raise ConfigError(f"{key}: expected a number, got {value!r}")
        if isinstance(value, (int, float)):
            return float(value)
        if isinstance(value, str):
            # YAML 1.1 reads exponent-only literals such as 1e-6 as strings
            try:
                return float(value)
            except ValueError:
                pass
        raise ConfigError(f"{key}: expected a number, got {value!r}")
    if kind is int:
        if isinstance(value, bool):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        if isinstance(value, int):
            return value
        if isinstance(value, float) and value.is_integer():
            return int(value)
        raise ConfigError(f"{key}: expected an integer, got {value!r}")
    if not isinstance(value, str):
        raise ConfigError(f"{key}: expected a string, got {value!r}")
    return value


_TYPES = {
    "alpha": (float, False),
    "beta": (float, False),
    "gamma": (float, False),
    "lam": (float, False),
    "l": (float, False),
    "N": (int, False),
    "dt": (float, False),
    "t_end": (float, False),
    "scheme": (str, False),
    "initial": (str, False),
    "soliton_speed": (float, False),
    "amplitude": (float, False),
    "width": (float, False),
    "center": (float, True),
    "mode": (int, False),
    "snapshot_every": (int, False),
    "invariants_every": (int, False),
    "newton_tol": (float, False),
    "newton_max_iter": (int, False),
    "jacobian_mode": (str, False),
    "diff": (str, False),
    "output_dir": (str, False),
    "t0": (float, False),
}

CONFIG_KEYS = tuple(_ATTR_TO_KEY.get(f.name, f.name) for f in fields(RunConfig))


def from_mapping(data: Mapping[str, Any]) -> RunConfig:
    if not isinstance(data, Mapping):
        raise ConfigError(f"config must be a key-value mapping, got {type(data).__name__}")
    unknown = sorted(set(data) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"unknown config keys: {unknown}")
    missing = [k for k in REQUIRED_KEYS if k not in data]
    if missing:
        raise ConfigError(f"missing required config keys: {missing}")

    kwargs = {}
    for key, value in data.items():
        attr = _KEY_TO_ATTR.get(key, key)
        kind, optional = _TYPES[attr]
        kwargs[attr] = _coerce(key, value, kind, optional)
    return RunConfig(**kwargs).validate()


def to_mapping(cfg: RunConfig) -> Dict[str, Any]:
    return {_ATTR_TO_KEY.get(k, k): v for k, v in asdict(cfg).items()}


def load_config(path: Path) -> RunConfig:
    """Read a flat YAML config, or the `config` member of a run manifest."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"config file not found: {path!s}")
    try:
        data = yaml.safe_load(path.read_text(encoding="utf-8"))
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if isinstance(data, dict) and isinstance(data.get("config"), dict):
        data = data["config"]
    return from_mapping(data or {})


def dump_config(cfg: RunConfig, path: Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(yaml.safe_dump(to_mapping(cfg), sort_keys=False), encoding="utf-8")


def apply_overrides(cfg: RunConfig, overrides: Iterable[str]) -> RunConfig:
    """Apply key=value strings; values are parsed as YAML scalars."""
    data = to_mapping(cfg)
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like key=value, got {item!r}")
        key, raw = item.split("=", 1)
        key = key.strip()
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config key in override: {key!r}")
        data[key] = yaml.safe_load(raw)
    return from_mapping(data)


# -----------------------------
# Presets
# -----------------------------

PRESETS: Dict[str, Dict[str, Any]] = {
    "bo-soliton": {
        "alpha": 1.0,
        "beta": 0.0,
        "gamma": 0.0,
        "lambda": 1.0,
        "l": 30.0,
        "N": 255,
        "dt": 2.5e-3,
        "t_end": 10.0,
        "scheme": "euler-box",
        "initial": "bo-soliton",
        "soliton_speed": 0.25,
        "snapshot_every": 400,
        "invariants_every": 40,
        "output_dir": "runs/bo-soliton",
    },
    "gaussian-split": {
        "alpha": -1.0,
        "beta": -1.0,
        "gamma": 1.0,
        "lambda": 1.0,
        "l": 600.0,
        "N": 512,
        "dt": 1e-2,
        "t_end": 20.0,
        "scheme": "euler-box",
        "initial": "gaussian",
        "amplitude": 2.0,
        "width": 16.0,
        "center": 300.0,
        "snapshot_every": 500,
        "invariants_every": 50,
        "output_dir": "runs/gaussian-split",
    },
    "wave-breaking": {
        "alpha": 0.01,
        "beta": 0.001,
        "gamma": 0.1,
        "lambda": 0.2,
        "l": 10.0,
        "N": 1024,
        "dt": 1e-6,
        "t_end": 5e-3,
        "scheme": "euler-box",
        "initial": "cosine",
        "mode": 1,
        "amplitude": 1.0,
        "snapshot_every": 1000,
        "invariants_every": 100,
        "output_dir": "runs/wave-breaking",
    },
}

FULL_SCALE: Dict[str, Dict[str, Any]] = {
    "bo-soliton": {"t_end": 100.0},
    "gaussian-split": {"N": 2048, "t_end": 100.0},
    "wave-breaking": {"N": 4096},
}


def preset(name: str, scheme: Optional[str] = None, full_scale: bool = False) -> RunConfig:
    """
    Resolve a named experiment. A scheme with a parity requirement moves N
    to the nearest admissible count above (255 -> 256 for tvm, 512 -> 513
    for preissmann).
    """
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; expected one of {sorted(PRESETS)}")
    data = dict(PRESETS[name])
    if full_scale:
        data.update(FULL_SCALE[name])
    if scheme is not None:
        data["scheme"] = scheme
    if data["scheme"] == "tvm" and data["N"] % 2 == 1:
        data["N"] += 1
    if data["scheme"] == "preissmann" and data["N"] % 2 == 0:
        data["N"] += 1
    return from_mapping(data)


def with_output_dir(cfg: RunConfig, out: Optional[Path]) -> RunConfig:
    return cfg if out is None else replace(cfg, output_dir=str(out))
