# -*- coding: utf-8 -*-
"""
benjaminbox.initial

Initial data for the experiment presets.

- bo-soliton: closed-form periodic Benjamin-Ono solitary wave (also the
  reference solution for error measurements)
- gaussian  : amplitude * exp(-(x - center)^2 / width)
- cosine    : amplitude * cos(2 pi mode x / l)
- zero      : identically zero
"""

from __future__ import annotations

import math
from typing import Callable, Dict

import numpy as np

from benjaminbox.errors import ConfigError
from benjaminbox.spectral import Field, Grid, check_field


def soliton_parameter(c: float, l: float) -> float:
    """A = 2 pi / (c l); the closed form needs 0 < A < 1."""
    if not (c > 0 and l > 0):
        raise ConfigError(f"soliton needs positive speed and length, got c={c}, l={l}")
    A = 2.0 * math.pi / (c * l)
    if A >= 1.0:
        raise ConfigError(
            f"soliton parameter A = 2*pi/(c*l) = {A:.6g} must be < 1 (need c*l > 2*pi)"
        )
    return A


def bo_soliton(x, t: float, c: float, l: float):
    A = soliton_parameter(c, l)
    theta = c * A * (np.asarray(x, dtype=np.float64) - c * t - 0.5 * l)
    return 2.0 * c * A**2 / (1.0 - math.sqrt(1.0 - A**2) * np.cos(theta))


def bo_soliton_peak(c: float, l: float) -> float:
    A = soliton_parameter(c, l)
    return 2.0 * c * A**2 / (1.0 - math.sqrt(1.0 - A**2))


def gaussian(x, amplitude: float, width: float, center: float):
    if not width > 0:
        raise ConfigError(f"gaussian width must be positive, got {width}")
    x = np.asarray(x, dtype=np.float64)
    return amplitude * np.exp(-((x - center) ** 2) / width)


def cosine(x, mode: int, l: float, amplitude: float = 1.0):
    x = np.asarray(x, dtype=np.float64)
    return amplitude * np.cos(2.0 * np.pi * mode * x / l)


# -----------------------------
# Registry
# -----------------------------


def _bo(grid: Grid, t0: float, opts: dict) -> Field:
    return bo_soliton(grid.x, t0, opts["soliton_speed"], grid.l)


def _gaussian(grid: Grid, t0: float, opts: dict) -> Field:
    center = opts.get("center")
    return gaussian(
        grid.x,
        opts["amplitude"],
        opts["width"],
        0.5 * grid.l if center is None else center,
    )


def _cosine(grid: Grid, t0: float, opts: dict) -> Field:
    return cosine(grid.x, opts["mode"], grid.l, opts["amplitude"])


def _zero(grid: Grid, t0: float, opts: dict) -> Field:
    return np.zeros(grid.N)


INITIAL_CONDITIONS: Dict[str, Callable[[Grid, float, dict], Field]] = {
    "bo-soliton": _bo,
    "gaussian": _gaussian,
    "cosine": _cosine,
    "zero": _zero,
}


def make_initial(name: str, grid: Grid, t0: float = 0.0, **opts) -> Field:
    if name not in INITIAL_CONDITIONS:
        raise ConfigError(
            f"unknown initial condition {name!r}; expected one of {sorted(INITIAL_CONDITIONS)}"
        )
    return check_field(INITIAL_CONDITIONS[name](grid, t0, opts), grid)
