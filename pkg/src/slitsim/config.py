"""Flat key=value experiment configs and their mapping onto run parameters.

Every knob of an experiment lives in one human-editable text file;
unknown keys are hard errors so a typo cannot silently change a run.
Angles are degrees in the config and converted to radians at the library
boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from pathlib import Path

from .dynamics import StepParams
from .ensemble import EmissionSpec, HistogramSpec
from .errors import ConfigurationError
from .field import FieldParams
from .scattering import Geometry


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment, fully specified. Defaults are the canonical setup:
    emitter 5 units left of the screen, detector 25 to the right, slit
    half-height 5, attracting screen (charge product -1), particle radius
    0.2, speed 12, angles within +/-45.5 degrees, detector cells of one
    particle diameter."""

    charge_product: float = -1.0
    slit_half_height: float = 5.0
    emitter_distance: float = 5.0
    screen_gap: float = 25.0
    particle_radius: float = 0.2
    y_bound: float = 50.0
    max_steps: int = 1_000_000
    tau: float = 0.05
    tau_list: tuple[float, ...] = (0.05, 0.01)
    mass: float = 1.0
    v0: float = 12.0
    alpha_min_deg: float = -45.5
    alpha_max_deg: float = 45.5
    mode: str = "random"
    n: int = 10_000
    seed: int = 1
    bin_width: float = 0.4
    y_min: float = -25.0
    y_max: float = 25.0
    workers: int = 1
    output_dir: str = "out"
    window: int = 5
    k_sigma: float = 5.0


def _parse_tau_list(text: str) -> tuple[float, ...]:
    vals = tuple(float(tok) for tok in text.split(",") if tok.strip())
    if not vals:
        raise ValueError("empty tau_list")
    return vals


_PARSERS = {
    "charge_product": float,
    "slit_half_height": float,
    "emitter_distance": float,
    "screen_gap": float,
    "particle_radius": float,
    "y_bound": float,
    "max_steps": int,
    "tau": float,
    "tau_list": _parse_tau_list,
    "mass": float,
    "v0": float,
    "alpha_min_deg": float,
    "alpha_max_deg": float,
    "mode": str,
    "n": int,
    "seed": int,
    "bin_width": float,
    "y_min": float,
    "y_max": float,
    "workers": int,
    "output_dir": str,
    "window": int,
    "k_sigma": float,
}

CONFIG_KEYS = tuple(sorted(_PARSERS))


def parse_config(path: str | Path) -> ExperimentConfig:
    """Load a config file; raises ConfigurationError on any bad content."""
    values: dict[str, object] = {}
    text = Path(path).read_text()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _PARSERS:
            raise ConfigurationError(
                f"{path}:{lineno}: unknown key {key!r} (valid keys: "
                f"{', '.join(CONFIG_KEYS)})")
        if key in values:
            raise ConfigurationError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            values[key] = _PARSERS[key](val)
        except ValueError as exc:
            raise ConfigurationError(f"{path}:{lineno}: bad value for {key}: {exc}")
    cfg = ExperimentConfig(**values)
    validate_config(cfg)
    return cfg


def validate_config(cfg: ExperimentConfig) -> None:
    """Re-run every component invariant; raises ConfigurationError."""
    try:
        build_field(cfg)
        build_geometry(cfg)
        build_step(cfg)
        build_emission(cfg)
        build_histogram_spec(cfg)
        for tau in cfg.tau_list:
            StepParams(tau=tau, mass=cfg.mass)
        if cfg.workers < 1:
            raise ValueError("workers must be >= 1")
        if cfg.window < 1 or cfg.window % 2 == 0:
            raise ValueError("window must be odd and >= 1")
        if not (cfg.k_sigma > 0):
            raise ValueError("k_sigma must be > 0")
    except ValueError as exc:
        raise ConfigurationError(str(exc)) from exc


def with_overrides(cfg: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Apply non-None CLI overrides on top of a config."""
    changes = {k: v for k, v in overrides.items() if v is not None}
    if not changes:
        return cfg
    cfg = replace(cfg, **changes)
    validate_config(cfg)
    return cfg


def build_field(cfg: ExperimentConfig) -> FieldParams:
    return FieldParams(charge_product=cfg.charge_product,
                       slit_half_height=cfg.slit_half_height)


def build_geometry(cfg: ExperimentConfig) -> Geometry:
    return Geometry(emitter_distance=cfg.emitter_distance,
                    screen_gap=cfg.screen_gap,
                    slit_half_height=cfg.slit_half_height,
                    particle_radius=cfg.particle_radius,
                    y_bound=cfg.y_bound,
                    max_steps=cfg.max_steps)


def build_step(cfg: ExperimentConfig, tau: float | None = None) -> StepParams:
    return StepParams(tau=cfg.tau if tau is None else tau, mass=cfg.mass)


def build_emission(cfg: ExperimentConfig, n: int | None = None,
                   mode: str | None = None) -> EmissionSpec:
    return EmissionSpec(v0=cfg.v0,
                        alpha_min=math.radians(cfg.alpha_min_deg),
                        alpha_max=math.radians(cfg.alpha_max_deg),
                        n=cfg.n if n is None else n,
                        mode=cfg.mode if mode is None else mode,
                        seed=cfg.seed)


def build_histogram_spec(cfg: ExperimentConfig) -> HistogramSpec:
    return HistogramSpec(bin_width=cfg.bin_width, y_min=cfg.y_min, y_max=cfg.y_max)


def config_echo(cfg: ExperimentConfig) -> str:
    """Canonical textual form of a config, one key per line."""
    lines = []
    for key in CONFIG_KEYS:
        val = getattr(cfg, key)
        if key == "tau_list":
            val = ",".join(f"{t:g}" for t in val)
        lines.append(f"{key} = {val}")
    return "\n".join(lines)
