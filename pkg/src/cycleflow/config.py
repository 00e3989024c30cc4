"""Flat key = value run configuration files (INI sections per module).

parse errors always name the offending section and field so that CLI users
get actionable messages; see configs/paper_runA.cfg for the reference
layout.
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .dynamics import Params
from .particles import ConfigError, InitSpec, SimConfig


@dataclass(frozen=True)
class ClassifySettings:
    window: float = 5.0
    osc_threshold: float = 0.5
    conv_threshold: float = 0.1
    drift_threshold: float = 0.05


def bundled_config_path(name: str) -> Path:
    """Resolve the path of a config shipped with the package (with or
    without the .cfg suffix)."""
    fname = name if name.endswith(".cfg") else name + ".cfg"
    ref = resources.files("cycleflow").joinpath("configs", fname)
    with resources.as_file(ref) as p:
        if not p.exists():
            raise ConfigError(f"no bundled config named {name!r}")
        return Path(p)


def resolve_config_path(spec: str) -> Path:
    """A config argument is either a filesystem path or a bundled name."""
    p = Path(spec)
    if p.exists():
        return p
    try:
        return bundled_config_path(spec)
    except ConfigError:
        raise ConfigError(f"config file not found: {spec}") from None


def _get(cp: configparser.ConfigParser, section: str, field: str, cast, required=True, default=None):
    if not cp.has_section(section):
        if required:
            raise ConfigError(f"missing section [{section}]")
        return default
    if not cp.has_option(section, field):
        if required:
            raise ConfigError(f"missing field '{field}' in [{section}]")
        return default
    raw = cp.get(section, field)
    try:
        return cast(raw)
    except ValueError:
        raise ConfigError(
            f"field '{field}' in [{section}] must be {cast.__name__}, got {raw!r}"
        ) from None


def _float_list(raw: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in raw.replace(",", " ").split())


def parse_sim_config(path: Path) -> tuple[SimConfig, ClassifySettings]:
    cp = configparser.ConfigParser()
    with open(path) as fh:
        cp.read_file(fh)

    params = Params(
        alpha=_get(cp, "params", "alpha", float),
        eps=_get(cp, "params", "eps", float),
    )
    init = InitSpec(
        kind=_get(cp, "init", "kind", str),
        mean_x=_get(cp, "init", "mean_x", float),
        mean_y=_get(cp, "init", "mean_y", float),
        var=_get(cp, "init", "var", float, required=False, default=0.0),
    )
    config = SimConfig(
        params=params,
        n=_get(cp, "sim", "n", int),
        dt=_get(cp, "sim", "dt", float),
        t_end=_get(cp, "sim", "t_end", float),
        seed=_get(cp, "sim", "seed", int),
        init=init,
        snapshot_times=_get(cp, "snapshots", "times", _float_list, required=False, default=()),
        k_max=_get(cp, "sim", "k_max", int, required=False, default=4),
        record_stride=_get(cp, "sim", "record_stride", int, required=False, default=1),
    )
    classify = ClassifySettings(
        window=_get(cp, "classify", "window", float, required=False, default=5.0),
        osc_threshold=_get(cp, "classify", "osc_threshold", float, required=False, default=0.5),
        conv_threshold=_get(cp, "classify", "conv_threshold", float, required=False, default=0.1),
        drift_threshold=_get(cp, "classify", "drift_threshold", float, required=False, default=0.05),
    )
    return config, classify
