"""Scenario configuration files.

Grammar (one statement per line, ``#`` starts a comment)::

    preset = main                 # keys before any section header
    [params]
    Omega = 0.1
    gamma_dp = 0.02               # sets gamma_dp1 and gamma_dp2
    [time]
    t_min = 1
    t_max = 1e10
    points_per_decade = 20
    [run]
    propagator = spectral         # or rk
    out = results/main
    initial_state = ee            # ee, eg, ge, gg, s or as
    [sweep]
    parameter = detuning
    min = 0
    max = 0.05
    steps = 26

Section names are optional in ``--set`` overrides (``--set Omega=0.2`` or
``--set params.Omega=0.2``) because every key is unique across sections.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .system import SystemParams

PRESETS = ("main", "one_reservoir", "dicke", "local", "detuning_sweep", "custom")
INITIAL_STATES = ("ee", "eg", "ge", "gg", "s", "as")
OUT_ENV = "SUBRADIANT_OUT"


def _positive_int(text):
    value = int(text)
    if value <= 0:
        raise ValueError("must be a positive integer")
    return value


def _choice(*options):
    def conv(text):
        if text not in options:
            raise ValueError(f"must be one of {', '.join(options)}")
        return text
    return conv


# (section, key) -> converter
KEYS = {
    ("", "preset"): _choice(*PRESETS),
    ("params", "omega1"): float,
    ("params", "omega2"): float,
    ("params", "Omega"): float,
    ("params", "gamma_dp1"): float,
    ("params", "gamma_dp2"): float,
    ("params", "gamma_dp"): float,
    ("params", "gamma_rad"): float,
    ("params", "T_dp"): float,
    ("params", "T_rad"): float,
    ("params", "T"): float,
    ("time", "t_min"): float,
    ("time", "t_max"): float,
    ("time", "points_per_decade"): _positive_int,
    ("run", "propagator"): _choice("spectral", "rk"),
    ("run", "out"): str,
    ("run", "initial_state"): _choice(*INITIAL_STATES),
    ("run", "rel_tol"): float,
    ("run", "workers"): _positive_int,
    ("sweep", "parameter"): str,
    ("sweep", "min"): float,
    ("sweep", "max"): float,
    ("sweep", "steps"): _positive_int,
}
_SECTION_OF = {key: section for section, key in KEYS}


@dataclass(frozen=True)
class SweepSpec:
    parameter: str = "detuning"
    min: float = 0.0
    max: float = 0.05
    steps: int = 26

    def values(self):
        return np.linspace(self.min, self.max, self.steps)


@dataclass(frozen=True)
class ScenarioConfig:
    preset: str = "main"
    params: SystemParams = field(default_factory=SystemParams)
    t_min: float = 1.0
    t_max: float = 1e10
    points_per_decade: int = 20
    propagator: str = "spectral"
    out_dir: Path = Path("subradiant_out")
    initial_state: str = "ee"
    rel_tol: float = 1e-10
    workers: int = 1
    sweep: SweepSpec | None = None

    @property
    def channel_kind(self):
        return "local" if self.preset == "local" else "global"

    def sweep_points(self):
        """SystemParams for each sweep value (detuning moves omega1, omega2 fixed)."""
        if self.sweep is None:
            raise ConfigError("config has no [sweep] section")
        out = []
        for value in self.sweep.values():
            if self.sweep.parameter == "detuning":
                out.append(self.params.replace(omega1=self.params.omega2 + float(value)))
            else:
                out.append(self.params.replace(**{self.sweep.parameter: float(value)}))
        return out


def _statements(text, origin_lines=None):
    """Yield (line_no, section, key, raw_value) from config text."""
    section = ""
    for n, raw in enumerate(text.splitlines(), start=1):
        line_no = origin_lines[n - 1] if origin_lines else n
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        m = re.fullmatch(r"\[\s*([A-Za-z_]+)\s*\]", line)
        if m:
            section = m.group(1)
            if section not in {s for s, _ in KEYS}:
                raise ConfigError(f"unknown section [{section}]", line_no)
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line_no)
        key, value = (part.strip() for part in line.split("=", 1))
        if not key or not value:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", line_no)
        yield line_no, section, key, value


def _parse_override(item):
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not key=value")
    key, value = (part.strip() for part in item.split("=", 1))
    section, _, bare = key.rpartition(".")
    if not section:
        section = _SECTION_OF.get(bare)
        if section is None:
            raise ConfigError(f"unknown key {bare!r} in override")
    return section, bare, value


def parse_config(text, preset=None, overrides=(), out_dir=None):
    """Parse and validate a scenario config.

    ``preset`` (if given) replaces the file's preset; ``overrides`` are
    ``key=value`` strings applied after the file. Errors carry the offending
    line number; overrides are reported as ``--set`` items.
    """
    values = {}
    where = {}
    for line_no, section, key, raw in _statements(text):
        if (section, key) not in KEYS:
            raise ConfigError(f"unknown key {key!r} in section [{section or 'top'}]", line_no)
        try:
            values[(section, key)] = KEYS[(section, key)](raw)
        except ValueError as exc:
            raise ConfigError(f"bad value {raw!r} for {key}: {exc}", line_no) from None
        where[(section, key)] = line_no
    for item in overrides:
        section, key, raw = _parse_override(item)
        if (section, key) not in KEYS:
            raise ConfigError(f"unknown key {section}.{key} in override")
        try:
            values[(section, key)] = KEYS[(section, key)](raw)
        except ValueError as exc:
            raise ConfigError(f"bad value {raw!r} for {key} in override: {exc}") from None
        where[(section, key)] = None
    if preset is not None:
        values[("", "preset")] = _choice(*PRESETS)(preset)
        where[("", "preset")] = None
    return _build(values, where, out_dir)


def load_config(path, **kwargs):
    return parse_config(Path(path).read_text(), **kwargs)


def default_out_dir():
    return Path(os.environ.get(OUT_ENV, "subradiant_out"))


def _build(values, where, out_dir):
    preset = values.get(("", "preset"), "main")
    p = {k: v for (s, k), v in values.items() if s == "params"}

    def line(key, section="params"):
        return where.get((section, key))

    if "gamma_dp" in p:
        g = p.pop("gamma_dp")
        p.setdefault("gamma_dp1", g)
        p.setdefault("gamma_dp2", g)
    if "T" in p:
        temp = p.pop("T")
        p.setdefault("T_dp", temp)
        p.setdefault("T_rad", temp)
    forced = {"dicke": ("gamma_dp1", "gamma_dp2"), "one_reservoir": ("gamma_dp1",)}
    for key in forced.get(preset, ()):
        if p.get(key, 0.0) != 0.0:
            raise ConfigError(f"preset {preset} requires {key} = 0, got {p[key]}",
                              line(key) or line("gamma_dp"))
        p[key] = 0.0
    try:
        params = SystemParams(**p)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None

    kw = {"preset": preset, "params": params}
    if preset == "detuning_sweep":
        kw.update(t_min=1e2, t_max=1e8, points_per_decade=10)
    for key in ("t_min", "t_max", "points_per_decade"):
        if ("time", key) in values:
            kw[key] = values[("time", key)]
    if not 0 < kw.get("t_min", 1.0) < kw.get("t_max", 1e10):
        raise ConfigError("need 0 < t_min < t_max", line("t_min", "time") or line("t_max", "time"))
    run_keys = {"propagator": "propagator", "initial_state": "initial_state",
                "rel_tol": "rel_tol", "workers": "workers"}
    for key, attr in run_keys.items():
        if ("run", key) in values:
            kw[attr] = values[("run", key)]
    if not 1e-12 <= kw.get("rel_tol", 1e-10) <= 1e-4:
        raise ConfigError("rel_tol must lie in [1e-12, 1e-4]", line("rel_tol", "run"))
    if ("run", "out") in values:
        kw["out_dir"] = Path(values[("run", "out")])
    else:
        kw["out_dir"] = Path(out_dir) if out_dir is not None else default_out_dir()
    if out_dir is not None:
        kw["out_dir"] = Path(out_dir)

    sweep_given = any(s == "sweep" for s, _ in values)
    if sweep_given or preset == "detuning_sweep":
        spec = SweepSpec(max=0.5 * params.Omega)
        changes = {k: v for (s, k), v in values.items() if s == "sweep"}
        spec = replace(spec, **changes)
        valid = set(SystemParams.__dataclass_fields__) | {"detuning"}
        if spec.parameter not in valid:
            raise ConfigError(f"cannot sweep unknown parameter {spec.parameter!r}",
                              line("parameter", "sweep"))
        if spec.max < spec.min:
            raise ConfigError("sweep max must be >= min", line("max", "sweep"))
        kw["sweep"] = spec
    return ScenarioConfig(**kw)
