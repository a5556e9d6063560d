"""Flat, typed key-value run configuration with sections (INI syntax).

The schema is fixed: unknown sections or keys are config errors, every value
is type-checked, and a config round-trips losslessly through to_text().
"""
from __future__ import annotations

import configparser
import io
import os
from dataclasses import dataclass, field, fields

from .errors import ConfigError


@dataclass
class ModelSection:
    N: int = 3
    R: float = 1.0
    alpha: float = 0.15
    k_f: float = 1.0


@dataclass
class GridSection:
    n_cells: int = 256
    #: "uniform" or "power:<exponent>" (>= 1 refines toward the origin)
    grading: str = "uniform"


@dataclass
class InitialSection:
    #: "bump", "constant", or "file"
    generator: str = "bump"
    mu: float = 1.0
    concentration: float = 0.9
    core_radius: float = 0.2
    profile_file: str = ""


@dataclass
class ControllerSection:
    t_end: float = 1.0
    cfl_diffusion: float = 0.4
    cfl_advection: float = 0.5
    dt_min: float = 1e-14
    u_blow_factor: float = 1e6


@dataclass
class ProbesSection:
    #: comma-separated exponents for the recorded L^p norms and Psi_p
    p_list: str = "2"


@dataclass
class BoundSection:
    p: float = 2.0
    #: "auto" (0.05 (2p/N - 1)) or a number
    epsilon: str = "auto"
    #: "estimate" (profile-family maximum x safety) or a number
    c_gn: str = "estimate"
    gn_safety: float = 2.0
    gn_family_size: int = 24
    R0: float = 0.9


@dataclass
class OutputSection:
    directory: str = "out"
    seed: int = 0
    allow_inadmissible: bool = False
    n_time_samples: int = 400
    sample_decades: float = 0.01


@dataclass
class RunConfig:
    model: ModelSection = field(default_factory=ModelSection)
    grid: GridSection = field(default_factory=GridSection)
    initial: InitialSection = field(default_factory=InitialSection)
    controller: ControllerSection = field(default_factory=ControllerSection)
    probes: ProbesSection = field(default_factory=ProbesSection)
    bound: BoundSection = field(default_factory=BoundSection)
    output: OutputSection = field(default_factory=OutputSection)

    def probe_list(self) -> tuple[float, ...]:
        try:
            ps = tuple(sorted({float(tok) for tok in self.probes.p_list.split(",") if tok.strip()}))
        except ValueError as e:
            raise ConfigError(f"probes.p_list is not a comma-separated number list: {e}")
        if not ps:
            raise ConfigError("probes.p_list must name at least one exponent")
        return ps

    def bound_epsilon(self) -> float | None:
        if self.bound.epsilon.strip() == "auto":
            return None
        try:
            return float(self.bound.epsilon)
        except ValueError:
            raise ConfigError(f"bound.epsilon must be 'auto' or a number, got {self.bound.epsilon!r}")

    def bound_c_gn(self) -> float | None:
        if self.bound.c_gn.strip() == "estimate":
            return None
        try:
            return float(self.bound.c_gn)
        except ValueError:
            raise ConfigError(f"bound.c_gn must be 'estimate' or a number, got {self.bound.c_gn!r}")

    def to_text(self) -> str:
        cp = configparser.ConfigParser()
        cp.optionxform = str
        for f in fields(self):
            section = getattr(self, f.name)
            cp[f.name] = {sf.name: _format_value(getattr(section, sf.name))
                          for sf in fields(section)}
        buf = io.StringIO()
        cp.write(buf)
        return buf.getvalue()


def _format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    return repr(v) if isinstance(v, float) else str(v)


def _parse_value(raw: str, target_type: type, where: str):
    raw = raw.strip()
    try:
        if target_type is bool:
            low = raw.lower()
            if low in ("true", "1", "yes", "on"):
                return True
            if low in ("false", "0", "no", "off"):
                return False
            raise ValueError(f"not a boolean: {raw!r}")
        if target_type is int:
            return int(raw)
        if target_type is float:
            return float(raw)
        return raw
    except ValueError as e:
        raise ConfigError(f"{where}: {e}")


def from_text(text: str) -> RunConfig:
    cp = configparser.ConfigParser()
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as e:
        raise ConfigError(f"config parse error: {e}")
    cfg = RunConfig()
    known = {f.name: getattr(cfg, f.name) for f in fields(cfg)}
    for section_name in cp.sections():
        if section_name not in known:
            raise ConfigError(f"unknown config section [{section_name}]")
        section = known[section_name]
        section_fields = {sf.name: sf for sf in fields(section)}
        for key, raw in cp[section_name].items():
            if key not in section_fields:
                raise ConfigError(f"unknown key {key!r} in section [{section_name}]")
            target_type = section_fields[key].type
            if isinstance(target_type, str):
                target_type = {"int": int, "float": float, "str": str, "bool": bool}[target_type]
            setattr(section, key, _parse_value(raw, target_type, f"[{section_name}] {key}"))
    _validate(cfg)
    return cfg


def load_config(path: str) -> RunConfig:
    if not os.path.exists(path):
        raise ConfigError(f"config file not found: {path}")
    with open(path) as fh:
        cfg = from_text(fh.read())
    if cfg.initial.generator == "file":
        profile = cfg.initial.profile_file
        if not profile:
            raise ConfigError("initial.generator = file requires initial.profile_file")
        if not os.path.isabs(profile):
            profile = os.path.join(os.path.dirname(os.path.abspath(path)), profile)
            cfg.initial.profile_file = profile
        if not os.path.exists(profile):
            raise ConfigError(f"initial profile file not found: {profile}")
    return cfg


def _validate(cfg: RunConfig):
    m, g, i, c, b = cfg.model, cfg.grid, cfg.initial, cfg.controller, cfg.bound
    if m.N < 3:
        raise ConfigError("model.N must be >= 3")
    if m.R <= 0 or m.k_f <= 0:
        raise ConfigError("model.R and model.k_f must be positive")
    if g.n_cells < 8:
        raise ConfigError("grid.n_cells must be >= 8")
    if g.grading != "uniform":
        if not g.grading.startswith("power:"):
            raise ConfigError(f"grid.grading must be 'uniform' or 'power:<q>', got {g.grading!r}")
        try:
            q = float(g.grading.split(":", 1)[1])
        except ValueError:
            raise ConfigError(f"bad grading exponent in {g.grading!r}")
        if q < 1:
            raise ConfigError("grading exponent must be >= 1")
    if i.generator not in ("bump", "constant", "file"):
        raise ConfigError(f"initial.generator must be bump|constant|file, got {i.generator!r}")
    if i.mu <= 0:
        raise ConfigError("initial.mu must be positive")
    if i.generator == "bump":
        if not 0 < i.concentration <= 1:
            raise ConfigError("initial.concentration must lie in (0, 1]")
        if not 0 < i.core_radius < m.R:
            raise ConfigError("initial.core_radius must lie in (0, R)")
    if c.t_end <= 0 or c.dt_min <= 0 or c.u_blow_factor <= 0:
        raise ConfigError("controller.t_end, dt_min, u_blow_factor must be positive")
    if not (0 < c.cfl_diffusion <= 1 and 0 < c.cfl_advection <= 1):
        raise ConfigError("controller CFL factors must lie in (0, 1]")
    if not 0 < b.R0 < m.R:
        raise ConfigError("bound.R0 must lie in (0, R)")
    if b.gn_family_size < 8:
        raise ConfigError("bound.gn_family_size must be >= 8")
    if b.gn_safety <= 0:
        raise ConfigError("bound.gn_safety must be positive")
    cfg.probe_list()
    cfg.bound_epsilon()
    cfg.bound_c_gn()


def apply_overrides(cfg: RunConfig, overrides: list[str]) -> RunConfig:
    """Apply repeatable --override section.key=value entries in order."""
    for item in overrides:
        if "=" not in item or "." not in item.split("=", 1)[0]:
            raise ConfigError(f"override must look like section.key=value, got {item!r}")
        dotted, raw = item.split("=", 1)
        section_name, key = dotted.split(".", 1)
        try:
            section = getattr(cfg, section_name)
        except AttributeError:
            raise ConfigError(f"unknown config section {section_name!r} in override")
        matching = [sf for sf in fields(section) if sf.name == key]
        if not matching:
            raise ConfigError(f"unknown key {key!r} in section [{section_name}]")
        target_type = matching[0].type
        if isinstance(target_type, str):
            target_type = {"int": int, "float": float, "str": str, "bool": bool}[target_type]
        setattr(section, key, _parse_value(raw, target_type, f"override {item!r}"))
    _validate(cfg)
    return cfg
