"""Configuration parsing for the CLI: flat sections of ``key = value``.

The format is deliberately small: optional ``[section]`` headers, one
``key = value`` pair per line, ``#`` comments, double-quoted strings, bare
numbers and booleans, and comma-separated lists.  Unknown sections or keys
are hard errors so a typo cannot silently change a convergence study.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, fields
from typing import Any

from .grid import BoundaryRule, PiecewiseConstant, SquareWave
from .kernels import KernelAlignment, KernelProfile
from .models import ScenarioPreset, affine_velocity, get_preset, preset_names
from .schemes import SchemeSpec, parse_scheme_label
from .experiments import (
    EPSILON_SWEEP,
    NU_SWEEP,
    MeshRule,
    ReferenceSpec,
    SweepPlan,
    MODE_EPSILON_LIMIT_VISCOUS,
    MODE_VISCOSITY_LIMIT_LOCAL,
    MODE_VISCOSITY_LIMIT_NONLOCAL,
)


class ConfigError(ValueError):
    """Malformed or invalid configuration."""


_SECTION_RE = re.compile(r"^\[([A-Za-z][A-Za-z0-9_-]*)\]$")
_KEY_RE = re.compile(r"^([A-Za-z][A-Za-z0-9_]*)\s*=\s*(.*)$")


# --- low-level parsing ------------------------------------------------------


def _strip_comment(line: str) -> str:
    out = []
    in_quote = False
    for ch in line:
        if ch == '"':
            in_quote = not in_quote
        if ch == "#" and not in_quote:
            break
        out.append(ch)
    return "".join(out)


def _parse_scalar(token: str, line_no: int):
    token = token.strip()
    if token.startswith('"') and token.endswith('"') and len(token) >= 2:
        return token[1:-1]
    if token in ("true", "false"):
        return token == "true"
    try:
        return int(token)
    except ValueError:
        pass
    try:
        return float(token)
    except ValueError:
        raise ConfigError(
            f"line {line_no}: cannot parse value {token!r} "
            '(strings must be double-quoted)'
        ) from None


def _parse_value(raw: str, line_no: int):
    raw = raw.strip()
    if raw == "":
        raise ConfigError(f"line {line_no}: empty value")
    if "," in raw:
        return tuple(_parse_scalar(part, line_no) for part in raw.split(","))
    return _parse_scalar(raw, line_no)


def _tokenize(text: str) -> dict[str, dict[str, Any]]:
    sections: dict[str, dict[str, Any]] = {"": {}}
    current = ""
    for line_no, line in enumerate(text.splitlines(), start=1):
        stripped = _strip_comment(line).strip()
        if not stripped:
            continue
        m = _SECTION_RE.match(stripped)
        if m:
            current = m.group(1)
            sections.setdefault(current, {})
            continue
        m = _KEY_RE.match(stripped)
        if not m:
            raise ConfigError(f"line {line_no}: expected 'key = value' or '[section]'")
        key, raw = m.group(1), m.group(2)
        if key in sections[current]:
            raise ConfigError(f"line {line_no}: duplicate key {key!r}")
        sections[current][key] = _parse_value(raw, line_no)
    return sections


# --- config dataclasses -----------------------------------------------------


@dataclass(frozen=True)
class GridConfig:
    x_min: float
    x_max: float
    n_cells: int


@dataclass(frozen=True)
class KernelConfig:
    profile: str | None = None  # None inherits the preset's profile
    epsilon: float | None = None
    alignment: str = "auto"


@dataclass(frozen=True)
class VelocityConfig:
    kind: str = "affine"
    a: float = 1.0
    b: float = -1.0
    range_min: float = 0.0
    range_max: float = 1.0


@dataclass(frozen=True)
class SchemeConfig:
    locality: str = "nonlocal"
    kind: str = "godunov"
    nu: float = 0.0
    cfl: float = 0.5


@dataclass(frozen=True)
class TimeConfig:
    t_final: float | None = None
    record_count: int = 9


@dataclass(frozen=True)
class DatumConfig:
    kind: str = "step"  # "step" | "square-wave"
    breakpoints: tuple[float, ...] = (0.0,)
    values: tuple[float, ...] = (0.0, 1.0)
    period: float = 0.25
    low: float = 0.0
    high: float = 1.0


@dataclass(frozen=True)
class SweepConfig:
    variable: str = "epsilon"
    values: tuple[float, ...] = ()
    mesh_rule: str = "fixed-h"
    h: float | None = None
    kappa: float = 1000.0
    coefficient: float | None = None
    reference: str = "exact-riemann"
    refinement_factor: int = 8
    schemes: tuple[str, ...] = ("godunov-nonlocal",)
    mode: str | None = None
    fixed_epsilon: float | None = None
    t_eval: float | None = None
    half_line_x0: float = 0.0
    record_count: int = 65


@dataclass(frozen=True)
class RunConfig:
    preset: str | None = None
    out: str | None = None
    threads: int = 1
    timings: bool = False
    boundary: str | None = None
    grid: GridConfig | None = None
    kernel: KernelConfig = field(default_factory=KernelConfig)
    velocity: VelocityConfig | None = None
    scheme: SchemeConfig = field(default_factory=SchemeConfig)
    time: TimeConfig = field(default_factory=TimeConfig)
    datum: DatumConfig | None = None
    sweep: SweepConfig | None = None


_ROOT_KEYS = {
    "preset": str,
    "out": str,
    "threads": int,
    "timings": bool,
    "epsilon": float,  # shorthand for [kernel] epsilon
    "nu": float,  # shorthand for [scheme] nu
    "boundary": str,
}

_SECTION_TYPES = {
    "grid": GridConfig,
    "kernel": KernelConfig,
    "velocity": VelocityConfig,
    "scheme": SchemeConfig,
    "time": TimeConfig,
    "datum": DatumConfig,
    "sweep": SweepConfig,
}


def _coerce(value, want, section: str, key: str):
    where = f"[{section}] {key}" if section else key
    if want is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    if want is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if want is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false, got {value!r}")
        return value
    if want is str:
        if not isinstance(value, str):
            raise ConfigError(f"{where}: expected a quoted string, got {value!r}")
        return value
    raise AssertionError(want)


def _coerce_tuple(value, elem, section: str, key: str) -> tuple:
    if not isinstance(value, tuple):
        value = (value,)
    return tuple(_coerce(v, elem, section, key) for v in value)


def _build_section(cls, section: str, raw: dict[str, Any]):
    spec = {f.name: f for f in fields(cls)}
    kwargs = {}
    for key, value in raw.items():
        if key not in spec:
            raise ConfigError(f"[{section}] unknown key {key!r}")
        annotation = spec[key].type
        if "tuple" in str(annotation):
            elem = float if "float" in str(annotation) else str
            kwargs[key] = _coerce_tuple(value, elem, section, key)
        elif "int" in str(annotation):
            kwargs[key] = _coerce(value, int, section, key)
        elif "float" in str(annotation):
            kwargs[key] = _coerce(value, float, section, key)
        elif "bool" in str(annotation):
            kwargs[key] = _coerce(value, bool, section, key)
        else:
            kwargs[key] = _coerce(value, str, section, key)
    try:
        return cls(**kwargs)
    except TypeError as exc:
        raise ConfigError(f"[{section}]: {exc}") from None


def parse_config(text: str) -> RunConfig:
    """Parse and validate a configuration document."""
    sections = _tokenize(text)

    root = sections.pop("", {})
    for key in root:
        if key not in _ROOT_KEYS:
            raise ConfigError(f"unknown top-level key {key!r}")
    for name in sections:
        if name not in _SECTION_TYPES:
            raise ConfigError(f"unknown section [{name}]")

    built: dict[str, Any] = {}
    for name, cls in _SECTION_TYPES.items():
        if name in sections:
            built[name] = _build_section(cls, name, sections[name])

    kernel = built.get("kernel", KernelConfig())
    scheme = built.get("scheme", SchemeConfig())
    if "epsilon" in root:
        eps = _coerce(root["epsilon"], float, "", "epsilon")
        kernel = KernelConfig(kernel.profile, eps, kernel.alignment)
    if "nu" in root:
        scheme = SchemeConfig(
            scheme.locality,
            scheme.kind,
            _coerce(root["nu"], float, "", "nu"),
            scheme.cfl,
        )

    cfg = RunConfig(
        preset=_coerce(root["preset"], str, "", "preset") if "preset" in root else None,
        out=_coerce(root["out"], str, "", "out") if "out" in root else None,
        threads=_coerce(root.get("threads", 1), int, "", "threads"),
        timings=_coerce(root.get("timings", False), bool, "", "timings"),
        boundary=_coerce(root["boundary"], str, "", "boundary")
        if "boundary" in root
        else None,
        grid=built.get("grid"),
        kernel=kernel,
        velocity=built.get("velocity"),
        scheme=scheme,
        time=built.get("time", TimeConfig()),
        datum=built.get("datum"),
        sweep=built.get("sweep"),
    )
    _validate(cfg)
    return cfg


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _validate(cfg: RunConfig) -> None:
    if cfg.preset is not None:
        _require(
            cfg.preset in preset_names(),
            f"preset: unknown preset {cfg.preset!r}; available: "
            f"{', '.join(preset_names())}",
        )
    _require(cfg.threads >= 1, "threads: must be >= 1")
    if cfg.boundary is not None:
        _require(
            cfg.boundary in [b.value for b in BoundaryRule],
            f"boundary: unknown kind {cfg.boundary!r}",
        )
    if cfg.grid is not None:
        _require(math.isfinite(cfg.grid.x_min), "[grid] x_min: must be finite")
        _require(math.isfinite(cfg.grid.x_max), "[grid] x_max: must be finite")
        _require(cfg.grid.x_min < cfg.grid.x_max, "[grid] x_min: must be below x_max")
        _require(cfg.grid.n_cells >= 4, "[grid] n_cells: must be >= 4")
    if cfg.kernel.profile is not None:
        _require(
            cfg.kernel.profile in [p.value for p in KernelProfile],
            f"[kernel] profile: unknown profile {cfg.kernel.profile!r}",
        )
    if cfg.kernel.epsilon is not None:
        _require(cfg.kernel.epsilon > 0, "[kernel] epsilon: must be > 0")
    _require(
        cfg.kernel.alignment in ("auto", "cell-centered", "interface-centered"),
        f"[kernel] alignment: unknown alignment {cfg.kernel.alignment!r}",
    )
    if cfg.velocity is not None:
        _require(cfg.velocity.kind == "affine", "[velocity] kind: only 'affine' is configurable")
        _require(
            cfg.velocity.range_min <= cfg.velocity.range_max,
            "[velocity] range_min: must not exceed range_max",
        )
    _require(cfg.scheme.locality in ("nonlocal", "local"), "[scheme] locality: unknown")
    _require(
        cfg.scheme.kind in ("lxf", "godunov", "upwind"),
        f"[scheme] kind: unknown kind {cfg.scheme.kind!r}",
    )
    _require(cfg.scheme.nu >= 0, "[scheme] nu: must be >= 0")
    _require(0 < cfg.scheme.cfl <= 1, "[scheme] cfl: must lie in (0, 1]")
    if cfg.time.t_final is not None:
        _require(cfg.time.t_final > 0, "[time] t_final: must be > 0")
    _require(cfg.time.record_count >= 2, "[time] record_count: must be >= 2")
    if cfg.datum is not None:
        _require(
            cfg.datum.kind in ("step", "square-wave"),
            f"[datum] kind: unknown kind {cfg.datum.kind!r}",
        )
        if cfg.datum.kind == "step":
            _require(
                len(cfg.datum.values) == len(cfg.datum.breakpoints) + 1,
                "[datum] values: need exactly len(breakpoints)+1 values",
            )
            _require(
                all(b2 > b1 for b1, b2 in zip(cfg.datum.breakpoints, cfg.datum.breakpoints[1:])),
                "[datum] breakpoints: must be strictly increasing",
            )
        else:
            _require(cfg.datum.period > 0, "[datum] period: must be > 0")
    if cfg.sweep is not None:
        sw = cfg.sweep
        _require(sw.variable in (EPSILON_SWEEP, NU_SWEEP), "[sweep] variable: unknown")
        _require(len(sw.values) > 0, "[sweep] values: must not be empty")
        _require(
            all(b < a for a, b in zip(sw.values, sw.values[1:])),
            "[sweep] values: must be strictly decreasing",
        )
        if sw.variable == EPSILON_SWEEP:
            _require(min(sw.values) > 0, "[sweep] values: epsilon values must be > 0")
        else:
            _require(min(sw.values) >= 0, "[sweep] values: nu values must be >= 0")
            _require(
                sw.mode
                in (
                    MODE_EPSILON_LIMIT_VISCOUS,
                    MODE_VISCOSITY_LIMIT_LOCAL,
                    MODE_VISCOSITY_LIMIT_NONLOCAL,
                ),
                "[sweep] mode: nu sweeps need a valid mode",
            )
        _require(
            sw.mesh_rule in ("fixed-h", "coupled", "proportional"),
            f"[sweep] mesh_rule: unknown rule {sw.mesh_rule!r}",
        )
        if sw.h is not None:
            _require(sw.h > 0, "[sweep] h: must be > 0")
        if sw.mesh_rule == "coupled":
            _require(sw.kappa > 0, "[sweep] kappa: must be > 0")
        if sw.mesh_rule == "proportional":
            _require(
                sw.coefficient is not None and sw.coefficient > 0,
                "[sweep] coefficient: proportional rule needs coefficient > 0",
            )
        _require(
            sw.reference
            in (
                "exact-riemann",
                "fine-mesh-godunov-local",
                "viscous-local-same-h",
                "inviscid-nonlocal-same-h",
            ),
            f"[sweep] reference: unknown reference {sw.reference!r}",
        )
        _require(sw.refinement_factor >= 2, "[sweep] refinement_factor: must be >= 2")
        for label in sw.schemes:
            try:
                parse_scheme_label(label)
            except ValueError:
                raise ConfigError(f"[sweep] schemes: unknown scheme label {label!r}") from None
        if sw.t_eval is not None:
            _require(sw.t_eval > 0, "[sweep] t_eval: must be > 0")
        _require(sw.record_count >= 2, "[sweep] record_count: must be >= 2")


# --- serialisation ----------------------------------------------------------


def _format_scalar(value) -> str:
    if isinstance(value, str):
        return f'"{value}"'
    if isinstance(value, bool):
        return "true" if value else "false"
    return repr(value)


def _format_value(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(_format_scalar(v) for v in value)
    return _format_scalar(value)


def format_config(cfg: RunConfig) -> str:
    """Canonical text form; parse(format_config(cfg)) == cfg."""
    lines: list[str] = []
    if cfg.preset is not None:
        lines.append(f"preset = {_format_value(cfg.preset)}")
    if cfg.out is not None:
        lines.append(f"out = {_format_value(cfg.out)}")
    lines.append(f"threads = {cfg.threads}")
    lines.append(f"timings = {_format_value(cfg.timings)}")
    if cfg.boundary is not None:
        lines.append(f"boundary = {_format_value(cfg.boundary)}")

    def emit(name: str, obj) -> None:
        lines.append("")
        lines.append(f"[{name}]")
        for f in fields(obj):
            value = getattr(obj, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {_format_value(value)}")

    if cfg.grid is not None:
        emit("grid", cfg.grid)
    emit("kernel", cfg.kernel)
    if cfg.velocity is not None:
        emit("velocity", cfg.velocity)
    emit("scheme", cfg.scheme)
    emit("time", cfg.time)
    if cfg.datum is not None:
        emit("datum", cfg.datum)
    if cfg.sweep is not None:
        emit("sweep", cfg.sweep)
    return "\n".join(lines) + "\n"


# --- resolution into runnable objects ---------------------------------------


@dataclass(frozen=True)
class ResolvedRun:
    scenario: ScenarioPreset
    spec: SchemeSpec
    epsilon: float | None
    alignment: KernelAlignment | None
    t_final: float
    record_count: int


def _scenario_from_config(cfg: RunConfig) -> ScenarioPreset:
    if cfg.preset is not None:
        base = get_preset(cfg.preset)
    else:
        _require(cfg.grid is not None, "[grid]: required when no preset is given")
        _require(cfg.datum is not None, "[datum]: required when no preset is given")
        base = ScenarioPreset(
            name="custom",
            description="user-defined scenario",
            velocity=affine_velocity(1.0, -1.0),
            kernel_profile=KernelProfile.BOX_BACKWARD,
            datum=PiecewiseConstant((0.0,), (0.0, 1.0)),
            x_min=0.0,
            x_max=1.0,
            n_cells=4,
            t_final=1.0,
        )

    kwargs: dict[str, Any] = {}
    if cfg.grid is not None:
        kwargs.update(
            x_min=cfg.grid.x_min, x_max=cfg.grid.x_max, n_cells=cfg.grid.n_cells
        )
    if cfg.velocity is not None:
        kwargs["velocity"] = affine_velocity(
            cfg.velocity.a,
            cfg.velocity.b,
            (cfg.velocity.range_min, cfg.velocity.range_max),
        )
    if cfg.datum is not None:
        if cfg.datum.kind == "step":
            kwargs["datum"] = PiecewiseConstant(cfg.datum.breakpoints, cfg.datum.values)
        else:
            kwargs["datum"] = SquareWave(cfg.datum.period, cfg.datum.low, cfg.datum.high)
    if cfg.kernel.profile is not None:
        kwargs["kernel_profile"] = KernelProfile(cfg.kernel.profile)
    if cfg.boundary is not None:
        kwargs["boundary"] = BoundaryRule(cfg.boundary)
    if cfg.time.t_final is not None:
        kwargs["t_final"] = cfg.time.t_final

    from dataclasses import replace

    return replace(base, **kwargs)


def resolve_run(cfg: RunConfig) -> ResolvedRun:
    """Turn a config into a single-simulation setup."""
    scenario = _scenario_from_config(cfg)
    spec = parse_scheme_label(
        f"{cfg.scheme.kind}-{cfg.scheme.locality}", nu=cfg.scheme.nu, cfl=cfg.scheme.cfl
    )
    epsilon = cfg.kernel.epsilon
    alignment: KernelAlignment | None = None
    if spec.is_nonlocal:
        _require(
            epsilon is not None,
            "[kernel] epsilon: required for nonlocal schemes",
        )
        if cfg.kernel.alignment == "auto":
            from .experiments import scheme_alignment

            alignment = scheme_alignment(spec.kind)
        else:
            alignment = KernelAlignment(cfg.kernel.alignment)
    return ResolvedRun(
        scenario=scenario,
        spec=spec,
        epsilon=epsilon,
        alignment=alignment,
        t_final=scenario.t_final,
        record_count=cfg.time.record_count,
    )


def resolve_sweep(cfg: RunConfig) -> SweepPlan:
    """Turn a config into a sweep plan."""
    _require(cfg.sweep is not None, "[sweep]: section required for the sweep command")
    sw = cfg.sweep
    scenario = _scenario_from_config(cfg)

    if sw.mesh_rule == "fixed-h":
        h = sw.h if sw.h is not None else scenario_h(scenario)
        rule = MeshRule("fixed-h", h=h)
    elif sw.mesh_rule == "coupled":
        rule = MeshRule("coupled", kappa=sw.kappa)
    else:
        rule = MeshRule("proportional", coefficient=sw.coefficient)

    schemes = tuple(
        parse_scheme_label(label, nu=cfg.scheme.nu, cfl=cfg.scheme.cfl)
        for label in sw.schemes
    )
    t_eval = sw.t_eval if sw.t_eval is not None else scenario.t_final
    return SweepPlan(
        scenario=scenario,
        sweep_variable=sw.variable,
        values=sw.values,
        mesh_rule=rule,
        schemes=schemes,
        reference=ReferenceSpec(sw.reference, sw.refinement_factor),
        t_eval=t_eval,
        record_count=sw.record_count,
        mode=sw.mode,
        fixed_epsilon=sw.fixed_epsilon,
        half_line_x0=sw.half_line_x0,
    )


def scenario_h(scenario: ScenarioPreset) -> float:
    return (scenario.x_max - scenario.x_min) / scenario.n_cells
