"""nlclab: a 1-D finite-volume laboratory for nonlocal conservation laws
u_t + (u V(u * eta_eps))_x = nu u_xx, their viscous regularisations, and
their local (eps -> 0) and inviscid (nu -> 0) limits."""

from .grid import (
    BoundaryRule,
    CellField,
    Grid1D,
    InitialDatum,
    PiecewiseConstant,
    SmoothProfile,
    SquareWave,
    build_grid,
    init_cell_averages,
)
from .kernels import (
    DiscreteKernel,
    KernelAlignment,
    KernelProfile,
    convolve,
    kernel_weights,
)
from .models import (
    ScenarioPreset,
    VelocityModel,
    affine_velocity,
    custom_velocity,
    eval_flux,
    get_preset,
    preset_names,
    traffic_velocity,
    wave_speed_bound,
)
from .schemes import (
    Locality,
    SchemeInstabilityError,
    SchemeKind,
    SchemeSpec,
    local_flux,
    nonlocal_flux,
    parse_scheme_label,
    step_explicit,
)
from .timeloop import RunRecord, evolve, stable_dt, uniform_record_times
from .diagnostics import (
    FieldStats,
    distance,
    field_stats,
    half_line_mass,
    total_mass,
    total_variation,
    weighted_mass,
)
from .experiments import (
    MeshRule,
    ReferenceSpec,
    SweepPlan,
    SweepResult,
    SweepRow,
    exact_riemann_lwr,
    restrict_field,
    run_epsilon_sweep,
    run_nu_sweep,
    scheme_alignment,
)
from .config import ConfigError, RunConfig, format_config, parse_config, resolve_run, resolve_sweep
from .csvio import write_results_csv, write_snapshots_csv

__version__ = "0.1.0"

__all__ = [
    "BoundaryRule",
    "CellField",
    "ConfigError",
    "DiscreteKernel",
    "FieldStats",
    "Grid1D",
    "InitialDatum",
    "KernelAlignment",
    "KernelProfile",
    "Locality",
    "MeshRule",
    "PiecewiseConstant",
    "ReferenceSpec",
    "RunConfig",
    "RunRecord",
    "ScenarioPreset",
    "SchemeInstabilityError",
    "SchemeKind",
    "SchemeSpec",
    "SmoothProfile",
    "SquareWave",
    "SweepPlan",
    "SweepResult",
    "SweepRow",
    "VelocityModel",
    "affine_velocity",
    "build_grid",
    "convolve",
    "custom_velocity",
    "distance",
    "eval_flux",
    "evolve",
    "exact_riemann_lwr",
    "field_stats",
    "format_config",
    "get_preset",
    "half_line_mass",
    "init_cell_averages",
    "kernel_weights",
    "local_flux",
    "nonlocal_flux",
    "parse_config",
    "parse_scheme_label",
    "preset_names",
    "resolve_run",
    "resolve_sweep",
    "restrict_field",
    "run_epsilon_sweep",
    "run_nu_sweep",
    "scheme_alignment",
    "stable_dt",
    "step_explicit",
    "total_mass",
    "total_variation",
    "traffic_velocity",
    "uniform_record_times",
    "wave_speed_bound",
    "weighted_mass",
    "write_results_csv",
    "write_snapshots_csv",
]
