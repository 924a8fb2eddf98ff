"""Sweep protocols: epsilon sweeps against entropy references, viscosity
sweeps along the three limit directions, and the exact LWR Riemann solution.

The nu-sweep modes correspond to the three convergence directions of the
regularised problem:

* ``epsilon-limit-viscous``      epsilon -> 0 at fixed nu > 0, measured
                                 against the viscous *local* run at the same
                                 mesh and nu (space-time L2);
* ``viscosity-limit-local``      nu -> 0 for the local equation, measured
                                 against the entropy solution;
* ``viscosity-limit-nonlocal``   nu -> 0 at fixed epsilon, measured against
                                 the inviscid nonlocal run at the same
                                 epsilon and mesh.
"""

from __future__ import annotations

import math
import time
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .diagnostics import distance, half_line_mass, total_variation
from .grid import (
    BoundaryRule,
    CellField,
    Grid1D,
    InitialDatum,
    PiecewiseConstant,
    build_grid,
    init_cell_averages,
)
from .kernels import DiscreteKernel, KernelAlignment, KernelProfile, kernel_weights
from .models import ScenarioPreset, VelocityModel, wave_speed_bound
from .schemes import (
    Locality,
    SchemeInstabilityError,
    SchemeKind,
    SchemeSpec,
)
from .timeloop import RunRecord, evolve, uniform_record_times

EPSILON_SWEEP = "epsilon"
NU_SWEEP = "nu"

MODE_EPSILON_LIMIT_VISCOUS = "epsilon-limit-viscous"
MODE_VISCOSITY_LIMIT_LOCAL = "viscosity-limit-local"
MODE_VISCOSITY_LIMIT_NONLOCAL = "viscosity-limit-nonlocal"

_NU_MODES = (
    MODE_EPSILON_LIMIT_VISCOUS,
    MODE_VISCOSITY_LIMIT_LOCAL,
    MODE_VISCOSITY_LIMIT_NONLOCAL,
)


def exact_riemann_lwr(u_left: float, u_right: float, t: float, x):
    """Entropy solution of the local traffic equation for step data.

    Flux u(1-u), states in [0, 1].  u_left < u_right gives a shock moving at
    1 - u_left - u_right; u_left > u_right opens the rarefaction fan
    u = (1 - x/t)/2 between the characteristic speeds of the two states.
    """
    if not (0.0 <= u_left <= 1.0 and 0.0 <= u_right <= 1.0):
        raise ValueError("Riemann states must lie in [0, 1]")
    if not (math.isfinite(t) and t > 0.0):
        raise ValueError("time must be positive")
    x = np.asarray(x, dtype=float)
    if u_left == u_right:
        out = np.full_like(x, u_left)
        return out if out.ndim else float(out)
    if u_left < u_right:
        s = 1.0 - u_left - u_right
        out = np.where(x < s * t, u_left, u_right)
        return out if out.ndim else float(out)
    xi = x / t
    fan = (1.0 - xi) / 2.0
    out = np.where(
        xi <= 1.0 - 2.0 * u_left,
        u_left,
        np.where(xi >= 1.0 - 2.0 * u_right, u_right, fan),
    )
    return out if out.ndim else float(out)


# --- plans and results ----------------------------------------------------


@dataclass(frozen=True)
class MeshRule:
    """How the mesh couples to the swept parameter.

    fixed-h:      every point uses the given h;
    coupled:      epsilon = kappa * h^2, i.e. h = sqrt(epsilon / kappa);
    proportional: epsilon = coefficient * h, i.e. h = epsilon / coefficient.
    """

    kind: str
    h: float | None = None
    kappa: float | None = None
    coefficient: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in ("fixed-h", "coupled", "proportional"):
            raise ValueError(f"unknown mesh rule {self.kind!r}")
        if self.kind == "fixed-h" and not (self.h and self.h > 0):
            raise ValueError("fixed-h mesh rule needs h > 0")
        if self.kind == "coupled" and not (self.kappa and self.kappa > 0):
            raise ValueError("coupled mesh rule needs kappa > 0")
        if self.kind == "proportional" and not (
            self.coefficient and self.coefficient > 0
        ):
            raise ValueError("proportional mesh rule needs coefficient > 0")

    def h_for(self, epsilon: float) -> float:
        if self.kind == "fixed-h":
            return float(self.h)
        if self.kind == "coupled":
            return math.sqrt(epsilon / self.kappa)
        return epsilon / self.coefficient


@dataclass(frozen=True)
class ReferenceSpec:
    """Reference solution a sweep measures against."""

    kind: str  # exact-riemann | fine-mesh-godunov-local |
    #            viscous-local-same-h | inviscid-nonlocal-same-h
    refinement_factor: int = 8

    def __post_init__(self) -> None:
        if self.kind not in (
            "exact-riemann",
            "fine-mesh-godunov-local",
            "viscous-local-same-h",
            "inviscid-nonlocal-same-h",
        ):
            raise ValueError(f"unknown reference kind {self.kind!r}")
        if self.refinement_factor < 2:
            raise ValueError("refinement factor must be >= 2")


@dataclass(frozen=True)
class SweepPlan:
    scenario: ScenarioPreset
    sweep_variable: str  # "epsilon" | "nu"
    values: tuple[float, ...]
    mesh_rule: MeshRule
    schemes: tuple[SchemeSpec, ...]
    reference: ReferenceSpec
    t_eval: float
    record_count: int = 65
    mode: str | None = None  # required for nu sweeps
    fixed_epsilon: float | None = None  # viscosity-limit-nonlocal
    half_line_x0: float = 0.0

    def __post_init__(self) -> None:
        if self.sweep_variable not in (EPSILON_SWEEP, NU_SWEEP):
            raise ValueError("sweep variable must be 'epsilon' or 'nu'")
        vals = tuple(float(v) for v in self.values)
        if not vals:
            raise ValueError("sweep needs at least one value")
        if any(b >= a for a, b in zip(vals, vals[1:])):
            raise ValueError("sweep values must be strictly decreasing")
        if self.sweep_variable == EPSILON_SWEEP and min(vals) <= 0:
            raise ValueError("epsilon values must be positive")
        if self.sweep_variable == NU_SWEEP and min(vals) < 0:
            raise ValueError("nu values must be nonnegative")
        object.__setattr__(self, "values", vals)
        object.__setattr__(self, "schemes", tuple(self.schemes))
        if self.sweep_variable == NU_SWEEP and self.mode not in _NU_MODES:
            raise ValueError(f"nu sweeps need a mode from {_NU_MODES}")
        if self.mode == MODE_VISCOSITY_LIMIT_NONLOCAL and not self.fixed_epsilon:
            raise ValueError("viscosity-limit-nonlocal needs fixed_epsilon")
        if (
            self.mode in (MODE_VISCOSITY_LIMIT_LOCAL, MODE_VISCOSITY_LIMIT_NONLOCAL)
            and self.mesh_rule.kind != "fixed-h"
        ):
            raise ValueError("nu sweeps at fixed mesh need the fixed-h rule")
        if not (math.isfinite(self.t_eval) and self.t_eval > 0):
            raise ValueError("t_eval must be positive")


@dataclass(frozen=True)
class SweepRow:
    epsilon: float  # nan when not applicable
    nu: float
    h: float
    n_cells: int
    scheme: str
    l1_error: float
    l2_error: float
    sup_error: float
    tv: float
    half_line_mass: float
    min: float
    max: float
    runtime_s: float
    status: str  # "ok" | "unstable"


@dataclass(frozen=True)
class SweepResult:
    sweep_variable: str
    rows: tuple[SweepRow, ...]


def scheme_alignment(kind: SchemeKind) -> KernelAlignment:
    """Godunov-type fluxes evaluate w at interfaces, LxF-type at cells."""
    if kind is SchemeKind.GODUNOV:
        return KernelAlignment.INTERFACE_CENTERED
    return KernelAlignment.CELL_CENTERED


def restrict_field(fine: CellField, coarse_grid: Grid1D) -> CellField:
    """Block-average a refined-grid field back onto its parent grid."""
    factor, rem = divmod(fine.grid.n_cells, coarse_grid.n_cells)
    if rem != 0 or factor < 1:
        raise ValueError("fine grid is not a refinement of the coarse grid")
    values = fine.values.reshape(coarse_grid.n_cells, factor).mean(axis=1)
    return CellField(coarse_grid, values)


def riemann_states(datum: InitialDatum) -> tuple[float, float] | None:
    """The (left, right) states when the datum is a single step, else None."""
    if isinstance(datum, PiecewiseConstant) and len(datum.breakpoints) == 1:
        return datum.values[0], datum.values[1]
    return None


def _check_domain_margin(
    scenario: ScenarioPreset,
    initial: CellField,
    model: VelocityModel,
    t_eval: float,
    max_epsilon: float,
) -> None:
    """Warn when waves plus the kernel radius may reach a non-periodic boundary."""
    if scenario.boundary is BoundaryRule.PERIODIC:
        return
    jumps = np.abs(np.diff(initial.values))
    moving = np.nonzero(jumps > 1e-14)[0]
    if moving.size == 0:
        return
    centers = initial.grid.centers()
    margin = min(
        centers[moving[0]] - initial.grid.x_min,
        initial.grid.x_max - centers[moving[-1] + 1],
    )
    lam = wave_speed_bound(model, (float(initial.values.min()), float(initial.values.max())))
    reach = lam * t_eval + max_epsilon
    if reach > margin:
        warnings.warn(
            f"domain margin {margin:g} is smaller than the wave reach "
            f"{reach:g} (speed*T + kernel radius); boundary effects may "
            "contaminate the run",
            RuntimeWarning,
            stacklevel=3,
        )


# --- single parameter point -----------------------------------------------


@dataclass(frozen=True)
class _Point:
    value: float
    scheme: SchemeSpec
    epsilon: float | None  # kernel scale, None for local schemes
    nu: float
    grid: Grid1D
    record_times: tuple[float, ...]


def _grid_for(plan: SweepPlan, epsilon: float) -> Grid1D:
    scenario = plan.scenario
    h = plan.mesh_rule.h_for(epsilon)
    n = max(4, round((scenario.x_max - scenario.x_min) / h))
    return build_grid(scenario.x_min, scenario.x_max, n)


def _run_point(plan: SweepPlan, point: _Point) -> RunRecord:
    scenario = plan.scenario
    spec = replace(point.scheme, nu=point.nu)
    initial = init_cell_averages(point.grid, scenario.datum)
    kernel = None
    if spec.is_nonlocal:
        if point.epsilon is None:
            raise ValueError("nonlocal scheme needs an epsilon")
        kernel = kernel_weights(
            scenario.kernel_profile,
            point.epsilon,
            point.grid,
            scheme_alignment(spec.kind),
        )
    return evolve(
        initial,
        spec,
        scenario.velocity,
        kernel,
        scenario.boundary,
        plan.t_eval,
        record_times=point.record_times,
    )


def _epsilon_column(plan: SweepPlan, point: _Point) -> float:
    # epsilon-sweep rows carry the swept value even for local schemes so the
    # CSV stays grouped by parameter point; elsewhere it is the kernel scale.
    if plan.sweep_variable == EPSILON_SWEEP:
        return point.value
    return point.epsilon if point.epsilon is not None else math.nan


def _row_from_run(
    plan: SweepPlan,
    point: _Point,
    run: RunRecord,
    reference,
    runtime_s: float,
) -> SweepRow:
    final = run.final
    periodic = plan.scenario.boundary is BoundaryRule.PERIODIC
    if isinstance(reference, RunRecord):
        l2 = distance("l2-spacetime", run, reference)
        ref_final = reference.final
    else:
        ref_final = reference
        l2 = distance("l2", final, ref_final)
    return SweepRow(
        epsilon=_epsilon_column(plan, point),
        nu=point.nu,
        h=point.grid.h,
        n_cells=point.grid.n_cells,
        scheme=point.scheme.label,
        l1_error=distance("l1", final, ref_final),
        l2_error=l2,
        sup_error=distance("sup", final, ref_final),
        tv=total_variation(final, periodic=periodic),
        half_line_mass=half_line_mass(final, plan.half_line_x0),
        min=float(final.values.min()),
        max=float(final.values.max()),
        runtime_s=runtime_s,
        status="ok",
    )


def _failed_row(plan: SweepPlan, point: _Point) -> SweepRow:
    nan = math.nan
    return SweepRow(
        epsilon=_epsilon_column(plan, point),
        nu=point.nu,
        h=point.grid.h,
        n_cells=point.grid.n_cells,
        scheme=point.scheme.label,
        l1_error=nan,
        l2_error=nan,
        sup_error=nan,
        tv=nan,
        half_line_mass=nan,
        min=nan,
        max=nan,
        runtime_s=0.0,
        status="unstable",
    )


# --- reference construction -----------------------------------------------


class _ReferenceCache:
    """Per-sweep memo so identical reference runs are computed once."""

    def __init__(self, plan: SweepPlan) -> None:
        self.plan = plan
        self._store: dict = {}

    def _fine_mesh(self, grid: Grid1D, nu: float) -> CellField:
        plan = self.plan
        key = ("fine-mesh", grid, nu)
        if key not in self._store:
            factor = plan.reference.refinement_factor
            fine_grid = build_grid(grid.x_min, grid.x_max, grid.n_cells * factor)
            spec = SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV, nu=nu)
            run = evolve(
                init_cell_averages(fine_grid, plan.scenario.datum),
                spec,
                plan.scenario.velocity,
                None,
                plan.scenario.boundary,
                plan.t_eval,
            )
            self._store[key] = restrict_field(run.final, grid)
        return self._store[key]

    def entropy_field(self, grid: Grid1D) -> CellField:
        """Entropy solution at t_eval: exact for step data, fine-mesh otherwise."""
        plan = self.plan
        key = ("entropy", grid)
        if key not in self._store:
            states = riemann_states(plan.scenario.datum)
            if plan.reference.kind == "exact-riemann":
                if states is None:
                    raise ValueError(
                        "exact-riemann reference needs a single-step datum"
                    )
                vals = exact_riemann_lwr(
                    states[0], states[1], plan.t_eval, grid.centers()
                )
                self._store[key] = CellField(grid, vals)
            else:
                self._store[key] = self._fine_mesh(grid, 0.0)
        return self._store[key]

    def local_run(
        self, grid: Grid1D, kind: SchemeKind, nu: float, record_times
    ) -> RunRecord:
        key = ("local-run", grid, kind, nu, record_times)
        if key not in self._store:
            spec = SchemeSpec(Locality.LOCAL, kind, nu=nu)
            self._store[key] = evolve(
                init_cell_averages(grid, self.plan.scenario.datum),
                spec,
                self.plan.scenario.velocity,
                None,
                self.plan.scenario.boundary,
                self.plan.t_eval,
                record_times=record_times,
            )
        return self._store[key]

    def nonlocal_inviscid_run(
        self, grid: Grid1D, kind: SchemeKind, epsilon: float, record_times
    ) -> RunRecord:
        key = ("nonlocal-inviscid", grid, kind, epsilon, record_times)
        if key not in self._store:
            plan = self.plan
            spec = SchemeSpec(Locality.NONLOCAL, kind, nu=0.0)
            kernel = kernel_weights(
                plan.scenario.kernel_profile, epsilon, grid, scheme_alignment(kind)
            )
            self._store[key] = evolve(
                init_cell_averages(grid, plan.scenario.datum),
                spec,
                plan.scenario.velocity,
                kernel,
                plan.scenario.boundary,
                plan.t_eval,
                record_times=record_times,
            )
        return self._store[key]


# --- sweep drivers ----------------------------------------------------------


def _execute(plan: SweepPlan, jobs, threads: int, timings: bool) -> list[SweepRow]:
    """jobs: list of (point, reference); returns rows in job order."""

    def work(job) -> SweepRow:
        point, reference = job
        try:
            start = time.perf_counter() if timings else 0.0
            run = _run_point(plan, point)
            elapsed = time.perf_counter() - start if timings else 0.0
            return _row_from_run(plan, point, run, reference, elapsed)
        except SchemeInstabilityError:
            return _failed_row(plan, point)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(work, jobs))
    return [work(job) for job in jobs]


def run_epsilon_sweep(
    plan: SweepPlan, threads: int = 1, timings: bool = False
) -> SweepResult:
    """Evolve every scheme for each epsilon and measure against the reference.

    Rows come out sorted by descending epsilon, then scheme label.  Unstable
    runs are recorded with status "unstable" instead of aborting the sweep.
    """
    if plan.sweep_variable != EPSILON_SWEEP:
        raise ValueError("run_epsilon_sweep needs an epsilon-sweep plan")
    cache = _ReferenceCache(plan)
    schemes = sorted(plan.schemes, key=lambda s: s.label)

    first_grid = _grid_for(plan, plan.values[0])
    _check_domain_margin(
        plan.scenario,
        init_cell_averages(first_grid, plan.scenario.datum),
        plan.scenario.velocity,
        plan.t_eval,
        max(plan.values),
    )

    jobs = []
    for eps in plan.values:
        grid = _grid_for(plan, eps)
        reference = cache.entropy_field(grid)
        for scheme in schemes:
            point = _Point(
                value=eps,
                scheme=scheme,
                epsilon=eps if scheme.is_nonlocal else None,
                nu=scheme.nu,
                grid=grid,
                record_times=(plan.t_eval,),
            )
            jobs.append((point, reference))
    rows = _execute(plan, jobs, threads, timings)
    return SweepResult(EPSILON_SWEEP, tuple(rows))


def run_nu_sweep(plan: SweepPlan, threads: int = 1, timings: bool = False) -> SweepResult:
    """Viscosity-direction sweeps; plan.mode selects the limit being probed.

    epsilon-limit-viscous sweeps epsilon at the schemes' fixed nu and
    reports the space-time L2 distance to the matching viscous local run in
    the l2_error column; the two viscosity-limit modes sweep nu against the
    entropy solution (local) or the inviscid nonlocal run (fixed epsilon).
    """
    if plan.sweep_variable != NU_SWEEP:
        raise ValueError("run_nu_sweep needs a nu-sweep plan")
    cache = _ReferenceCache(plan)
    schemes = sorted(plan.schemes, key=lambda s: s.label)
    records = uniform_record_times(plan.t_eval, plan.record_count)

    if plan.mode == MODE_EPSILON_LIMIT_VISCOUS:
        eps_reach = max(plan.values)
    else:
        eps_reach = plan.fixed_epsilon or 0.0
    margin_grid = _grid_for(plan, eps_reach if eps_reach > 0 else 1.0)
    _check_domain_margin(
        plan.scenario,
        init_cell_averages(margin_grid, plan.scenario.datum),
        plan.scenario.velocity,
        plan.t_eval,
        eps_reach,
    )

    jobs = []
    if plan.mode == MODE_EPSILON_LIMIT_VISCOUS:
        # here plan.values carries the epsilon list; nu is fixed per scheme
        for scheme in schemes:
            if not scheme.is_nonlocal or scheme.nu <= 0.0:
                raise ValueError(
                    "epsilon-limit-viscous compares viscous nonlocal schemes"
                )
        for eps in plan.values:
            grid = _grid_for(plan, eps)
            for scheme in schemes:
                reference = cache.local_run(grid, scheme.kind, scheme.nu, records)
                point = _Point(
                    value=eps,
                    scheme=scheme,
                    epsilon=eps,
                    nu=scheme.nu,
                    grid=grid,
                    record_times=records,
                )
                jobs.append((point, reference))
    elif plan.mode == MODE_VISCOSITY_LIMIT_LOCAL:
        for nu in plan.values:
            grid = _grid_for(plan, max(nu, 1e-30))
            reference = cache.entropy_field(grid)
            for scheme in schemes:
                if scheme.is_nonlocal:
                    raise ValueError("viscosity-limit-local sweeps local schemes")
                point = _Point(
                    value=nu,
                    scheme=scheme,
                    epsilon=None,
                    nu=nu,
                    grid=grid,
                    record_times=(plan.t_eval,),
                )
                jobs.append((point, reference))
    elif plan.mode == MODE_VISCOSITY_LIMIT_NONLOCAL:
        eps = float(plan.fixed_epsilon)
        for nu in plan.values:
            grid = _grid_for(plan, eps)
            for scheme in schemes:
                if not scheme.is_nonlocal:
                    raise ValueError(
                        "viscosity-limit-nonlocal sweeps nonlocal schemes"
                    )
                reference = cache.nonlocal_inviscid_run(
                    grid, scheme.kind, eps, (plan.t_eval,)
                )
                point = _Point(
                    value=nu,
                    scheme=scheme,
                    epsilon=eps,
                    nu=nu,
                    grid=grid,
                    record_times=(plan.t_eval,),
                )
                jobs.append((point, reference))
    else:
        raise ValueError(f"unknown nu-sweep mode {plan.mode!r}")

    rows = _execute(plan, jobs, threads, timings)
    # report the column that actually varies so CSV sorting groups by it
    swept = EPSILON_SWEEP if plan.mode == MODE_EPSILON_LIMIT_VISCOUS else NU_SWEEP
    return SweepResult(swept, tuple(rows))
