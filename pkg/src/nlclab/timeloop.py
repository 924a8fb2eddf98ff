"""Stable time-step selection and evolution to a final time with snapshots."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .grid import BoundaryRule, CellField, Grid1D
from .kernels import DiscreteKernel
from .models import VelocityModel, wave_speed_bound
from .schemes import SchemeInstabilityError, SchemeSpec, step_explicit

_SPEED_FLOOR = 1e-30


@dataclass(frozen=True)
class RunRecord:
    """Snapshots of one evolution: times[0] == 0 and times[-1] == t_final."""

    times: tuple[float, ...]
    snapshots: tuple[CellField, ...]
    step_count: int
    dt_min: float
    dt_max: float

    @property
    def final(self) -> CellField:
        return self.snapshots[-1]


def stable_dt(
    spec: SchemeSpec,
    model: VelocityModel,
    grid: Grid1D,
    current_range: tuple[float, float],
) -> float:
    """CFL-stable step: cfl * min(h / lambda_max, h^2/(2 nu), h).

    lambda_max is the wave-speed bound on the current state range, floored
    at a tiny value so a vanishing velocity falls back to dt = cfl * h (or
    to the parabolic bound when nu > 0).
    """
    h = grid.h
    lam_max = max(wave_speed_bound(model, current_range), _SPEED_FLOOR)
    dt = min(h / lam_max, h)
    if spec.nu > 0.0:
        dt = min(dt, h * h / (2.0 * spec.nu))
    return spec.cfl_number * dt


def evolve(
    initial: CellField,
    spec: SchemeSpec,
    model: VelocityModel,
    kernel: DiscreteKernel | None,
    boundary: BoundaryRule,
    t_final: float,
    record_times: Sequence[float] | None = None,
) -> RunRecord:
    """March to t_final, clipping steps to land exactly on each record time.

    record_times must lie in [0, t_final]; 0 and t_final are always recorded.
    Snapshot times are exact (no interpolation), so diagnostics evaluated at
    a recorded time compare states at identical instants.
    """
    if not (math.isfinite(t_final) and t_final > 0.0):
        raise ValueError("t_final must be positive")
    targets = {0.0, float(t_final)}
    if record_times is not None:
        for t in record_times:
            t = float(t)
            if t < 0.0 or t > t_final:
                raise ValueError(f"record time {t:g} outside [0, {t_final:g}]")
            targets.add(t)
    schedule = sorted(targets)

    grid = initial.grid
    times = [0.0]
    snapshots = [initial]
    u = initial
    t = 0.0
    steps = 0
    dt_min = math.inf
    dt_max = 0.0
    tol = 1e-12 * max(1.0, t_final)

    for target in schedule[1:]:
        while t < target - tol:
            vals = u.values
            dt = stable_dt(spec, model, grid, (float(vals.min()), float(vals.max())))
            if t + dt >= target - tol:
                dt = target - t
                t_next = target
            else:
                t_next = t + dt
            try:
                u = step_explicit(u, spec, model, kernel, boundary, dt)
            except SchemeInstabilityError as exc:
                raise SchemeInstabilityError(
                    f"{exc} at step {steps} (t={t:.6g})"
                ) from exc
            steps += 1
            dt_min = min(dt_min, dt)
            dt_max = max(dt_max, dt)
            t = t_next
        t = target
        times.append(target)
        snapshots.append(u)

    if steps == 0:
        dt_min = 0.0
    return RunRecord(tuple(times), tuple(snapshots), steps, dt_min, dt_max)


def uniform_record_times(t_final: float, count: int) -> tuple[float, ...]:
    """count equally spaced times spanning [0, t_final] inclusive."""
    if count < 2:
        return (0.0, float(t_final))
    return tuple(float(t_final) * k / (count - 1) for k in range(count))
