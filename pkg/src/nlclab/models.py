"""Velocity laws V(u), the flux u*V(u), wave-speed bounds, and scenario presets."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .grid import (
    BoundaryRule,
    InitialDatum,
    PiecewiseConstant,
    SmoothProfile,
    SquareWave,
)
from .kernels import KernelProfile


@dataclass(frozen=True)
class VelocityModel:
    """Lipschitz velocity law.  Affine laws V(u) = a + b*u get exact flux
    extremisation and wave-speed bounds; custom closures are handled by
    sampling with a safety factor."""

    kind: str  # "affine" | "custom"
    a: float = 0.0
    b: float = 0.0
    func: Callable[[np.ndarray], np.ndarray] | None = None
    lipschitz_bound: float = 0.0
    admissible_range: tuple[float, float] = (0.0, 1.0)

    def velocity(self, u):
        if self.kind == "affine":
            return self.a + self.b * np.asarray(u, dtype=float)
        return self.func(np.asarray(u, dtype=float))

    def flux(self, u):
        return np.asarray(u, dtype=float) * self.velocity(u)

    @property
    def is_affine(self) -> bool:
        return self.kind == "affine"


def affine_velocity(
    a: float, b: float, admissible_range: tuple[float, float] = (0.0, 1.0)
) -> VelocityModel:
    return VelocityModel(
        kind="affine",
        a=float(a),
        b=float(b),
        lipschitz_bound=abs(float(b)),
        admissible_range=(float(admissible_range[0]), float(admissible_range[1])),
    )


def custom_velocity(
    func: Callable[[np.ndarray], np.ndarray],
    lipschitz_bound: float,
    admissible_range: tuple[float, float] = (0.0, 1.0),
    spot_check: bool = True,
) -> VelocityModel:
    model = VelocityModel(
        kind="custom",
        func=func,
        lipschitz_bound=float(lipschitz_bound),
        admissible_range=(float(admissible_range[0]), float(admissible_range[1])),
    )
    if spot_check:
        m, M = model.admissible_range
        us = np.linspace(m, M, 65)
        vs = np.asarray(func(us), dtype=float)
        quot = np.abs(np.diff(vs)) / np.maximum(np.diff(us), 1e-300)
        if np.any(quot > lipschitz_bound * (1.0 + 1e-9) + 1e-12):
            raise ValueError(
                "velocity closure violates the declared Lipschitz bound "
                f"(observed {quot.max():g} > {lipschitz_bound:g})"
            )
    return model


def traffic_velocity() -> VelocityModel:
    """V(u) = 1 - u on the admissible density range [0, 1]."""
    return affine_velocity(1.0, -1.0, (0.0, 1.0))


def eval_flux(model: VelocityModel, u: float) -> float:
    """Flux f(u) = u * V(u)."""
    if not math.isfinite(u):
        raise ValueError("state must be finite")
    return float(model.flux(u))


def wave_speed_bound(model: VelocityModel, state_range: tuple[float, float]) -> float:
    """Upper bound for |d/du (u V(u))| over [m, M].

    Affine V: f'(u) = a + 2*b*u is itself affine, so the exact maximum sits
    at an endpoint.  Closures: 256 difference quotients over the range,
    scaled by a 1.2 safety factor (conservative CFL is cheap).
    """
    m, M = float(state_range[0]), float(state_range[1])
    if m > M:
        raise ValueError("state range must satisfy m <= M")
    if model.is_affine:
        return max(abs(model.a + 2.0 * model.b * m), abs(model.a + 2.0 * model.b * M))
    if M - m <= 0.0:
        span = max(1e-9, 1e-9 * abs(m))
        m, M = m - span, M + span
    us = np.linspace(m, M, 257)
    fs = model.flux(us)
    quot = np.abs(np.diff(fs)) / np.diff(us)
    return 1.2 * float(quot.max())


# --- scenario presets -----------------------------------------------------


@dataclass(frozen=True)
class ScenarioPreset:
    """A named, fully specified simulation scenario."""

    name: str
    description: str
    velocity: VelocityModel
    kernel_profile: KernelProfile
    datum: InitialDatum
    x_min: float
    x_max: float
    n_cells: int
    t_final: float
    boundary: BoundaryRule = BoundaryRule.CONSTANT_EXTENSION


def _smooth_bump(x: np.ndarray) -> np.ndarray:
    """Amplitude-0.2 compactly supported C^1 bump on [-1/2, 1/2]."""
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) <= 0.5
    return np.where(inside, 0.2 * np.cos(np.pi * x) ** 2, 0.0)


def _build_traffic_riemann() -> ScenarioPreset:
    return ScenarioPreset(
        name="traffic-riemann",
        description="traffic law V=1-u, upstream-empty step 0 -> 1 at x=0 "
        "(a stationary entropy shock for the local limit)",
        velocity=traffic_velocity(),
        kernel_profile=KernelProfile.BOX_BACKWARD,
        datum=PiecewiseConstant((0.0,), (0.0, 1.0), "step 0->1 at x=0"),
        x_min=-2.0,
        x_max=2.0,
        n_cells=400,
        t_final=1.0,
    )


def _build_traffic_oscillatory() -> ScenarioPreset:
    return ScenarioPreset(
        name="traffic-oscillatory",
        description="traffic law with a period-0.25 square wave between 0 and 1, "
        "periodic domain; probes total-variation growth",
        velocity=traffic_velocity(),
        kernel_profile=KernelProfile.BOX_BACKWARD,
        datum=SquareWave(0.25, 0.0, 1.0, "square wave period 0.25 in [0,1]"),
        x_min=0.0,
        x_max=2.0,
        n_cells=500,
        t_final=0.5,
        boundary=BoundaryRule.PERIODIC,
    )


def _build_smooth_even() -> ScenarioPreset:
    return ScenarioPreset(
        name="smooth-even",
        description="amplitude-0.2 smooth bump with the even hat kernel; "
        "pre-shock window where the local solution stays smooth",
        velocity=traffic_velocity(),
        kernel_profile=KernelProfile.EVEN_HAT,
        datum=SmoothProfile(_smooth_bump, "amplitude-0.2 cos^2 bump"),
        x_min=-2.0,
        x_max=2.0,
        n_cells=800,
        t_final=0.1,
    )


def _build_viscous_compare() -> ScenarioPreset:
    return ScenarioPreset(
        name="viscous-compare",
        description="traffic step datum evolved with explicit viscosity; "
        "for nonlocal-vs-local comparisons at fixed nu > 0",
        velocity=traffic_velocity(),
        kernel_profile=KernelProfile.BOX_BACKWARD,
        datum=PiecewiseConstant((0.0,), (0.0, 1.0), "step 0->1 at x=0"),
        x_min=-2.0,
        x_max=2.0,
        n_cells=400,
        t_final=1.0,
    )


_PRESET_BUILDERS = {
    "traffic-riemann": _build_traffic_riemann,
    "traffic-oscillatory": _build_traffic_oscillatory,
    "smooth-even": _build_smooth_even,
    "viscous-compare": _build_viscous_compare,
}


def preset_names() -> tuple[str, ...]:
    return tuple(sorted(_PRESET_BUILDERS))


def get_preset(name: str) -> ScenarioPreset:
    try:
        return _PRESET_BUILDERS[name]()
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}"
        ) from None
