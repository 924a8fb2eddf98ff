import numpy as np
import pytest

from nlclab import (
    BoundaryRule,
    CellField,
    Locality,
    PiecewiseConstant,
    SchemeInstabilityError,
    SchemeKind,
    SchemeSpec,
    affine_velocity,
    build_grid,
    distance,
    evolve,
    init_cell_averages,
    stable_dt,
    total_mass,
    traffic_velocity,
    uniform_record_times,
)

TRAFFIC = traffic_velocity()


def test_stable_dt_traffic():
    g = build_grid(0.0, 1.0, 1000)  # h = 0.001
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV, cfl_number=0.5)
    assert stable_dt(spec, TRAFFIC, g, (0.0, 1.0)) == pytest.approx(0.0005, abs=0)


def test_stable_dt_parabolic_bound():
    g = build_grid(0.0, 1.0, 100)  # h = 0.01
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV, nu=0.1, cfl_number=0.5)
    # min(h/1, h^2/(2 nu)) = min(0.01, 0.0005) = 0.0005
    assert stable_dt(spec, TRAFFIC, g, (0.0, 1.0)) == pytest.approx(0.00025, abs=0)


def test_stable_dt_zero_velocity_fallback():
    g = build_grid(0.0, 1.0, 100)
    model = affine_velocity(0.0, 0.0, (0.0, 1.0))
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV, cfl_number=0.5)
    assert stable_dt(spec, model, g, (0.0, 1.0)) == pytest.approx(0.5 * g.h, abs=0)


def test_evolve_constant_state():
    g = build_grid(0.0, 1.0, 16)
    f = CellField(g, np.full(16, 0.3))
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV)
    rec = evolve(f, spec, TRAFFIC, None, BoundaryRule.PERIODIC, 1.0,
                 uniform_record_times(1.0, 5))
    assert rec.times == (0.0, 0.25, 0.5, 0.75, 1.0)
    for snap in rec.snapshots:
        assert np.max(np.abs(snap.values - 0.3)) <= 1e-14


def test_evolve_stationary_shock():
    g = build_grid(-2.0, 2.0, 400)
    f = init_cell_averages(g, PiecewiseConstant((0.0,), (0.0, 1.0)))
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV)
    rec = evolve(f, spec, TRAFFIC, None, BoundaryRule.CONSTANT_EXTENSION, 0.5)
    assert distance("l1", rec.final, f) <= 2.0 * g.h


def test_evolve_lands_exactly_on_final_and_record_times():
    g = build_grid(0.0, 1.0, 16)
    f = CellField(g, np.full(16, 0.3))
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV)
    # T = 0.1 is not a multiple of dt = 0.5 * h = 0.03125
    rec = evolve(f, spec, TRAFFIC, None, BoundaryRule.PERIODIC, 0.1, (0.07,))
    assert rec.times == (0.0, 0.07, 0.1)
    assert rec.dt_min < rec.dt_max  # at least one clipped step


def test_evolve_first_snapshot_is_initial():
    g = build_grid(0.0, 1.0, 8)
    f = CellField(g, np.linspace(0.1, 0.9, 8))
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV)
    rec = evolve(f, spec, TRAFFIC, None, BoundaryRule.PERIODIC, 0.05)
    assert rec.snapshots[0] == f


def test_evolve_rejects_bad_record_times():
    g = build_grid(0.0, 1.0, 8)
    f = CellField(g, np.zeros(8))
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV)
    with pytest.raises(ValueError):
        evolve(f, spec, TRAFFIC, None, BoundaryRule.PERIODIC, 1.0, (2.0,))


def test_evolve_is_deterministic():
    g = build_grid(-1.0, 1.0, 100)
    f = init_cell_averages(g, PiecewiseConstant((0.0,), (0.2, 0.9)))
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.LAX_FRIEDRICHS)
    r1 = evolve(f, spec, TRAFFIC, None, BoundaryRule.PERIODIC, 0.3, (0.1, 0.2))
    r2 = evolve(f, spec, TRAFFIC, None, BoundaryRule.PERIODIC, 0.3, (0.1, 0.2))
    assert r1.times == r2.times
    assert r1.step_count == r2.step_count
    for a, b in zip(r1.snapshots, r2.snapshots):
        assert np.array_equal(a.values, b.values)


def test_evolve_mass_conservation_over_run():
    g = build_grid(-1.0, 1.0, 200)
    rng = np.random.default_rng(0)
    f = CellField(g, rng.uniform(0.0, 1.0, 200))
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV)
    rec = evolve(f, spec, TRAFFIC, None, BoundaryRule.PERIODIC, 1.0)
    drift = abs(total_mass(rec.final) - total_mass(f))
    assert drift <= 1e-11 * rec.step_count * float(np.abs(f.values).max())


def test_evolve_reports_step_and_time_on_instability():
    g = build_grid(0.0, 4.0, 4)
    f = CellField(g, np.array([0.0, 1.0, 0.0, 1.0]))
    # an admissible range declared far too small makes the guard trip quickly
    model = affine_velocity(1.0, -1.0, (0.4, 0.41))
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.LAX_FRIEDRICHS, cfl_number=1.0)
    with pytest.raises(SchemeInstabilityError, match="at step"):
        evolve(f, spec, model, None, BoundaryRule.PERIODIC, 50.0)
