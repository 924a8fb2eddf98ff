import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nlclab import (
    BoundaryRule,
    CellField,
    KernelAlignment,
    KernelProfile,
    Locality,
    SchemeInstabilityError,
    SchemeKind,
    SchemeSpec,
    build_grid,
    init_cell_averages,
    kernel_weights,
    local_flux,
    nonlocal_flux,
    parse_scheme_label,
    step_explicit,
    total_mass,
    traffic_velocity,
)
from nlclab import PiecewiseConstant, affine_velocity

TRAFFIC = traffic_velocity()


def flux_extremum_by_sampling(model, ul, ur, n=100001):
    lo, hi = min(ul, ur), max(ul, ur)
    us = np.linspace(lo, hi, n)
    fs = model.flux(us)
    return float(fs.min()) if ul <= ur else float(fs.max())


# --- flux-level contracts ---------------------------------------------------


def test_godunov_equal_states():
    assert local_flux(SchemeKind.GODUNOV, TRAFFIC, 0.3, 0.3) == pytest.approx(0.21)


def test_godunov_interval_minimum():
    got = local_flux(SchemeKind.GODUNOV, TRAFFIC, 0.2, 0.8)
    assert got == pytest.approx(0.16, abs=1e-15)
    assert got == pytest.approx(flux_extremum_by_sampling(TRAFFIC, 0.2, 0.8), abs=1e-9)


def test_godunov_interval_maximum():
    got = local_flux(SchemeKind.GODUNOV, TRAFFIC, 1.0, 0.0)
    assert got == 0.25
    assert got == pytest.approx(flux_extremum_by_sampling(TRAFFIC, 1.0, 0.0), abs=1e-9)


def test_godunov_random_states_match_sampling_oracle():
    rng = np.random.default_rng(5)
    for _ in range(50):
        ul, ur = rng.uniform(0.0, 1.0, 2)
        got = local_flux(SchemeKind.GODUNOV, TRAFFIC, ul, ur)
        assert got == pytest.approx(flux_extremum_by_sampling(TRAFFIC, ul, ur), abs=1e-9)


def test_godunov_convex_flux_vertex_is_minimum():
    model = affine_velocity(-1.0, 1.0, (0.0, 2.0))  # f(u) = u^2 - u, convex
    got = local_flux(SchemeKind.GODUNOV, model, 0.0, 1.0)
    assert got == pytest.approx(-0.25, abs=1e-15)  # vertex at u = 1/2


def test_godunov_sampled_path_for_custom_velocity():
    from nlclab import custom_velocity

    model = custom_velocity(lambda u: 1.0 - u**2, lipschitz_bound=2.0)
    got = local_flux(SchemeKind.GODUNOV, model, 0.9, 0.1)
    assert got == pytest.approx(flux_extremum_by_sampling(model, 0.9, 0.1), abs=1e-3)


def test_lxf_equal_states_any_ratio():
    for lam in (0.1, 0.5, 1.0):
        assert local_flux(
            SchemeKind.LAX_FRIEDRICHS, TRAFFIC, 0.4, 0.4, mesh_ratio=lam
        ) == pytest.approx(0.24)


def test_lxf_requires_mesh_ratio():
    with pytest.raises(ValueError):
        local_flux(SchemeKind.LAX_FRIEDRICHS, TRAFFIC, 0.4, 0.2)


def test_upwind_flux_freezes_left_velocity():
    assert local_flux(SchemeKind.UPWIND, TRAFFIC, 0.5, 0.9) == pytest.approx(0.25)
    # negative frozen velocity takes the right state
    model = affine_velocity(-1.0, 0.0, (0.0, 1.0))
    assert local_flux(SchemeKind.UPWIND, model, 0.5, 0.9) == pytest.approx(-0.9)


def test_nonlocal_godunov_flux_examples():
    assert nonlocal_flux(SchemeKind.GODUNOV, TRAFFIC, 0.5, 0.9, w=0.0) == 0.5
    assert nonlocal_flux(SchemeKind.GODUNOV, TRAFFIC, 0.5, 0.9, w=1.0) == 0.0


def test_nonlocal_godunov_degenerates_to_upwind():
    rng = np.random.default_rng(1)
    for _ in range(30):
        ul, ur = rng.uniform(0.0, 1.0, 2)
        assert nonlocal_flux(SchemeKind.GODUNOV, TRAFFIC, ul, ur, w=ul) == local_flux(
            SchemeKind.UPWIND, TRAFFIC, ul, ur
        )
        if TRAFFIC.velocity(ul) >= 0:
            assert nonlocal_flux(
                SchemeKind.GODUNOV, TRAFFIC, ul, ur, w=ul
            ) == pytest.approx(ul * (1 - ul), abs=0)


def test_nonlocal_lxf_constant_state():
    got = nonlocal_flux(
        SchemeKind.LAX_FRIEDRICHS, TRAFFIC, 0.3, 0.3, w=(0.3, 0.3), mesh_ratio=0.5
    )
    assert got == pytest.approx(0.21)


def test_scheme_spec_validation():
    with pytest.raises(ValueError):
        SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV, nu=-1.0)
    with pytest.raises(ValueError):
        SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV, cfl_number=0.0)
    with pytest.raises(ValueError):
        SchemeSpec(Locality.NONLOCAL, SchemeKind.UPWIND)
    assert parse_scheme_label("godunov-nonlocal").label == "godunov-nonlocal"
    with pytest.raises(ValueError):
        parse_scheme_label("weno-nonlocal")


# --- step-level contracts ---------------------------------------------------


def _step(values, spec, dt=0.001, kernel=None, boundary=BoundaryRule.PERIODIC, model=TRAFFIC):
    n = len(values)
    g = build_grid(0.0, float(n), n)  # h = 1
    f = CellField(g, np.asarray(values, dtype=float))
    return step_explicit(f, spec, model, kernel, boundary, dt)


def test_constant_state_is_fixed_point():
    for locality, kind in [
        (Locality.LOCAL, SchemeKind.GODUNOV),
        (Locality.LOCAL, SchemeKind.LAX_FRIEDRICHS),
        (Locality.LOCAL, SchemeKind.UPWIND),
    ]:
        for nu in (0.0, 0.05):
            spec = SchemeSpec(locality, kind, nu=nu)
            out = _step([0.4] * 8, spec, dt=0.25)
            assert np.max(np.abs(out.values - 0.4)) <= 1e-15


def test_constant_state_fixed_point_nonlocal():
    g = build_grid(0.0, 8.0, 8)
    f = CellField(g, np.full(8, 0.6))
    for kind in (SchemeKind.GODUNOV, SchemeKind.LAX_FRIEDRICHS):
        spec = SchemeSpec(Locality.NONLOCAL, kind)
        from nlclab.experiments import scheme_alignment

        ker = kernel_weights(KernelProfile.BOX_BACKWARD, 2.5, g, scheme_alignment(kind))
        out = step_explicit(f, spec, TRAFFIC, ker, BoundaryRule.PERIODIC, 0.25)
        assert np.max(np.abs(out.values - 0.6)) <= 1e-15


def test_zero_velocity_keeps_any_datum():
    model = affine_velocity(0.0, 0.0, (0.0, 1.0))
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV)
    vals = [0.1, 0.9, 0.3, 0.7, 0.5, 0.2]
    out = _step(vals, spec, dt=0.3, model=model)
    assert out.values.tolist() == vals


@pytest.mark.parametrize(
    "locality,kind",
    [
        (Locality.LOCAL, SchemeKind.GODUNOV),
        (Locality.LOCAL, SchemeKind.LAX_FRIEDRICHS),
        (Locality.LOCAL, SchemeKind.UPWIND),
        (Locality.NONLOCAL, SchemeKind.GODUNOV),
        (Locality.NONLOCAL, SchemeKind.LAX_FRIEDRICHS),
    ],
)
@pytest.mark.parametrize("nu", [0.0, 0.02])
def test_periodic_step_conserves_mass(locality, kind, nu):
    rng = np.random.default_rng(42)
    g = build_grid(-1.0, 1.0, 200)
    f = CellField(g, rng.uniform(0.0, 1.0, 200))
    spec = SchemeSpec(locality, kind, nu=nu)
    kernel = None
    if locality is Locality.NONLOCAL:
        from nlclab.experiments import scheme_alignment

        kernel = kernel_weights(KernelProfile.BOX_BACKWARD, 0.15, g, scheme_alignment(kind))
    dt = 0.25 * g.h
    out = step_explicit(f, spec, TRAFFIC, kernel, BoundaryRule.PERIODIC, dt)
    assert abs(total_mass(out) - total_mass(f)) <= 1e-13 * max(1.0, total_mass(f))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(min_value=0.0, max_value=1.0), min_size=6, max_size=40))
def test_nonlocal_godunov_max_principle_one_step(values):
    g = build_grid(0.0, float(len(values)), len(values))
    f = CellField(g, np.array(values))
    spec = SchemeSpec(Locality.NONLOCAL, SchemeKind.GODUNOV, cfl_number=0.5)
    ker = kernel_weights(
        KernelProfile.BOX_BACKWARD, 3.0, g, KernelAlignment.INTERFACE_CENTERED
    )
    out = step_explicit(f, spec, TRAFFIC, ker, BoundaryRule.PERIODIC, 0.5)
    assert out.values.min() >= -1e-12
    assert out.values.max() <= 1.0 + 1e-12


def test_one_lxf_step_on_rarefaction_interface():
    # frozen by hand: lam=0.5, F at the (1,0) interface is 1/(2 lam) = 1
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.LAX_FRIEDRICHS)
    out = _step([1.0, 1.0, 0.0, 0.0], spec, dt=0.5, boundary=BoundaryRule.CONSTANT_EXTENSION)
    assert out.values.tolist() == [1.0, 0.5, 0.5, 0.0]


def test_one_godunov_step_on_rarefaction_interface():
    # frozen by hand: flux 0.25 at the middle interface, lam = 0.5
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV)
    out = _step([1.0, 1.0, 0.0, 0.0], spec, dt=0.5, boundary=BoundaryRule.CONSTANT_EXTENSION)
    assert out.values == pytest.approx([1.0, 1.0 - 0.125, 0.125, 0.0], abs=1e-15)


def test_stationary_shock_is_exact_for_godunov_and_upwind():
    for kind in (SchemeKind.GODUNOV, SchemeKind.UPWIND):
        spec = SchemeSpec(Locality.LOCAL, kind)
        out = _step([0.0, 0.0, 1.0, 1.0], spec, dt=0.5, boundary=BoundaryRule.CONSTANT_EXTENSION)
        assert out.values.tolist() == [0.0, 0.0, 1.0, 1.0]


def test_instability_is_signalled():
    # a dt far beyond the CFL bound blows the state out of the admissible range
    g = build_grid(0.0, 4.0, 4)
    f = CellField(g, np.array([0.1, 0.9, 0.2, 0.7]))
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV)
    with pytest.raises(SchemeInstabilityError):
        u = f
        for _ in range(200):
            u = step_explicit(u, spec, TRAFFIC, None, BoundaryRule.PERIODIC, 40.0)


def test_viscous_lxf_is_stable_with_parabolic_dt():
    # explicit viscosity replaces part of the LxF dissipation; the combined
    # update must not amplify the odd-even mode
    g = build_grid(0.0, 1.0, 64)
    vals = 0.5 + 0.4 * (-1.0) ** np.arange(64)
    f = CellField(g, vals)
    nu = 0.05
    spec = SchemeSpec(Locality.LOCAL, SchemeKind.LAX_FRIEDRICHS, nu=nu)
    from nlclab import stable_dt

    u = f
    for _ in range(500):
        dt = stable_dt(spec, TRAFFIC, g, (float(u.values.min()), float(u.values.max())))
        u = step_explicit(u, spec, TRAFFIC, None, BoundaryRule.PERIODIC, dt)
    assert 0.0 <= u.values.min() and u.values.max() <= 1.0
