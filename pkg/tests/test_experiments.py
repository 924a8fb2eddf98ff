import math
from dataclasses import replace

import numpy as np
import pytest

from nlclab import (
    CellField,
    Locality,
    MeshRule,
    PiecewiseConstant,
    ReferenceSpec,
    SchemeKind,
    SchemeSpec,
    SweepPlan,
    build_grid,
    distance,
    exact_riemann_lwr,
    get_preset,
    init_cell_averages,
    restrict_field,
    run_epsilon_sweep,
    run_nu_sweep,
    affine_velocity,
)
from nlclab.experiments import (
    MODE_EPSILON_LIMIT_VISCOUS,
    MODE_VISCOSITY_LIMIT_LOCAL,
    MODE_VISCOSITY_LIMIT_NONLOCAL,
)
from nlclab.schemes import Locality as Loc

GOD_NL = SchemeSpec(Locality.NONLOCAL, SchemeKind.GODUNOV)
GOD_L = SchemeSpec(Locality.LOCAL, SchemeKind.GODUNOV)
UPW_L = SchemeSpec(Locality.LOCAL, SchemeKind.UPWIND)


def small_riemann_plan(**overrides):
    pre = get_preset("traffic-riemann")
    base = dict(
        scenario=pre,
        sweep_variable="epsilon",
        values=(0.2, 0.05),
        mesh_rule=MeshRule("fixed-h", h=0.04),
        schemes=(GOD_NL,),
        reference=ReferenceSpec("exact-riemann"),
        t_eval=0.5,
    )
    base.update(overrides)
    return SweepPlan(**base)


# --- exact Riemann solution -------------------------------------------------


def test_riemann_constant():
    assert exact_riemann_lwr(0.3, 0.3, 1.0, -5.0) == 0.3


def test_riemann_stationary_shock():
    # u_l=0, u_r=1: speed 1 - 0 - 1 = 0
    assert exact_riemann_lwr(0.0, 1.0, 2.0, -0.01) == 0.0
    assert exact_riemann_lwr(0.0, 1.0, 2.0, 0.01) == 1.0


def test_riemann_moving_shock_rankine_hugoniot():
    rng = np.random.default_rng(4)
    for _ in range(40):
        ul, ur = np.sort(rng.uniform(0.0, 1.0, 2))
        if ul == ur:
            continue
        s = 1.0 - ul - ur
        f = lambda u: u * (1 - u)
        assert s * (ur - ul) == pytest.approx(f(ur) - f(ul), abs=1e-15)
        t = rng.uniform(0.1, 3.0)
        eps = 1e-9
        assert exact_riemann_lwr(ul, ur, t, s * t - eps) == ul
        assert exact_riemann_lwr(ul, ur, t, s * t + eps) == ur


def test_riemann_rarefaction():
    assert exact_riemann_lwr(1.0, 0.0, 1.0, 0.0) == 0.5
    # fan edges at the characteristic speeds of the end states
    assert exact_riemann_lwr(1.0, 0.0, 1.0, -1.0 - 1e-12) == 1.0
    assert exact_riemann_lwr(1.0, 0.0, 1.0, 1.0 + 1e-12) == 0.0
    xs = np.linspace(-0.99, 0.99, 21)
    assert exact_riemann_lwr(1.0, 0.0, 1.0, xs) == pytest.approx((1 - xs) / 2)


def test_riemann_self_similarity():
    rng = np.random.default_rng(8)
    for _ in range(20):
        ul, ur = rng.uniform(0.0, 1.0, 2)
        x, t, k = rng.uniform(-1, 1), rng.uniform(0.1, 2.0), rng.uniform(0.5, 3.0)
        assert exact_riemann_lwr(ul, ur, t, x) == pytest.approx(
            exact_riemann_lwr(ul, ur, k * t, k * x), abs=1e-12
        )


def test_riemann_rejects_bad_input():
    with pytest.raises(ValueError):
        exact_riemann_lwr(-0.1, 0.5, 1.0, 0.0)
    with pytest.raises(ValueError):
        exact_riemann_lwr(0.1, 1.5, 1.0, 0.0)
    with pytest.raises(ValueError):
        exact_riemann_lwr(0.1, 0.5, 0.0, 0.0)


# --- sweep machinery --------------------------------------------------------


def test_restrict_field_block_average():
    fine = CellField(build_grid(0.0, 1.0, 8), np.array([1.0, 3, 2, 2, 0, 4, 5, 1]))
    coarse = restrict_field(fine, build_grid(0.0, 1.0, 4))
    assert coarse.values.tolist() == [2.0, 2.0, 2.0, 3.0]
    with pytest.raises(ValueError):
        restrict_field(fine, build_grid(0.0, 1.0, 5))


def test_mesh_rules():
    assert MeshRule("fixed-h", h=0.01).h_for(0.5) == 0.01
    assert MeshRule("coupled", kappa=1000.0).h_for(0.1) == pytest.approx(0.01)
    assert MeshRule("proportional", coefficient=50.0).h_for(0.4) == pytest.approx(0.008)
    with pytest.raises(ValueError):
        MeshRule("fixed-h")
    with pytest.raises(ValueError):
        MeshRule("squared")


def test_plan_validation():
    with pytest.raises(ValueError):
        small_riemann_plan(values=(0.1, 0.2))  # not decreasing
    with pytest.raises(ValueError):
        small_riemann_plan(sweep_variable="nu")  # missing mode


def test_epsilon_sweep_rows_sorted_and_stable():
    plan = small_riemann_plan(schemes=(GOD_NL, GOD_L))
    res = run_epsilon_sweep(plan)
    assert [r.scheme for r in res.rows] == [
        "godunov-local",
        "godunov-nonlocal",
        "godunov-local",
        "godunov-nonlocal",
    ]
    assert [r.epsilon for r in res.rows] == [0.2, 0.2, 0.05, 0.05]
    assert all(r.status == "ok" for r in res.rows)
    assert all(math.isfinite(r.l1_error) for r in res.rows)


def test_sweep_determinism_and_thread_independence():
    plan = small_riemann_plan(schemes=(GOD_NL, GOD_L, UPW_L))
    a = run_epsilon_sweep(plan, threads=1)
    b = run_epsilon_sweep(plan, threads=3)
    assert a == b


def test_duplicate_schemes_give_identical_rows():
    plan = small_riemann_plan(schemes=(GOD_NL, GOD_NL))
    res = run_epsilon_sweep(plan)
    assert res.rows[0] == res.rows[1]
    assert res.rows[2] == res.rows[3]


def test_identity_stencil_degeneracy_full_sweep():
    # last epsilon below h: the nonlocal godunov row must match the local
    # upwind row in every diagnostic (they take identical code paths), and
    # for the stationary-shock preset the local godunov row as well
    plan = small_riemann_plan(
        values=(0.2, 0.02),
        schemes=(GOD_NL, GOD_L, UPW_L),
    )
    with pytest.warns(RuntimeWarning):
        res = run_epsilon_sweep(plan)
    rows = {(r.scheme, r.epsilon): r for r in res.rows}
    a = rows[("godunov-nonlocal", 0.02)]
    b = rows[("upwind-local", 0.02)]
    c = rows[("godunov-local", 0.02)]
    for name in ("l1_error", "l2_error", "sup_error", "tv", "half_line_mass", "min", "max"):
        assert abs(getattr(a, name) - getattr(b, name)) <= 1e-12
    assert abs(a.l1_error - c.l1_error) <= 1e-12


def test_fine_mesh_reference_converges_with_refinement():
    pre = get_preset("traffic-riemann")
    rare = replace(pre, datum=PiecewiseConstant((0.0,), (1.0, 0.0)))
    grid = build_grid(-2.0, 2.0, 50)

    def reference(factor):
        plan = small_riemann_plan(
            scenario=rare,
            reference=ReferenceSpec("fine-mesh-godunov-local", refinement_factor=factor),
        )
        from nlclab.experiments import _ReferenceCache

        return _ReferenceCache(plan).entropy_field(grid)

    r4, r8, r16 = (reference(k) for k in (4, 8, 16))
    d_coarse = distance("l1", r4, r8)
    d_fine = distance("l1", r8, r16)
    assert d_fine < d_coarse


def test_viscous_epsilon_limit_constant_velocity_coincides():
    # with V constant the convolved velocity equals the local one, so the
    # nonlocal and local runs agree to the last bit and all distances vanish
    pre = get_preset("viscous-compare")
    scenario = replace(pre, velocity=affine_velocity(0.7, 0.0, (0.0, 1.0)))
    plan = SweepPlan(
        scenario=scenario,
        sweep_variable="nu",
        values=(0.2, 0.1),
        mesh_rule=MeshRule("fixed-h", h=0.05),
        schemes=(SchemeSpec(Locality.NONLOCAL, SchemeKind.GODUNOV, nu=0.05),),
        reference=ReferenceSpec("viscous-local-same-h"),
        t_eval=0.25,
        record_count=9,
        mode=MODE_EPSILON_LIMIT_VISCOUS,
    )
    res = run_nu_sweep(plan)
    for row in res.rows:
        assert row.l1_error == 0.0
        assert row.l2_error == 0.0
        assert row.sup_error == 0.0


def test_viscosity_limit_nonlocal_zero_nu_row_is_exact_zero():
    pre = get_preset("traffic-riemann")
    plan = SweepPlan(
        scenario=pre,
        sweep_variable="nu",
        values=(0.05, 0.0),
        mesh_rule=MeshRule("fixed-h", h=0.05),
        schemes=(GOD_NL,),
        reference=ReferenceSpec("inviscid-nonlocal-same-h"),
        t_eval=0.25,
        mode=MODE_VISCOSITY_LIMIT_NONLOCAL,
        fixed_epsilon=0.2,
    )
    res = run_nu_sweep(plan)
    zero_row = [r for r in res.rows if r.nu == 0.0][0]
    assert zero_row.l1_error == 0.0
    assert zero_row.sup_error == 0.0
    other = [r for r in res.rows if r.nu == 0.05][0]
    assert other.l1_error > 0.0


def test_viscosity_limit_local_records_finite_positive_distances():
    pre = get_preset("traffic-riemann")
    rare = replace(pre, datum=PiecewiseConstant((0.0,), (1.0, 0.0)))
    plan = SweepPlan(
        scenario=rare,
        sweep_variable="nu",
        values=(0.1, 0.05, 0.025),
        mesh_rule=MeshRule("fixed-h", h=0.02),
        schemes=(GOD_L,),
        reference=ReferenceSpec("exact-riemann"),
        t_eval=0.5,
        mode=MODE_VISCOSITY_LIMIT_LOCAL,
    )
    res = run_nu_sweep(plan)
    assert len(res.rows) == 3
    for row in res.rows:
        assert row.status == "ok"
        assert math.isfinite(row.l1_error) and row.l1_error > 0


def test_exact_riemann_reference_requires_step_datum():
    pre = get_preset("traffic-oscillatory")
    plan = small_riemann_plan(scenario=replace(pre, boundary=pre.boundary))
    with pytest.raises(ValueError):
        run_epsilon_sweep(plan)


def test_domain_margin_warning():
    pre = get_preset("traffic-riemann")
    plan = small_riemann_plan(t_eval=4.0)  # waves reach the boundary
    with pytest.warns(RuntimeWarning, match="domain margin"):
        run_epsilon_sweep(plan)
