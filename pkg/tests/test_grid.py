import numpy as np
import pytest

from nlclab import (
    BoundaryRule,
    CellField,
    PiecewiseConstant,
    SmoothProfile,
    SquareWave,
    build_grid,
    init_cell_averages,
)
from nlclab.grid import extended_values


def project_by_sampling(grid, profile, samples_per_cell=20000):
    """Independent projection oracle: dense midpoint Riemann sums per cell."""
    edges = grid.edges()
    out = np.empty(grid.n_cells)
    for j in range(grid.n_cells):
        xs = np.linspace(edges[j], edges[j + 1], samples_per_cell, endpoint=False)
        xs = xs + (edges[j + 1] - edges[j]) / (2 * samples_per_cell)
        out[j] = np.mean(profile(xs))
    return out


def test_build_grid_h():
    assert build_grid(0.0, 1.0, 10).h == pytest.approx(0.1, abs=0)
    assert build_grid(-2.0, 2.0, 4000).h == 0.001


def test_build_grid_rejects_bad_input():
    with pytest.raises(ValueError):
        build_grid(0.0, 1.0, 3)
    with pytest.raises(ValueError):
        build_grid(1.0, 0.0, 10)
    with pytest.raises(ValueError):
        build_grid(0.0, float("inf"), 10)


def test_edges_exact_at_symmetric_midpoint():
    g = build_grid(-2.0, 2.0, 1000)
    assert g.edges()[500] == 0.0


def test_cell_centers():
    g = build_grid(0.0, 1.0, 4)
    assert np.allclose(g.centers(), [0.125, 0.375, 0.625, 0.875], atol=0, rtol=0)


def test_projection_constant():
    g = build_grid(0.0, 1.0, 7)
    f = init_cell_averages(g, PiecewiseConstant((), (0.5,)))
    assert np.all(f.values == 0.5)


def test_projection_aligned_step():
    g = build_grid(0.0, 1.0, 4)
    f = init_cell_averages(g, PiecewiseConstant((0.5,), (1.0, 0.0)))
    assert f.values.tolist() == [1.0, 1.0, 0.0, 0.0]


def test_projection_partial_overlap():
    # overlap of cell [0.5, 0.75] with support [0, 0.55] is 0.05 -> 0.05/0.25
    g = build_grid(0.0, 1.0, 4)
    f = init_cell_averages(g, PiecewiseConstant((0.55,), (1.0, 0.0)))
    assert f.values == pytest.approx([1.0, 1.0, 0.2, 0.0], abs=1e-14)
    oracle = project_by_sampling(g, lambda x: (x <= 0.55).astype(float))
    assert f.values == pytest.approx(oracle, abs=1e-4)


def test_projection_breakpoint_outside_domain_is_clipped():
    g = build_grid(0.0, 1.0, 4)
    f = init_cell_averages(g, PiecewiseConstant((-3.0, 2.0), (7.0, 1.0, 7.0)))
    assert np.all(f.values == 1.0)


def test_projection_preserves_range_and_mass():
    rng = np.random.default_rng(7)
    for _ in range(20):
        n = int(rng.integers(4, 40))
        g = build_grid(-1.0, 2.0, n)
        m = int(rng.integers(1, 6))
        bps = np.sort(rng.uniform(-1.5, 2.5, size=m))
        bps = np.unique(bps)
        vals = rng.uniform(-2.0, 2.0, size=len(bps) + 1)
        datum = PiecewiseConstant(tuple(bps), tuple(vals))
        f = init_cell_averages(g, datum)
        assert f.values.min() >= vals.min() - 0.0
        assert f.values.max() <= vals.max() + 0.0
        # mass equals the exact integral of the clipped profile
        exact = 0.0
        lows = [-1.0] + [max(b, -1.0) for b in bps]
        highs = [min(b, 2.0) for b in bps] + [2.0]
        for lo, hi, v in zip(lows, highs, vals):
            exact += max(hi - lo, 0.0) * v
        assert abs(f.values.sum() * g.h - exact) <= 1e-12 * n


def test_projection_smooth_midpoint_rule():
    g = build_grid(0.0, 1.0, 8)
    f = init_cell_averages(g, SmoothProfile(np.sin))
    oracle = project_by_sampling(g, np.sin)
    # midpoint x8 is second order per cell; h=0.125
    assert f.values == pytest.approx(oracle, abs=1e-5)


def test_projection_smooth_rejects_nan():
    g = build_grid(0.0, 1.0, 4)

    def bad(x):
        return np.where(x > 0.5, np.nan, 1.0)

    with pytest.raises(ValueError):
        init_cell_averages(g, SmoothProfile(bad))


def test_square_wave_projection():
    g = build_grid(0.0, 1.0, 8)
    f = init_cell_averages(g, SquareWave(0.25, 0.0, 1.0))
    assert f.values.tolist() == [1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]


def test_square_wave_phase_anchored_at_origin():
    g = build_grid(-0.25, 0.25, 4)
    f = init_cell_averages(g, SquareWave(0.5, 0.0, 1.0))
    # [-0.25, 0) is the odd half-period (low), [0, 0.25) the even one (high)
    assert f.values.tolist() == [0.0, 0.0, 1.0, 1.0]


def test_cell_field_validation():
    g = build_grid(0.0, 1.0, 4)
    with pytest.raises(ValueError):
        CellField(g, np.array([1.0, 2.0]))
    with pytest.raises(ValueError):
        CellField(g, np.array([1.0, np.nan, 0.0, 0.0]))


def test_cell_field_values_are_frozen():
    g = build_grid(0.0, 1.0, 4)
    f = CellField(g, np.zeros(4))
    with pytest.raises(ValueError):
        f.values[0] = 1.0


def test_extended_values_constant_extension():
    vals = np.array([1.0, 2.0, 3.0])
    out = extended_values(vals, -2, 4, BoundaryRule.CONSTANT_EXTENSION)
    assert out.tolist() == [1.0, 1.0, 1.0, 2.0, 3.0, 3.0, 3.0]


def test_extended_values_periodic_wraps_beyond_length():
    vals = np.array([1.0, 2.0, 3.0])
    out = extended_values(vals, -4, 4, BoundaryRule.PERIODIC)
    assert out.tolist() == [3.0, 1.0, 2.0, 3.0, 1.0, 2.0, 3.0, 1.0, 2.0]
