"""Uniform 1-D finite-volume grid, cell-averaged fields, and initial data.

Cell j of a grid over [x_min, x_max] with n uniform cells spans
[edge(j), edge(j+1)] and carries a cell average.  Ghost values, where a
stencil reaches past the domain, come from a :class:`BoundaryRule`:
periodic wrap-around or constant extension of the nearest interior cell.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence, Union

import numpy as np


class BoundaryRule(enum.Enum):
    """Ghost-cell policy at the two domain ends."""

    PERIODIC = "periodic"
    CONSTANT_EXTENSION = "constant-extension"


@dataclass(frozen=True)
class Grid1D:
    """Uniform grid on [x_min, x_max] with n_cells cells of width h."""

    x_min: float
    x_max: float
    n_cells: int

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x_min) and math.isfinite(self.x_max)):
            raise ValueError("grid bounds must be finite")
        if not self.x_min < self.x_max:
            raise ValueError("x_min must lie strictly below x_max")
        if int(self.n_cells) != self.n_cells or self.n_cells < 4:
            raise ValueError("n_cells must be an integer >= 4")

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / self.n_cells

    def edges(self) -> np.ndarray:
        # Affine combination of the two bounds keeps interior edges exact:
        # on [-2, 2] the midpoint edge is bitwise 0.0, which step data rely on.
        j = np.arange(self.n_cells + 1, dtype=float)
        n = float(self.n_cells)
        return (self.x_min * (n - j) + self.x_max * j) / n

    def centers(self) -> np.ndarray:
        j = np.arange(self.n_cells, dtype=float)
        return self.x_min + (j + 0.5) * self.h


def build_grid(x_min: float, x_max: float, n_cells: int) -> Grid1D:
    """Construct a uniform grid; rejects non-finite bounds and n_cells < 4."""
    return Grid1D(x_min, x_max, n_cells)


@dataclass(frozen=True)
class CellField:
    """Immutable snapshot of cell averages on a grid."""

    grid: Grid1D
    values: np.ndarray

    def __post_init__(self) -> None:
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.grid.n_cells,):
            raise ValueError(
                f"expected {self.grid.n_cells} cell values, got shape {vals.shape}"
            )
        if not np.all(np.isfinite(vals)):
            raise ValueError("cell values must be finite")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __eq__(self, other) -> bool:  # value equality, used by tests
        return (
            isinstance(other, CellField)
            and self.grid == other.grid
            and np.array_equal(self.values, other.values)
        )


def extended_values(
    values: np.ndarray, lo: int, hi: int, boundary: BoundaryRule
) -> np.ndarray:
    """Return values for cell indices lo..hi inclusive, ghosts per boundary rule.

    Index-gather implementation so stencils wider than the grid still work.
    """
    n = len(values)
    idx = np.arange(lo, hi + 1)
    if boundary is BoundaryRule.PERIODIC:
        return values[idx % n]
    return values[np.clip(idx, 0, n - 1)]


# --- initial data ---------------------------------------------------------


@dataclass(frozen=True)
class PiecewiseConstant:
    """Piecewise-constant profile: values[i] holds between breakpoints i-1 and i.

    values must have exactly one more entry than breakpoints; values[0] holds
    left of the first breakpoint and values[-1] right of the last one.
    """

    breakpoints: tuple[float, ...]
    values: tuple[float, ...]
    description: str = "piecewise-constant"

    def __post_init__(self) -> None:
        bp = tuple(float(b) for b in self.breakpoints)
        vals = tuple(float(v) for v in self.values)
        if len(vals) != len(bp) + 1:
            raise ValueError("need exactly len(breakpoints)+1 values")
        if any(not math.isfinite(b) for b in bp) or any(
            not math.isfinite(v) for v in vals
        ):
            raise ValueError("breakpoints and values must be finite")
        if any(b2 <= b1 for b1, b2 in zip(bp, bp[1:])):
            raise ValueError("breakpoints must be strictly increasing")
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class SmoothProfile:
    """Profile given by a callable; projected by midpoint quadrature."""

    profile: Callable[[np.ndarray], np.ndarray]
    description: str = "smooth-closure"


@dataclass(frozen=True)
class SquareWave:
    """Square wave with the given period, alternating high/low, phase anchored at x=0.

    u(x) = high on [k*period, k*period + period/2) for every integer k, low elsewhere.
    """

    period: float
    low: float
    high: float
    description: str = "oscillatory-square-wave"

    def __post_init__(self) -> None:
        if not (math.isfinite(self.period) and self.period > 0):
            raise ValueError("period must be positive and finite")

    def as_piecewise(self, x_min: float, x_max: float) -> PiecewiseConstant:
        half = self.period / 2.0
        k0 = math.floor(x_min / half)
        k1 = math.ceil(x_max / half)
        breaks = [k * half for k in range(k0 + 1, k1)]
        breaks = [b for b in breaks if x_min < b < x_max]

        def level(k: int) -> float:
            return self.high if k % 2 == 0 else self.low

        segvals = [level(k0)] + [
            level(math.floor(b / half + 0.5)) for b in breaks
        ]
        return PiecewiseConstant(tuple(breaks), tuple(segvals))


InitialDatum = Union[PiecewiseConstant, SmoothProfile, SquareWave]


def _project_piecewise(grid: Grid1D, datum: PiecewiseConstant) -> np.ndarray:
    edges = grid.edges()
    h = grid.h
    n = grid.n_cells
    acc = np.zeros(n)

    bp = datum.breakpoints
    segments = []
    lows = (grid.x_min,) + bp
    highs = bp + (grid.x_max,)
    for lo, hi, val in zip(lows, highs, datum.values):
        lo = max(lo, grid.x_min)
        hi = min(hi, grid.x_max)
        if hi > lo:
            segments.append((lo, hi, val))

    for lo, hi, val in segments:
        i0 = int(np.searchsorted(edges, lo, side="right")) - 1
        i1 = int(np.searchsorted(edges, hi, side="left")) - 1
        i0 = min(max(i0, 0), n - 1)
        i1 = min(max(i1, 0), n - 1)
        if i0 == i1:
            acc[i0] += (hi - lo) * val
        else:
            # covered cells contribute exactly h*val so that cells wholly
            # inside one segment reproduce its value to the last bit; partial
            # contributions apply only when the segment end is strictly inside
            acc[i0] += (h if lo <= edges[i0] else edges[i0 + 1] - lo) * val
            acc[i1] += (h if hi >= edges[i1 + 1] else hi - edges[i1]) * val
            acc[i0 + 1 : i1] += h * val

    out = acc / h
    # guard the range invariant against edge-coordinate rounding
    vmin = min(datum.values)
    vmax = max(datum.values)
    return np.clip(out, vmin, vmax)


def _project_smooth(grid: Grid1D, datum: SmoothProfile, subsamples: int) -> np.ndarray:
    edges = grid.edges()[: grid.n_cells]
    step = grid.h / subsamples
    offsets = (np.arange(subsamples) + 0.5) * step
    xs = edges[:, None] + offsets[None, :]
    vals = np.asarray(datum.profile(xs), dtype=float)
    if vals.shape != xs.shape:
        vals = np.broadcast_to(vals, xs.shape)
    if not np.all(np.isfinite(vals)):
        raise ValueError("initial profile returned a non-finite value")
    return vals.mean(axis=1)


def init_cell_averages(grid: Grid1D, datum: InitialDatum, subsamples: int = 8) -> CellField:
    """Project an initial profile onto cell averages.

    Piecewise-constant data (and square waves, which reduce to them) are
    integrated by exact interval overlap; smooth closures use composite
    midpoint quadrature with `subsamples` points per cell.
    """
    if isinstance(datum, SquareWave):
        datum = datum.as_piecewise(grid.x_min, grid.x_max)
    if isinstance(datum, PiecewiseConstant):
        return CellField(grid, _project_piecewise(grid, datum))
    if isinstance(datum, SmoothProfile):
        return CellField(grid, _project_smooth(grid, datum, subsamples))
    raise TypeError(f"unsupported initial datum: {datum!r}")
