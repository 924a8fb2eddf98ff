"""Measurable functionals: distances, total variation, half-line mass, range.

These are the quantities whose behaviour along parameter sweeps separates
converging from non-converging regimes: Lp distances to a reference,
discrete total variation (the cell-average proxy for TotVar), the mass on a
half line (constant in time for anisotropic-kernel dynamics), and the
support edge.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .grid import CellField
from .timeloop import RunRecord

SUPPORT_THRESHOLD_FACTOR = 1e-10


@dataclass(frozen=True)
class FieldStats:
    min: float
    max: float
    total_mass: float
    tv: float
    support_right_edge: float | None


def total_variation(field: CellField, periodic: bool = False) -> float:
    """Sum of absolute jumps between neighbouring cells.

    With periodic=True the wrap-around jump |u_0 - u_{n-1}| is included.
    """
    vals = field.values
    tv = float(np.abs(np.diff(vals)).sum())
    if periodic and len(vals) > 1:
        tv += abs(float(vals[0]) - float(vals[-1]))
    return tv


def total_mass(field: CellField) -> float:
    return field.grid.h * float(field.values.sum())


def half_line_mass(field: CellField, x0: float) -> float:
    """h * sum of cell averages with centers left of x0.

    x0 is snapped to the nearest cell edge (with a warning if the snap is
    more than rounding-level), so the result is an exact partial mass.
    """
    grid = field.grid
    h = grid.h
    i = int(round((x0 - grid.x_min) / h))
    i = min(max(i, 0), grid.n_cells)
    edge = grid.edges()[i]
    if abs(edge - x0) > 1e-9 * max(h, 1.0):
        warnings.warn(
            f"half-line cut x0={x0:g} snapped to the nearest cell edge {edge:g}",
            RuntimeWarning,
            stacklevel=2,
        )
    return h * float(field.values[:i].sum())


def weighted_mass(field: CellField, weight) -> float:
    """h * sum of weight(center_j) * u_j; hook for user-defined functionals."""
    w = np.asarray(weight(field.grid.centers()), dtype=float)
    return field.grid.h * float((w * field.values).sum())


def support_right_edge(field: CellField) -> float | None:
    vals = np.abs(field.values)
    peak = float(vals.max())
    if peak == 0.0:
        return None
    idx = np.nonzero(vals > SUPPORT_THRESHOLD_FACTOR * peak)[0]
    if idx.size == 0:
        return None
    return float(field.grid.centers()[idx[-1]])


def field_stats(field: CellField, periodic: bool = False) -> FieldStats:
    vals = field.values
    return FieldStats(
        min=float(vals.min()),
        max=float(vals.max()),
        total_mass=total_mass(field),
        tv=total_variation(field, periodic=periodic),
        support_right_edge=support_right_edge(field),
    )


def _require_same_grid(a: CellField, b: CellField) -> None:
    if a.grid != b.grid:
        raise ValueError("fields live on different grids")


def distance(metric: str, a, b) -> float:
    """Distance between two fields (l1, l2, sup) or two runs (l2-spacetime).

    l1   = h * sum |a_j - b_j|
    l2   = sqrt(h * sum (a_j - b_j)^2)
    sup  = max |a_j - b_j|
    l2-spacetime = sqrt( sum_t w_t * h * sum_j (a - b)^2 ) with trapezoid
    weights w_t over the shared record times of two RunRecords.
    """
    if metric == "l2-spacetime":
        if not (isinstance(a, RunRecord) and isinstance(b, RunRecord)):
            raise ValueError("l2-spacetime expects two run records")
        return _spacetime_l2(a, b)
    if not (isinstance(a, CellField) and isinstance(b, CellField)):
        raise ValueError(f"metric {metric!r} expects two cell fields")
    _require_same_grid(a, b)
    diff = a.values - b.values
    h = a.grid.h
    if metric == "l1":
        return h * float(np.abs(diff).sum())
    if metric == "l2":
        return math.sqrt(h * float((diff * diff).sum()))
    if metric == "sup":
        return float(np.abs(diff).max())
    raise ValueError(f"unknown metric {metric!r}")


def _spacetime_l2(a: RunRecord, b: RunRecord) -> float:
    ta = np.asarray(a.times)
    tb = np.asarray(b.times)
    if ta.shape != tb.shape or np.max(np.abs(ta - tb)) > 1e-12 * max(1.0, ta[-1]):
        raise ValueError("run records must share their record times")
    if len(ta) < 2:
        raise ValueError("need at least two record times for a time integral")
    _require_same_grid(a.snapshots[0], b.snapshots[0])
    h = a.snapshots[0].grid.h

    weights = np.empty(len(ta))
    weights[0] = (ta[1] - ta[0]) / 2.0
    weights[-1] = (ta[-1] - ta[-2]) / 2.0
    if len(ta) > 2:
        weights[1:-1] = (ta[2:] - ta[:-2]) / 2.0

    total = 0.0
    for w, fa, fb in zip(weights, a.snapshots, b.snapshots):
        diff = fa.values - fb.values
        total += w * h * float((diff * diff).sum())
    return math.sqrt(total)
