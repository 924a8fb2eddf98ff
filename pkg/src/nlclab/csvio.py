"""CSV persistence for sweep results and run snapshots.

Numbers are written with ``repr`` so every float round-trips exactly; the
writers are deterministic, so re-running an identical configuration yields
a byte-identical file.
"""

from __future__ import annotations

import math
from pathlib import Path

from .experiments import NU_SWEEP, SweepResult
from .timeloop import RunRecord

RESULTS_HEADER = (
    "epsilon,nu,h,n_cells,scheme,l1_error,l2_error,sup_error,"
    "tv,half_line_mass,min,max,runtime_s,status"
)

SNAPSHOT_HEADER = "t,x,u"


def _num(x: float) -> str:
    return repr(float(x))


def write_results_csv(result: SweepResult, path: str | Path) -> None:
    """One row per (parameter value, scheme), sorted by descending sweep
    value then scheme label."""

    def sort_key(row):
        value = row.nu if result.sweep_variable == NU_SWEEP else row.epsilon
        if math.isnan(value):
            value = -math.inf
        return (-value, row.scheme)

    lines = [RESULTS_HEADER]
    for row in sorted(result.rows, key=sort_key):
        lines.append(
            ",".join(
                (
                    _num(row.epsilon),
                    _num(row.nu),
                    _num(row.h),
                    str(row.n_cells),
                    row.scheme,
                    _num(row.l1_error),
                    _num(row.l2_error),
                    _num(row.sup_error),
                    _num(row.tv),
                    _num(row.half_line_mass),
                    _num(row.min),
                    _num(row.max),
                    _num(row.runtime_s),
                    row.status,
                )
            )
        )
    _write_lines(path, lines)


def write_snapshots_csv(record: RunRecord, path: str | Path) -> None:
    """Long-form snapshot table: one (t, x, u) row per recorded time and cell."""
    lines = [SNAPSHOT_HEADER]
    for t, snap in zip(record.times, record.snapshots):
        centers = snap.grid.centers()
        for x, u in zip(centers, snap.values):
            lines.append(f"{_num(t)},{_num(x)},{_num(u)}")
    _write_lines(path, lines)


def _write_lines(path: str | Path, lines: list[str]) -> None:
    path = Path(path)
    try:
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot write results to {path}: {exc}") from exc
