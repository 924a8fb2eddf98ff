"""Command-line surface: run, sweep, presets.

Exit codes: 0 on success, 1 on configuration errors, 2 when a (non-sweep)
run hits a numerical instability.  Sweeps record unstable points as failed
rows instead of aborting.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import (
    ConfigError,
    RunConfig,
    KernelConfig,
    SchemeConfig,
    parse_config,
    resolve_run,
    resolve_sweep,
)
from .csvio import write_results_csv, write_snapshots_csv
from .experiments import EPSILON_SWEEP, run_epsilon_sweep, run_nu_sweep
from .grid import build_grid, init_cell_averages
from .kernels import kernel_weights
from .models import get_preset, preset_names
from .schemes import SchemeInstabilityError
from .timeloop import evolve, uniform_record_times


def _load_config(args) -> RunConfig:
    if args.config is not None:
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        cfg = parse_config(text)
    else:
        cfg = parse_config("")

    # flag overrides
    if getattr(args, "preset", None) is not None:
        if args.preset not in preset_names():
            raise ConfigError(
                f"--preset: unknown preset {args.preset!r}; available: "
                f"{', '.join(preset_names())}"
            )
        cfg = _replace(cfg, preset=args.preset)
    if getattr(args, "epsilon", None) is not None:
        if args.epsilon <= 0:
            raise ConfigError("--epsilon: must be > 0")
        cfg = _replace(
            cfg,
            kernel=KernelConfig(cfg.kernel.profile, args.epsilon, cfg.kernel.alignment),
        )
    if getattr(args, "nu", None) is not None:
        if args.nu < 0:
            raise ConfigError("--nu: must be >= 0")
        cfg = _replace(
            cfg,
            scheme=SchemeConfig(
                cfg.scheme.locality, cfg.scheme.kind, args.nu, cfg.scheme.cfl
            ),
        )
    if getattr(args, "out", None) is not None:
        cfg = _replace(cfg, out=args.out)
    if getattr(args, "threads", None) is not None:
        if args.threads < 1:
            raise ConfigError("--threads: must be >= 1")
        cfg = _replace(cfg, threads=args.threads)
    if getattr(args, "timings", False):
        cfg = _replace(cfg, timings=True)
    return cfg


def _replace(cfg: RunConfig, **kwargs) -> RunConfig:
    from dataclasses import replace

    return replace(cfg, **kwargs)


def _cmd_run(args) -> int:
    cfg = _load_config(args)
    setup = resolve_run(cfg)
    scenario = setup.scenario

    t_final = args.t_final if args.t_final is not None else setup.t_final
    if t_final <= 0:
        raise ConfigError("--t-final: must be > 0")
    record_count = args.record if args.record is not None else setup.record_count
    if record_count < 2:
        raise ConfigError("--record: must be >= 2")

    grid = build_grid(scenario.x_min, scenario.x_max, scenario.n_cells)
    initial = init_cell_averages(grid, scenario.datum)
    kernel = None
    if setup.spec.is_nonlocal:
        kernel = kernel_weights(
            scenario.kernel_profile, setup.epsilon, grid, setup.alignment
        )
    record = evolve(
        initial,
        setup.spec,
        scenario.velocity,
        kernel,
        scenario.boundary,
        t_final,
        record_times=uniform_record_times(t_final, record_count),
    )
    out = cfg.out or "snapshots.csv"
    write_snapshots_csv(record, out)
    final = record.final.values
    print(
        f"{scenario.name}: {setup.spec.label} to t={t_final:g} in "
        f"{record.step_count} steps; range [{final.min():.6g}, {final.max():.6g}]; "
        f"wrote {out}"
    )
    return 0


def _cmd_sweep(args) -> int:
    cfg = _load_config(args)
    plan = resolve_sweep(cfg)
    if plan.sweep_variable == EPSILON_SWEEP:
        result = run_epsilon_sweep(plan, threads=cfg.threads, timings=cfg.timings)
    else:
        result = run_nu_sweep(plan, threads=cfg.threads, timings=cfg.timings)
    out = cfg.out or "sweep.csv"
    write_results_csv(result, out)
    failed = sum(1 for row in result.rows if row.status != "ok")
    note = f" ({failed} unstable)" if failed else ""
    print(f"wrote {len(result.rows)} rows{note} to {out}")
    return 0


def _cmd_presets(_args) -> int:
    for name in preset_names():
        preset = get_preset(name)
        print(
            f"{name}: {preset.description} "
            f"[domain [{preset.x_min:g}, {preset.x_max:g}], "
            f"n_cells {preset.n_cells}, T {preset.t_final:g}, "
            f"kernel {preset.kernel_profile.value}, "
            f"boundary {preset.boundary.value}]"
        )
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nlclab",
        description="finite-volume laboratory for 1-D nonlocal conservation laws",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="single simulation; writes a t,x,u CSV")
    run_p.add_argument("--config", help="configuration file")
    run_p.add_argument("--preset", help="scenario preset name")
    run_p.add_argument("--epsilon", type=float, help="kernel length scale")
    run_p.add_argument("--nu", type=float, help="viscosity coefficient")
    run_p.add_argument("--out", help="output CSV path (default snapshots.csv)")
    run_p.add_argument("--t-final", type=float, dest="t_final", help="final time")
    run_p.add_argument("--record", type=int, help="number of recorded times")
    run_p.set_defaults(func=_cmd_run)

    sweep_p = sub.add_parser("sweep", help="parameter sweep; writes the results CSV")
    sweep_p.add_argument("--config", help="configuration file")
    sweep_p.add_argument("--preset", help="scenario preset name")
    sweep_p.add_argument("--epsilon", type=float, help="kernel length scale")
    sweep_p.add_argument("--nu", type=float, help="viscosity coefficient")
    sweep_p.add_argument("--out", help="output CSV path (default sweep.csv)")
    sweep_p.add_argument("--threads", type=int, help="parallel parameter points")
    sweep_p.add_argument(
        "--timings",
        action="store_true",
        help="record wall times in runtime_s (breaks byte-identical re-runs)",
    )
    sweep_p.set_defaults(func=_cmd_sweep)

    presets_p = sub.add_parser("presets", help="list scenario presets")
    presets_p.set_defaults(func=_cmd_presets)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except SchemeInstabilityError as exc:
        print(f"numerical instability: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
