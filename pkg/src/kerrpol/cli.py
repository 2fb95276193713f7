"""Command-line interface.

Subcommands: point, sweep, fig1, seed-scan, selftest.
Exit codes: 0 success, 1 domain or config error, 2 internal invariant failure.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from importlib import resources

from .config import load_config, parse_config
from .errors import ConfigError, KerrPolError, SchemaError
from .selftest import report, run_selftest
from .sweep import ENGINES, PointConfig, SweepConfig, SweepTable, _metadata, evaluate_point, run_sweep, seed_scan
from .tables import FORMATS, emit_table

EXIT_OK, EXIT_DOMAIN, EXIT_INTERNAL = 0, 1, 2
PANELS = ("a", "b", "c", "d")
RECONSTRUCTION_NOTE = (
    "panel parameters reconstructed to match the published panel shapes "
    "(gamma_h = 3 gamma, real amplitudes); not published values"
)


def _load(args, expected):
    config = load_config(args.config)
    if args.engine:
        config = replace(config, engine=args.engine)
    if not isinstance(config, expected):
        kind = "a [grid] section" if expected is SweepConfig else "no [grid] section"
        raise SchemaError(f"{args.command} needs a config with {kind}", key="grid")
    return config


def load_fig1_panel(panel: str, engine: str | None = None) -> SweepConfig:
    text = resources.files("kerrpol.fixtures").joinpath(f"fig1_{panel}.toml").read_text(encoding="utf-8")
    config = parse_config(text)
    return replace(config, engine=engine) if engine else config


def fig1_table(panel: str, engine: str | None = None, fixed_metadata: bool = False) -> SweepTable:
    table = run_sweep(load_fig1_panel(panel, engine), fixed_metadata=fixed_metadata)
    table.metadata.update(kind="fig1", panel=panel, reconstruction=RECONSTRUCTION_NOTE)
    return table


def cmd_point(args) -> int:
    config: PointConfig = _load(args, PointConfig)
    cells, status = evaluate_point(config.fixed, config.engine, config.outputs, config.cutoff)
    table = SweepTable(
        schema=[*config.outputs, "status"],
        rows=[{**cells, "status": status}],
        metadata=_metadata("point", config.engine, config.fixed, args.fixed_metadata),
    )
    emit_table(table, args.format, args.out)
    return EXIT_OK


def cmd_sweep(args) -> int:
    emit_table(run_sweep(_load(args, SweepConfig), fixed_metadata=args.fixed_metadata), args.format, args.out)
    return EXIT_OK


def cmd_seed_scan(args) -> int:
    config: SweepConfig = _load(args, SweepConfig)
    if config.axis != "seed_ratio":
        raise SchemaError("seed-scan needs axis = \"seed_ratio\"", key="grid.axis")
    table = seed_scan(config.fixed, config.grid, engine=config.engine, power_mode=config.power_mode or "total",
                      cutoff=config.cutoff, fixed_metadata=args.fixed_metadata)
    emit_table(table, args.format, args.out)
    return EXIT_OK


def cmd_fig1(args) -> int:
    panels = PANELS if args.panel == "all" else (args.panel,)
    if args.panel == "all" and args.out:
        os.makedirs(args.out, exist_ok=True)
    for panel in panels:
        table = fig1_table(panel, args.engine, args.fixed_metadata)
        out = args.out
        if args.panel == "all" and out:
            out = os.path.join(out, f"fig1_{panel}.{args.format}")
        emit_table(table, args.format, out)
    return EXIT_OK


def cmd_selftest(args) -> int:
    checks = run_selftest()
    print(report(checks))
    return EXIT_OK if all(c.passed for c in checks) else EXIT_INTERNAL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=FORMATS, default="csv")
    common.add_argument("--engine", choices=ENGINES, help="override the config's engine")
    common.add_argument("--fixed-metadata", action="store_true",
                        help="fixed timestamp, for byte-identical outputs")

    parser = argparse.ArgumentParser(prog="kerrpol", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, func, helptext in (
        ("point", cmd_point, "evaluate one parameter point"),
        ("sweep", cmd_sweep, "run a one-dimensional parameter sweep"),
        ("seed-scan", cmd_seed_scan, "optimal compression versus seed ratio"),
    ):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--config", required=True, help="TOML config file")
        p.set_defaults(func=func)
    p = sub.add_parser("fig1", parents=[common], help="regenerate the reconstructed Fig. 1 panels")
    p.add_argument("--panel", choices=(*PANELS, "all"), default="all")
    p.set_defaults(func=cmd_fig1)
    p = sub.add_parser("selftest", help="run the invariant suites at small scale")
    p.set_defaults(func=cmd_selftest)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except BrokenPipeError:
        # reader went away (e.g. `| head`); keep the interpreter's final flush quiet
        try:
            os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        except (OSError, ValueError):
            pass
        return EXIT_OK
    except (KerrPolError, ConfigError) as err:
        print(f"kerrpol: error: {err}", file=sys.stderr)
        return EXIT_DOMAIN
    except Exception as err:  # noqa: BLE001
        print(f"kerrpol: internal error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
