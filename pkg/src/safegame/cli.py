"""Command-line entry point: ``safegame <command> --config FILE``.

Exit status is 0 when every check of the run passes, 1 when a check fails
and 2 for a bad config or arguments.
"""

from __future__ import annotations

import argparse
import configparser
import sys
from pathlib import Path

from . import driving_sim, experiments
from .experiments import ConfigError

COMMANDS = {
    "trajectory": "trajectory",
    "risk-map": "risk_map",
    "pareto": "pareto",
    "robustness": "robustness",
    "policy": "policy_report",
}


def _common(p: argparse.ArgumentParser, config_required: bool = True) -> None:
    p.add_argument("--config", type=Path, required=config_required, help="INI config file")
    p.add_argument("--out", type=Path, default=None, help="output directory")
    p.add_argument("--seed", type=int, default=None, help="base seed (overrides the config)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="safegame",
                                 description="Risk-constrained AV/human mixed traffic games")
    sub = ap.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        _common(sub.add_parser(name, help=f"run a {name} experiment"))
    g = sub.add_parser("gen-table", help="estimate a reward/risk table with the driving sim")
    _common(g, config_required=False)
    g.add_argument("--preset", default=None, choices=sorted(driving_sim.TABLE3_PRESETS),
                   help="driving scenario preset (default: [driving] preset in the config)")
    g.add_argument("--episodes", type=int, default=None, help="episodes per cell")
    return ap


def _driving_params(args) -> tuple[driving_sim.ScenarioParams, str, int, int]:
    section = {}
    if args.config is not None:
        parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
        if not parser.read(args.config):
            raise ConfigError(f"cannot read config file {args.config}")
        if parser.has_section("driving"):
            section = dict(parser["driving"])
    preset = args.preset or section.pop("preset", None)
    section.pop("preset", None)
    if preset is None:
        raise ConfigError("gen-table needs --preset or [driving] preset = <name>")
    if preset not in driving_sim.TABLE3_PRESETS:
        raise ConfigError(f"unknown driving preset {preset!r}")
    episodes = args.episodes or int(section.pop("episodes", 10_000))
    seed = args.seed if args.seed is not None else int(section.pop("seed", 0))
    section.pop("episodes", None)
    section.pop("seed", None)
    base = driving_sim.TABLE3_PRESETS[preset]
    fields = base.as_dict()
    overrides = {}
    for key, value in section.items():
        if key not in fields:
            raise ConfigError(f"[driving] unknown parameter {key!r}")
        overrides[key] = type(fields[key])(float(value))
    try:
        params = driving_sim.with_overrides(base, **overrides)
    except driving_sim.ParameterError as exc:
        raise ConfigError(str(exc)) from None
    if episodes < 1:
        raise ConfigError("episodes must be >= 1")
    return params, preset, episodes, seed


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "gen-table":
            params, preset, episodes, seed = _driving_params(args)
            report = experiments.gen_table(params, episodes, seed,
                                           args.out or Path("results") / "gen_table", preset)
        else:
            cfg = experiments.load_config(args.config, seed=args.seed, out=args.out)
            kind = COMMANDS[args.command]
            if cfg.out is None:
                cfg.out = Path("results") / kind
            cfg.kind = kind
            experiments.validate_config(cfg)
            report = experiments.run(cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    for path in report.files:
        print(f"wrote {path}")
    for name, ok in report.checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {name}")
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
