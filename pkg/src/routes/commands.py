from __future__ import annotations

import argparse
import logging
from typing import Optional

from src.config.experiment import ExperimentConfig, build_config, load_config
from src.config.presets import ALIASES, DESCRIPTIONS, PRESETS, preset, preset_names
from src.middleware.errors import ConfigError, handle_command_errors
from src.routes import experiments
from src.routes.verify import run_checks

logger = logging.getLogger(__name__)

# ============================================================================
# CONFIG RESOLUTION
# ============================================================================


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Preset, then config file, then command-line overrides."""
    if args.preset is None and args.config is None:
        raise ConfigError("give --config <path> or --preset <name>")
    layers = []
    if args.preset is not None:
        layers.append(preset(args.preset))
    if args.config is not None:
        layers.append(load_config(args.config))
    layers.append({"seed": args.seed, "output_dir": args.out, "workers": getattr(args, "workers", None)})
    return build_config(*layers)


# ============================================================================
# COMMANDS
# ============================================================================


@handle_command_errors
def run_command(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    artifacts = experiments.run(config)
    for name, entry in artifacts.summary["frameworks"].items():
        logger.info("%s: NSR %.4g (%.3g%%), mean error %.4g", name, entry["nsr"], entry["nsr_percent"], entry["mean_error"])
    print(artifacts.out_dir)
    return 0


@handle_command_errors
def sweep_command(args: argparse.Namespace) -> int:
    config = resolve_config(args)
    artifacts = experiments.sweep(config)
    diagnostics = artifacts.summary["diagnostics"]
    if diagnostics:
        logger.info("sweep diagnostics: %s", diagnostics)
    print(artifacts.out_dir)
    return 0


@handle_command_errors
def presets_command(args: argparse.Namespace) -> int:
    aliases = {target: alias for alias, target in ALIASES.items()}
    width = max(map(len, PRESETS))
    for name in PRESETS:
        alias = f" (alias {aliases[name]})" if name in aliases else ""
        print(f"{name:<{width}}  {DESCRIPTIONS[name]}{alias}")
    return 0


@handle_command_errors
def verify_command(args: argparse.Namespace) -> int:
    results = run_checks(full=args.full)
    for result in results:
        print(f"{'PASS' if result.passed else 'FAIL'}  {result.name:<22} {result.seconds:6.1f}s  {result.detail}")
    failed = [r.name for r in results if not r.passed]
    if failed:
        logger.error("%d check(s) failed: %s", len(failed), ", ".join(failed))
        return 1
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qsense", description="Bayesian quantum parameter estimation experiments")
    parser.add_argument("--log-level", default=None, help="Overrides QSENSE_LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    for name, handler, help_text in (
        ("run", run_command, "simulate and estimate one experiment"),
        ("sweep", sweep_command, "evaluate an experiment along a sweep axis"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", help="JSON experiment config")
        cmd.add_argument("--preset", choices=preset_names(), help="Start from a named preset")
        cmd.add_argument("--out", help="Output directory")
        cmd.add_argument("--seed", type=int, help="Master seed (unsigned 64-bit)")
        cmd.add_argument("--workers", type=int, help="Worker threads")
        cmd.set_defaults(handler=handler)

    sub.add_parser("presets", help="list the bundled presets").set_defaults(handler=presets_command)

    verify = sub.add_parser("verify", help="run the acceptance checks")
    verify.add_argument("--full", action="store_true", help="include the Monte Carlo statistics")
    verify.set_defaults(handler=verify_command)
    return parser


def dispatch(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.handler(args)
