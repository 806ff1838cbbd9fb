"""Command-line entry point.

Subcommands select suites; a JSON config selects the model and overrides
tolerances or sample counts.  Exit codes are a stable contract: 0 all checks
pass, 1 at least one check failed (the report is still written), 2 config or
parse error, 3 output I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .errors import ConfigError, EntrokitError, ParseError
from .report import (
    DEFAULT_TOLERANCES,
    SUITES,
    SuiteConfig,
    emit,
    run,
)

SUBCOMMAND_SUITES = {
    "check-axioms": ("axioms",),
    "construct-ly": ("ly",),
    "construct-zb": ("zb",),
    "verify-theorems": ("energy", "theorems"),
    "caratheodory": ("caratheodory",),
    "mutants": ("mutants",),
    "all": SUITES,
}

CONFIG_DIR_ENV = "ENTROKIT_CONFIG_DIR"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entrokit",
        description="Run verification suites for entropy constructions "
                    "over accessibility relations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in SUBCOMMAND_SUITES:
        p = sub.add_parser(name, help=f"run the {name} suite(s)")
        p.add_argument("--config", help="path to a JSON suite config")
        p.add_argument("--seed", type=int, help="override the sampling seed")
        p.add_argument(
            "--format", choices=("json", "csv", "text"), default="json",
            help="output format (json is canonical)",
        )
        p.add_argument("--out", help="write the report here instead of stdout")
        p.add_argument(
            "--tolerance", action="append", default=[], metavar="NAME=VALUE",
            help="override a named tolerance (repeatable)",
        )
    return parser


def _load_config(args) -> SuiteConfig:
    path = args.config
    if path is None:
        cfg_dir = os.environ.get(CONFIG_DIR_ENV)
        if cfg_dir:
            candidate = os.path.join(cfg_dir, "default.json")
            if os.path.exists(candidate):
                path = candidate
    if path is not None:
        try:
            with open(path) as fh:
                raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{path}: invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}"
            ) from exc
        except OSError as exc:
            raise ConfigError(f"{path}: {exc}") from exc
        config = SuiteConfig.from_dict(raw)
    else:
        config = SuiteConfig(model={"kind": "ideal_gas"}, suites=SUITES)

    suites = SUBCOMMAND_SUITES[args.command]
    config = SuiteConfig(
        model=config.model,
        suites=tuple(suites),
        seed=config.seed if args.seed is None else args.seed,
        tolerances=dict(config.tolerances),
        sample_counts=dict(config.sample_counts),
    )
    for override in args.tolerance:
        if "=" not in override:
            raise ConfigError(f"tolerance override must look like NAME=VALUE: {override!r}")
        name, _, value = override.partition("=")
        if name not in DEFAULT_TOLERANCES:
            raise ConfigError(f"unknown tolerance {name!r}")
        try:
            config.tolerances[name] = float(value)
        except ValueError as exc:
            raise ConfigError(f"tolerance {name!r} needs a number, got {value!r}") from exc
        if config.tolerances[name] <= 0:
            raise ConfigError(f"tolerance {name!r} must be positive")
    return config


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        config = _load_config(args)
        report = run(config)
    except (ConfigError, ParseError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except EntrokitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    payload = emit(report, args.format)
    if args.out:
        try:
            with open(args.out, "w") as fh:
                fh.write(payload)
        except OSError as exc:
            print(f"cannot write report: {exc}", file=sys.stderr)
            return 3
    else:
        sys.stdout.write(payload)
    return 0 if report.aggregate_pass else 1


if __name__ == "__main__":
    sys.exit(main())
