"""Command-line front end for the scenario runners.

Verbs: ``phase-diagram``, ``cr``, ``switching``, ``sr``, ``single``.  Each
takes ``--config <file>`` plus targeted overrides.  Exit codes: 0 success,
2 configuration error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from .scenarios import ConfigError, NumericFailure, load_config, run_scenario

_VERBS = {
    "phase-diagram": "phase_diagram",
    "cr": "cr",
    "switching": "switching",
    "sr": "sr",
    "single": "single",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="omnoise",
        description="Driven optomechanical cavity: stability maps and "
                    "noise-induced dynamics scenarios.")
    sub = parser.add_subparsers(dest="verb", required=True)
    for verb in _VERBS:
        p = sub.add_parser(verb, help=f"run the {verb} scenario")
        p.add_argument("--config", required=True, help="scenario config JSON")
        p.add_argument("--dm", type=float, default=None,
                       help="override the noise strength d_m")
        p.add_argument("--ed", type=float, default=None,
                       help="override the drive amplitude e_d")
        p.add_argument("--delta", type=float, default=None,
                       help="override the detuning")
        p.add_argument("--seed", type=int, default=None,
                       help="override the master RNG seed")
        p.add_argument("--out", default=None, help="override the output directory")
        p.add_argument("--quiet", action="store_true", help="suppress progress output")
    return parser


def _apply_overrides(cfg, args):
    if args.dm is not None:
        cfg = replace(cfg, noise=replace(cfg.noise, d_m=args.dm))
    if args.ed is not None:
        cfg = replace(cfg, system=replace(cfg.system, e_d=args.ed))
    if args.delta is not None:
        cfg = replace(cfg, system=replace(cfg.system, delta=args.delta))
    if args.seed is not None:
        cfg = replace(cfg, noise=replace(cfg.noise, seed=args.seed))
    if args.out is not None:
        cfg = replace(cfg, output_dir=args.out)
    return cfg


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        expected = _VERBS[args.verb]
        if cfg.scenario != expected:
            raise ConfigError(
                f"config is for scenario {cfg.scenario!r} but verb {args.verb!r} "
                f"expects {expected!r}")
        cfg = _apply_overrides(cfg, args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2

    try:
        run_scenario(cfg, echo=not args.quiet)
    except NumericFailure as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
