"""
Flags shared by several commands and their translation into a RunConfig.
"""
from __future__ import annotations

import argparse
from pathlib import Path

from lib.models import RunConfig
from lib.scenario import RICH_MULTIPLIER


def add_instance_argument(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--instance", type=Path, required=True, metavar="PATH",
        help="Instance JSON (format_version 1).",
    )


def add_profile_arguments(parser: argparse.ArgumentParser) -> None:
    source = parser.add_mutually_exclusive_group(required=True)
    source.add_argument(
        "--profile", type=Path, metavar="PATH",
        help="Profile JSON with c1, c2, c3, eps_max and optional t_max.",
    )
    source.add_argument(
        "--coefficients", type=float, nargs=3, metavar=("C1", "C2", "C3"),
        help="Error-law coefficients inline (needs --eps-max).",
    )
    source.add_argument(
        "--observations", type=Path, metavar="CSV",
        help="Profiling CSV (X,K,gamma,error) to fit first (needs --eps-max).",
    )
    parser.add_argument("--eps-max", type=float, default=None,
                        help="Target error; overrides the profile file.")
    parser.add_argument("--t-max", type=float, default=None,
                        help="Deadline; overrides the profile file (default: none).")


def add_scenario_arguments(parser: argparse.ArgumentParser) -> None:
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--rich", action="store_true",
                       help=f"Rich scenario: I-node rates x{RICH_MULTIPLIER:g}.")
    group.add_argument("--multiplier", type=float, default=None,
                       help="Scale every I-node rate by this factor.")


def multiplier_of(args: argparse.Namespace) -> float:
    if getattr(args, "rich", False):
        return RICH_MULTIPLIER
    value = getattr(args, "multiplier", None)
    return 1.0 if value is None else value


def run_config(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        instance=getattr(args, "instance", None),
        profile=getattr(args, "profile", None),
        coefficients=tuple(args.coefficients) if getattr(args, "coefficients", None) else None,
        observations=getattr(args, "observations", None),
        eps_max=getattr(args, "eps_max", None),
        t_max=getattr(args, "t_max", None),
        algorithm=getattr(args, "algorithm", "double-climb"),
        seed=getattr(args, "seed", 0),
        reps=getattr(args, "reps", 10_000),
        out_dir=getattr(args, "out_dir", Path(".")),
        multiplier=multiplier_of(args),
    )
