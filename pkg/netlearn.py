"""
netlearn — cost-optimal logical topologies for distributed learning.

Usage:
    python netlearn.py optimize      --instance I --profile P [--algorithm A] [--out-dir D]
    python netlearn.py simulate      --instance I --solution S [--reps N] [--seed N]
    python netlearn.py fit           --observations CSV [--eps-max E] [--out P]
    python netlearn.py gen-instance  --l-nodes N --i-nodes M [--seed N] [--rich]
    python netlearn.py compare       --instance I --profile P [--brute-force]

Every subcommand accepts --debug and --threads and documents its flags in
--help. NETLEARN_* environment variables (or a .env file) set the defaults.

Exit codes: 0 success/feasible, 2 infeasible, 3 validation failure, 1 error.
"""
from __future__ import annotations

import argparse
import os
import sys
from typing import Optional, Sequence

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

from lib.base import BaseScript
from scripts.compare import CompareScript
from scripts.fit import FitScript
from scripts.gen_instance import GenInstanceScript
from scripts.optimize import OptimizeScript
from scripts.simulate import SimulateScript

COMMANDS: tuple[type[BaseScript], ...] = (
    OptimizeScript,
    SimulateScript,
    FitScript,
    GenInstanceScript,
    CompareScript,
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="netlearn",
        description="Cost-optimal L-L / I-L topologies for distributed learning.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for cls in COMMANDS:
        doc = (cls.__doc__ or cls.__name__).strip().splitlines()[0]
        cls.build_parser(sub.add_parser(cls.command, help=doc, description=doc))
        sub.choices[cls.command].set_defaults(script=cls)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.script.execute(args)


if __name__ == "__main__":
    sys.exit(main())
