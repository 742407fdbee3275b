"""
optimize.py — Choose the cheapest logical topology and epoch count.

Usage:
    # DoubleClimb with the shipped example and classification profile
    python netlearn.py optimize \\
        --instance data/example_instance.json \\
        --profile data/classification_profile.json \\
        --out-dir runs/example

    # Baseline, inline coefficients, rich scenario, deadline
    python netlearn.py optimize \\
        --instance inst.json --coefficients 0.6799 0.4978 542.1 \\
        --eps-max 0.9 --t-max 500 --algorithm opt-unif --rich

Writes <out-dir>/solution.json and <out-dir>/trace.csv.

Output (JSON to stdout): the solution document plus the written paths.
Exit code: 0 feasible, 2 infeasible, 1 error.
"""
from __future__ import annotations

import os
import sys
from pathlib import Path
from typing import Any

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lib.base import EXIT_INFEASIBLE, BaseScript
from lib.models import GaParams
from lib.optimize import ALGORITHMS, run_algorithm
from lib.scenario import with_rate_multiplier
from lib.serialization import (
    load_instance,
    outcome_to_dict,
    resolve_profile,
    write_json,
    write_trace,
)
from scripts.common import (
    add_instance_argument,
    add_profile_arguments,
    add_scenario_arguments,
    run_config,
)


class OptimizeScript(BaseScript):
    """Run one optimizer on an instance and write solution.json and trace.csv."""

    command = "optimize"

    @classmethod
    def add_arguments(cls, parser) -> None:
        add_instance_argument(parser)
        add_profile_arguments(parser)
        add_scenario_arguments(parser)
        parser.add_argument("--algorithm", choices=ALGORITHMS, default="double-climb")
        parser.add_argument("--seed", type=int, default=0, help="GA seed.")
        parser.add_argument("--generations", type=int, default=GaParams.generations)
        parser.add_argument("--population", type=int, default=GaParams.population)
        parser.add_argument("--out-dir", type=Path, default=Path("."))

    def run(self) -> dict[str, Any]:
        config = run_config(self.args)
        topology = with_rate_multiplier(load_instance(config.instance), config.multiplier)
        profile = resolve_profile(config)
        self.logger.info(
            "%s on %s: |L|=%d |I|=%d eps_max=%g t_max=%g",
            config.algorithm, config.instance, len(topology.l_nodes),
            len(topology.i_nodes), profile.eps_max, profile.t_max,
        )

        params = GaParams(generations=self.args.generations, population=self.args.population)
        outcome = run_algorithm(config.algorithm, topology, profile,
                                self.settings, config.seed, params)

        document = outcome_to_dict(outcome)
        solution_path = write_json(config.out_dir / "solution.json", document)
        trace_path = write_trace(config.out_dir / "trace.csv", outcome.trace)
        if not outcome.feasible:
            self.logger.warning(outcome.reason)
            self.exit_code = EXIT_INFEASIBLE
        return {**document, "solution_path": str(solution_path), "trace_path": str(trace_path)}


if __name__ == "__main__":
    sys.exit(OptimizeScript.main())
