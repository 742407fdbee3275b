"""
gen_instance.py — Generate a random instance of the reference scenario.

Edge costs ~ U(0,1) over complete L-L and I-L candidate sets, I-node rates
~ U(10,100) samples per epoch, exponential(1) generation and compute times,
no node operational costs.

Usage:
    python netlearn.py gen-instance --l-nodes 10 --i-nodes 20 --seed 3 --out inst.json
    python netlearn.py gen-instance --l-nodes 10 --i-nodes 20 --seed 3 --rich --out rich.json
    python netlearn.py gen-instance --l-nodes 6 --i-nodes 12 --single-homed --out sh.json

Output (JSON to stdout): {path, l_nodes, i_nodes, ll_candidates, il_candidates, multiplier}
"""
from __future__ import annotations

import os
import sys
from pathlib import Path
from typing import Any

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lib.base import BaseScript
from lib.scenario import generate_instance
from lib.serialization import save_instance
from scripts.common import add_scenario_arguments, multiplier_of


class GenInstanceScript(BaseScript):
    """Write a random instance JSON (deterministic per seed)."""

    command = "gen-instance"

    @classmethod
    def add_arguments(cls, parser) -> None:
        parser.add_argument("--l-nodes", type=int, required=True)
        parser.add_argument("--i-nodes", type=int, required=True)
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--initial-samples", type=float, default=100.0,
                            help="X^0 of every L-node (must be > 0).")
        parser.add_argument("--single-homed", action="store_true",
                            help="Each I-node gets a single I-L candidate.")
        add_scenario_arguments(parser)
        parser.add_argument("--out", type=Path, default=Path("instance.json"))

    def run(self) -> dict[str, Any]:
        multiplier = multiplier_of(self.args)
        topology = generate_instance(
            self.args.l_nodes, self.args.i_nodes,
            seed=self.args.seed,
            multiplier=multiplier,
            single_homed=self.args.single_homed,
            initial_samples=self.args.initial_samples,
        )
        path = save_instance(topology, self.args.out)
        self.logger.info("Instance written to %s", path)
        return {
            "path": str(path),
            "l_nodes": len(topology.l_nodes),
            "i_nodes": len(topology.i_nodes),
            "ll_candidates": len(topology.ll_candidates),
            "il_candidates": len(topology.il_candidates),
            "multiplier": multiplier,
        }


if __name__ == "__main__":
    sys.exit(GenInstanceScript.main())
