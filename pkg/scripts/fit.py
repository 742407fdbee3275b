"""
fit.py — Fit the error-law coefficients c1, c2, c3 from profiling runs.

Usage:
    python netlearn.py fit --observations runs/profiling.csv \\
        --eps-max 0.9 --out data/my_profile.json

The CSV has the header X,K,gamma,error (one row per measurement).

Output (JSON to stdout): {c1, c2, c3, mse, observations, [eps_max, t_max], profile_path}
The written file is a valid --profile input when --eps-max is given.
"""
from __future__ import annotations

import os
import sys
from pathlib import Path
from typing import Any

sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from lib.base import BaseScript
from lib.profiling import fit_profile
from lib.serialization import fit_to_dict, load_observations, write_json


class FitScript(BaseScript):
    """Fit c1..c3 to an observations CSV and write a profile JSON."""

    command = "fit"

    @classmethod
    def add_arguments(cls, parser) -> None:
        parser.add_argument("--observations", type=Path, required=True, metavar="CSV")
        parser.add_argument("--eps-max", type=float, default=None,
                            help="Target error to store with the coefficients.")
        parser.add_argument("--t-max", type=float, default=None,
                            help="Deadline to store with the coefficients.")
        parser.add_argument("--out", type=Path, default=Path("profile.json"))

    def run(self) -> dict[str, Any]:
        observations = load_observations(self.args.observations)
        fit = fit_profile(observations)
        document = fit_to_dict(fit)
        if self.args.eps_max is not None:
            document["eps_max"] = self.args.eps_max
            document["t_max"] = self.args.t_max
        path = write_json(self.args.out, document)
        self.logger.info("Profile written to %s", path)
        return {**document, "profile_path": str(path)}


if __name__ == "__main__":
    sys.exit(FitScript.main())
