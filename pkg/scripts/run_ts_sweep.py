#!/usr/bin/env python3
"""Stationary temperature against drive strength (fig3a preset).

Long-horizon rotating-frame ensembles per drive point, compared with the
reduced-equation root and its closed form; writes ts_sweep.json plus one
summary per point.
"""

import sys

from qcalsim.cli import run_cli

if __name__ == "__main__":
    args = sys.argv[1:]
    if "--seed" not in args:
        args += ["--seed", "1"]
    if "--n-traj" not in args:
        args += ["--n-traj", "200"]
    if "--out" not in args:
        args += ["--out", "out/ts_sweep"]
    sys.exit(run_cli(["preset", "fig3a", *args]))
