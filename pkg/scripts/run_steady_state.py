#!/usr/bin/env python3
"""Steady-state temperature distribution with the reduced-equation overlay
(fig4 preset): histogram of Te samples past burn-in plus the stationary
density converted to the Te axis."""

import sys

from qcalsim.cli import run_cli

if __name__ == "__main__":
    args = sys.argv[1:]
    if "--seed" not in args:
        args += ["--seed", "1"]
    if "--n-traj" not in args:
        args += ["--n-traj", "200"]
    if "--out" not in args:
        args += ["--out", "out/steady_state"]
    sys.exit(run_cli(["preset", "fig4", *args]))
