#!/usr/bin/env python3
"""Short-drive temperature distributions for a set of couplings.

Runs the fig1 preset (ten drive periods, lab frame, 1000 ticks per qubit
period) and writes one histogram per coupling; append --n-traj to resize.
"""

import sys

from qcalsim.cli import run_cli

if __name__ == "__main__":
    args = sys.argv[1:]
    if "--seed" not in args:
        args += ["--seed", "1"]
    if "--out" not in args:
        args += ["--out", "out/short_drive"]
    sys.exit(run_cli(["preset", "fig1", *args]))
