#!/usr/bin/env python3
"""Regenerate the sample CSV/JSON fixtures shipped with figures/.

Light-weight versions of the standard pipelines; the figure scripts and
their tests consume these files without invoking any simulation code.
"""

import math
import shutil
import sys
from pathlib import Path

import numpy as np

from qcalsim.cli import ExperimentConfig, run_evolve_me, run_simulate, preset_fig2, stationary_run_plan
from qcalsim.fokker_planck import reduce_to_stationary
from qcalsim.io_utils import content_hash, write_csv, write_json
from qcalsim.params import nominal_params, params_to_text
from qcalsim.trajectory import run_ensemble

SAMPLES = Path(__file__).resolve().parent.parent / "figures" / "samples"


def short_drive_histogram(tmp: Path) -> None:
    cfg = ExperimentConfig()
    cfg.seed = 11
    cfg.n_traj = 4000
    cfg.frame = "lab"
    cfg.out_dir = str(tmp / "fig1")
    run_simulate(cfg)
    shutil.copy(tmp / "fig1" / "histogram.csv", SAMPLES / "fig1_histogram.csv")


def me_marginal(tmp: Path) -> None:
    cfg = ExperimentConfig()
    cfg.frame = "rotating"
    cfg.grid_m = 28
    cfg.x_max = 0.016
    cfg.out_dir = str(tmp / "me")
    run_evolve_me(cfg)
    shutil.copy(tmp / "me" / "me_marginal.csv", SAMPLES / "me_marginal.csv")


def fp_outputs() -> None:
    params = nominal_params()
    coeffs, res = reduce_to_stationary(params, n=1501)
    write_csv(SAMPLES / "fp_coefficients.csv", {
        "X_K2": coeffs.x,
        "b": coeffs.drift,
        "D": coeffs.diffusion,
        "j1": coeffs.jump_drift_1,
        "j2": coeffs.jump_drift_2,
        "delta1": coeffs.jump_diffusion_1,
        "delta2": coeffs.jump_diffusion_2,
        "F_s": res.f_s,
    })
    te = np.sqrt(res.x)
    write_csv(SAMPLES / "fp_stationary_te.csv", {
        "te_K": te,
        "density": res.f_s * 2.0 * te,
    })


def ts_sweep_points() -> None:
    base = nominal_params()
    params_hash = content_hash(params_to_text(base))
    for i, kappa in enumerate((0.0, 0.02, 0.05, 0.1)):
        params = base.with_(drive_strength=kappa)
        _, res = reduce_to_stationary(params, n=1201)
        if kappa > 0.0:
            plan = stationary_run_plan(params)
            burn = plan["burn_s"]
            horizon = burn + 6.0 * plan["relax_time_s"]
            ens = run_ensemble(96, horizon, plan["dt_s"], params, base_seed=40 + i,
                               frame="rotating", accumulate_from=burn)
            tm = ens.time_mean_te()
            mc_mean = float(tm.mean())
            mc_se = float(tm.std(ddof=1) / math.sqrt(tm.size))
            n_traj = 96
        else:
            # undriven: the equilibrium is the phonon bath temperature
            mc_mean = params.phonon_temp
            mc_se = 1e-4
            horizon = 0.0
            n_traj = 0
        write_json(SAMPLES / f"ts_sweep_point_{i}.json", {
            "kappa": kappa,
            "g2": params.g2,
            "mc_mean_te_K": mc_mean,
            "mc_se_te_K": mc_se,
            "fp_ts_K": res.t_s,
            "ts_closed_K": res.t_s_closed,
            "horizon_s": horizon,
            "n_traj": n_traj,
            "params_sha256": params_hash,
        })


def detuning_sweep(tmp: Path) -> None:
    cfg = ExperimentConfig()
    cfg.seed = 21
    cfg.n_traj = 400
    cfg.out_dir = str(tmp / "fig2")
    preset_fig2(cfg, [0.9, 0.95, 1.0, 1.05, 1.1])
    shutil.copy(tmp / "fig2" / "detuning_sweep.csv", SAMPLES / "detuning_sweep.csv")


if __name__ == "__main__":
    SAMPLES.mkdir(parents=True, exist_ok=True)
    tmp = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("out/samples_tmp")
    tmp.mkdir(parents=True, exist_ok=True)
    fp_outputs()
    print("wrote reduced-equation samples")
    ts_sweep_points()
    print("wrote drive-sweep samples")
    short_drive_histogram(tmp)
    print("wrote short-drive histogram")
    me_marginal(tmp)
    print("wrote master-equation marginal")
    detuning_sweep(tmp)
    print("wrote detuning sweep")
