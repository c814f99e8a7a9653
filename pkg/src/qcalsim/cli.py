"""Experiment orchestration: config parsing, pipelines, preset protocols.

Subcommands
-----------
simulate    trajectory ensemble (or a single logged trajectory)
evolve-me   hybrid master equation on the X grid
reduce-fp   effective temperature equation: coefficients + stationary state
stationary  stationary temperature only (JSON)
compare     run all three pipelines and report pairwise distances
preset      canned protocols: fig1 (short-drive distribution),
            fig2 (detuning sweep, trajectories only),
            fig3a (stationary temperature vs drive strength),
            fig4 (steady-state distribution with reduced-equation overlay)

Every run writes a ``manifest.json`` echoing the full configuration and
its content hash; outputs carry no timestamps, so re-running a manifest's
configuration reproduces the files byte-for-byte.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import math
import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .constants import KB
from .errors import ConfigError, NumericsError
from .params import PhysicalParams, params_from_text, params_to_text
from . import fokker_planck as fp
from . import hybridme as me
from . import stats
from .io_utils import write_csv, write_json, write_manifest, content_hash
from .trajectory import (
    HybridState,
    QubitState,
    gibbs_excited_probability,
    run_ensemble,
    run_trajectory,
    suggested_dt,
)

__all__ = ["ExperimentConfig", "run_cli", "main", "stationary_run_plan"]

_MODES = ("trajectories", "hybrid-me", "fp-reduce", "compare")


@dataclass
class ExperimentConfig:
    """Everything one run needs; parsed from flat key = value text."""

    params: PhysicalParams = field(default_factory=PhysicalParams)
    mode: str = "trajectories"
    horizon: float | None = None     # s
    dt: float | None = None          # s
    n_traj: int = 10_000
    seed: int | None = None
    frame: str = "lab"
    init: str = "gibbs"
    x_min: float | None = None       # K^2 (grid)
    x_max: float | None = None
    grid_m: int | None = None
    fp_n: int = 2001
    bin_width: float | None = None   # K
    accumulate_from: float | None = None
    out_dir: str = "out"

    def resolved_bin_width(self) -> float:
        return self.bin_width if self.bin_width is not None else self.params.phonon_temp / 100.0

    def to_text(self) -> str:
        lines = [params_to_text(self.params).rstrip()]
        lines.append(f"mode = {self.mode}")
        for key, val in [
            ("horizon_s", self.horizon),
            ("dt_s", self.dt),
            ("n_traj", self.n_traj),
            ("seed", self.seed),
            ("frame", self.frame),
            ("init", self.init),
            ("x_min_K2", self.x_min),
            ("x_max_K2", self.x_max),
            ("grid_m", self.grid_m),
            ("fp_n", self.fp_n),
            ("bin_width_K", self.bin_width),
            ("accumulate_from_s", self.accumulate_from),
        ]:
            if val is not None:
                lines.append(f"{key} = {val!r}" if isinstance(val, float) else f"{key} = {val}")
        return "\n".join(lines) + "\n"


_EXPERIMENT_KEYS = {
    "mode": ("mode", str),
    "horizon_s": ("horizon", float),
    "dt_s": ("dt", float),
    "n_traj": ("n_traj", int),
    "seed": ("seed", int),
    "frame": ("frame", str),
    "init": ("init", str),
    "x_min_K2": ("x_min", float),
    "x_max_K2": ("x_max", float),
    "grid_m": ("grid_m", int),
    "fp_n": ("fp_n", int),
    "bin_width_K": ("bin_width", float),
    "accumulate_from_s": ("accumulate_from", float),
}


def config_from_text(text: str) -> ExperimentConfig:
    """Parse a flat config block: physical parameter keys plus experiment keys."""
    cfg = ExperimentConfig()
    all_lines = text.splitlines()
    param_lines = [""] * len(all_lines)  # blank-padded to keep line numbers
    for lineno, raw in enumerate(all_lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key in _EXPERIMENT_KEYS:
            attr, cast = _EXPERIMENT_KEYS[key]
            try:
                setattr(cfg, attr, cast(val))
            except ValueError:
                raise ConfigError(f"line {lineno}: bad value for {key!r}: {val!r}")
        else:
            param_lines[lineno - 1] = raw
    cfg.params = params_from_text("\n".join(param_lines))
    if cfg.mode not in _MODES:
        raise ConfigError(f"mode must be one of {_MODES}, got {cfg.mode!r}")
    if cfg.frame not in ("lab", "rotating"):
        raise ConfigError(f"frame must be 'lab' or 'rotating', got {cfg.frame!r}")
    return cfg


# --------------------------------------------------------------------------
# protocol helpers


def short_drive_protocol(params: PhysicalParams) -> tuple[float, float]:
    """(horizon, dt) of the short-drive experiment: ten drive periods
    resolved with a thousand ticks per period."""
    return 10.0 * 2.0 * math.pi / params.omega, 1.0 / (1000.0 * params.omega)


def stationary_run_plan(params: PhysicalParams) -> dict[str, float]:
    """Burn-in, averaging window, tick size and grid cap for a run that
    must reach the driven stationary state.

    The relaxation rate of X near the operating point is the phonon rate
    theta(X) = (5/2) Sigma V X^{3/2} / C; the approach time from the
    phonon equilibrium to the stationary point is integrated from the
    drift field.  The plan allows > 25 relaxation times in total.
    """
    tp2 = params.phonon_temp**2
    x_s = fp.ts_closed_form(params) ** 2
    c = params.heat_capacity_coeff

    def theta(x: float) -> float:
        return 2.5 * params.sigma_v * x**1.5 / c

    t_approach = 0.0
    if x_s > 1.05 * tp2:
        # integrate dX/b(X) along the heating path; stop before the drift
        # root where 1/b diverges logarithmically (that tail is covered by
        # the relaxation-time margin below)
        xs = np.linspace(1.02 * tp2, 0.999 * x_s, 400)
        b = np.array(
            [fp.j1_numeric(x, params) / params.electron_count for x in xs]
        ) + np.array([params.sigma_v * (params.phonon_temp**5 - x**2.5) / c for x in xs])
        floor = 0.02 * float(b.max())
        below = np.nonzero(b < floor)[0]
        k = int(below[0]) if below.size else xs.size
        if k >= 2:
            t_approach = float(np.trapezoid(1.0 / b[:k], xs[:k]))
    theta_s = theta(max(x_s, tp2))
    burn = t_approach + 6.0 / theta_s
    window = 20.0 / theta_s
    # X excursion cap: 10 standard deviations of the corrected diffusion
    # (undriven, the jump noise cancels and only the phonon part remains)
    x_op = max(x_s, tp2)
    _, d1r, d2r = fp.corrections(x_op, params, 1e-4 * x_op)
    d_corr = (d1r + d2r) / params.electron_count**2
    d_ph = 5.0 * KB * params.sigma_v * params.phonon_temp**6 / c**2
    spread = math.sqrt((d_ph + max(d_corr, 0.0)) / theta_s)
    x_cap = x_op + 10.0 * spread + 2.0 * params.delta_xq
    return {
        "burn_s": burn,
        "window_s": window,
        "horizon_s": burn + window,
        "dt_s": suggested_dt(params, x_cap),
        "x_cap_K2": x_cap,
        "relax_time_s": 1.0 / theta_s,
    }


def _auto_me_dt(grid: me.XGrid, params: PhysicalParams, frame: str,
                horizon: float) -> float:
    ctx = me._GeneratorContext(grid, params, frame)
    limits = ctx.stiffness(1.0)
    dt_stab = 0.4 / max(limits.values())
    return min(dt_stab, horizon / 200.0)


# --------------------------------------------------------------------------
# pipelines


def _prep_out(cfg: ExperimentConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def run_simulate(cfg: ExperimentConfig) -> dict:
    if cfg.seed is None:
        raise ConfigError("trajectory modes require an explicit seed")
    out = _prep_out(cfg)
    params = cfg.params
    horizon, dt = cfg.horizon, cfg.dt
    if horizon is None or dt is None:
        h0, dt0 = short_drive_protocol(params)
        horizon = horizon if horizon is not None else h0
        dt = dt if dt is not None else dt0
    outputs = []
    if cfg.n_traj == 1:
        state = HybridState(
            QubitState.excited() if cfg.init == "excited" else QubitState.ground(),
            params.phonon_temp**2,
        )
        stride = max(1, int(round(horizon / dt)) // 2000)
        rec = run_trajectory(state, horizon, dt, params, cfg.seed, cfg.frame, stride)
        write_csv(out / "trajectory.csv", {
            "t_s": rec.times,
            "Te_K": rec.te,
            "pop_excited": rec.pop_excited,
            "n_down": rec.n_down_samples,
            "n_up": rec.n_up_samples,
        })
        outputs.append("trajectory.csv")
        summary = {
            "n_down": rec.n_down, "n_up": rec.n_up,
            "final_te_K": rec.final.te,
            "energy_residual_J": rec.energy_residual(),
            "max_gamma_dt": rec.max_gamma_dt,
            "seed": rec.seed, "dt_s": dt, "horizon_s": horizon, "frame": cfg.frame,
        }
    else:
        ens = run_ensemble(
            cfg.n_traj, horizon, dt, params, cfg.seed, cfg.frame, cfg.init,
            accumulate_from=cfg.accumulate_from if cfg.accumulate_from is not None else 0.0,
        )
        hist = stats.histogram(ens.final_te, cfg.resolved_bin_width())
        write_csv(out / "histogram.csv", {
            "te_left_K": hist.edges[:-1],
            "te_right_K": hist.edges[1:],
            "density": hist.density,
        })
        outputs.append("histogram.csv")
        summary = ens.summary()
        summary["se_te"] = float(np.std(ens.final_te) / math.sqrt(ens.n_traj))
        if cfg.accumulate_from is not None:
            tm = ens.time_mean_te()
            summary["window_mean_te"] = float(tm.mean())
            summary["window_se_te"] = float(tm.std(ddof=1) / math.sqrt(ens.n_traj))
            summary["window_var_x"] = float(ens.time_var_x().mean())
    summary["g2"] = params.g2
    summary["kappa"] = params.drive_strength
    summary["params_sha256"] = content_hash(params_to_text(params))
    write_json(out / "summary.json", summary)
    outputs.append("summary.json")
    write_manifest(out, cfg.to_text(), outputs)
    return summary


def run_evolve_me(cfg: ExperimentConfig) -> dict:
    out = _prep_out(cfg)
    params = cfg.params
    horizon = cfg.horizon if cfg.horizon is not None else short_drive_protocol(params)[0]
    grid = me.build_grid(
        params,
        cfg.x_min if cfg.x_min is not None else 0.0,
        cfg.x_max if cfg.x_max is not None else 16.0 * params.phonon_temp**2,
        cfg.grid_m if cfg.grid_m is not None else me.default_grid(params).m,
    )
    pe = gibbs_excited_probability(params)
    rho0 = me.HybridDensity.delta(grid, params.phonon_temp**2, np.diag([pe, 1.0 - pe]))
    frame = cfg.frame if cfg.frame else "rotating"
    dt_me = cfg.dt if cfg.dt is not None else _auto_me_dt(grid, params, frame, horizon)
    res = me.evolve(rho0, 0.0, horizon, dt_me, params, frame)
    f, diag = me.marginal_and_validate(res.density)
    write_csv(out / "me_marginal.csv", {
        "X_K2": grid.x,
        "F": f,
        "rho00": res.density.rho[:, 0, 0].real,
        "rho11": res.density.rho[:, 1, 1].real,
        "Re_rho01": res.density.rho[:, 0, 1].real,
        "Im_rho01": res.density.rho[:, 0, 1].imag,
    })
    report = {
        "steps": res.steps, "leak": res.leak, "norm_drift": res.norm_drift,
        "mean_te_K": res.density.mean_te(), "horizon_s": horizon, "dt_me_s": dt_me,
        "frame": frame, "grid_n": grid.n, "grid_m": grid.m, **diag,
    }
    write_json(out / "me_diagnostics.json", report)
    write_manifest(out, cfg.to_text(), ["me_marginal.csv", "me_diagnostics.json"])
    return report


def run_reduce_fp(cfg: ExperimentConfig, stationary_only: bool = False) -> dict:
    out = _prep_out(cfg)
    params = cfg.params
    coeffs, result = fp.reduce_to_stationary(
        params, x_min=cfg.x_min, x_max=cfg.x_max, n=cfg.fp_n
    )
    outputs = []
    if not stationary_only:
        write_csv(out / "fp_coefficients.csv", {
            "X_K2": coeffs.x,
            "b": coeffs.drift,
            "D": coeffs.diffusion,
            "j1": coeffs.jump_drift_1,
            "j2": coeffs.jump_drift_2,
            "delta1": coeffs.jump_diffusion_1,
            "delta2": coeffs.jump_diffusion_2,
            "F_s": result.f_s,
        })
        outputs.append("fp_coefficients.csv")
    report = {
        "X_S_K2": result.x_s,
        "T_S_K": result.t_s,
        "T_S_closed_K": result.t_s_closed,
        "stable_roots_K2": list(result.stable_roots),
        "multistable": result.multistable,
        "g2": params.g2,
        "kappa": params.drive_strength,
        "params_sha256": content_hash(params_to_text(params)),
    }
    write_json(out / "fp_stationary.json", report)
    outputs.append("fp_stationary.json")
    write_manifest(out, cfg.to_text(), outputs)
    return report


def run_compare(cfg: ExperimentConfig) -> dict:
    """Trajectory ensemble vs hybrid master equation vs reduced equation.

    The ensemble and the master equation are propagated to the same
    horizon and compared on the master-equation grid; the stationary
    density of the reduced equation is rebinned onto the same grid for
    reference (it describes the long-time limit, not the finite horizon).
    """
    if cfg.seed is None:
        raise ConfigError("compare requires an explicit seed")
    out = _prep_out(cfg)
    params = cfg.params
    horizon, dt = cfg.horizon, cfg.dt
    if horizon is None or dt is None:
        h0, dt0 = short_drive_protocol(params)
        horizon = horizon if horizon is not None else h0
        dt = dt if dt is not None else dt0

    ens = run_ensemble(cfg.n_traj, horizon, dt, params, cfg.seed, cfg.frame, cfg.init)

    grid = me.build_grid(
        params,
        cfg.x_min if cfg.x_min is not None else 0.0,
        cfg.x_max if cfg.x_max is not None else 16.0 * params.phonon_temp**2,
        cfg.grid_m if cfg.grid_m is not None else me.default_grid(params).m,
    )
    pe = gibbs_excited_probability(params)
    rho0 = me.HybridDensity.delta(grid, params.phonon_temp**2, np.diag([pe, 1.0 - pe]))
    dt_me = _auto_me_dt(grid, params, "rotating", horizon)
    res = me.evolve(rho0, 0.0, horizon, dt_me, params, "rotating")
    f_me, diag = me.marginal_and_validate(res.density)

    mc_density = stats.bin_to_cells(ens.final_x, grid.x)
    edges = np.concatenate([grid.x - 0.5 * grid.dx, [grid.x[-1] + 0.5 * grid.dx]])

    coeffs, stat = fp.reduce_to_stationary(params, n=cfg.fp_n)
    fp_edges = np.concatenate([
        stat.x - 0.5 * coeffs.dx, [stat.x[-1] + 0.5 * coeffs.dx]
    ])
    f_fp = stats.rebin_density(fp_edges, stat.f_s, edges)

    l1_mc_me, ks_mc_me = stats.distance_metrics(mc_density, f_me, grid.dx)
    l1_mc_fp, ks_mc_fp = stats.distance_metrics(mc_density, f_fp, grid.dx)
    l1_me_fp, ks_me_fp = stats.distance_metrics(f_me, f_fp, grid.dx)

    write_csv(out / "compare_densities.csv", {
        "X_K2": grid.x,
        "mc_density": mc_density,
        "me_marginal": f_me,
        "fp_stationary": f_fp,
    })
    report = {
        "horizon_s": horizon,
        "n_traj": cfg.n_traj,
        "mc_mean_te_K": float(np.mean(ens.final_te)),
        "mc_std_te_K": float(np.std(ens.final_te)),
        "me_mean_te_K": res.density.mean_te(),
        "me_diagnostics": diag,
        "l1_mc_me": l1_mc_me, "ks_mc_me": ks_mc_me,
        "l1_mc_fp": l1_mc_fp, "ks_mc_fp": ks_mc_fp,
        "l1_me_fp": l1_me_fp, "ks_me_fp": ks_me_fp,
        "mc_ts_proxy_K": float(np.mean(ens.final_te)),
        "fp_ts_K": stat.t_s,
        "ts_closed_K": stat.t_s_closed,
        "params_sha256": content_hash(params_to_text(params)),
    }
    write_json(out / "comparison.json", report)
    write_manifest(out, cfg.to_text(), ["compare_densities.csv", "comparison.json"])
    return report


# --------------------------------------------------------------------------
# presets


def preset_fig1(cfg: ExperimentConfig, g2_list: list[float]) -> dict:
    """Short-drive temperature distribution per coupling strength."""
    results = {}
    base_out = Path(cfg.out_dir)
    for g2 in g2_list:
        sub = replace(cfg)
        sub.params = cfg.params.with_(g2=g2)
        sub.mode = "trajectories"
        sub.frame = "lab"
        sub.horizon, sub.dt = short_drive_protocol(sub.params)
        sub.out_dir = str(base_out / f"g2_{g2:g}")
        results[f"g2_{g2:g}"] = run_simulate(sub)
    return results


def preset_fig2(cfg: ExperimentConfig, ratios: list[float]) -> dict:
    """Mean/std of Te after the short drive vs omega_d / omega.

    Trajectories only: the reduced equation assumes resonant driving.
    """
    if cfg.seed is None:
        raise ConfigError("trajectory presets require an explicit seed")
    out = _prep_out(cfg)
    params0 = cfg.params
    horizon, dt = short_drive_protocol(params0)
    mean, std, se = [], [], []
    for r in ratios:
        params = params0.with_(drive_frequency=r * params0.omega)
        ens = run_ensemble(cfg.n_traj, horizon, dt, params, cfg.seed, "lab", cfg.init)
        mean.append(np.mean(ens.final_te))
        std.append(np.std(ens.final_te))
        se.append(np.std(ens.final_te) / math.sqrt(ens.n_traj))
    write_csv(out / "detuning_sweep.csv", {
        "omega_ratio": np.array(ratios),
        "mean_te_K": np.array(mean),
        "std_te_K": np.array(std),
        "se_te_K": np.array(se),
    })
    write_manifest(out, cfg.to_text(), ["detuning_sweep.csv"])
    return {"ratios": ratios, "mean_te_K": [float(v) for v in mean]}


def preset_fig3a(cfg: ExperimentConfig, kappas: list[float]) -> dict:
    """Stationary temperature vs drive strength: long-horizon ensemble mean
    against the reduced-equation root and its closed form."""
    if cfg.seed is None:
        raise ConfigError("trajectory presets require an explicit seed")
    out = _prep_out(cfg)
    rows = []
    outputs = []
    for i, kappa in enumerate(kappas):
        params = cfg.params.with_(drive_strength=kappa)
        plan = stationary_run_plan(params)
        ens = run_ensemble(
            cfg.n_traj, plan["horizon_s"], plan["dt_s"], params,
            cfg.seed + i, "rotating", cfg.init,
            accumulate_from=plan["burn_s"],
        )
        tm = ens.time_mean_te()
        _, stat = fp.reduce_to_stationary(params, n=cfg.fp_n)
        row = {
            "kappa": kappa,
            "g2": params.g2,
            "mc_mean_te_K": float(tm.mean()),
            "mc_se_te_K": float(tm.std(ddof=1) / math.sqrt(tm.size)),
            "fp_ts_K": stat.t_s,
            "ts_closed_K": stat.t_s_closed,
            "horizon_s": plan["horizon_s"],
            "n_traj": cfg.n_traj,
            "params_sha256": content_hash(params_to_text(cfg.params)),
        }
        rows.append(row)
        name = f"summary_kappa_{kappa:g}.json"
        write_json(out / name, row)
        outputs.append(name)
    write_json(out / "ts_sweep.json", rows)
    outputs.append("ts_sweep.json")
    write_manifest(out, cfg.to_text(), outputs)
    return {"points": rows}


def preset_fig4(cfg: ExperimentConfig) -> dict:
    """Steady-state temperature distribution vs the reduced equation."""
    if cfg.seed is None:
        raise ConfigError("trajectory presets require an explicit seed")
    out = _prep_out(cfg)
    params = cfg.params
    plan = stationary_run_plan(params)
    stride = max(1, int(round(plan["horizon_s"] / plan["dt_s"])) // 400)
    ens = run_ensemble(
        cfg.n_traj, plan["horizon_s"], plan["dt_s"], params, cfg.seed,
        "rotating", cfg.init, stride=stride, accumulate_from=plan["burn_s"],
    )
    n_burn_samples = int(np.searchsorted(ens.sample_times, plan["burn_s"]))
    te_steady = ens.te_samples[:, n_burn_samples:].ravel()
    hist = stats.histogram(te_steady, cfg.resolved_bin_width())
    write_csv(out / "histogram.csv", {
        "te_left_K": hist.edges[:-1],
        "te_right_K": hist.edges[1:],
        "density": hist.density,
    })
    coeffs, stat = fp.reduce_to_stationary(params, n=cfg.fp_n)
    te_grid = np.sqrt(stat.x)
    write_csv(out / "fp_stationary_te.csv", {
        "te_K": te_grid,
        "density": stat.f_s * 2.0 * te_grid,
    })
    report = {
        "mc_mean_te_K": float(te_steady.mean()),
        "fp_ts_K": stat.t_s,
        "ts_closed_K": stat.t_s_closed,
        "n_samples": int(te_steady.size),
        "params_sha256": content_hash(params_to_text(params)),
    }
    write_json(out / "summary.json", report)
    write_manifest(
        out, cfg.to_text(), ["histogram.csv", "fp_stationary_te.csv", "summary.json"]
    )
    return report


# --------------------------------------------------------------------------
# argument parsing


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="qcalsim",
        description="Driven qubit + finite-size calorimeter simulation toolkit",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path, help="flat key=value config file")
        p.add_argument("--out", type=str, help="output directory")
        p.add_argument("--seed", type=int)
        p.add_argument("--n-traj", type=int)
        p.add_argument("--g2", type=float, help="coupling squared")
        p.add_argument("--kappa", type=float, help="drive strength")
        p.add_argument("--frame", choices=("lab", "rotating"))
        p.add_argument("--horizon", type=float, help="seconds")
        p.add_argument("--dt", type=float, help="seconds")

    for name in ("simulate", "evolve-me", "reduce-fp", "stationary", "compare"):
        common(sub.add_parser(name))
    pp = sub.add_parser("preset")
    pp.add_argument("name", choices=("fig1", "fig2", "fig3a", "fig4"))
    common(pp)
    pp.add_argument("--kappas", type=str, help="comma-separated drive strengths (fig3a)")
    pp.add_argument("--ratios", type=str, help="comma-separated omega_d/omega (fig2)")
    return ap


def _config_from_args(args) -> ExperimentConfig:
    if args.config is not None:
        if not Path(args.config).exists():
            raise ConfigError(f"config file not found: {args.config}")
        cfg = config_from_text(Path(args.config).read_text())
    else:
        cfg = ExperimentConfig()
    if args.out is not None:
        cfg.out_dir = args.out
    if args.seed is not None:
        cfg.seed = args.seed
    if args.n_traj is not None:
        cfg.n_traj = args.n_traj
    if args.frame is not None:
        cfg.frame = args.frame
    if args.horizon is not None:
        cfg.horizon = args.horizon
    if args.dt is not None:
        cfg.dt = args.dt
    updates = {}
    if args.g2 is not None:
        updates["g2"] = args.g2
    if args.kappa is not None:
        updates["drive_strength"] = args.kappa
    if updates:
        cfg.params = cfg.params.with_(**updates)
    return cfg


def run_cli(argv: list[str]) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _config_from_args(args)
        if args.command == "simulate":
            r = run_simulate(cfg)
            print(f"simulate: n_traj={cfg.n_traj} mean_te={r.get('mean_te', r.get('final_te_K')):.6g} K")
        elif args.command == "evolve-me":
            r = run_evolve_me(cfg)
            print(f"evolve-me: mean_te={r['mean_te_K']:.6g} K, leak={r['leak']:.3g}, "
                  f"norm_drift={r['norm_drift']:.3g}")
        elif args.command == "reduce-fp":
            r = run_reduce_fp(cfg)
            print(f"reduce-fp: T_S={r['T_S_K']:.6g} K (closed form {r['T_S_closed_K']:.6g} K)")
        elif args.command == "stationary":
            r = run_reduce_fp(cfg, stationary_only=True)
            print(f"stationary: T_S={r['T_S_K']:.6g} K")
        elif args.command == "compare":
            r = run_compare(cfg)
            print(f"compare: L1(MC,ME)={r['l1_mc_me']:.4f} KS(MC,ME)={r['ks_mc_me']:.4f} "
                  f"T_S(FP)={r['fp_ts_K']:.6g} K")
        elif args.command == "preset":
            if args.name == "fig1":
                g2s = [cfg.params.g2] if args.g2 is not None else [0.05, 0.1]
                r = preset_fig1(cfg, g2s)
                print(f"preset fig1: {', '.join(r)} written to {cfg.out_dir}")
            elif args.name == "fig2":
                ratios = (
                    [float(v) for v in args.ratios.split(",")]
                    if args.ratios
                    else [round(0.85 + 0.05 * i, 2) for i in range(7)]
                )
                preset_fig2(cfg, ratios)
                print(f"preset fig2: {len(ratios)} detuning points written to {cfg.out_dir}")
            elif args.name == "fig3a":
                kappas = (
                    [float(v) for v in args.kappas.split(",")]
                    if args.kappas
                    else [0.02, 0.03, 0.05, 0.07, 0.1]
                )
                r = preset_fig3a(cfg, kappas)
                print(f"preset fig3a: {len(kappas)} drive points written to {cfg.out_dir}")
            else:
                preset_fig4(cfg)
                print(f"preset fig4: steady-state distribution written to {cfg.out_dir}")
        return 0
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except NumericsError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run_cli(sys.argv[1:]))


if __name__ == "__main__":
    main()
