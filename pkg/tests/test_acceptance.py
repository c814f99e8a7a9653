"""Acceptance suite: the eight primary exit criteria.

Each test enforces one criterion at its stated tolerance and prints a
single PASS line with the measured numbers (run with ``pytest -v -s``
to see them).  Workloads are sized to the per-criterion runtime budgets
on a two-core machine.
"""

import math

import numpy as np
import pytest

from qcalsim.constants import KB
from qcalsim.fokker_planck import (
    fp_coefficients,
    j1_closed_form,
    j1_numeric,
    reduce_to_stationary,
)
from qcalsim.hybridme import HybridDensity, build_grid, evolve, marginal_and_validate
from qcalsim.liouville import V1, m0_matrix, q_vector, spectral_decomposition
from qcalsim.params import nominal_params
from qcalsim.rates import jump_rates
from qcalsim.stats import bin_to_cells, distance_metrics
from qcalsim.trajectory import (
    gibbs_excited_probability,
    run_ensemble,
    run_trajectory,
    suggested_dt,
    HybridState,
    QubitState,
)
from qcalsim.cli import short_drive_protocol, stationary_run_plan


def _report(name: str, detail: str) -> None:
    print(f"ACCEPTANCE {name}: PASS ({detail})")


# ---------------------------------------------------------------------------


def test_a1_rate_identities():
    """Detailed balance and constant gap over random parameter draws."""
    rng = np.random.default_rng(2024)
    worst_ratio = 0.0
    worst_gap = 0.0
    for _ in range(1000):
        g2 = 10.0 ** rng.uniform(-3, 0)
        kappa = rng.uniform(0.0, 0.2)
        p = nominal_params(g2=g2, kappa=kappa)
        x = 10.0 ** rng.uniform(math.log10(2.0 * p.delta_xq), 1.0)
        r = jump_rates(x, p)
        ratio_expected = math.exp(p.level_spacing / (KB * math.sqrt(x)))
        worst_ratio = max(worst_ratio, abs(r.down / r.up / ratio_expected - 1.0))
        worst_gap = max(worst_gap, abs((r.down - r.up) / (g2 * p.omega) - 1.0))
    assert worst_ratio < 1e-12
    assert worst_gap < 1e-12
    _report("1 rate identities", f"worst ratio err {worst_ratio:.2e}, gap err {worst_gap:.2e}")


def test_a2_kernel_and_spectrum(params, x_grid_100):
    """Kernel residual, left null vector, eigenvalue set, completeness."""
    worst_kernel = 0.0
    worst_v1 = 0.0
    worst_eig = 0.0
    worst_complete = 0.0
    for x in x_grid_100:
        m0 = m0_matrix(x, params)
        scale = float(np.max(np.abs(m0)))
        q = q_vector(x, params)
        worst_kernel = max(worst_kernel, float(np.max(np.abs(m0 @ q))) / scale)
        worst_v1 = max(worst_v1, float(np.max(np.abs(V1 @ m0))) / scale)
        sd = spectral_decomposition(m0, x=x)
        g = jump_rates(x, params).total
        assert sd.eigenvalues[0] == 0.0
        worst_eig = max(worst_eig, abs(sd.eigenvalues[1] - (-0.5 * g)) / g)
        worst_complete = max(worst_complete, sd.completeness_residual())
    assert worst_kernel < 1e-12  # relative to the generator magnitude
    assert worst_v1 < 1e-12
    assert worst_eig < 1e-10
    assert worst_complete < 1e-9
    _report(
        "2 kernel and spectrum",
        f"|m0 Q|/|m0| {worst_kernel:.2e}, eig err {worst_eig:.2e}, "
        f"completeness {worst_complete:.2e}",
    )


def test_a3_j1_identity(x_grid_100):
    """Matrix-element drift correction vs its closed rate form."""
    pairs = [(0.1, 0.05), (0.05, 0.05), (0.1, 0.01), (0.3, 0.1), (0.02, 0.002)]
    worst = 0.0
    for g2, kappa in pairs:
        p = nominal_params(g2=g2, kappa=kappa)
        for x in x_grid_100:
            a = j1_numeric(x, p)
            b = j1_closed_form(x, p)
            worst = max(worst, abs(a / b - 1.0))
    assert worst < 1e-10
    _report("3 j1 identity", f"100 X x 5 couplings, worst rel err {worst:.2e}")


def test_a4_undriven_equilibrium(params_undriven):
    """kappa = 0, g^2 = 0.1: stationary temperature and X variance.

    The alternating jump channels add no net diffusion, so the
    equilibrium X variance is the phonon value 2 k_B T_p^3 / C.
    """
    p = params_undriven
    tp = p.phonon_temp
    var_ou = 2.0 * KB * tp**3 / p.heat_capacity_coeff

    # (a) stationary temperature of the reduced equation
    coeffs, res = reduce_to_stationary(p, n=2001)
    assert res.t_s == pytest.approx(tp, abs=1e-10)

    # (b) FP variance within 5% of the linearized value
    tp2 = tp * tp
    grid = np.linspace(0.2 * tp2, 3.0 * tp2, 4001)
    c = fp_coefficients(grid, p)
    from qcalsim.fokker_planck import stationary_distribution

    f = stationary_distribution(c)
    mean_fp = float(np.sum(f * grid) * c.dx)
    var_fp = float(np.sum(f * grid**2) * c.dx - mean_fp**2)
    assert var_fp == pytest.approx(var_ou, rel=0.05)

    # (b) MC variance within 15% (statistical): pooled across the window
    burn = 6.0e-6   # ~1.5 phonon relaxation times
    window = 8.0e-6
    sd = math.sqrt(var_ou)
    dt = suggested_dt(p, tp2 + 8.0 * sd)
    ens = run_ensemble(1000, burn + window, dt, p, base_seed=404,
                       frame="rotating", accumulate_from=burn)
    means = ens.stat_x / ens.stat_count
    var_mc = float(ens.time_var_x().mean() + means.var(ddof=1))
    assert var_mc == pytest.approx(var_ou, rel=0.15)
    _report(
        "4 undriven equilibrium",
        f"T_S - T_p = {res.t_s - tp:.2e} K, var(FP)/var(OU) = {var_fp / var_ou:.3f}, "
        f"var(MC)/var(OU) = {var_mc / var_ou:.3f}",
    )


def test_a5_mc_me_consistency(params):
    """Short-drive protocol: ensemble histogram vs master-equation marginal."""
    horizon, dt = short_drive_protocol(params)
    grid = build_grid(params, 0.0, 0.016, 28)
    pe = gibbs_excited_probability(params)
    qubit0 = np.diag([pe, 1.0 - pe]).astype(complex)

    l1s = {}
    means = {}
    for g2, seed in ((0.05, 1001), (0.1, 1002)):
        p = params.with_(g2=g2)
        ens = run_ensemble(100_000, horizon, dt, p, base_seed=seed, frame="lab")
        rho0 = HybridDensity.delta(grid, p.phonon_temp**2, qubit0)
        resm = evolve(rho0, 0.0, horizon, horizon / 400.0, p, "rotating")
        f_me, diag = marginal_and_validate(resm.density)
        mc = bin_to_cells(ens.final_x, grid.x)
        l1, _ = distance_metrics(mc, f_me, grid.dx)
        l1s[g2] = l1
        means[g2] = float(np.mean(ens.final_te))
        assert l1 < 0.05, (g2, l1)
    # heating grows with the coupling
    assert means[0.1] > means[0.05] > params.phonon_temp
    _report(
        "5 MC-ME consistency",
        f"L1(g2=0.05) = {l1s[0.05]:.3f}, L1(g2=0.1) = {l1s[0.1]:.3f}, "
        f"mean Te {means[0.05]:.5f} -> {means[0.1]:.5f} K",
    )


def test_a6_fp_mc_stationary(params):
    """Long-horizon ensemble mean vs the reduced-equation root, and the
    closed form in its cold regime (hbar w / k_B T_S > 4)."""
    # driven operating point: strong heating
    plan = stationary_run_plan(params)
    ens = run_ensemble(512, plan["horizon_s"], plan["dt_s"], params,
                       base_seed=606, frame="rotating",
                       accumulate_from=plan["burn_s"])
    tm = ens.time_mean_te()
    mc_mean = float(tm.mean())
    mc_se = float(tm.std(ddof=1) / math.sqrt(tm.size))
    _, res = reduce_to_stationary(params, n=2001)
    n_el = params.electron_count
    tol = 3.0 * mc_se + 2.0 / n_el * res.t_s
    assert abs(mc_mean - res.t_s) < tol
    rel_gap = abs(mc_mean - res.t_s) / res.t_s

    # cold weak-drive point: closed form within 1%
    p2 = nominal_params(g2=0.01, kappa=2.0e-4)
    plan2 = stationary_run_plan(p2)
    ens2 = run_ensemble(512, plan2["horizon_s"], plan2["dt_s"], p2,
                        base_seed=607, frame="rotating",
                        accumulate_from=plan2["burn_s"])
    tm2 = ens2.time_mean_te()
    mc2 = float(tm2.mean())
    se2 = float(tm2.std(ddof=1) / math.sqrt(tm2.size))
    _, res2 = reduce_to_stationary(p2, n=2001)
    assert p2.level_spacing / (KB * res2.t_s) > 4.0
    assert res2.t_s == pytest.approx(res2.t_s_closed, rel=0.01)
    assert abs(mc2 - res2.t_s) < 3.0 * se2 + 2.0 / n_el * res2.t_s
    _report(
        "6 FP-MC stationary",
        f"strong: MC {mc_mean:.5f}+-{mc_se:.1e} vs T_S {res.t_s:.5f} K "
        f"(rel gap {rel_gap:.1e}); cold: T_S {res2.t_s:.5f} vs closed "
        f"{res2.t_s_closed:.5f} K ({abs(res2.t_s / res2.t_s_closed - 1):.2%})",
    )


def test_a7_hybrid_me_health(params):
    """Trace drift, positivity, and grid-refinement stability."""
    horizon, _ = short_drive_protocol(params)
    pe = gibbs_excited_probability(params)
    qubit0 = np.diag([pe, 1.0 - pe]).astype(complex)
    means = {}
    health = {}
    for m in (7, 14):
        grid = build_grid(params, 0.0, 0.016, m)
        rho0 = HybridDensity.delta(grid, params.phonon_temp**2, qubit0)
        res = evolve(rho0, 0.0, horizon, horizon / 400.0, params, "rotating")
        _, diag = marginal_and_validate(res.density)
        means[m] = res.density.mean_te()
        health[m] = diag
        assert abs(diag["total_mass"] - 1.0) < 1e-8
        assert diag["min_eigenvalue"] > -1e-8
        assert res.leak < 1e-6
    shift = abs(means[14] / means[7] - 1.0)
    assert shift < 1e-3
    _report(
        "7 hybrid-ME health",
        f"trace err {abs(health[14]['total_mass'] - 1.0):.1e}, "
        f"min eig {health[14]['min_eigenvalue']:.1e}, m 7->14 mean shift {shift:.2e}",
    )


def test_a8_determinism(params):
    """Identical seeds give byte-identical outputs for any thread count."""
    horizon, dt = short_drive_protocol(params)
    horizon /= 10.0
    runs = [
        run_ensemble(256, horizon, dt, params, base_seed=99, frame="lab", threads=t)
        for t in (1, 2)
    ]
    assert np.array_equal(runs[0].final_x, runs[1].final_x)
    assert np.array_equal(runs[0].final_te, runs[1].final_te)
    assert np.array_equal(runs[0].n_down, runs[1].n_down)
    assert np.array_equal(runs[0].n_up, runs[1].n_up)
    byte_hash = [r.final_x.tobytes() for r in runs]
    assert byte_hash[0] == byte_hash[1]
    rec1 = run_trajectory(HybridState(QubitState.ground(), 0.01), horizon, dt,
                          params, seed=5, frame="lab")
    rec2 = run_trajectory(HybridState(QubitState.ground(), 0.01), horizon, dt,
                          params, seed=5, frame="lab")
    assert np.array_equal(rec1.te, rec2.te)
    assert np.array_equal(rec1.jump_times, rec2.jump_times)
    _report("8 determinism", "bit-identical across thread counts and reruns")
