import math

import numpy as np
import pytest

from qcalsim.constants import KB
from qcalsim.errors import ConfigError, NumericsError
from qcalsim.hybridme import (
    HybridDensity,
    apply_generator,
    build_grid,
    default_grid,
    evolve,
    marginal_and_validate,
)
from qcalsim.params import nominal_params
from qcalsim.rates import jump_rates
from qcalsim.stats import bin_to_cells, distance_metrics
from qcalsim.trajectory import gibbs_excited_probability, run_ensemble


def _gibbs_rho(params):
    pe = gibbs_excited_probability(params)
    return np.diag([pe, 1.0 - pe]).astype(complex)


# ---------------------------------------------------------------------------
# grid


def test_grid_shift_alignment(params):
    for m in (1, 4):
        grid = build_grid(params, 0.0, 16.0 * params.phonon_temp**2, m)
        assert grid.dx == pytest.approx(params.delta_xq / m, rel=1e-15)
        assert grid.m == m
        # jump shift lands exactly m nodes away
        assert grid.x[m] - grid.x[0] == pytest.approx(params.delta_xq, rel=1e-12)


def test_grid_too_small(params):
    with pytest.raises(ConfigError, match="grid too small"):
        build_grid(params, 0.0, 2.0 * params.delta_xq, 1)


def test_default_grid_resolution(params):
    grid = default_grid(params)
    assert grid.dx <= params.phonon_temp**2 / 200.0
    assert grid.x_min == 0.0
    assert grid.x_max >= 16.0 * params.phonon_temp**2 - 1e-12


def test_density_normalization(params):
    grid = build_grid(params, 0.0, 0.02, 2)
    rho = HybridDensity.delta(grid, 0.01, _gibbs_rho(params))
    assert rho.norm() == pytest.approx(1.0, rel=1e-14)
    f, diag = marginal_and_validate(rho)
    assert np.sum(f) * grid.dx == pytest.approx(1.0, rel=1e-14)
    assert diag["min_eigenvalue"] >= 0.0
    assert diag["herm_residual"] == 0.0


# ---------------------------------------------------------------------------
# generator structure


def test_generator_conserves_total_trace(params):
    grid = build_grid(params, 0.0, 0.03, 3)
    rng = np.random.default_rng(3)
    # random Hermitian blocks supported away from the upper edge
    rho = np.zeros((grid.n, 2, 2), dtype=complex)
    interior = slice(0, grid.n - 2 * grid.m)
    raw = rng.standard_normal((grid.n, 2, 2)) + 1j * rng.standard_normal((grid.n, 2, 2))
    raw = 0.5 * (raw + np.conj(np.swapaxes(raw, 1, 2)))
    rho[interior] = raw[interior]
    d = HybridDensity(rho=rho, grid=grid)
    deriv, leak = apply_generator(d, 0.0, params, "rotating")
    total = np.einsum("ikk->", deriv).real * grid.dx
    assert leak == 0.0
    scale = np.max(np.abs(deriv)) * grid.n * grid.dx
    assert abs(total) < 1e-12 * scale


def test_down_jump_moves_mass_up_m_nodes(params):
    grid = build_grid(params, 0.0, 0.03, 5)
    i0 = 30
    rho = np.zeros((grid.n, 2, 2), dtype=complex)
    rho[i0, 0, 0] = 1.0 / grid.dx  # excited at node i0
    d = HybridDensity(rho=rho, grid=grid)
    deriv, _ = apply_generator(d, 0.0, params, "rotating")
    gains = deriv[:, 1, 1].real.copy()
    gains[i0] = 0.0  # remove the local loss/unitary action
    k = int(np.argmax(gains))
    assert k == i0 + grid.m
    gd = jump_rates(grid.x[i0], params).down
    assert deriv[k, 1, 1].real == pytest.approx(gd / grid.dx, rel=1e-12)


def test_probability_leak_detected(params):
    grid = build_grid(params, 0.0, 0.02, 2)
    rho = np.zeros((grid.n, 2, 2), dtype=complex)
    rho[-1, 0, 0] = 1.0 / grid.dx  # excited mass at the top edge
    d = HybridDensity(rho=rho, grid=grid)
    deriv, leak = apply_generator(d, 0.0, params, "rotating")
    gd = jump_rates(grid.x[-1], params).down
    assert leak == pytest.approx(gd, rel=1e-12)
    with pytest.raises(NumericsError, match="leak"):
        evolve(d, 0.0, 2e-10, 1e-12, params, "rotating")


def test_lindblad_limit_relaxation_rate(params):
    """Huge heat capacity shrinks the jump quantum; the X-summed qubit
    state then follows the closed-form two-level relaxation."""
    p = params.with_(heat_capacity_coeff=params.heat_capacity_coeff * 1e6,
                     drive_strength=0.0)
    x0 = p.phonon_temp**2
    grid = build_grid(p, x0 - 20 * p.delta_xq, x0 + 20 * p.delta_xq, 1)
    rho = HybridDensity.delta(grid, x0, np.diag([1.0, 0.0]).astype(complex))
    r = jump_rates(x0, p)
    t1 = 1.0 / r.total
    res = evolve(rho, 0.0, t1, t1 / 2000.0, p, "rotating", leak_abort=1e-6)
    # population of the X-summed qubit state vs analytic relaxation
    pop = float(np.sum(res.density.rho[:, 0, 0]).real * grid.dx)
    p_eq = r.up / r.total
    expected = p_eq + (1.0 - p_eq) * math.exp(-r.total * t1)
    assert pop == pytest.approx(expected, rel=1e-6)


# ---------------------------------------------------------------------------
# evolution


def test_zero_generator_identity():
    p = nominal_params(g2=0.0, kappa=0.0).with_(sigma_v=1e-300, gamma_floor=1e-300)
    grid = build_grid(p, 0.0, 0.02, 2)
    rng = np.random.default_rng(1)
    raw = rng.standard_normal((grid.n, 2, 2)) + 1j * rng.standard_normal((grid.n, 2, 2))
    raw = 0.5 * (raw + np.conj(np.swapaxes(raw, 1, 2)))
    raw /= np.einsum("ikk->", raw).real * grid.dx
    d = HybridDensity(rho=raw.copy(), grid=grid)
    res = evolve(d, 0.0, 1e-6, 1e-8, p, "rotating")
    assert np.allclose(res.density.rho, raw, rtol=0, atol=1e-13)


def test_norm_drift_small_over_many_steps(params_undriven):
    # undriven equilibrium on a grid anchored at X = 0: no leak channels,
    # conservation is purely a property of the scheme
    grid = build_grid(params_undriven, 0.0, 0.018, 1)
    rho = HybridDensity.delta(grid, 0.01, _gibbs_rho(params_undriven))
    n_steps = 100_000
    dt = 1.8e-11
    res = evolve(rho, 0.0, n_steps * dt, dt, params_undriven, "rotating")
    assert abs(res.norm_drift) < 1e-8
    assert res.leak < 1e-6
    assert res.steps == n_steps


def test_cfl_error_lists_limits(params):
    grid = build_grid(params, 0.0, 0.02, 2)
    rho = HybridDensity.delta(grid, 0.01, _gibbs_rho(params))
    with pytest.raises(ConfigError) as err:
        evolve(rho, 0.0, 1e-9, 1e-9, params, "rotating")
    msg = str(err.value)
    assert "qubit_rate*dt" in msg and "drift_cfl*dt" in msg and "diffusion_cfl*dt" in msg


def test_positivity_and_trace_through_drive(params):
    grid = build_grid(params, 0.0, 0.02, 2)
    rho = HybridDensity.delta(grid, 0.01, _gibbs_rho(params))
    horizon = 10.0 * 2.0 * math.pi / params.omega
    res = evolve(rho, 0.0, horizon, horizon / 300.0, params, "rotating")
    f, diag = marginal_and_validate(res.density)
    assert abs(diag["total_mass"] - 1.0) < 1e-8
    assert diag["min_eigenvalue"] > -1e-8
    assert np.all(f >= -1e-8)


def test_lab_and_rotating_marginals_agree(params):
    grid = build_grid(params, 0.0, 0.02, 2)
    rho = HybridDensity.delta(grid, 0.01, _gibbs_rho(params))
    horizon = 4.0 * 2.0 * math.pi / params.omega
    res_rot = evolve(rho, 0.0, horizon, horizon / 400.0, params, "rotating")
    res_lab = evolve(rho, 0.0, horizon, horizon / 40000.0, params, "lab")
    f_rot, _ = marginal_and_validate(res_rot.density)
    f_lab, _ = marginal_and_validate(res_lab.density)
    l1, _ = distance_metrics(f_rot, f_lab, grid.dx)
    assert l1 < 1e-3


def test_undriven_stationary_marginal_variance(params_undriven):
    """Long evolution reaches the phonon equilibrium: variance of X is the
    phonon value 2 k_B T_p^3 / C (the alternating jumps add none)."""
    p = params_undriven
    tp2 = p.phonon_temp**2
    var_expected = 2.0 * KB * p.phonon_temp**3 / p.heat_capacity_coeff
    sd = math.sqrt(var_expected)
    # start the grid at X = 0: an elevated bottom edge would leak real
    # probability through the up-jump channel (the left tail is fat)
    grid = build_grid(p, 0.0, tp2 + 8.0 * sd, 7)
    rho = HybridDensity.delta(grid, tp2, _gibbs_rho(p))
    theta = 2.5 * p.sigma_v * p.phonon_temp**3 / p.heat_capacity_coeff
    horizon = 2.5 / theta
    gmax = jump_rates(grid.x_max, p).down
    res = evolve(rho, 0.0, horizon, 0.4 / gmax, p, "rotating")
    assert res.density.var_x() == pytest.approx(var_expected, rel=0.05)
    assert abs(res.norm_drift) < 1e-8


def test_short_drive_marginal_matches_trajectories(params):
    """Reduced-size version of the central consistency check.

    The grid must resolve the sub-quantum phonon smear accumulated over
    the short horizon (sigma ~ sqrt(var_rate * t) ~ delta_xq/13), so the
    comb teeth carry their true shape: m = 28 gives dx ~ sigma/2.
    """
    horizon = 10.0 * 2.0 * math.pi / params.omega
    dt = 1.0 / (1000.0 * params.omega)
    ens = run_ensemble(20_000, horizon, dt, params, base_seed=77, frame="lab")
    grid = build_grid(params, 0.0, 0.016, 28)
    rho = HybridDensity.delta(grid, params.phonon_temp**2, _gibbs_rho(params))
    res = evolve(rho, 0.0, horizon, horizon / 400.0, params, "rotating")
    f_me, _ = marginal_and_validate(res.density)
    mc = bin_to_cells(ens.final_x, grid.x)
    l1, ks = distance_metrics(mc, f_me, grid.dx)
    assert l1 < 0.08  # 0.05 at 1e5 trajectories; statistical floor ~1/sqrt(n)
    assert ks < 0.05
