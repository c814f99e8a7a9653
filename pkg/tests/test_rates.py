import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from qcalsim.constants import HBAR, KB
from qcalsim.errors import ConfigError
from qcalsim.params import nominal_params
from qcalsim.rates import (
    SIGMA_X,
    SIGMA_Z,
    drive_hamiltonian,
    jump_rates,
    jump_rates_arrays,
    phonon_coefficients,
)


# ---------------------------------------------------------------------------
# jump rates


def _rates_mpmath(x, params):
    """Independent high-precision evaluation of the rate formulas."""
    with mpmath.workdps(50):
        y = mpmath.mpf(params.level_spacing) / (mpmath.mpf(KB) * mpmath.sqrt(mpmath.mpf(x)))
        g2w = mpmath.mpf(params.g2) * mpmath.mpf(params.omega)
        ey = mpmath.e**y
        down = g2w * ey / (ey - 1)
        up = g2w / (ey - 1)
        return float(down), float(up)


def test_subthreshold_floor(params):
    r = jump_rates(0.5 * params.delta_xq, params)
    assert r.down == params.gamma_floor
    assert r.up == 0.0
    # the threshold itself belongs to the floor branch
    r = jump_rates(params.delta_xq, params)
    assert (r.down, r.up) == (params.gamma_floor, 0.0)
    r0 = jump_rates(0.0, params)
    assert (r0.down, r0.up) == (params.gamma_floor, 0.0)


def test_negative_x_rejected(params):
    with pytest.raises(ValueError):
        jump_rates(-1e-9, params)
    with pytest.raises(ValueError):
        jump_rates_arrays(np.array([0.01, -0.01]), params)


def test_constant_gap(params, x_grid_100):
    g2w = params.g2 * params.omega
    for x in x_grid_100:
        r = jump_rates(x, params)
        assert r.down - r.up == pytest.approx(g2w, rel=1e-12)


def test_detailed_balance_against_high_precision(params, x_grid_100):
    for x in x_grid_100:
        r = jump_rates(x, params)
        d_ref, u_ref = _rates_mpmath(x, params)
        assert r.down == pytest.approx(d_ref, rel=1e-13)
        assert r.up == pytest.approx(u_ref, rel=1e-13)
        ratio_expected = math.exp(params.level_spacing / (KB * math.sqrt(x)))
        assert r.down / r.up == pytest.approx(ratio_expected, rel=1e-12)


@settings(max_examples=200, deadline=None)
@given(
    x=st.floats(min_value=1e-3, max_value=10.0),
    g2=st.floats(min_value=1e-4, max_value=1.0),
)
def test_rate_invariants_property(x, g2):
    p = nominal_params(g2=g2)
    r = jump_rates(x, p)
    assert r.down > 0
    assert r.up >= 0
    if x > p.delta_xq:
        y = p.level_spacing / (KB * math.sqrt(x))
        assert r.up * math.exp(y) == pytest.approx(r.down, rel=1e-12)
        assert r.down - r.up == pytest.approx(g2 * p.omega, rel=1e-12)


def test_vectorized_rates_match_scalar(params, x_grid_100):
    down, up = jump_rates_arrays(x_grid_100, params)
    for i, x in enumerate(x_grid_100):
        r = jump_rates(x, params)
        assert down[i] == r.down
        assert up[i] == r.up


# ---------------------------------------------------------------------------
# phonon coefficients


def test_phonon_drift_zero_at_equilibrium(params):
    # zero up to the rounding of (Tp^2)^{5/2} against Tp^5
    drift, _ = phonon_coefficients(params.phonon_temp**2, params)
    scale = params.sigma_v * params.phonon_temp**5 / params.heat_capacity_coeff
    assert abs(drift) < 1e-12 * scale


def test_phonon_drift_sign(params):
    tp2 = params.phonon_temp**2
    below, _ = phonon_coefficients(0.5 * tp2, params)
    above, _ = phonon_coefficients(2.0 * tp2, params)
    assert below > 0  # heats toward the phonon bath
    assert above < 0


def test_phonon_diffusion_x_independent(params):
    xs = np.array([1e-4, 0.01, 0.04, 0.16])
    _, diff = phonon_coefficients(xs, params)
    assert np.all(diff == diff[0])
    expected = 10.0 * KB * params.sigma_v * params.phonon_temp**6 / params.heat_capacity_coeff**2
    assert diff[0] == pytest.approx(expected, rel=1e-15)


# ---------------------------------------------------------------------------
# drive Hamiltonian


def test_lab_hamiltonian_at_t0(params):
    h = drive_hamiltonian(0.0, params, "lab")
    hw = params.level_spacing
    expected = 0.5 * hw * SIGMA_Z + params.drive_strength * hw * SIGMA_X
    assert np.allclose(h, expected, atol=0)


@settings(max_examples=50, deadline=None)
@given(t=st.floats(min_value=0.0, max_value=1e-9))
def test_lab_hamiltonian_hermitian(t):
    p = nominal_params()
    h = drive_hamiltonian(t, p, "lab")
    assert np.allclose(h, h.conj().T, rtol=0, atol=1e-30)


def test_rotating_requires_resonance(params):
    p = params.with_(drive_frequency=0.9 * params.omega)
    with pytest.raises(ConfigError):
        drive_hamiltonian(0.0, p, "rotating")


def test_unknown_frame_rejected(params):
    with pytest.raises(ConfigError):
        drive_hamiltonian(0.0, params, "interaction")


def test_lab_propagator_equals_rotated_rotating_propagator(params):
    """One drive period: U_lab(T) == e^{-i w T sigma_z/2} U_rot(T).

    The lab side comes from a high-accuracy ODE integration of the
    Schroedinger equation (independent oracle); the rotating side is the
    closed-form exponential of the static rotating Hamiltonian.
    """
    p = params  # kappa = 0.05, resonant
    period = 2.0 * math.pi / p.drive_frequency

    def rhs_real(t, y):
        u = (y[:4] + 1j * y[4:]).reshape(2, 2)
        du = -1j * (drive_hamiltonian(t, p, "lab") / HBAR) @ u
        return np.concatenate([du.real.ravel(), du.imag.ravel()])

    y0 = np.concatenate([np.eye(2).ravel(), np.zeros(4)])
    sol = solve_ivp(
        rhs_real, (0.0, period), y0, method="DOP853", rtol=1e-13, atol=1e-13
    )
    u_lab = (sol.y[:4, -1] + 1j * sol.y[4:, -1]).reshape(2, 2)

    theta = p.drive_strength * p.omega * period  # rotating-frame rotation angle
    u_rot = math.cos(theta) * np.eye(2) - 1j * math.sin(theta) * SIGMA_X
    rot_back = np.diag([np.exp(-1j * p.drive_frequency * period / 2.0),
                        np.exp(1j * p.drive_frequency * period / 2.0)])
    diff = u_lab - rot_back @ u_rot
    assert np.linalg.norm(diff, ord=2) < 1e-10
