"""Transition rates, phonon drift/diffusion, and the qubit Hamiltonian.

The two-level system exchanges quanta hbar*omega with the electron bath at
rates obeying detailed balance with respect to the instantaneous electron
temperature Te = sqrt(X):

    gamma_down / gamma_up = exp(hbar*omega / (k_B * Te))
    gamma_down - gamma_up = g^2 * omega            (exactly, all Te)

Below the threshold X <= hbar*omega/C the bath cannot supply one quantum
without going to negative temperature squared, so excitation is switched
off and the decay rate is clamped to a configurable floor.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .constants import KB
from .errors import ConfigError
from .params import PhysicalParams

__all__ = [
    "JumpRates",
    "jump_rates",
    "jump_rates_arrays",
    "phonon_coefficients",
    "drive_hamiltonian",
    "SIGMA_X",
    "SIGMA_Z",
    "SIGMA_PLUS",
    "SIGMA_MINUS",
]

# Pauli matrices in the sigma_z eigenbasis {phi_+, phi_-} (excited first).
SIGMA_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)
SIGMA_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
SIGMA_PLUS = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
SIGMA_MINUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)


@dataclass(frozen=True)
class JumpRates:
    """Decay (down) and excitation (up) rates in 1/s."""

    down: float
    up: float

    @property
    def total(self) -> float:
        return self.down + self.up


def jump_rates(x: float, params: PhysicalParams) -> JumpRates:
    """Jump rates at temperature squared ``x`` (kelvin^2).

    Above threshold the rates are computed as
    up = g^2 omega / expm1(y), down = up + g^2 omega with
    y = hbar*omega/(k_B sqrt(x)), which makes the constant gap
    down - up = g^2 omega exact in floating point and is overflow-safe
    for small x.
    """
    if x < 0.0:
        raise ValueError(f"temperature squared must be >= 0, got {x}")
    if x <= params.delta_xq:
        return JumpRates(down=params.gamma_floor, up=0.0)
    y = params.level_spacing / (KB * np.sqrt(x))
    g2w = params.g2 * params.omega
    up = g2w / np.expm1(y)
    return JumpRates(down=up + g2w, up=up)


def jump_rates_arrays(x: np.ndarray, params: PhysicalParams) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized jump rates over an array of X values -> (down, up)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("temperature squared must be >= 0")
    g2w = params.g2 * params.omega
    above = x > params.delta_xq
    up = np.zeros_like(x)
    down = np.full_like(x, params.gamma_floor)
    xs = np.where(above, x, 1.0)  # dummy value below threshold
    y = params.level_spacing / (KB * np.sqrt(xs))
    up_above = g2w / np.expm1(y)
    up[above] = up_above[above]
    down[above] = up_above[above] + g2w
    return down, up


def phonon_coefficients(x: float | np.ndarray, params: PhysicalParams) -> tuple:
    """Electron-phonon drift and diffusion of X = Te^2.

    Returns ``(drift, diffusion)`` with drift = Sigma*V*(T_p^5 - X^{5/2})/C
    in K^2/s and diffusion the Ito variance rate 10 k_B Sigma*V T_p^6 / C^2
    in K^4/s.  The noise amplitude is evaluated at the phonon temperature,
    so the diffusion does not depend on X.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0.0):
        raise ValueError("temperature squared must be >= 0")
    c = params.heat_capacity_coeff
    tp = params.phonon_temp
    drift = params.sigma_v * (tp**5 - x**2.5) / c
    diffusion = 10.0 * KB * params.sigma_v * tp**6 / c**2
    if drift.ndim == 0:
        return float(drift), diffusion
    return drift, np.full_like(drift, diffusion)


def drive_hamiltonian(t: float, params: PhysicalParams, frame: str = "lab") -> np.ndarray:
    """Qubit Hamiltonian (2x2 Hermitian, joule).

    ``frame="lab"``:  (hbar*omega/2) sigma_z
                      + kappa*hbar*omega (e^{-i w_d t} sigma_+ + h.c.)
    ``frame="rotating"``: time-independent kappa*hbar*omega sigma_x; only
    supported on resonance (w_d == omega).
    """
    hw = params.level_spacing
    k = params.drive_strength
    if frame == "rotating":
        if params.drive_frequency != params.omega:
            raise ConfigError(
                "rotating frame is only supported at resonance "
                f"(omega_d={params.drive_frequency:g}, omega={params.omega:g})"
            )
        return k * hw * SIGMA_X
    if frame != "lab":
        raise ConfigError(f"unknown frame {frame!r} (expected 'lab' or 'rotating')")
    phase = np.exp(-1j * params.drive_frequency * t)
    h = 0.5 * hw * SIGMA_Z + k * hw * (phase * SIGMA_PLUS + np.conj(phase) * SIGMA_MINUS)
    return h
