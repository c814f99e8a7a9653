"""Deterministic evolution of the joint qubit-temperature density.

The state is a grid of 2x2 Hermitian qubit blocks rho(X_i), one per
temperature-squared node, normalized so that sum_i trace(rho_i) * dX = 1.
Block-diagonality in X is structural: the representation stores no
X-coherences, which is exactly the completely positive discrete-jump
structure of the joint dynamics (measuring the temperature can reveal no
quantumness).

The generator has three parts:

* unitary qubit rotation at each node;
* the dissipator with shifted reinjection: a down jump moves population
  from the excited component at X to the ground component at
  X + hbar*omega/C (exactly m grid nodes up, since dX = (hbar*omega/C)/m),
  an up jump does the reverse;
* conservative drift-diffusion in X (upwind drift, centered diffusion,
  zero-flux boundaries) matching the phonon coefficients of the
  trajectory process.

Reinjection sourced outside the grid is dropped and accounted as a
probability leak; evolution aborts when the accumulated leak exceeds a
threshold.  With exact m-node shifts and zero-flux boundaries, total
trace is conserved up to that leak.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import HBAR
from .errors import ConfigError, NumericsError
from .params import PhysicalParams
from .rates import drive_hamiltonian, jump_rates_arrays, phonon_coefficients

__all__ = [
    "XGrid",
    "HybridDensity",
    "EvolveResult",
    "build_grid",
    "apply_generator",
    "evolve",
    "marginal_and_validate",
    "default_grid",
]


@dataclass(frozen=True)
class XGrid:
    """Uniform X grid whose spacing divides the jump quantum exactly."""

    x: np.ndarray
    dx: float
    m: int  # nodes per jump quantum: dx = delta_xq / m

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def x_min(self) -> float:
        return float(self.x[0])

    @property
    def x_max(self) -> float:
        return float(self.x[-1])


def build_grid(params: PhysicalParams, x_min: float, x_max: float, m: int) -> XGrid:
    """Grid with dX = delta_xq / m, nodes at x_min + k*dX.

    x_max is rounded up to the next node so the span is a whole number of
    cells.  The span must cover at least three jump quanta.
    """
    if m < 1:
        raise ConfigError(f"subdivision m must be >= 1, got {m}")
    if x_min < 0.0:
        raise ConfigError(f"x_min must be >= 0, got {x_min}")
    if x_max - x_min < 3.0 * params.delta_xq:
        raise ConfigError(
            f"grid too small: span {x_max - x_min:g} < 3 jump quanta "
            f"({3.0 * params.delta_xq:g})"
        )
    dx = params.delta_xq / m
    n_cells = int(math.ceil((x_max - x_min) / dx - 1e-9))
    x = x_min + dx * np.arange(n_cells + 1)
    return XGrid(x=x, dx=dx, m=m)


def default_grid(params: PhysicalParams, m: int | None = None) -> XGrid:
    """Experiment default: [0, (4 T_p)^2] with dX <= T_p^2 / 200."""
    tp2 = params.phonon_temp**2
    if m is None:
        m = max(1, int(math.ceil(200.0 * params.delta_xq / tp2)))
    return build_grid(params, 0.0, 16.0 * tp2, m)


@dataclass
class HybridDensity:
    """Per-node 2x2 qubit blocks; sum_i trace(rho_i) * dX = 1."""

    rho: np.ndarray  # (n, 2, 2) complex
    grid: XGrid

    def __post_init__(self):
        if self.rho.shape != (self.grid.n, 2, 2):
            raise ValueError(
                f"block array shape {self.rho.shape} does not match grid ({self.grid.n})"
            )

    @classmethod
    def delta(cls, grid: XGrid, x0: float, qubit_rho: np.ndarray) -> "HybridDensity":
        """All mass at the node nearest x0 with the given qubit state."""
        qubit_rho = np.asarray(qubit_rho, dtype=complex)
        tr = np.trace(qubit_rho).real
        if abs(tr - 1.0) > 1e-12:
            raise ValueError(f"qubit state must have unit trace, got {tr}")
        i = int(np.argmin(np.abs(grid.x - x0)))
        rho = np.zeros((grid.n, 2, 2), dtype=complex)
        rho[i] = qubit_rho / grid.dx
        return cls(rho=rho, grid=grid)

    def marginal(self) -> np.ndarray:
        """Temperature-squared density F(X_i) = trace(rho_i)."""
        return np.einsum("ikk->i", self.rho).real

    def norm(self) -> float:
        return float(np.sum(self.marginal()) * self.grid.dx)

    def mean_x(self) -> float:
        f = self.marginal()
        return float(np.sum(f * self.grid.x) * self.grid.dx)

    def var_x(self) -> float:
        f = self.marginal()
        m = np.sum(f * self.grid.x) * self.grid.dx
        return float(np.sum(f * self.grid.x**2) * self.grid.dx - m * m)

    def mean_te(self) -> float:
        f = self.marginal()
        return float(np.sum(f * np.sqrt(self.grid.x)) * self.grid.dx)

    def copy(self) -> "HybridDensity":
        return HybridDensity(rho=self.rho.copy(), grid=self.grid)


class _GeneratorContext:
    """Precomputed node data for repeated generator applications."""

    def __init__(self, grid: XGrid, params: PhysicalParams, frame: str):
        self.grid = grid
        self.params = params
        self.frame = frame
        self.gdown, self.gup = jump_rates_arrays(grid.x, params)
        drift, var = phonon_coefficients(grid.x, params)
        self.var_rate = float(var[0])
        x_faces = 0.5 * (grid.x[:-1] + grid.x[1:])
        self.b_face, _ = phonon_coefficients(x_faces, params)
        self.h_static = None
        if frame == "rotating":
            self.h_static = drive_hamiltonian(0.0, params, "rotating") / HBAR

    def hamiltonian_over_hbar(self, t: float) -> np.ndarray:
        if self.h_static is not None:
            return self.h_static
        return drive_hamiltonian(t, self.params, self.frame) / HBAR

    def stiffness(self, dt: float) -> dict[str, float]:
        """The competing stability limits multiplied by dt."""
        p = self.params
        qubit_rate = float(self.gdown.max() + self.gup.max()) + 4.0 * p.lam
        if self.frame == "lab":
            qubit_rate += p.omega
        drift_cfl = float(np.max(np.abs(self.b_face))) / self.grid.dx if self.grid.n > 1 else 0.0
        diff_cfl = self.var_rate / self.grid.dx**2
        return {
            "qubit_rate*dt": qubit_rate * dt,
            "drift_cfl*dt": drift_cfl * dt,
            "diffusion_cfl*dt": diff_cfl * dt,
        }


def _apply(ctx: _GeneratorContext, rho: np.ndarray, t: float) -> tuple[np.ndarray, float]:
    """Generator application on the raw block array -> (d rho/dt, leak rate)."""
    grid = ctx.grid
    m = grid.m
    n = grid.n
    gd, gu = ctx.gdown, ctx.gup
    out = np.empty_like(rho)

    # unitary part
    h = ctx.hamiltonian_over_hbar(t)
    np.matmul(h, rho, out=out)
    out -= rho @ h
    out *= -1j

    # dissipator: losses at each node
    r00 = rho[:, 0, 0]
    r11 = rho[:, 1, 1]
    r01 = rho[:, 0, 1]
    r10 = rho[:, 1, 0]
    half = 0.5 * (gd + gu)
    out[:, 0, 0] -= gd * r00
    out[:, 1, 1] -= gu * r11
    out[:, 0, 1] -= half * r01
    out[:, 1, 0] -= half * r10
    # shifted reinjection: down jumps move m nodes up, up jumps m nodes down
    out[m:, 1, 1] += gd[:-m] * r00[:-m]
    out[:-m, 0, 0] += gu[m:] * r11[m:]
    leak = float(np.sum(gd[n - m:] * r00[n - m:].real) + np.sum(gu[:m] * r11[:m].real))
    leak *= grid.dx

    # classical drift-diffusion, conservative flux form, zero-flux boundaries
    dx = grid.dx
    b = ctx.b_face  # (n-1,) face-centered drift
    upwind = np.where(b[:, None, None] > 0.0, rho[:-1], rho[1:])
    flux = b[:, None, None] * upwind - (0.5 * ctx.var_rate / dx) * (rho[1:] - rho[:-1])
    out[:-1] -= flux / dx
    out[1:] += flux / dx
    return out, leak


def apply_generator(
    rho: HybridDensity, t: float, params: PhysicalParams, frame: str = "rotating"
) -> tuple[np.ndarray, float]:
    """Time derivative of the block array and the probability leak rate."""
    ctx = _GeneratorContext(rho.grid, params, frame)
    return _apply(ctx, rho.rho, t)


@dataclass
class EvolveResult:
    """Final density plus run diagnostics (nothing is rescaled silently)."""

    density: HybridDensity
    steps: int
    leak: float          # accumulated probability leaked through the grid ends
    norm_drift: float    # final norm minus initial norm
    min_eigenvalue: float
    herm_residual: float


def evolve(
    rho: HybridDensity,
    t0: float,
    t1: float,
    dt_me: float,
    params: PhysicalParams,
    frame: str = "rotating",
    leak_abort: float = 1e-6,
) -> EvolveResult:
    """Explicit RK4 integration of the hybrid generator.

    Hermiticity is restored by symmetrization after every step; the total
    norm is monitored and reported, never adjusted.  Aborts if the
    accumulated reinjection leak exceeds ``leak_abort``.
    """
    if dt_me <= 0.0 or t1 <= t0:
        raise ConfigError("need dt_me > 0 and t1 > t0")
    ctx = _GeneratorContext(rho.grid, params, frame)
    limits = ctx.stiffness(dt_me)
    worst = max(limits.values())
    if worst >= 0.5:
        pretty = ", ".join(f"{k} = {v:.3g}" for k, v in limits.items())
        raise ConfigError(f"dt_me = {dt_me:g} violates the stability bound 0.5: {pretty}")

    n_steps = int(round((t1 - t0) / dt_me))
    if n_steps < 1:
        raise ConfigError("evolution window shorter than one step")
    dt_eff = (t1 - t0) / n_steps

    r = rho.rho.copy()
    norm0 = float(np.einsum("ikk->", r).real * rho.grid.dx)
    leak = 0.0
    t = t0
    for _ in range(n_steps):
        k1, l1 = _apply(ctx, r, t)
        k2, l2 = _apply(ctx, r + 0.5 * dt_eff * k1, t + 0.5 * dt_eff)
        k3, l3 = _apply(ctx, r + 0.5 * dt_eff * k2, t + 0.5 * dt_eff)
        k4, l4 = _apply(ctx, r + dt_eff * k3, t + dt_eff)
        r += (dt_eff / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        leak += (dt_eff / 6.0) * (l1 + 2.0 * (l2 + l3) + l4)
        r = 0.5 * (r + np.conj(np.swapaxes(r, 1, 2)))
        t += dt_eff
        if leak > leak_abort:
            raise NumericsError(
                f"probability leak {leak:.3e} exceeded {leak_abort:g} at t={t:g}; "
                "extend the grid"
            )

    out = HybridDensity(rho=r, grid=rho.grid)
    f, diag = marginal_and_validate(out)
    return EvolveResult(
        density=out,
        steps=n_steps,
        leak=leak,
        norm_drift=out.norm() - norm0,
        min_eigenvalue=diag["min_eigenvalue"],
        herm_residual=diag["herm_residual"],
    )


def marginal_and_validate(rho: HybridDensity) -> tuple[np.ndarray, dict]:
    """Marginal F(X_i) = trace(rho_i) plus health diagnostics."""
    r = rho.rho
    f = rho.marginal()
    herm = float(np.max(np.abs(r - np.conj(np.swapaxes(r, 1, 2)))))
    p = r[:, 0, 0].real
    q = r[:, 1, 1].real
    disc = np.sqrt((0.5 * (p - q)) ** 2 + np.abs(r[:, 0, 1]) ** 2)
    min_eig = float(np.min(0.5 * (p + q) - disc))
    diagnostics = {
        "min_eigenvalue": min_eig,
        "herm_residual": herm,
        "total_mass": rho.norm(),
        "min_marginal": float(f.min()),
    }
    return f, diagnostics
