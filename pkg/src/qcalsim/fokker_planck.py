"""Multiscale reduction to an effective temperature Fokker-Planck equation.

Eliminating the fast qubit sector from the joint qubit-temperature
dynamics leaves a time-autonomous Fokker-Planck equation for the
distribution F(X) of X = Te^2:

    dF/dt = -d/dX [ b(X) F ] + d^2/dX^2 [ D(X) F ]

with drift and diffusion assembled from the phonon coefficients plus
finite-size corrections generated by the discrete quantum exchanges:

    b(X) = b_ph(X) + j1(X)/N + j2(X)/N^2
    D(X) = s2_ph/2 + (Delta1(X) + Delta2(X))/N^2

j1 is the net quantum-exchange power converted to X units; it has the
closed form  (1/gamma) * hbar*omega^2 g^2 4 kappa^2
             / (g^4 coth^2(hbar*omega / (2 k_B sqrt(X))) + 8 kappa^2),
an identity the test suite enforces against the matrix-element route.
j2 and Delta2 involve X-derivatives of the spectral projectors of the
local generator and are evaluated with central finite differences on
continuity-matched eigensystems.  Every assembled coefficient is
invariant under changing N at fixed C = N*gamma.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import KB
from .errors import ConfigError, NumericsError
from .params import PhysicalParams
from .liouville import V1, SpectralData, mn_matrix, q_vector, spectral_sweep
from .rates import jump_rates, phonon_coefficients

__all__ = [
    "FPCoefficients",
    "StationaryResult",
    "j1_numeric",
    "j1_closed_form",
    "corrections",
    "reduction_grid",
    "fp_coefficients",
    "stationary_distribution",
    "stationary_temperature",
    "ts_closed_form",
    "reduce_to_stationary",
]


def j1_numeric(x: float, params: PhysicalParams) -> float:
    """First drift correction -<v1 | M1 Q> from the generator blocks.

    Units: (hbar*omega/gamma) * rate, i.e. K^2/s after division by N in
    the assembled drift.  Identically zero when undriven: detailed balance
    makes the up and down quantum flows cancel at every X.
    """
    if params.drive_strength == 0.0 or params.coupling == 0.0:
        return 0.0
    m1 = mn_matrix(1, x, params)
    q = q_vector(x, params)
    val = -(V1 @ (m1 @ q))
    if abs(val.imag) > 1e-10 * max(abs(val.real), 1.0):
        raise NumericsError(f"j1 acquired an imaginary part at X={x:g}: {val!r}")
    return float(val.real)


def j1_closed_form(x: float, params: PhysicalParams) -> float:
    """Closed form of the first drift correction (same units as j1_numeric)."""
    if params.drive_strength == 0.0 or params.coupling == 0.0:
        return 0.0
    if x <= params.delta_xq:
        raise ValueError(f"closed form needs X above the jump threshold, got {x:g}")
    hw = params.level_spacing
    w = params.omega
    g2 = params.g2
    k2 = params.drive_strength**2
    coth = 1.0 / math.tanh(hw / (2.0 * KB * math.sqrt(x)))
    return (hw * w * g2 * 4.0 * k2) / (g2**2 * coth**2 + 8.0 * k2) / params.gamma_eff


def _delta1_raw(x: float, params: PhysicalParams) -> float:
    """0.5 <v1 | M2 Q>: white-jump diffusion, (hbar*omega/gamma)^2 * rate."""
    r = jump_rates(x, params)
    scale = (params.level_spacing / params.gamma_eff) ** 2
    if params.drive_strength == 0.0:
        g = r.total
        if g == 0.0:
            return 0.0
        return 0.5 * scale * 2.0 * r.up * r.down / g
    q = q_vector(x, params)
    return 0.5 * scale * float((r.up * q[1] + r.down * q[0]).real)


def _undriven_corrections(x: float, params: PhysicalParams) -> tuple[float, float, float]:
    """Exact lam = 0 limit of (j2, Delta1, Delta2).

    Undriven, the jumps strictly alternate (a decay can only be followed
    by an excitation), so the second-order projector terms cancel the
    white-jump diffusion exactly: Delta2 = -Delta1, and the drift picks up
    only a phonon-slaved correction

        j2 = (hbar w/gamma) f(X) Gamma_up'(X) g^2 w / G(X)^2,

    with f = -(Sigma V/gamma)(T_p^5 - X^{5/2}); j2 vanishes at the phonon
    equilibrium, so the stationary temperature stays exactly T_p.
    """
    r = jump_rates(x, params)
    if r.up == 0.0:
        return 0.0, 0.0, 0.0
    s = params.level_spacing / params.gamma_eff
    d1 = s * s * r.up * r.down / r.total
    g2w = params.g2 * params.omega
    y = params.level_spacing / (KB * math.sqrt(x))
    gu_prime = r.up * r.down * y / (2.0 * x * g2w)
    f = -(params.sigma_v / params.gamma_eff) * (params.phonon_temp**5 - x * x * math.sqrt(x))
    j2 = s * f * gu_prime * g2w / r.total**2
    return j2, d1, -d1


def corrections(
    x: float, params: PhysicalParams, h: float
) -> tuple[float, float, float]:
    """Second-order corrections (j2, Delta1, Delta2) at one X value.

    ``h`` is the half-width of the central-difference stencil used for the
    X-derivatives of the spectral projectors.  Raw units: j2 and the
    Deltas carry (hbar*omega/gamma)^2-type scales and are divided by N^2
    on assembly.  The lam = 0 limit is analytic (see _undriven_corrections).
    """
    if params.drive_strength == 0.0 or params.coupling == 0.0:
        return _undriven_corrections(x, params)
    delta1 = _delta1_raw(x, params)
    if x - h <= params.delta_xq:
        raise ValueError(
            f"stencil [{x - h:g}, {x + h:g}] reaches the jump threshold {params.delta_xq:g}"
        )
    sweep = spectral_sweep(np.array([x - h, x, x + h]), params)
    j2, delta2 = _j2_delta2(
        x, params, sweep[1], x - h, sweep[0], x + h, sweep[2]
    )
    return j2, delta1, delta2


def _projector_blocks(x: float, params: PhysicalParams, sd: SpectralData):
    """Per-branch pieces entering j2/Delta2 at one node.

    Returns (T, alpha, beta) with, for each non-trivial branch j in {2,3}:
      T_j     = |M1 w_j><v_j| / (lambda_j <v_j|w_j>)      (4x4)
      alpha_j = <v1|M1 w_j> / (lambda_j <v_j|w_j>)
      beta_j  = <v_j|M1 Q>
    """
    m1 = mn_matrix(1, x, params)
    ts, alphas, betas = [], [], []
    for j in (2, 3):
        lam_j = sd.eigenvalues[j]
        norm_j = sd.norms[j]
        m1w = m1 @ sd.right[:, j]
        ts.append(np.outer(m1w, sd.left[:, j]) / (lam_j * norm_j))
        alphas.append((V1 @ m1w) / (lam_j * norm_j))
        betas.append(sd.left[:, j] @ (m1 @ sd.right[:, 0]))
    return ts, alphas, betas


def _j2_delta2(
    x_eval: float,
    params: PhysicalParams,
    sd_mid: SpectralData,
    x_lo: float,
    sd_lo: SpectralData,
    x_hi: float,
    sd_hi: SpectralData,
) -> tuple[float, float]:
    """Evaluate j2 and Delta2 at ``x_eval`` from a continuity-matched
    finite-difference pair (x_lo, x_hi); central when x_eval is midway."""
    width = x_hi - x_lo
    t_lo, _, _ = _projector_blocks(x_lo, params, sd_lo)
    t_hi, _, _ = _projector_blocks(x_hi, params, sd_hi)
    _, alpha, beta = _projector_blocks(x_eval, params, sd_mid)

    m1q = mn_matrix(1, x_eval, params) @ sd_mid.right[:, 0]
    dq = (sd_hi.right[:, 0] - sd_lo.right[:, 0]) / width

    # drift adjoint acting on Q: N * b_ph(X) * dQ/dX
    b_ph, _ = phonon_coefficients(x_eval, params)
    l1_dag_q = params.electron_count * b_ph * dq

    j2 = 0.0 + 0.0j
    delta2 = 0.0 + 0.0j
    for j in range(2):
        dt = (t_hi[j] - t_lo[j]) / width
        j2 -= V1 @ (dt @ m1q)
        j2 -= alpha[j] * (sd_mid.left[:, 2 + j] @ l1_dag_q)
        delta2 -= alpha[j] * beta[j]
    scale = max(abs(j2), abs(delta2), 1e-300)
    for name, val in (("j2", j2), ("Delta2", delta2)):
        if abs(val.imag) > 1e-7 * scale:
            raise NumericsError(
                f"{name} acquired an imaginary part at X={x_eval:g}: {val!r}"
            )
    return float(j2.real), float(delta2.real)


@dataclass(frozen=True)
class FPCoefficients:
    """Drift and diffusion fields of the reduced temperature equation,
    with the component breakdown retained for reporting.

    drift[i] and diffusion[i] are b(X_i) (K^2/s) and D(X_i) (K^4/s); the
    convention is dF/dt = -d(bF)/dX + d^2(DF)/dX^2, so the phonon part of
    D is half the Ito variance rate."""

    x: np.ndarray
    drift: np.ndarray
    diffusion: np.ndarray
    phonon_drift: np.ndarray
    jump_drift_1: np.ndarray      # j1 / N
    jump_drift_2: np.ndarray      # j2 / N^2
    phonon_diffusion: np.ndarray  # variance rate / 2
    jump_diffusion_1: np.ndarray  # Delta1 / N^2
    jump_diffusion_2: np.ndarray  # Delta2 / N^2
    one_sided: np.ndarray         # True where a one-sided stencil was used
    params: PhysicalParams

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])


def reduction_grid(
    params: PhysicalParams,
    x_min: float | None = None,
    x_max: float | None = None,
    n: int = 2001,
) -> np.ndarray:
    """Uniform X grid for the reduction, kept above the rate threshold.

    Defaults bracket both the phonon equilibrium and the driven stationary
    point estimated from the closed-form stationary temperature.
    """
    tp2 = params.phonon_temp**2
    if x_min is None:
        x_min = max(2.0 * params.delta_xq, 0.25 * tp2)
    if x_max is None:
        x_max = max(16.0 * tp2, 2.0 * ts_closed_form(params) ** 2)
    if x_min <= params.delta_xq:
        raise ConfigError(
            f"reduction grid must start above the jump threshold {params.delta_xq:g}, "
            f"got x_min={x_min:g}"
        )
    if x_max <= x_min:
        raise ConfigError("x_max must exceed x_min")
    return np.linspace(x_min, x_max, n)


def fp_coefficients(grid: np.ndarray, params: PhysicalParams) -> FPCoefficients:
    """Assemble b(X) and D(X) on a uniform grid.

    The projector derivatives use the grid spacing as the stencil;
    boundary nodes fall back to one-sided differences and are flagged.
    """
    xs = np.asarray(grid, dtype=float)
    n = xs.size
    if n < 3:
        raise ConfigError("reduction grid needs at least 3 nodes")
    dx = xs[1] - xs[0]
    if not np.allclose(np.diff(xs), dx, rtol=1e-9):
        raise ConfigError("reduction grid must be uniform")
    driven = params.drive_strength > 0.0 and params.coupling > 0.0
    if driven and xs[0] <= params.delta_xq:
        raise ConfigError(
            f"grid reaches the jump threshold {params.delta_xq:g}; start higher"
        )

    b_ph, var_rate = phonon_coefficients(xs, params)
    n_el = params.electron_count
    j1 = np.array([j1_numeric(x, params) for x in xs]) / n_el

    j2 = np.zeros(n)
    d1 = np.zeros(n)
    d2 = np.zeros(n)
    one_sided = np.zeros(n, dtype=bool)
    if driven:
        d1 = np.array([_delta1_raw(x, params) for x in xs]) / n_el**2
        sweep = spectral_sweep(xs, params)
        for i in range(n):
            lo, hi = max(i - 1, 0), min(i + 1, n - 1)
            one_sided[i] = lo == i or hi == i
            j2_raw, d2_raw = _j2_delta2(
                xs[i], params, sweep[i], xs[lo], sweep[lo], xs[hi], sweep[hi]
            )
            j2[i] = j2_raw / n_el**2
            d2[i] = d2_raw / n_el**2
    else:
        for i, x in enumerate(xs):
            j2_raw, d1_raw, d2_raw = _undriven_corrections(x, params)
            j2[i] = j2_raw / n_el**2
            d1[i] = d1_raw / n_el**2
            d2[i] = d2_raw / n_el**2

    drift = b_ph + (j1 + j2)
    diffusion = 0.5 * var_rate + (d1 + d2)
    if np.any(diffusion <= 0.0):
        bad = xs[diffusion <= 0.0]
        raise NumericsError(f"non-positive diffusion coefficient at X={bad[:3]}")
    return FPCoefficients(
        x=xs,
        drift=drift,
        diffusion=diffusion,
        phonon_drift=b_ph,
        jump_drift_1=j1,
        jump_drift_2=j2,
        phonon_diffusion=0.5 * var_rate,
        jump_diffusion_1=d1,
        jump_diffusion_2=d2,
        one_sided=one_sided,
        params=params,
    )


def stationary_distribution(coeffs: FPCoefficients) -> np.ndarray:
    """Zero-flux stationary density F_s(X) on the coefficient grid.

    F_s is proportional to (1/D) exp(int b/D dX); the exponent is
    accumulated with the trapezoid rule and normalization is done in log
    space to avoid overflow.
    """
    b, d, xs = coeffs.drift, coeffs.diffusion, coeffs.x
    if np.any(d <= 0.0):
        raise NumericsError("diffusion must be positive for the stationary solution")
    ratio = b / d
    phi = np.concatenate(
        ([0.0], np.cumsum(0.5 * (ratio[1:] + ratio[:-1]) * np.diff(xs)))
    )
    logf = phi - np.log(d)
    logf -= logf.max()
    f = np.exp(logf)
    dx = coeffs.dx
    z = np.trapezoid(f, dx=dx)
    if not np.isfinite(z) or z <= 0.0:
        raise NumericsError("stationary density failed to normalize")
    return f / z


@dataclass(frozen=True)
class StationaryResult:
    """Stationary density, drift roots, and stationary temperature."""

    f_s: np.ndarray
    x: np.ndarray
    x_s: float
    t_s: float
    t_s_closed: float
    stable_roots: tuple[float, ...]
    multistable: bool


def stationary_temperature(
    coeffs: FPCoefficients,
    abs_tol: float = 1e-18,
    x_tol: float = 1e-12,
) -> tuple[float, float, tuple[float, ...], bool]:
    """Locate the stable zero(s) of the drift: b(X_S) = 0 with b' < 0.

    Bisection on the sign-change bracket(s) from a dense grid scan.
    Returns (x_s, t_s, stable_roots, multistable); with several stable
    roots, x_s is the one with the largest stationary density.
    """
    b, xs = coeffs.drift, coeffs.x
    sign = np.sign(b)
    down = np.nonzero((sign[:-1] > 0) & (sign[1:] < 0))[0]
    exact = np.nonzero(b == 0.0)[0]
    stable: list[float] = []
    for i in exact:
        left_pos = i > 0 and b[i - 1] > 0
        right_neg = i < b.size - 1 and b[i + 1] < 0
        if left_pos and right_neg:
            stable.append(float(xs[i]))
    interp = _drift_interpolator(coeffs)
    for i in down:
        lo, hi = float(xs[i]), float(xs[i + 1])
        flo = interp(lo)
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            fm = interp(mid)
            if abs(fm) < abs_tol or (hi - lo) < x_tol:
                lo = hi = mid
                break
            if (fm > 0) == (flo > 0):
                lo, flo = mid, fm
            else:
                hi = mid
        stable.append(0.5 * (lo + hi))
    if not stable:
        raise NumericsError(
            "drift has no stable sign change on the grid; extend the grid "
            f"[{xs[0]:g}, {xs[-1]:g}]"
        )
    stable = sorted(stable)
    if len(stable) == 1:
        x_s = stable[0]
    else:
        f_s = stationary_distribution(coeffs)
        dens = [f_s[int(np.argmin(np.abs(xs - r)))] for r in stable]
        x_s = stable[int(np.argmax(dens))]
    return x_s, math.sqrt(x_s), tuple(stable), len(stable) > 1


def _drift_interpolator(coeffs: FPCoefficients):
    """Continuous drift evaluator: exact pointwise terms plus the grid
    spacing as j2 stencil (matching the grid assembly)."""
    params = coeffs.params
    n_el = params.electron_count
    h = coeffs.dx

    def drift(x: float) -> float:
        b_ph, _ = phonon_coefficients(x, params)
        j2_raw, _, _ = corrections(x, params, h)
        return b_ph + j1_numeric(x, params) / n_el + j2_raw / n_el**2

    return drift


def ts_closed_form(params: PhysicalParams) -> float:
    """Stationary temperature in the low-temperature approximation
    (coth -> 1): (T_p^5 + (1/Sigma V) hbar w^2 g^2 4 k^2/(g^4+8k^2))^{1/5}."""
    tp = params.phonon_temp
    g2 = params.g2
    k2 = params.drive_strength**2
    if g2 == 0.0 or k2 == 0.0:
        return tp
    heating = params.level_spacing * params.omega * g2 * 4.0 * k2 / (g2**2 + 8.0 * k2)
    return (tp**5 + heating / params.sigma_v) ** 0.2


def reduce_to_stationary(
    params: PhysicalParams,
    x_min: float | None = None,
    x_max: float | None = None,
    n: int = 2001,
) -> tuple[FPCoefficients, StationaryResult]:
    """Grid, coefficients, stationary density and temperature in one call."""
    grid = reduction_grid(params, x_min, x_max, n)
    coeffs = fp_coefficients(grid, params)
    f_s = stationary_distribution(coeffs)
    x_s, t_s, roots, multi = stationary_temperature(coeffs)
    result = StationaryResult(
        f_s=f_s,
        x=coeffs.x,
        x_s=x_s,
        t_s=t_s,
        t_s_closed=ts_closed_form(params),
        stable_roots=roots,
        multistable=multi,
    )
    return coeffs, result
