"""Compiled inner loops for the jump-diffusion trajectory integrator.

One tick advances the pair (psi, X) by:

1. explicit Euler step of the non-Hermitian wavefunction drift followed by
   renormalization, and an Euler-Maruyama step of the phonon
   drift/diffusion of X with reflection at X = 0;
2. Bernoulli thinning of the two jump channels with at most one jump per
   tick: with probability gamma_down*|a|^2*dt collapse to the ground
   state and push X up by one quantum, with probability
   gamma_up*|b|^2*dt collapse to the excited state and pull X down by
   one quantum.

Trajectories are advanced in (block, chunk) tiles: each trajectory owns
its own noise rows, so results do not depend on the thread count or the
tiling.  Rates use
    up = g^2 w / expm1(hbar*w/(k_B sqrt(X))),  down = up + g^2 w,
which keeps the detailed-balance gap exact and is overflow safe.  The
rates of the tick-start state are carried over from the previous tick
(recomputed only after a jump), and the lab-frame drive phase advances by
a renormalized one-step recurrence, so the per-tick cost is dominated by
a single rate evaluation.
"""

from __future__ import annotations

import numpy as np
from numba import njit, prange

__all__ = ["advance_chunk", "advance_chunk_logged"]


@njit(inline="always")
def _rates(sq, hw_kb, g2w, gamma_floor, delta_xq):
    """(down, up) at temperature sqrt-squared sq = sqrt(X)."""
    if sq * sq <= delta_xq:
        return gamma_floor, 0.0
    up = g2w / np.expm1(hw_kb / sq)
    return up + g2w, up


@njit(nogil=True, cache=True, fastmath={"contract", "arcp", "nsz"})
def _traj_chunk(
    a, b, x, sq, gd, gu,
    t0, dt, sqrt_dt, n_steps, step0,
    normals, uniforms,
    hw_kb, g2w, gamma_floor, delta_xq, lam, omega_z, omega_d,
    dph_re, dph_im,
    drift_pref, tp5, noise_amp,
    nd, nu, hd, hn, hr, gm,
    acc_from_step, an, ate, ax, ax2,
    stride, s_te, s_pe, s_nd, s_nu,
    log_t, log_dir, want_log,
):
    """Advance one trajectory through a chunk; returns the updated carried
    state and accumulators plus the number of logged jumps."""
    if omega_d != 0.0:
        ph = np.exp(-1j * omega_d * t0)
    else:
        ph = 1.0 + 0.0j
    namp = noise_amp * sqrt_dt
    undriven = lam == 0.0 and omega_z == 0.0
    logged = 0
    for s in range(n_steps):
        # wavefunction drift (non-Hermitian, norm-compensated) + renormalize;
        # sigma_z eigenstates are exact fixed points of the undriven drift,
        # so the update is skipped bit-identically in that case
        pa = a.real * a.real + a.imag * a.imag
        pb = b.real * b.real + b.imag * b.imag
        if not (undriven and (pa == 0.0 or pa == 1.0)):
            comp = 0.5 * (gd * pa + gu * pb)
            ka = -1j * (0.5 * omega_z * a + lam * ph * b) - 0.5 * gd * a + comp * a
            kb = -1j * (-0.5 * omega_z * b + lam * np.conj(ph) * a) - 0.5 * gu * b + comp * b
            a = a + ka * dt
            b = b + kb * dt
            inv = 1.0 / np.sqrt(
                a.real * a.real + a.imag * a.imag + b.real * b.real + b.imag * b.imag
            )
            a *= inv
            b *= inv
            pa = a.real * a.real + a.imag * a.imag
            pb = b.real * b.real + b.imag * b.imag
        if omega_d != 0.0:
            ph = ph * complex(dph_re, dph_im)
            ph *= 1.5 - 0.5 * (ph.real * ph.real + ph.imag * ph.imag)

        # phonon drift + diffusion of X, reflect at 0
        dd = drift_pref * (tp5 - x * x * sq) * dt
        dn = namp * normals[s]
        x = x + dd + dn
        if x < 0.0:
            hr += -2.0 * x
            x = -x
        hd += dd
        hn += dn

        # jump channels at the post-drift state
        sq = np.sqrt(x)
        gd2, gu2 = _rates(sq, hw_kb, g2w, gamma_floor, delta_xq)
        p_down = gd2 * pa * dt
        u = uniforms[s]
        jump = 0
        if u < p_down:
            a = 0.0 + 0.0j
            b = 1.0 + 0.0j
            x = x + delta_xq
            jump = 1
            nd += 1
        elif u < p_down + gu2 * pb * dt:
            a = 1.0 + 0.0j
            b = 0.0 + 0.0j
            x = x - delta_xq
            jump = -1
            nu += 1
        if gd2 * dt > gm:
            gm = gd2 * dt
        if jump != 0:
            # carried tick-start rates must match the post-jump state
            sq = np.sqrt(x)
            gd, gu = _rates(sq, hw_kb, g2w, gamma_floor, delta_xq)
            if gd * dt > gm:
                gm = gd * dt
            if want_log:
                log_t[logged] = t0 + (s + 1) * dt
                log_dir[logged] = jump
                logged += 1
        else:
            gd, gu = gd2, gu2

        gs = step0 + s
        if gs >= acc_from_step:
            an += 1
            ate += sq
            ax += x
            ax2 += x * x
        if stride > 0 and (gs + 1) % stride == 0:
            k = (gs + 1) // stride - 1
            s_te[k] = sq
            s_pe[k] = a.real * a.real + a.imag * a.imag
            s_nd[k] = nd
            s_nu[k] = nu
    return a, b, x, sq, gd, gu, nd, nu, hd, hn, hr, gm, an, ate, ax, ax2, logged


@njit(parallel=True, nogil=True, cache=True)
def advance_chunk(
    a, b, x, sq, gd, gu,          # carried per-trajectory state, updated in place
    t0, dt, n_steps, step0,
    normals, uniforms,            # float64[W, n_steps]
    hw_kb, g2w, gamma_floor, delta_xq, lam, omega_z, omega_d, dph_re, dph_im,
    drift_pref, tp5, noise_amp,
    n_down, n_up,                 # int64[W]
    heat_drift, heat_noise, heat_reflect,  # float64[W], X units
    max_gdt,                      # float64[W]
    acc_from_step,
    acc_n, acc_te, acc_x, acc_x2,
    stride,
    s_te, s_pe, s_nd, s_nu,       # [W, n_samples_total]
):
    W = a.shape[0]
    sqrt_dt = np.sqrt(dt)
    dummy_t = np.empty(0)
    dummy_d = np.empty(0, dtype=np.int8)
    for w in prange(W):
        res = _traj_chunk(
            a[w], b[w], x[w], sq[w], gd[w], gu[w],
            t0, dt, sqrt_dt, n_steps, step0,
            normals[w], uniforms[w],
            hw_kb, g2w, gamma_floor, delta_xq, lam, omega_z, omega_d,
            dph_re, dph_im,
            drift_pref, tp5, noise_amp,
            n_down[w], n_up[w],
            heat_drift[w], heat_noise[w], heat_reflect[w], max_gdt[w],
            acc_from_step, acc_n[w], acc_te[w], acc_x[w], acc_x2[w],
            stride, s_te[w], s_pe[w], s_nd[w], s_nu[w],
            dummy_t, dummy_d, False,
        )
        a[w] = res[0]
        b[w] = res[1]
        x[w] = res[2]
        sq[w] = res[3]
        gd[w] = res[4]
        gu[w] = res[5]
        n_down[w] = res[6]
        n_up[w] = res[7]
        heat_drift[w] = res[8]
        heat_noise[w] = res[9]
        heat_reflect[w] = res[10]
        max_gdt[w] = res[11]
        acc_n[w] = res[12]
        acc_te[w] = res[13]
        acc_x[w] = res[14]
        acc_x2[w] = res[15]


@njit(nogil=True, cache=True)
def advance_chunk_logged(
    a, b, x, sq, gd, gu,
    t0, dt, n_steps, step0,
    normals, uniforms,
    hw_kb, g2w, gamma_floor, delta_xq, lam, omega_z, omega_d, dph_re, dph_im,
    drift_pref, tp5, noise_amp,
    n_down, n_up,
    heat_drift, heat_noise, heat_reflect,
    max_gdt,
    stride, s_te, s_pe, s_nd, s_nu,
    log_t, log_dir,
):
    """Single-trajectory variant that also records every jump event;
    returns the number of jumps logged in this chunk."""
    sqrt_dt = np.sqrt(dt)
    res = _traj_chunk(
        a[0], b[0], x[0], sq[0], gd[0], gu[0],
        t0, dt, sqrt_dt, n_steps, step0,
        normals[0], uniforms[0],
        hw_kb, g2w, gamma_floor, delta_xq, lam, omega_z, omega_d,
        dph_re, dph_im,
        drift_pref, tp5, noise_amp,
        n_down[0], n_up[0],
        heat_drift[0], heat_noise[0], heat_reflect[0], max_gdt[0],
        np.int64(2**62), np.int64(0), 0.0, 0.0, 0.0,
        stride, s_te[0], s_pe[0], s_nd[0], s_nu[0],
        log_t, log_dir, True,
    )
    a[0] = res[0]
    b[0] = res[1]
    x[0] = res[2]
    sq[0] = res[3]
    gd[0] = res[4]
    gu[0] = res[5]
    n_down[0] = res[6]
    n_up[0] = res[7]
    heat_drift[0] = res[8]
    heat_noise[0] = res[9]
    heat_reflect[0] = res[10]
    max_gdt[0] = res[11]
    return res[16]
