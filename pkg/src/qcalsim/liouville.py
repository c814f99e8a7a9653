"""Vectorized generator blocks of the qubit sector and their spectra.

The qubit density at fixed temperature squared X is flattened into the
vector P = (rho_ee, rho_gg, rho_eg, rho_ge).  In the resonant rotating
frame the local (infinite-calorimeter) generator is the 4x4 matrix ``m0``
built from the jump rates and the drive matrix element lam = kappa*omega;
the finite-size corrections enter through the rank-two matrices ``mn``
that carry the n-th power of the jump quantum per electron.

Structural facts used throughout (and enforced by tests):

* v1 = (1,1,0,0) is a left null vector of m0 (trace preservation);
* v2 = (0,0,1,1) is a left eigenvector with eigenvalue -G/2;
* the right kernel of m0 is spanned by the stationary vector Q with
  Q1 + Q2 = 1;
* eigenvalues sum to trace(m0) = -2G.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DegenerateSpectrumError
from .params import PhysicalParams
from .rates import jump_rates

__all__ = [
    "LiouvillianBlocks",
    "SpectralData",
    "m0_matrix",
    "mn_matrix",
    "q_vector",
    "liouvillian_blocks",
    "spectral_decomposition",
    "spectral_sweep",
    "V1",
    "V2",
]

V1 = np.array([1.0, 1.0, 0.0, 0.0], dtype=complex)
V2 = np.array([0.0, 0.0, 1.0, 1.0], dtype=complex)


def m0_matrix(x: float, params: PhysicalParams) -> np.ndarray:
    """Local generator of the qubit sector at temperature squared ``x`` (1/s)."""
    r = jump_rates(x, params)
    gd, gu = r.down, r.up
    g = gd + gu
    lam = params.lam
    il = 1j * lam
    return np.array(
        [
            [-gd, gu, il, -il],
            [gd, -gu, -il, il],
            [il, -il, -0.5 * g, 0.0],
            [-il, il, 0.0, -0.5 * g],
        ],
        dtype=complex,
    )


def mn_matrix(n: int, x: float, params: PhysicalParams) -> np.ndarray:
    """Order-n finite-size block: nonzero only in the population corner.

    Entry (0,1) is (hbar*omega/gamma)^n * gamma_up and entry (1,0) is
    (-1)^n (hbar*omega/gamma)^n * gamma_down, with gamma = C/N the
    per-electron heat capacity coefficient.
    """
    if n < 1:
        raise ValueError("n must be >= 1; use m0_matrix for the local block")
    r = jump_rates(x, params)
    scale = (params.level_spacing / params.gamma_eff) ** n
    m = np.zeros((4, 4), dtype=complex)
    m[0, 1] = scale * r.up
    m[1, 0] = (-1.0) ** n * scale * r.down
    return m


def q_vector(x: float, params: PhysicalParams) -> np.ndarray:
    """Stationary kernel vector Q of m0, normalized so Q1 + Q2 = 1.

    Q = (Gu*G + 4 lam^2, Gd*G + 4 lam^2, -2i lam (Gd-Gu), 2i lam (Gd-Gu))
        / (G^2 + 8 lam^2).
    """
    r = jump_rates(x, params)
    gd, gu = r.down, r.up
    g = gd + gu
    lam = params.lam
    denom = g * g + 8.0 * lam * lam
    if denom <= 0.0:
        raise DegenerateSpectrumError(
            f"degenerate kernel at X={x:g}: G and lam are both zero"
        )
    coh = 2j * lam * (gd - gu)
    return np.array(
        [gu * g + 4.0 * lam**2, gd * g + 4.0 * lam**2, -coh, coh], dtype=complex
    ) / denom


@dataclass(frozen=True)
class LiouvillianBlocks:
    """Generator blocks at one X: the local 4x4 ``m0``, the drive matrix
    element ``lam``, and a factory ``mn(n)`` for the finite-size blocks."""

    x: float
    params: PhysicalParams
    m0: np.ndarray
    lam: float

    def mn(self, n: int) -> np.ndarray:
        return mn_matrix(n, self.x, self.params)


def liouvillian_blocks(x: float, params: PhysicalParams) -> LiouvillianBlocks:
    return LiouvillianBlocks(x=x, params=params, m0=m0_matrix(x, params), lam=params.lam)


@dataclass
class SpectralData:
    """Biorthogonal eigensystem of one m0 matrix.

    eigenvalues[0] = 0 (kernel, right vector Q, left vector v1) and
    eigenvalues[1] = -G/2 (left vector v2).  ``right``/``left`` hold the
    eigenvectors as columns; ``norms[j] = <v_j | w_j>``.
    """

    eigenvalues: np.ndarray  # (4,) complex
    right: np.ndarray        # (4,4) complex, columns w_j
    left: np.ndarray         # (4,4) complex, columns v_j (bra = v_j^T, no conjugation)
    norms: np.ndarray        # (4,) complex

    def completeness_residual(self) -> float:
        acc = np.zeros((4, 4), dtype=complex)
        for j in range(4):
            acc += np.outer(self.right[:, j], self.left[:, j]) / self.norms[j]
        return float(np.linalg.norm(acc - np.eye(4), ord=2))


_REL_DEGEN_TOL = 1e-8


def spectral_decomposition(m0: np.ndarray, x: float | None = None) -> SpectralData:
    """Biorthogonal eigendecomposition of a local generator matrix.

    The zero eigenvalue is pinned exactly (left vector v1, right vector the
    kernel vector rescaled to Q-normalization) and the -G/2 eigenvalue is
    identified by its left eigenvector v2.  A collision among the two
    remaining eigenvalues, or of -G/2 with one of them, raises
    DegenerateSpectrumError naming the X value.
    """
    scale = np.abs(np.trace(m0))
    if scale == 0.0:
        scale = 1.0
    w, vl, vr = scipy.linalg.eig(m0, left=True, right=True)
    # scipy returns vl with vl[:,j]^H m0 = w[j] vl[:,j]^H; we store bras as
    # plain (unconjugated) row vectors, so take the conjugate once here.
    vl = vl.conj()

    where = f" at X={x:g}" if x is not None else ""

    # kernel: eigenvalue closest to zero
    k0 = int(np.argmin(np.abs(w)))
    if np.abs(w[k0]) > 1e-6 * scale:
        raise DegenerateSpectrumError(f"no numerical kernel found{where}: min|eig|={np.abs(w[k0]):g}")
    # -G/2 sector: left eigenvector maximally aligned with v2
    overlaps = np.abs(vl.T @ V2) / np.linalg.norm(vl, axis=0)
    overlaps[k0] = -np.inf
    k1 = int(np.argmax(overlaps))
    rest = [j for j in range(4) if j not in (k0, k1)]
    order = [k0, k1] + rest
    w = w[order]
    vr = vr[:, order]
    vl = vl[:, order]

    # canonical members of the exactly-known sectors
    w[0] = 0.0
    vl[:, 0] = V1
    pop_sum = vr[0, 0] + vr[1, 0]
    if np.abs(pop_sum) < 1e-12:
        raise DegenerateSpectrumError(f"kernel vector has zero trace{where}")
    vr[:, 0] = vr[:, 0] / pop_sum  # Q-normalization: <v1|Q> = 1
    vl[:, 1] = V2

    gaps = [abs(w[i] - w[j]) for i in range(4) for j in range(i + 1, 4)]
    if min(gaps) < _REL_DEGEN_TOL * scale:
        raise DegenerateSpectrumError(
            f"eigenvalue collision{where}: eigenvalues {np.array2string(w, precision=6)}"
        )

    norms = np.einsum("ij,ij->j", vl, vr)
    cond = np.abs(norms) / (np.linalg.norm(vl, axis=0) * np.linalg.norm(vr, axis=0))
    if np.any(cond < 1e-6):
        raise DegenerateSpectrumError(
            f"ill-conditioned biorthogonal pairing{where}: min normalizer {cond.min():g}"
        )
    return SpectralData(eigenvalues=w, right=vr, left=vl, norms=norms)


def spectral_sweep(xs: np.ndarray, params: PhysicalParams) -> list[SpectralData]:
    """Spectral decompositions along an ascending X grid with continuous
    labeling of the two non-trivial eigenvalue branches.

    At each node the branch pair (indices 2, 3) is matched to the previous
    node by maximal right-eigenvector overlap against the previous left
    eigenvectors, after the eigenvalue-based identification inside
    spectral_decomposition.  The first node uses a fixed convention
    (descending real part, then positive imaginary part first).
    """
    out: list[SpectralData] = []
    prev: SpectralData | None = None
    for x in np.asarray(xs, dtype=float):
        sd = spectral_decomposition(m0_matrix(x, params), x=x)
        a, b = sd.eigenvalues[2], sd.eigenvalues[3]
        swap = False
        if prev is None:
            if abs(a.imag - b.imag) > 1e-12 * abs(a - b):
                swap = a.imag < b.imag
            else:
                swap = a.real < b.real
        else:
            # total pairing strength for identity vs swapped assignment
            def strength(j_new, j_prev):
                return np.abs(prev.left[:, j_prev] @ sd.right[:, j_new]) / (
                    np.linalg.norm(prev.left[:, j_prev]) * np.linalg.norm(sd.right[:, j_new])
                )

            keep = strength(2, 2) + strength(3, 3)
            swapped = strength(2, 3) + strength(3, 2)
            swap = swapped > keep
        if swap:
            idx = [0, 1, 3, 2]
            sd = SpectralData(
                eigenvalues=sd.eigenvalues[idx],
                right=sd.right[:, idx],
                left=sd.left[:, idx],
                norms=sd.norms[idx],
            )
        out.append(sd)
        prev = sd
    return out
