"""Histograms, density alignment, and distribution distances."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError

__all__ = [
    "Histogram",
    "histogram",
    "bin_to_cells",
    "rebin_density",
    "distance_metrics",
    "ks_two_sample",
]


@dataclass(frozen=True)
class Histogram:
    """Piecewise-constant density on uniform bins."""

    edges: np.ndarray    # (k+1,)
    density: np.ndarray  # (k,)

    @property
    def centers(self) -> np.ndarray:
        return 0.5 * (self.edges[:-1] + self.edges[1:])

    @property
    def width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    def integral(self) -> float:
        return float(np.sum(self.density) * self.width)


def histogram(samples: np.ndarray, bin_width: float) -> Histogram:
    """Normalized density with deterministic edges anchored at multiples of
    the bin width (edges depend only on min(samples) and the width)."""
    samples = np.asarray(samples, dtype=float)
    if samples.size < 2:
        raise ConfigError("histogram needs at least 2 samples")
    if bin_width <= 0.0:
        raise ConfigError(f"bin width must be positive, got {bin_width}")
    lo = np.floor(samples.min() / bin_width) * bin_width
    k = int(np.floor((samples.max() - lo) / bin_width)) + 1
    edges = lo + bin_width * np.arange(k + 1)
    counts, _ = np.histogram(samples, bins=edges)
    density = counts / (samples.size * bin_width)
    return Histogram(edges=edges, density=density)


def bin_to_cells(samples: np.ndarray, x_nodes: np.ndarray) -> np.ndarray:
    """Empirical density of samples on the cells centered at uniform nodes.

    Cell i covers [x_i - dx/2, x_i + dx/2); samples outside the node range
    are clipped into the end cells.  Returns a density: sum * dx = 1.
    """
    x_nodes = np.asarray(x_nodes, dtype=float)
    dx = x_nodes[1] - x_nodes[0]
    idx = np.rint((np.asarray(samples, dtype=float) - x_nodes[0]) / dx).astype(int)
    idx = np.clip(idx, 0, x_nodes.size - 1)
    counts = np.bincount(idx, minlength=x_nodes.size)
    return counts / (len(samples) * dx)


def rebin_density(edges_src: np.ndarray, density_src: np.ndarray,
                  edges_dst: np.ndarray) -> np.ndarray:
    """Conservative rebinning of a piecewise-constant density.

    Mass in each source bin is distributed to destination bins by overlap
    length; mass outside the destination support is dropped.
    """
    edges_src = np.asarray(edges_src, dtype=float)
    edges_dst = np.asarray(edges_dst, dtype=float)
    out = np.zeros(edges_dst.size - 1)
    for j in range(density_src.size):
        a, b = edges_src[j], edges_src[j + 1]
        if density_src[j] == 0.0 or b <= edges_dst[0] or a >= edges_dst[-1]:
            continue
        lo = np.searchsorted(edges_dst, a, side="right") - 1
        hi = np.searchsorted(edges_dst, b, side="left")
        for k in range(max(lo, 0), min(hi, out.size)):
            overlap = min(b, edges_dst[k + 1]) - max(a, edges_dst[k])
            if overlap > 0:
                out[k] += density_src[j] * overlap
    widths = np.diff(edges_dst)
    return out / widths


def distance_metrics(p: np.ndarray, q: np.ndarray, dx: float) -> tuple[float, float]:
    """(L1, KS) between two densities sampled on a common uniform grid.

    L1 = sum |p - q| dx  (in [0, 2] for normalized densities);
    KS = max |CDF_p - CDF_q|  (in [0, 1]).
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ConfigError(f"densities live on different grids: {p.shape} vs {q.shape}")
    l1 = float(np.sum(np.abs(p - q)) * dx)
    ks = float(np.max(np.abs(np.cumsum(p - q) * dx)))
    return l1, ks


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov statistic from raw samples."""
    a = np.sort(np.asarray(a, dtype=float))
    b = np.sort(np.asarray(b, dtype=float))
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))
