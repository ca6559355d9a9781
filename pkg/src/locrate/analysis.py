"""Diagnostics over outage-capacity maps: coherence radius, peak/valley
detection, correlation fits, and quantile box summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .environment import GridGeometry, OutageCapacityMap


class CoherenceExceedsMap(RuntimeError):
    """Relative-change threshold never reached within the padded map."""


class UndefinedCorrelation(ValueError):
    """Pearson correlation undefined for zero-variance input."""


@dataclass
class ExtremaSet:
    """Detected local maxima and minima of a map, with the detection
    parameters that produced them."""

    peaks: np.ndarray      # (n_p, 2) locations
    valleys: np.ndarray    # (n_v, 2) locations
    neighborhood_m: float
    prominence_rel: float


@dataclass(frozen=True)
class BoxStats:
    """Five-number quantile summary using the conservative lower-order-
    statistic convention (k = max(1, floor(p*n)), 1-based)."""

    q_alpha: float
    q1: float
    median: float
    q3: float
    q_hi: float
    count: int


def _ring_offsets(grid: GridGeometry, max_radius: float):
    """Grid-offset table sorted by radius, grouped into rings of equal radius."""
    n = int(math.ceil(max_radius / grid.spacing))
    di, dj = np.meshgrid(np.arange(-n, n + 1), np.arange(-n, n + 1),
                         indexing="ij")
    di = di.ravel()
    dj = dj.ravel()
    r = grid.spacing * np.hypot(di, dj)
    keep = r <= max_radius + 1e-9
    di, dj, r = di[keep], dj[keep], r[keep]
    order = np.argsort(r, kind="stable")
    return di[order], dj[order], r[order]


def coherence_radius_2d(cmap: OutageCapacityMap, x, t: float) -> float:
    """Smallest grid-lattice radius around x at which the relative change of
    the map exceeds threshold t, searched over expanding rings."""
    if t <= 0:
        raise ValueError("threshold t must be positive")
    grid = cmap.grid
    i0, j0 = grid.nearest_index(x)
    c_x = float(cmap.values[i0, j0])
    max_r = grid.spacing * math.hypot(grid.nx, grid.ny)
    di, dj, r = _ring_offsets(grid, max_r)
    for k in range(len(r)):
        i = i0 + di[k]
        j = j0 + dj[k]
        if not (0 <= i < grid.nx and 0 <= j < grid.ny):
            continue
        if abs(c_x - float(cmap.values[i, j])) / c_x > t:
            return float(r[k])
    raise CoherenceExceedsMap(
        f"relative change never exceeded t={t} within the padded map")


def detect_extrema(cmap: OutageCapacityMap, neighborhood_m: float = 5.0,
                   prominence_rel: float = 0.05) -> ExtremaSet:
    """Local maxima/minima of the in-cell map.

    A peak must be strictly greater than every grid neighbor within the
    neighborhood radius and exceed the neighborhood maximum (excluding
    itself) by at least ``prominence_rel`` times its own value; valleys are
    symmetric.
    """
    grid = cmap.grid
    if neighborhood_m < grid.spacing:
        raise ValueError("neighborhood radius must be at least one grid step")
    di, dj, r = _ring_offsets(grid, neighborhood_m)
    center = r == 0.0
    di, dj = di[~center], dj[~center]
    vals = cmap.values
    in_cell = grid.in_cell_mask()
    peaks = []
    valleys = []
    for i in range(grid.nx):
        for j in range(grid.ny):
            if not in_cell[i, j]:
                continue
            ii = i + di
            jj = j + dj
            ok = (ii >= 0) & (ii < grid.nx) & (jj >= 0) & (jj < grid.ny)
            neigh = vals[ii[ok], jj[ok]]
            v = vals[i, j]
            margin = prominence_rel * abs(v)
            if np.all(v > neigh) and v - neigh.max() >= margin:
                peaks.append((grid.xs[i], grid.ys[j]))
            elif np.all(v < neigh) and neigh.min() - v >= margin:
                valleys.append((grid.xs[i], grid.ys[j]))
    return ExtremaSet(
        peaks=np.asarray(peaks, dtype=np.float64).reshape(-1, 2),
        valleys=np.asarray(valleys, dtype=np.float64).reshape(-1, 2),
        neighborhood_m=neighborhood_m,
        prominence_rel=prominence_rel,
    )


def pearson_and_fit(xs, ys) -> tuple[float, float, float]:
    """Pearson correlation plus least-squares line (rho, slope, intercept)."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 3:
        raise ValueError("need matching 1-D arrays with at least 3 points")
    if np.var(xs) == 0.0 or np.var(ys) == 0.0:
        raise UndefinedCorrelation("zero variance input")
    rho = float(np.corrcoef(xs, ys)[0, 1])
    slope, intercept = np.polyfit(xs, ys, 1)
    return rho, float(slope), float(intercept)


def boxplot_stats(values, alpha: float) -> BoxStats:
    """Empirical quantile summary at levels alpha, 0.25, 0.5, 0.75, 1-alpha."""
    if not 0.0 < alpha < 0.5:
        raise ValueError("alpha must lie in (0, 0.5)")
    values = np.sort(np.asarray(values, dtype=np.float64).ravel())
    n = values.size
    if n == 0:
        raise ValueError("empty input")

    def q(p: float) -> float:
        k = max(1, int(math.floor(p * n)))
        return float(values[k - 1])

    return BoxStats(q_alpha=q(alpha), q1=q(0.25), median=q(0.5), q3=q(0.75),
                    q_hi=q(1.0 - alpha), count=n)
