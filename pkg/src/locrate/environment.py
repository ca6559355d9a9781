"""Synthetic spatially consistent 2-D wideband multipath environment.

The generator produces, for every point of a padded regular grid and every
base station, a multipath description (complex amplitudes + delays) with

* line-of-sight amplitude sqrt(G0 * d**-eta * psi), psi a log-normal
  shadowing field with exponential (Gudmundson-type) log-domain covariance,
* spatially correlated exponential excess delays built from squared Gaussian
  fields, and
* scattered-path power decaying exponentially with excess delay.

Fast fading is realized by drawing iid uniform phases per path; outage
capacity maps are empirical quantiles over many such realizations.
All randomness flows through counter-based per-point streams derived from
the master seed, so results are deterministic and scheduling independent.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, asdict

import numpy as np
from numpy.random import Generator, Philox, SeedSequence
from scipy.spatial.distance import cdist

from . import _kernels
from .core import (SPEED_OF_LIGHT, CapacitySamples, PathSet, SystemConfig,
                   empirical_outage_capacity)

# purpose tags for stream derivation
TAG_SHADOW = 1
TAG_DELAY = 2
TAG_AMPLITUDE = 3
TAG_CAPACITY = 4
TAG_LOCALIZATION = 5
TAG_META = 6
TAG_THROUGHPUT = 7

# exact Cholesky sampling up to this many grid points; nearest-neighbor
# conditional (Vecchia-style) approximation above
CHOLESKY_LIMIT = 10_000


def derive_rng(master_seed: int, *key: int) -> Generator:
    """Counter-based stream keyed on (master seed, purpose, indices)."""
    return Generator(Philox(SeedSequence((int(master_seed),) + tuple(int(k) for k in key))))


@dataclass(frozen=True)
class EnvConfig:
    cell: tuple[float, float, float, float]  # x_lo, x_hi, y_lo, y_hi (m)
    spacing_m: float
    margin_m: float
    bs_positions: tuple[tuple[float, float, float], ...]  # (x, y, height)
    ue_height_m: float
    path_count: int
    path_loss_exponent: float
    path_gain: float
    shadow_std_db: float
    shadow_decorr_m: float
    mean_excess_delay_s: float
    delay_decorr_m: float
    pdp_decay_s: float
    seed: int

    def __post_init__(self):
        x_lo, x_hi, y_lo, y_hi = self.cell
        if not (x_lo < x_hi and y_lo < y_hi):
            raise ValueError("cell rectangle is empty")
        if self.spacing_m <= 0:
            raise ValueError("grid spacing must be positive")
        if self.margin_m < 0:
            raise ValueError("padding margin must be nonnegative")
        if self.path_count < 1:
            raise ValueError("path count must be >= 1")
        if len(self.bs_positions) < 1:
            raise ValueError("at least one base station required")
        if self.path_loss_exponent <= 0 or self.path_gain <= 0:
            raise ValueError("path loss parameters must be positive")
        if self.shadow_std_db < 0:
            raise ValueError("shadowing std must be nonnegative")
        for name in ("shadow_decorr_m", "mean_excess_delay_s", "delay_decorr_m",
                     "pdp_decay_s"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")

    def canonical_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()


@dataclass(frozen=True)
class GridGeometry:
    """Regular grid: in-cell nodes plus ``n_pad`` padding rings."""

    x_start: float
    y_start: float
    spacing: float
    nx: int
    ny: int
    n_pad: int

    @property
    def xs(self) -> np.ndarray:
        return self.x_start + self.spacing * np.arange(self.nx)

    @property
    def ys(self) -> np.ndarray:
        return self.y_start + self.spacing * np.arange(self.ny)

    @property
    def n_points(self) -> int:
        return self.nx * self.ny

    def points(self) -> np.ndarray:
        gx, gy = np.meshgrid(self.xs, self.ys, indexing="ij")
        return np.column_stack([gx.ravel(), gy.ravel()])

    def in_cell_mask(self) -> np.ndarray:
        mask = np.zeros((self.nx, self.ny), dtype=bool)
        p = self.n_pad
        mask[p:self.nx - p, p:self.ny - p] = True
        return mask

    def contains(self, xy) -> bool:
        x, y = float(xy[0]), float(xy[1])
        return (self.xs[0] - 0.5 * self.spacing <= x <= self.xs[-1] + 0.5 * self.spacing
                and self.ys[0] - 0.5 * self.spacing <= y <= self.ys[-1] + 0.5 * self.spacing)

    def nearest_index(self, xy) -> tuple[int, int]:
        i = int(round((float(xy[0]) - self.x_start) / self.spacing))
        j = int(round((float(xy[1]) - self.y_start) / self.spacing))
        return (min(max(i, 0), self.nx - 1), min(max(j, 0), self.ny - 1))

    def flat_index(self, i: int, j: int) -> int:
        return i * self.ny + j

    @staticmethod
    def from_config(cfg: EnvConfig) -> "GridGeometry":
        x_lo, x_hi, y_lo, y_hi = cfg.cell
        dx = cfg.spacing_m
        nx_cell = int(math.floor((x_hi - x_lo) / dx + 1e-9)) + 1
        ny_cell = int(math.floor((y_hi - y_lo) / dx + 1e-9)) + 1
        n_pad = int(math.ceil(cfg.margin_m / dx - 1e-9))
        return GridGeometry(
            x_start=x_lo - n_pad * dx,
            y_start=y_lo - n_pad * dx,
            spacing=dx,
            nx=nx_cell + 2 * n_pad,
            ny=ny_cell + 2 * n_pad,
            n_pad=n_pad,
        )


@dataclass
class EnvironmentMap:
    """Per-grid-point, per-BS multipath descriptions plus generation metadata."""

    grid: GridGeometry
    bs_positions: np.ndarray        # (n_bs, 3)
    ue_height: float
    amplitudes: np.ndarray          # complex (n_points, n_bs, K)
    delays: np.ndarray              # (n_points, n_bs, K)
    seed: int
    config: EnvConfig | None = None

    @property
    def n_bs(self) -> int:
        return int(self.bs_positions.shape[0])

    @property
    def path_count(self) -> int:
        return int(self.amplitudes.shape[2])

    def path_set(self, point_index: int, bs_index: int) -> PathSet:
        return PathSet(self.amplitudes[point_index, bs_index],
                       self.delays[point_index, bs_index])


@dataclass
class OutageCapacityMap:
    """eps-outage capacity per grid point, in bits per OFDM symbol."""

    grid: GridGeometry
    values: np.ndarray  # (nx, ny)
    eps: float
    sample_count: int

    def value_at(self, xy) -> float:
        """Bilinear interpolation at an arbitrary in-map location."""
        return float(bilinear(self.grid, self.values, np.atleast_2d(xy))[0])


def bilinear(grid: GridGeometry, values: np.ndarray, pts: np.ndarray) -> np.ndarray:
    """Bilinear map interpolation, clamped to the grid hull."""
    fx = (pts[:, 0] - grid.x_start) / grid.spacing
    fy = (pts[:, 1] - grid.y_start) / grid.spacing
    fx = np.clip(fx, 0.0, grid.nx - 1.0)
    fy = np.clip(fy, 0.0, grid.ny - 1.0)
    i0 = np.minimum(fx.astype(int), grid.nx - 2) if grid.nx > 1 else np.zeros(len(fx), int)
    j0 = np.minimum(fy.astype(int), grid.ny - 2) if grid.ny > 1 else np.zeros(len(fy), int)
    tx = fx - i0
    ty = fy - j0
    i1 = np.minimum(i0 + 1, grid.nx - 1)
    j1 = np.minimum(j0 + 1, grid.ny - 1)
    return ((1 - tx) * (1 - ty) * values[i0, j0]
            + tx * (1 - ty) * values[i1, j0]
            + (1 - tx) * ty * values[i0, j1]
            + tx * ty * values[i1, j1])


# ---------------------------------------------------------------------------
# correlated Gaussian field sampling
# ---------------------------------------------------------------------------


def _exp_cov(points: np.ndarray, variance: float, scale: float, squared: bool) -> np.ndarray:
    d = cdist(points, points)
    if squared:
        return variance * np.exp(-(d / scale) ** 2)
    return variance * np.exp(-d / scale)


class GaussianFieldSampler:
    """Zero-mean Gaussian field with exponential(-d/scale) or
    exponential(-(d/scale)^2) covariance on a fixed point set.

    Exact Cholesky sampling up to CHOLESKY_LIMIT points; above that a
    nearest-neighbor conditional (Vecchia) approximation with ``n_cond``
    conditioning points in raster order.
    """

    def __init__(self, points: np.ndarray, variance: float, scale: float,
                 squared: bool = False, n_cond: int = 24):
        self.points = points
        self.variance = variance
        self.scale = scale
        self.squared = squared
        self.n = points.shape[0]
        if self.n <= CHOLESKY_LIMIT:
            cov = _exp_cov(points, variance, scale, squared)
            cov[np.diag_indices_from(cov)] += 1e-10 * variance
            self._chol = np.linalg.cholesky(cov)
            self._vecchia = None
        else:
            self._chol = None
            self._vecchia = self._build_vecchia(n_cond)

    def _kernel(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        d = cdist(a, b)
        if self.squared:
            return self.variance * np.exp(-(d / self.scale) ** 2)
        return self.variance * np.exp(-d / self.scale)

    def _build_vecchia(self, n_cond: int):
        # per point: indices of conditioning predecessors, regression weights,
        # and conditional standard deviation
        plan = []
        for i in range(self.n):
            lo = max(0, i - 4 * n_cond)
            cand = np.arange(lo, i)
            if cand.size > n_cond:
                d = np.linalg.norm(self.points[cand] - self.points[i], axis=1)
                cand = cand[np.argsort(d)[:n_cond]]
                cand.sort()
            if cand.size == 0:
                plan.append((cand, np.empty(0), math.sqrt(self.variance)))
                continue
            k_cc = self._kernel(self.points[cand], self.points[cand])
            k_cc[np.diag_indices_from(k_cc)] += 1e-10 * self.variance
            k_ci = self._kernel(self.points[cand], self.points[i:i + 1])[:, 0]
            w = np.linalg.solve(k_cc, k_ci)
            var = self.variance - float(k_ci @ w)
            plan.append((cand, w, math.sqrt(max(var, 1e-12 * self.variance))))
        return plan

    def sample(self, rng: Generator) -> np.ndarray:
        z = rng.standard_normal(self.n)
        if self._chol is not None:
            return self._chol @ z
        out = np.empty(self.n)
        for i, (cand, w, sd) in enumerate(self._vecchia):
            mean = float(w @ out[cand]) if cand.size else 0.0
            out[i] = mean + sd * z[i]
        return out


# ---------------------------------------------------------------------------
# environment generation
# ---------------------------------------------------------------------------


def generate_environment(cfg: EnvConfig) -> EnvironmentMap:
    """Deterministically generate the multipath environment for ``cfg``."""
    grid = GridGeometry.from_config(cfg)
    pts = grid.points()
    n_pts = grid.n_points
    n_bs = len(cfg.bs_positions)
    k_paths = cfg.path_count
    bs = np.asarray(cfg.bs_positions, dtype=np.float64)

    ue3 = np.column_stack([pts, np.full(n_pts, cfg.ue_height_m)])
    dist = np.linalg.norm(ue3[:, None, :] - bs[None, :, :], axis=2)  # (n_pts, n_bs)

    # shadowing fields (dB domain, Gudmundson covariance), one per BS
    shadow_db = np.zeros((n_pts, n_bs))
    if cfg.shadow_std_db > 0:
        sampler = GaussianFieldSampler(pts, cfg.shadow_std_db**2,
                                       cfg.shadow_decorr_m, squared=False)
        for b in range(n_bs):
            shadow_db[:, b] = sampler.sample(derive_rng(cfg.seed, TAG_SHADOW, b))

    delays = np.empty((n_pts, n_bs, k_paths))
    delays[:, :, 0] = dist / SPEED_OF_LIGHT

    if k_paths > 1:
        # correlated exponential excess delays: sum of squares of two Gaussian
        # fields with covariance tau_bar/2 * exp(-(d/d_tau)^2) each
        sampler = GaussianFieldSampler(pts, 0.5 * cfg.mean_excess_delay_s,
                                       cfg.delay_decorr_m, squared=True)
        for b in range(n_bs):
            excess = np.empty((n_pts, k_paths - 1))
            for k in range(k_paths - 1):
                g1 = sampler.sample(derive_rng(cfg.seed, TAG_DELAY, b, k, 0))
                g2 = sampler.sample(derive_rng(cfg.seed, TAG_DELAY, b, k, 1))
                excess[:, k] = g1**2 + g2**2
            delays[:, b, 1:] = delays[:, b, :1] + np.cumsum(excess, axis=1)

    los_power = cfg.path_gain * dist ** (-cfg.path_loss_exponent) \
        * 10.0 ** (shadow_db / 10.0)

    amplitudes = np.empty((n_pts, n_bs, k_paths), dtype=np.complex128)
    amplitudes[:, :, 0] = np.sqrt(los_power)
    if k_paths > 1:
        # scattered amplitudes: circular Gaussian with power following the
        # exponential power delay profile relative to the LoS path
        rel_power = np.exp(-(delays[:, :, 1:] - delays[:, :, :1]) / cfg.pdp_decay_s)
        scale = np.sqrt(0.5 * los_power[:, :, None] * rel_power)
        for idx in range(n_pts):
            rng = derive_rng(cfg.seed, TAG_AMPLITUDE, idx)
            draws = rng.standard_normal((n_bs, k_paths - 1, 2))
            amplitudes[idx, :, 1:] = scale[idx] * (draws[..., 0] + 1j * draws[..., 1])

    return EnvironmentMap(grid=grid, bs_positions=bs, ue_height=cfg.ue_height_m,
                          amplitudes=amplitudes, delays=delays, seed=cfg.seed,
                          config=cfg)


def rayleigh_emulation_environment(cfg: EnvConfig, subpath_count: int = 64) -> EnvironmentMap:
    """Environment whose links are many equal-power subpaths at the LoS delay.

    Under random per-path phases the summed coefficient converges to a
    circular Gaussian, emulating narrowband Rayleigh fading with average
    power equal to the path-loss power (no shadowing).
    """
    grid = GridGeometry.from_config(cfg)
    pts = grid.points()
    n_pts = grid.n_points
    bs = np.asarray(cfg.bs_positions, dtype=np.float64)
    n_bs = bs.shape[0]
    ue3 = np.column_stack([pts, np.full(n_pts, cfg.ue_height_m)])
    dist = np.linalg.norm(ue3[:, None, :] - bs[None, :, :], axis=2)
    power = cfg.path_gain * dist ** (-cfg.path_loss_exponent)
    amplitudes = np.broadcast_to(
        np.sqrt(power / subpath_count)[:, :, None].astype(np.complex128),
        (n_pts, n_bs, subpath_count)).copy()
    delays = np.broadcast_to((dist / SPEED_OF_LIGHT)[:, :, None],
                             (n_pts, n_bs, subpath_count)).copy()
    return EnvironmentMap(grid=grid, bs_positions=bs, ue_height=cfg.ue_height_m,
                          amplitudes=amplitudes, delays=delays, seed=cfg.seed,
                          config=cfg)


# ---------------------------------------------------------------------------
# fast fading and capacity sampling
# ---------------------------------------------------------------------------


def fading_realization(paths: PathSet, rng: Generator, cfg: SystemConfig) -> np.ndarray:
    """One channel realization with iid uniform[-pi, pi) phases per path."""
    phases = rng.uniform(-np.pi, np.pi, paths.count)
    from .core import freq_response

    return freq_response(paths, phases, cfg)


def _steering(paths: PathSet, cfg: SystemConfig) -> np.ndarray:
    j = np.arange(cfg.subcarrier_count)
    rot = np.exp(-2j * np.pi * cfg.subcarrier_spacing_hz * np.outer(j, paths.delays))
    return rot * paths.amplitudes[None, :]


def capacity_samples(paths: PathSet, cfg: SystemConfig, n_samples: int,
                     rng: Generator) -> CapacitySamples:
    """Sorted instantaneous capacities over random-phase realizations."""
    if n_samples < 1:
        raise ValueError("need at least one sample")
    phases = rng.uniform(-np.pi, np.pi, (n_samples, paths.count))
    caps = _kernels.capacity_batch(_steering(paths, cfg), phases, cfg.tx_snr)
    caps.sort()
    return CapacitySamples(caps)


def outage_capacity_map(env: EnvironmentMap, bs_index: int, eps: float,
                        n_samples: int, cfg: SystemConfig) -> OutageCapacityMap:
    """Empirical eps-outage capacity at every padded-grid point."""
    if eps * n_samples < 1:
        raise ValueError("insufficient samples for the requested quantile")
    grid = env.grid
    values = np.empty(grid.n_points)
    for idx in range(grid.n_points):
        rng = derive_rng(env.seed, TAG_CAPACITY, bs_index, idx)
        samples = capacity_samples(env.path_set(idx, bs_index), cfg, n_samples, rng)
        values[idx] = empirical_outage_capacity(samples, eps)
    return OutageCapacityMap(grid=grid, values=values.reshape(grid.nx, grid.ny),
                             eps=eps, sample_count=n_samples)


def point_capacity_samples(env: EnvironmentMap, bs_index: int, point_index: int,
                           n_samples: int, cfg: SystemConfig) -> CapacitySamples:
    """Capacity samples at one grid point, on the same stream as the map."""
    rng = derive_rng(env.seed, TAG_CAPACITY, bs_index, point_index)
    return capacity_samples(env.path_set(point_index, bs_index), cfg, n_samples, rng)
