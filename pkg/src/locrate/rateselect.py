"""Two-dimensional rate selection over an outage-capacity map.

Implements the backoff, interval, and distance schemes, outage regions,
meta-probability (cell-sum and Monte-Carlo estimators), throughput ratio,
and bisection calibration of a scheme parameter to a confidence target.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np
from numpy.random import Generator

from . import _kernels
from .core import CapacitySamples, empirical_outage_capacity
from .environment import GridGeometry, OutageCapacityMap, bilinear
from .localization import LocalizationModel, constant_localization_model
from .schemes import Backoff, Distance, Interval, RateScheme


class OutOfMapError(ValueError):
    """Estimated location outside the padded map."""


class PaddingInsufficient(RuntimeError):
    """Gaussian support of the location estimate exceeds the padded map."""


class InfeasibleCalibration(RuntimeError):
    """Constraint unsatisfiable even at the conservative end of the bracket."""

    def __init__(self, message: str, conservative_meta: float):
        super().__init__(message)
        self.conservative_meta = conservative_meta


@dataclass
class OutageRegion:
    """Grid mask over the padded map: true where the rate selected at the
    cell center exceeds the outage capacity at the true location."""

    grid: GridGeometry
    mask: np.ndarray  # bool (nx, ny)


@dataclass
class EvaluationReport:
    """Per-in-cell-point meta-probability and throughput ratio."""

    grid: GridGeometry
    points: np.ndarray       # (n, 2) in-cell locations
    meta: np.ndarray         # (n,)
    throughput: np.ndarray   # (n,)
    scheme: RateScheme
    delta: float
    metadata: dict[str, Any] = field(default_factory=dict)

    def summary(self) -> dict[str, Any]:
        i = int(np.argmax(self.meta))
        return {
            "scheme": type(self.scheme).__name__.lower(),
            "parameter": _scheme_parameter(self.scheme),
            "delta": self.delta,
            "max_meta": float(self.meta[i]),
            "max_meta_location": [float(self.points[i, 0]), float(self.points[i, 1])],
            "mean_meta": float(self.meta.mean()),
            "mean_throughput": float(self.throughput.mean()),
            "certificate_max_meta_below_delta": bool(self.meta[i] <= self.delta),
            **self.metadata,
        }


def _scheme_parameter(scheme: RateScheme) -> float:
    if isinstance(scheme, Backoff):
        return scheme.beta
    if isinstance(scheme, Interval):
        return scheme.q
    return scheme.radius


def _floored_cov(cov: np.ndarray, spacing: float) -> tuple[np.ndarray, bool]:
    """Eigenvalue floor (spacing/4)^2 so a confidence ellipse always spans
    at least a grid cell; returns (cov, whether the floor was applied)."""
    vals, vecs = np.linalg.eigh(cov)
    floor = (spacing / 4.0) ** 2
    if vals[0] >= floor:
        return cov, False
    vals = np.maximum(vals, floor)
    return (vecs * vals) @ vecs.T, True


def _quadform(cov: np.ndarray) -> tuple[float, float, float]:
    inv = np.linalg.inv(cov)
    return float(inv[0, 0]), float(inv[0, 1]), float(inv[1, 1])


def _as_model(loc, grid: GridGeometry) -> LocalizationModel:
    if isinstance(loc, LocalizationModel):
        return loc
    cov = np.asarray(loc, dtype=np.float64)
    if cov.shape == (2, 2):
        model = constant_localization_model(grid, 1.0)
        model.cov = np.broadcast_to(cov, (grid.n_points, 2, 2)).copy()
        model.peb = np.full(grid.n_points, np.sqrt(np.trace(cov)))
        return model
    raise TypeError("expected a LocalizationModel or a 2x2 covariance")


def select_rate(x_hat, scheme: RateScheme, cmap: OutageCapacityMap,
                cov: np.ndarray | None = None) -> float:
    """Rate selected at estimated location ``x_hat``.

    Backoff interpolates the map bilinearly and scales by beta; interval and
    distance take the minimum map value over grid points inside the
    confidence ellipse / disk (nearest grid point if the region is empty).
    """
    grid = cmap.grid
    if not grid.contains(x_hat):
        raise OutOfMapError(f"estimated location {x_hat} outside the padded map")
    pt = np.asarray(x_hat, dtype=np.float64).reshape(1, 2)
    if isinstance(scheme, Backoff):
        return scheme.beta * float(bilinear(grid, cmap.values, pt)[0])
    if isinstance(scheme, Interval):
        if cov is None:
            raise ValueError("interval selection needs the error covariance")
        cov, _ = _floored_cov(np.asarray(cov, dtype=np.float64), grid.spacing)
        qa, qb, qc = _quadform(cov)
        q2 = scheme.q**2
    else:
        qa, qb, qc = 1.0, 0.0, 1.0
        q2 = scheme.radius**2
    return float(_kernels.min_in_ellipse(grid.xs, grid.ys, cmap.values, pt,
                                         qa, qb, qc, q2)[0])


def rate_map(scheme: RateScheme, cmap: OutageCapacityMap,
             loc=None) -> np.ndarray:
    """Selected rate at every padded-grid cell center."""
    grid = cmap.grid
    if isinstance(scheme, Backoff):
        return scheme.beta * cmap.values
    pts = grid.points()
    if isinstance(scheme, Distance):
        flat = _kernels.min_in_ellipse(grid.xs, grid.ys, cmap.values, pts,
                                       1.0, 0.0, 1.0, scheme.radius**2)
        return flat.reshape(grid.nx, grid.ny)
    model = _as_model(loc, grid)
    if model.mode == "constant":
        cov, _ = _floored_cov(model.cov[0], grid.spacing)
        qa, qb, qc = _quadform(cov)
        flat = _kernels.min_in_ellipse(grid.xs, grid.ys, cmap.values, pts,
                                       qa, qb, qc, scheme.q**2)
        return flat.reshape(grid.nx, grid.ny)
    flat = np.empty(grid.n_points)
    for idx in range(grid.n_points):
        cov, _ = _floored_cov(model.cov[idx], grid.spacing)
        qa, qb, qc = _quadform(cov)
        flat[idx] = _kernels.min_in_ellipse(grid.xs, grid.ys, cmap.values,
                                            pts[idx:idx + 1], qa, qb, qc,
                                            scheme.q**2)[0]
    return flat.reshape(grid.nx, grid.ny)


def outage_region(x, scheme: RateScheme, cmap: OutageCapacityMap,
                  loc=None) -> OutageRegion:
    """Cells whose selected rate strictly exceeds the outage capacity at x."""
    c_x = cmap.value_at(x)
    rates = rate_map(scheme, cmap, loc)
    return OutageRegion(grid=cmap.grid, mask=rates > c_x)


def _check_support(x, cov: np.ndarray, grid: GridGeometry):
    reach = 6.0 * np.sqrt(np.linalg.eigvalsh(cov)[-1])
    if (x[0] - reach < grid.xs[0] - 0.5 * grid.spacing
            or x[0] + reach > grid.xs[-1] + 0.5 * grid.spacing
            or x[1] - reach < grid.ys[0] - 0.5 * grid.spacing
            or x[1] + reach > grid.ys[-1] + 0.5 * grid.spacing):
        raise PaddingInsufficient(
            f"6-sigma support at {tuple(x)} exceeds the padded map")


def meta_probability(x, scheme: RateScheme, cmap: OutageCapacityMap, loc,
                     method: str = "cellsum", mc_draws: int = 100_000,
                     rng: Generator | None = None,
                     _rates: np.ndarray | None = None) -> float:
    """Probability over the location estimate that the selected rate exceeds
    the outage capacity at the true location ``x``.

    ``cellsum`` integrates the Gaussian density over outage-region cells
    (density at cell center times cell area); ``montecarlo`` draws estimated
    locations and evaluates the selected rate at each draw.
    """
    grid = cmap.grid
    x = np.asarray(x, dtype=np.float64)
    model = _as_model(loc, grid)
    i, j = grid.nearest_index(x)
    cov_x = model.cov[grid.flat_index(i, j)]
    _check_support(x, cov_x, grid)
    c_x = cmap.value_at(x)

    if method == "cellsum":
        rates = rate_map(scheme, cmap, model) if _rates is None else _rates
        mask = rates > c_x
        if not mask.any():
            return 0.0
        pts = grid.points()[mask.ravel()]
        inv = np.linalg.inv(cov_x)
        diff = pts - x
        quad = np.einsum("ni,ij,nj->n", diff, inv, diff)
        dens = np.exp(-0.5 * quad) / (2.0 * np.pi * np.sqrt(np.linalg.det(cov_x)))
        return float(np.sum(dens) * grid.spacing**2)

    if method != "montecarlo":
        raise ValueError(f"unknown method {method!r}")
    if rng is None:
        raise ValueError("montecarlo estimation needs an explicit rng")
    chol = np.linalg.cholesky(cov_x)
    draws = x + rng.standard_normal((mc_draws, 2)) @ chol.T
    draws[:, 0] = np.clip(draws[:, 0], grid.xs[0], grid.xs[-1])
    draws[:, 1] = np.clip(draws[:, 1], grid.ys[0], grid.ys[-1])
    if isinstance(scheme, Backoff):
        rates = scheme.beta * bilinear(grid, cmap.values, draws)
    else:
        if isinstance(scheme, Interval):
            # rate covariance taken at the true location; exact for constant
            # models, nearest-point approximation otherwise
            cov_r, _ = _floored_cov(cov_x, grid.spacing)
            qa, qb, qc = _quadform(cov_r)
            q2 = scheme.q**2
        else:
            qa, qb, qc = 1.0, 0.0, 1.0
            q2 = scheme.radius**2
        rates = _kernels.min_in_ellipse(grid.xs, grid.ys, cmap.values, draws,
                                        qa, qb, qc, q2)
    return float(np.mean(rates > c_x))


def throughput_ratio(x, scheme: RateScheme, cmap: OutageCapacityMap,
                     samples_at_x: CapacitySamples, loc, n_draws: int,
                     rng: Generator) -> float:
    """Monte-Carlo expected delivered rate over the location estimate,
    normalized by the ideal C_eps(x) * (1 - eps)."""
    if n_draws < 1000:
        raise ValueError("need at least 1000 draws")
    grid = cmap.grid
    x = np.asarray(x, dtype=np.float64)
    model = _as_model(loc, grid)
    i, j = grid.nearest_index(x)
    cov_x = model.cov[grid.flat_index(i, j)]
    chol = np.linalg.cholesky(cov_x)
    draws = x + rng.standard_normal((n_draws, 2)) @ chol.T
    draws[:, 0] = np.clip(draws[:, 0], grid.xs[0], grid.xs[-1])
    draws[:, 1] = np.clip(draws[:, 1], grid.ys[0], grid.ys[-1])
    if isinstance(scheme, Backoff):
        rates = scheme.beta * bilinear(grid, cmap.values, draws)
    elif isinstance(scheme, Interval):
        cov_r, _ = _floored_cov(cov_x, grid.spacing)
        qa, qb, qc = _quadform(cov_r)
        rates = _kernels.min_in_ellipse(grid.xs, grid.ys, cmap.values, draws,
                                        qa, qb, qc, scheme.q**2)
    else:
        rates = _kernels.min_in_ellipse(grid.xs, grid.ys, cmap.values, draws,
                                        1.0, 0.0, 1.0, scheme.radius**2)
    outage = np.searchsorted(samples_at_x.values, rates, side="right") \
        / samples_at_x.sample_count
    delivered = float(np.mean(rates * (1.0 - outage)))
    c_x = empirical_outage_capacity(samples_at_x, cmap.eps)
    return delivered / (c_x * (1.0 - cmap.eps))


@dataclass
class CalibrationResult:
    scheme: RateScheme
    max_meta: float
    argmax_location: tuple[float, float]
    evaluations: int


def _max_meta(scheme: RateScheme, cmap: OutageCapacityMap,
              model: LocalizationModel, method: str = "cellsum",
              mc_draws: int = 100_000,
              seed: int = 0) -> tuple[float, tuple[float, float]]:
    from .environment import TAG_META, derive_rng

    grid = cmap.grid
    rates = rate_map(scheme, cmap, model) if method == "cellsum" else None
    mask = grid.in_cell_mask().ravel()
    indices = np.flatnonzero(mask)
    pts = grid.points()[indices]
    worst = -1.0
    worst_xy = (np.nan, np.nan)
    for idx, xy in zip(indices, pts):
        if method == "cellsum":
            m = meta_probability(xy, scheme, cmap, model, method="cellsum",
                                 _rates=rates)
        else:
            # a fixed per-point stream keeps the bisection objective
            # deterministic and monotone across parameter evaluations
            m = meta_probability(xy, scheme, cmap, model, method="montecarlo",
                                 mc_draws=mc_draws,
                                 rng=derive_rng(seed, TAG_META, int(idx)))
        if m > worst:
            worst = m
            worst_xy = (float(xy[0]), float(xy[1]))
    return worst, worst_xy


def _bracket_limits(cmap: OutageCapacityMap, model: LocalizationModel) -> tuple[float, float]:
    margin = cmap.grid.n_pad * cmap.grid.spacing
    lam_max = max(float(np.linalg.eigvalsh(model.cov[i])[-1])
                  for i in range(0, model.cov.shape[0],
                                 max(1, model.cov.shape[0] // 256)))
    return margin / np.sqrt(lam_max), margin


def calibrate_scheme(family: str, delta: float, cmap: OutageCapacityMap,
                     loc, rel_tol: float = 1e-3, method: str = "cellsum",
                     mc_draws: int = 100_000, seed: int = 0) -> CalibrationResult:
    """Bisection on the scheme parameter so the max-over-grid meta-probability
    stays at or below ``delta``.

    Monotonicity: the max meta is increasing in beta and non-increasing in q
    and d.  Returns the feasible side of the final bracket.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    model = _as_model(loc, cmap.grid)
    family = family.lower()
    evals = 0

    if family == "backoff":
        make = Backoff
        lo, hi = 1e-4, 1.0
        increasing = True
    elif family in ("interval", "distance"):
        q_max, d_max = _bracket_limits(cmap, model)
        if family == "interval":
            make = Interval
            lo, hi = 0.0, q_max
        else:
            make = Distance
            lo, hi = 0.0, d_max
        increasing = False
    else:
        raise ValueError(f"unknown scheme family {family!r}")

    def g(param):
        nonlocal evals
        evals += 1
        return _max_meta(make(param), cmap, model, method=method,
                         mc_draws=mc_draws, seed=seed)

    if increasing:
        m_hi, loc_hi = g(hi)
        if m_hi <= delta:
            return CalibrationResult(make(hi), m_hi, loc_hi, evals)
        m_lo, loc_lo = g(lo)
        if m_lo > delta:
            raise InfeasibleCalibration(
                f"meta {m_lo:.4g} > delta {delta:.4g} at the conservative end "
                f"{family}={lo}", m_lo)
        best = (lo, m_lo, loc_lo)
        while hi - lo > rel_tol * max(hi, 1e-12):
            mid = 0.5 * (lo + hi)
            m, where = g(mid)
            if m <= delta:
                lo = mid
                best = (mid, m, where)
            else:
                hi = mid
        return CalibrationResult(make(best[0]), best[1], best[2], evals)

    m_lo, loc_lo = g(lo)
    if m_lo <= delta:
        return CalibrationResult(make(lo), m_lo, loc_lo, evals)
    m_hi, loc_hi = g(hi)
    if m_hi > delta:
        raise InfeasibleCalibration(
            f"meta {m_hi:.4g} > delta {delta:.4g} at the conservative end "
            f"{family}={hi:.4g}", m_hi)
    best = (hi, m_hi, loc_hi)
    while hi - lo > rel_tol * max(hi, 1e-12):
        mid = 0.5 * (lo + hi)
        m, where = g(mid)
        if m <= delta:
            hi = mid
            best = (mid, m, where)
        else:
            lo = mid
    return CalibrationResult(make(best[0]), best[1], best[2], evals)


# Names carrying the dimensionality suffix, for symmetry with the 1-D API.
select_rate_2d = select_rate
meta_probability_2d = meta_probability
throughput_ratio_2d = throughput_ratio
calibrate_scheme_2d = calibrate_scheme
