"""One-dimensional narrowband Rayleigh scenario with path-loss large-scale model.

Everything here is closed form: outage CDF and capacity, coherence radius,
backoff and interval rate selection with their meta-probabilities, exact
calibration to a confidence target, and throughput-ratio quadrature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .core import std_normal_cdf, std_normal_quantile
from .schemes import Backoff, Interval


class CoherenceExceedsCell(RuntimeError):
    """Relative-change threshold never reached within the scanned range."""


class InfeasibleBackoff(RuntimeError):
    """No backoff in (0, 1] can meet the confidence target."""


@dataclass(frozen=True)
class PathLossParams:
    """Power-law path loss: average SNR(x) = tx_snr * gain * x**(-exponent)."""

    gain: float
    exponent: float
    tx_snr: float
    cell: tuple[float, float]

    def __post_init__(self):
        if self.exponent <= 0:
            raise ValueError("path loss exponent must be positive")
        x_min, x_max = self.cell
        if not 0.0 < x_min < x_max:
            raise ValueError("cell must satisfy 0 < x_min < x_max")


@dataclass(frozen=True)
class LocStd1D:
    """Affine localization standard deviation sigma(x) = slope*x + intercept."""

    intercept: float
    slope: float = 0.0

    def __call__(self, x):
        return self.slope * np.asarray(x, dtype=np.float64) + self.intercept


def avg_snr(x, p: PathLossParams):
    """Average linear SNR at distance x from the base station."""
    x = np.asarray(x, dtype=np.float64)
    if np.any(x <= 0):
        raise ValueError("distance must be positive")
    return p.tx_snr * p.gain * x ** (-p.exponent)


def outage_cdf_1d(rate, x, p: PathLossParams):
    """P(C(x) <= rate) under unit-mean exponential fading power."""
    rate = np.asarray(rate, dtype=np.float64)
    if np.any(rate < 0):
        raise ValueError("rate must be nonnegative")
    return 1.0 - np.exp(-(np.exp2(rate) - 1.0) / avg_snr(x, p))


def outage_capacity_1d(x, eps: float, p: PathLossParams):
    """eps-outage capacity log2(1 - avg_snr(x) * ln(1 - eps))."""
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    return np.log2(1.0 - avg_snr(x, p) * math.log1p(-eps))


def coherence_radius_1d(x: float, t: float, eps: float, p: PathLossParams,
                        mode: str = "exact", scan_step: float = 1e-3,
                        scan_max: float | None = None) -> float:
    """Smallest radius around x where the relative change of the outage
    capacity exceeds threshold t.

    ``exact`` evaluates the closed form, ``approx`` its first-order
    simplification x*(1 - (1+t)**(-1/eta)), and ``numeric`` scans radii in
    steps of ``scan_step`` up to ``scan_max`` (default: the cell span).
    """
    if t <= 0:
        raise ValueError("threshold t must be positive")
    eta = p.exponent
    if mode == "approx":
        return x * (1.0 - (1.0 + t) ** (-1.0 / eta))
    if mode == "exact":
        l = -p.tx_snr * p.gain * math.log1p(-eps)  # = gamma0*G0*|ln(1-eps)|
        denom = (1.0 + l * x ** (-eta)) ** (1.0 + t) - 1.0
        return x - (l / denom) ** (1.0 / eta)
    if mode != "numeric":
        raise ValueError(f"unknown mode {mode!r}")
    if scan_max is None:
        scan_max = p.cell[1] - p.cell[0]
    c_x = float(outage_capacity_1d(x, eps, p))
    rho = scan_step
    while rho <= scan_max:
        worst = 0.0
        left = x - rho
        if left > 0:
            worst = abs(c_x - float(outage_capacity_1d(left, eps, p))) / c_x
        right_change = abs(c_x - float(outage_capacity_1d(x + rho, eps, p))) / c_x
        worst = max(worst, right_change)
        if worst > t:
            return rho
        rho += scan_step
    raise CoherenceExceedsCell(
        f"relative change never exceeded t={t} within radius {scan_max}")


def backoff_rate_1d(x_hat, beta: float, eps: float, p: PathLossParams):
    """Backoff rate: outage capacity with the average SNR scaled by beta."""
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    return np.log2(1.0 - beta * avg_snr(x_hat, p) * math.log1p(-eps))


def backoff_meta_1d(x, beta: float, sigma_x, eta: float):
    """Closed-form meta-probability 1 - Phi((x/sigma)*(1 - beta**(1/eta)))."""
    if not 0.0 < beta <= 1.0:
        raise ValueError("beta must lie in (0, 1]")
    x = np.asarray(x, dtype=np.float64)
    sigma_x = np.asarray(sigma_x, dtype=np.float64)
    if np.any(x <= 0) or np.any(sigma_x <= 0):
        raise ValueError("x and sigma must be positive")
    # survival form Phi(-z) keeps deep-tail probabilities from underflowing
    return std_normal_cdf(-(x / sigma_x) * (1.0 - beta ** (1.0 / eta)))


def _worst_location(locstd, cell) -> float:
    """argmin of x/sigma(x) over the cell."""
    x_min, x_max = cell
    if isinstance(locstd, LocStd1D):
        # x/(a*x + b) is monotone with the sign of b
        if locstd.intercept >= 0:
            return x_min
        return x_max
    # generic callable: dense scan then golden-section refinement
    xs = np.arange(x_min, x_max + 1e-2, 1e-2)
    ratios = xs / np.asarray(locstd(xs), dtype=np.float64)
    i = int(np.argmin(ratios))
    lo = xs[max(i - 1, 0)]
    hi = xs[min(i + 1, len(xs) - 1)]
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    f = lambda x: x / float(locstd(x))
    a, b = lo, hi
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    while b - a > 1e-10:
        if f(c) < f(d):
            b, d = d, c
            c = b - phi * (b - a)
        else:
            a, c = c, d
            d = a + phi * (b - a)
    return 0.5 * (a + b)


def calibrate_backoff_1d(delta: float, locstd, p: PathLossParams) -> float:
    """Largest backoff whose meta-probability stays at or below delta cell-wide.

    Solved in closed form at the worst-case location x* = argmin x/sigma(x).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    x_star = _worst_location(locstd, p.cell)
    sigma_star = float(locstd(x_star))
    margin = std_normal_quantile(1.0 - delta) * sigma_star / x_star
    if margin >= 1.0:
        raise InfeasibleBackoff(
            f"required margin {margin:.3g} >= 1 at x*={x_star:.3g}; "
            "no backoff in (0, 1] meets the target")
    return min((1.0 - margin) ** p.exponent, 1.0)


def interval_rate_1d(x_hat, sigma_x, q: float, eps: float, p: PathLossParams):
    """Interval rate: outage capacity at the far interval edge x_hat + q*sigma."""
    if q < 0:
        raise ValueError("q must be nonnegative")
    return outage_capacity_1d(np.asarray(x_hat) + q * np.asarray(sigma_x), eps, p)


def interval_meta_1d(q: float) -> float:
    """Meta-probability of interval selection: Phi(-q), location independent."""
    if q < 0:
        raise ValueError("q must be nonnegative")
    return float(std_normal_cdf(-q))


def throughput_ratio_1d(x: float, scheme, sigma_x: float, eps: float,
                        p: PathLossParams) -> float:
    """Expected delivered rate over the localization density, normalized by
    the ideal C_eps(x)*(1-eps).

    Uses the closed-form success probabilities (1-eps)**(beta*(x/x_hat)**eta)
    for backoff and (1-eps)**((x/(x_hat+q*sigma))**eta) for interval selection,
    integrated by adaptive quadrature over x_hat in (max(0, x-8s), x+8s)
    without renormalizing the (negligible) sub-zero Gaussian mass.
    """
    eta = p.exponent
    inv_norm = 1.0 / (sigma_x * math.sqrt(2.0 * math.pi))

    if isinstance(scheme, Backoff):
        beta = scheme.beta

        def integrand(x_hat):
            rate = backoff_rate_1d(x_hat, beta, eps, p)
            success = (1.0 - eps) ** (beta * (x / x_hat) ** eta)
            dens = inv_norm * math.exp(-0.5 * ((x_hat - x) / sigma_x) ** 2)
            return rate * success * dens
    elif isinstance(scheme, Interval):
        q = scheme.q

        def integrand(x_hat):
            shifted = x_hat + q * sigma_x
            rate = outage_capacity_1d(shifted, eps, p)
            success = (1.0 - eps) ** ((x / shifted) ** eta)
            dens = inv_norm * math.exp(-0.5 * ((x_hat - x) / sigma_x) ** 2)
            return rate * success * dens
    else:
        raise TypeError(f"unsupported scheme for the 1-D scenario: {scheme!r}")

    lo = max(0.0, x - 8.0 * sigma_x)
    hi = x + 8.0 * sigma_x
    value, abserr = integrate.quad(integrand, lo, hi, epsabs=0.0, epsrel=1e-8,
                                   limit=200)
    ideal = float(outage_capacity_1d(x, eps, p)) * (1.0 - eps)
    if abserr > 1e-4 * max(abs(value), ideal):
        raise RuntimeError(
            f"throughput quadrature did not converge: value={value:.6g}, "
            f"abserr={abserr:.3g}")
    return value / ideal
