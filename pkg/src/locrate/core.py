"""Shared numerical primitives.

OFDM frequency response and instantaneous capacity, empirical outage
statistics on sorted capacity samples, and standard-normal CDF/quantile
kernels accurate deep into the tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class SystemConfig:
    """OFDM link parameters and reliability targets.

    ``tx_snr`` is the linear transmit SNR per subcarrier (P_tx / (W*N0)).
    The subcarrier spacing is derived as bandwidth / subcarrier count so the
    product is exact by construction.
    """

    bandwidth_hz: float
    subcarrier_count: int
    tx_snr: float
    carrier_frequency_hz: float = 3.6e9
    reliability_target: float = 1e-3
    confidence: float = 0.05

    def __post_init__(self):
        if self.bandwidth_hz <= 0:
            raise ValueError("bandwidth must be positive")
        if self.subcarrier_count < 1:
            raise ValueError("subcarrier count must be >= 1")
        if self.tx_snr <= 0:
            raise ValueError("transmit SNR must be positive")
        if not 0.0 < self.reliability_target < 1.0:
            raise ValueError("reliability target must lie in (0, 1)")
        if not 0.0 < self.confidence < 1.0:
            raise ValueError("confidence must lie in (0, 1)")

    @property
    def subcarrier_spacing_hz(self) -> float:
        return self.bandwidth_hz / self.subcarrier_count


@dataclass(frozen=True)
class PathSet:
    """Per-link multipath description: complex amplitudes and delays.

    Delays are sorted ascending and index 0 is the line-of-sight path.
    """

    amplitudes: np.ndarray
    delays: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        delays = np.asarray(self.delays, dtype=np.float64)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "delays", delays)
        if amps.ndim != 1 or delays.ndim != 1 or amps.shape != delays.shape:
            raise ValueError("amplitudes and delays must be 1-D of equal length")
        if amps.shape[0] < 1:
            raise ValueError("a path set needs at least one path")
        if np.any(delays < 0):
            raise ValueError("delays must be nonnegative")
        if np.any(np.diff(delays) < 0):
            raise ValueError("delays must be sorted ascending")

    @property
    def count(self) -> int:
        return int(self.amplitudes.shape[0])


@dataclass(frozen=True)
class CapacitySamples:
    """Ascending-sorted capacity samples in bits per OFDM symbol."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.shape[0] < 1:
            raise ValueError("samples must be a nonempty 1-D array")
        if np.any(np.diff(vals) < 0):
            raise ValueError("samples must be sorted ascending")
        if np.any(vals < 0):
            raise ValueError("capacity samples must be nonnegative")

    @property
    def sample_count(self) -> int:
        return int(self.values.shape[0])


def freq_response(paths: PathSet, phases, cfg: SystemConfig, indexing: str = "comm") -> np.ndarray:
    """Channel frequency response h_j = sum_k a_k e^{-2*pi*i*df*j*tau_k} e^{i*theta_k}.

    ``indexing="comm"`` uses j = 0..N-1 (communication convention);
    ``indexing="centered"`` uses symmetric j = -p..p and requires N odd
    (localization convention).  Both yield identical |h_j| statistics under
    uniform random phases.
    """
    phases = np.asarray(phases, dtype=np.float64)
    if phases.shape != (paths.count,):
        raise ValueError("phases must have one entry per path")
    n = cfg.subcarrier_count
    if indexing == "comm":
        j = np.arange(n)
    elif indexing == "centered":
        if n % 2 == 0:
            raise ValueError("centered indexing requires an odd subcarrier count")
        j = np.arange(n) - n // 2
    else:
        raise ValueError(f"unknown indexing convention {indexing!r}")
    rot = np.exp(-2j * np.pi * cfg.subcarrier_spacing_hz * np.outer(j, paths.delays))
    return rot @ (paths.amplitudes * np.exp(1j * phases))


def instantaneous_capacity(h: np.ndarray, tx_snr: float) -> float:
    """Sum-rate over subcarriers, in bits per OFDM symbol."""
    if tx_snr <= 0:
        raise ValueError("transmit SNR must be positive")
    h = np.asarray(h)
    return float(np.sum(np.log2(1.0 + tx_snr * (h.real**2 + h.imag**2))))


def empirical_outage_probability(samples: CapacitySamples, rate: float) -> float:
    """Fraction of samples at or below ``rate`` (binary search on sorted data)."""
    count = int(np.searchsorted(samples.values, rate, side="right"))
    return count / samples.sample_count


def empirical_outage_capacity(samples: CapacitySamples, eps: float) -> float:
    """Conservative empirical eps-quantile: the floor(eps*M)-th order statistic.

    Guarantees the empirical outage probability at the returned rate does not
    exceed ``eps`` (for samples without ties at the quantile).
    """
    if not 0.0 < eps < 1.0:
        raise ValueError("eps must lie in (0, 1)")
    k = int(math.floor(eps * samples.sample_count))
    if k < 1:
        raise ValueError("insufficient samples for quantile")
    return float(samples.values[k - 1])


_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def std_normal_cdf(z):
    """Standard normal CDF via the complementary error function."""
    return 0.5 * special.erfc(-np.asarray(z, dtype=np.float64) / _SQRT2)


# Acklam's rational approximation for the standard normal quantile
# (relative error ~1.15e-9), refined below by one Halley step.
_ACK_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
          1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_ACK_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
          6.680131188771972e+01, -1.328068155288572e+01)
_ACK_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
          -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_ACK_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
          3.754408661907416e+00)
_ACK_SPLIT = 0.02425


def _acklam(p: float) -> float:
    a, b, c, d = _ACK_A, _ACK_B, _ACK_C, _ACK_D
    if p < _ACK_SPLIT:
        q = math.sqrt(-2.0 * math.log(p))
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    if p > 1.0 - _ACK_SPLIT:
        q = math.sqrt(-2.0 * math.log(1.0 - p))
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) / \
                ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0)
    q = p - 0.5
    r = q * q
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q / \
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0)


def _quantile_scalar(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise ValueError("quantile requires p in (0, 1)")
    # reflect the upper tail: 1 - p is exact for p >= 0.5, and the erfc-based
    # CDF is only accurate in absolute terms, i.e. in the lower tail
    if p > 0.5:
        return -_quantile_scalar(1.0 - p)
    z = _acklam(p)
    # one Halley refinement against the erfc-based CDF
    err = float(std_normal_cdf(z)) - p
    u = err * _SQRT_2PI * math.exp(0.5 * z * z)
    return z - u / (1.0 + 0.5 * z * u)


def std_normal_quantile(p):
    """Standard normal quantile (inverse CDF), p in (0, 1)."""
    if np.ndim(p) == 0:
        return _quantile_scalar(float(p))
    return np.array([_quantile_scalar(float(v)) for v in np.asarray(p).ravel()]).reshape(np.shape(p))
