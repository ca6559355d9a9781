"""Time-of-arrival localization error bounds.

Pipeline: Fisher information over the per-link channel parameters
(non-resolvable delays and complex amplitudes), equivalent Fisher
information of the LoS delay via Schur complement, transformation to
position + clock bias, channel-averaged CRLB, and the position error bound.

The numeric-mode FIM built from the analytic partial derivatives is the
authoritative implementation; the closed-form block assembly is a fast path
validated entrywise against it.  (The block sums below are derived from the
partial derivatives for symmetric subcarrier indexing; published variants of
these formulas differ in constant prefactors, which is why the numeric mode
is the contract.)
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import Generator

from .core import SPEED_OF_LIGHT, PathSet, SystemConfig
from .environment import (TAG_LOCALIZATION, EnvironmentMap, GridGeometry,
                          derive_rng)

COND_LIMIT = 1e12


class LocalizationUnobservable(RuntimeError):
    """Position FIM singular (or numerically beyond the condition guard)."""


def _equilibrated_cond(m: np.ndarray) -> float:
    """Condition number after symmetric diagonal scaling.

    FIM blocks mix units (seconds vs dimensionless amplitudes vs meters), so
    the raw condition number is dominated by unit scale; equilibration makes
    the guard respond to genuine rank deficiency only.
    """
    d = np.diag(m)
    if np.any(d <= 0) or not np.all(np.isfinite(d)):
        return np.inf
    s = np.sqrt(d)
    return float(np.linalg.cond(m / np.outer(s, s)))


@dataclass(frozen=True)
class ChannelParams:
    """Non-resolvable cluster parameters of one link: delays and complex
    amplitudes, ordered [delays..., Re(a)..., Im(a)...] in the FIM."""

    delays: np.ndarray
    amplitudes: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.delays, dtype=np.float64)
        a = np.asarray(self.amplitudes, dtype=np.complex128)
        object.__setattr__(self, "delays", d)
        object.__setattr__(self, "amplitudes", a)
        if d.shape != a.shape or d.ndim != 1 or d.shape[0] < 1:
            raise ValueError("delays and amplitudes must be matching 1-D arrays")
        if np.any(np.diff(d) < 0):
            raise ValueError("delays must be sorted ascending")

    @property
    def count(self) -> int:
        return int(self.delays.shape[0])


@dataclass
class LocalizationModel:
    """Per-grid-point 2x2 error covariance and position error bound."""

    grid: GridGeometry
    cov: np.ndarray   # (n_points, 2, 2)
    peb: np.ndarray   # (n_points,)
    mode: str         # "constant" or "crlb"

    def cov_at(self, xy) -> np.ndarray:
        i, j = self.grid.nearest_index(xy)
        return self.cov[self.grid.flat_index(i, j)]


def nonresolvable_cluster(paths: PathSet, bandwidth_hz: float) -> PathSet:
    """Largest delay-sorted prefix within one inverse bandwidth of the LoS path."""
    within = paths.delays - paths.delays[0] <= 1.0 / bandwidth_hz
    k = int(np.argmin(within)) if not within.all() else paths.count
    return PathSet(paths.amplitudes[:k], paths.delays[:k])


def _check_odd(n_sub: int) -> int:
    if n_sub % 2 == 0:
        raise ValueError("the symmetric subcarrier convention requires odd N")
    return n_sub // 2


def fim_channel_params(params: ChannelParams, tx_snr: float, n_sub: int,
                       spacing_hz: float, mode: str = "numeric") -> np.ndarray:
    """3K'x3K' Fisher information over [delays, Re(a), Im(a)].

    Subcarriers are indexed symmetrically j = -p..p (N = 2p + 1).
    """
    p = _check_odd(n_sub)
    k = params.count
    tau = params.delays
    amp = params.amplitudes
    w = 2.0 * np.pi * spacing_hz

    if mode == "numeric":
        j = np.arange(-p, p + 1)
        phase = np.exp(-1j * w * np.outer(tau, j))        # (k, N)
        deriv = np.empty((3 * k, n_sub), dtype=np.complex128)
        deriv[:k] = -1j * w * j * amp[:, None] * phase
        deriv[k:2 * k] = phase
        deriv[2 * k:] = 1j * phase
        return 2.0 * tx_snr * np.real(deriv @ deriv.conj().T)

    if mode != "blockform":
        raise ValueError(f"unknown mode {mode!r}")

    j = np.arange(1, p + 1, dtype=np.float64)
    dtau = tau[:, None] - tau[None, :]                    # (k, k)
    ang = w * dtau[:, :, None] * j                        # (k, k, p)
    cos_sum = np.cos(ang)
    sin_sum = np.sin(ang)
    s0 = 1.0 + 2.0 * cos_sum.sum(axis=2)                  # sum_j cos over -p..p
    s1 = (j * sin_sum).sum(axis=2)                        # sum_{j>=1} j sin
    s2 = (j**2 * cos_sum).sum(axis=2)                     # sum_{j>=1} j^2 cos

    out = np.zeros((3 * k, 3 * k))
    cross = np.real(amp[:, None] * amp[None, :].conj())
    out[:k, :k] = 4.0 * tx_snr * w**2 * cross * s2
    j_tre = -4.0 * tx_snr * w * amp.real[:, None] * s1
    j_tim = -4.0 * tx_snr * w * amp.imag[:, None] * s1
    out[:k, k:2 * k] = j_tre
    out[k:2 * k, :k] = j_tre.T
    out[:k, 2 * k:] = j_tim
    out[2 * k:, :k] = j_tim.T
    out[k:2 * k, k:2 * k] = 2.0 * tx_snr * s0
    out[2 * k:, 2 * k:] = 2.0 * tx_snr * s0
    return out


def equivalent_fim_toa(fim: np.ndarray, allow_pseudo: bool = False) -> float:
    """Information on the LoS delay after eliminating nuisance parameters:
    the Schur complement of the (0, 0) entry.

    A numerically singular nuisance block (near-coincident in-cluster
    delays) raises unless ``allow_pseudo`` is set, in which case the
    pseudo-inverse is used; the LoS-delay information stays well defined
    even when individual nuisance parameters are not.
    """
    fim = np.asarray(fim, dtype=np.float64)
    if fim.shape == (1, 1):
        return float(fim[0, 0])
    nuisance = fim[1:, 1:]
    if _equilibrated_cond(nuisance) > COND_LIMIT:
        if not allow_pseudo:
            raise LocalizationUnobservable("nuisance block numerically singular")
        sol = np.linalg.pinv(nuisance, hermitian=True) @ fim[1:, 0]
    else:
        sol = np.linalg.solve(nuisance, fim[1:, 0])
    return float(max(fim[0, 0] - fim[0, 1:] @ sol, 0.0))


def fim_position(je_values, bs_positions: np.ndarray, x, ue_height: float,
                 with_bias: bool = True) -> np.ndarray:
    """Transform per-BS LoS-delay information to (x1, x2[, clock bias])."""
    je = np.asarray(je_values, dtype=np.float64)
    bs = np.asarray(bs_positions, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    ue = np.array([x[0], x[1], ue_height])
    diff = ue[None, :] - bs
    dist = np.linalg.norm(diff, axis=1)
    if np.any(dist == 0):
        raise LocalizationUnobservable("UE coincides with a base station")
    n_cols = 3 if with_bias else 2
    jac = np.empty((bs.shape[0], n_cols))
    jac[:, 0] = diff[:, 0] / (SPEED_OF_LIGHT * dist)
    jac[:, 1] = diff[:, 1] / (SPEED_OF_LIGHT * dist)
    if with_bias:
        jac[:, 2] = 1.0
    return jac.T @ (je[:, None] * jac)


def position_crlb(fim_pos: np.ndarray) -> np.ndarray:
    """Position block of the inverted (position [+ bias]) FIM."""
    fim_pos = np.asarray(fim_pos, dtype=np.float64)
    if _equilibrated_cond(fim_pos) > COND_LIMIT:
        raise LocalizationUnobservable("position FIM singular; location unobservable")
    inv = np.linalg.inv(fim_pos)
    return inv[:2, :2]


def _conditional_crlb(env: EnvironmentMap, point_index: int, cfg: SystemConfig,
                      rng: Generator, with_bias: bool = True) -> np.ndarray:
    """CRLB for one random-phase channel draw at one grid point."""
    n_sub = cfg.subcarrier_count if cfg.subcarrier_count % 2 == 1 \
        else cfg.subcarrier_count - 1
    je = np.empty(env.n_bs)
    for b in range(env.n_bs):
        cluster = nonresolvable_cluster(env.path_set(point_index, b), cfg.bandwidth_hz)
        phases = rng.uniform(-np.pi, np.pi, cluster.count)
        params = ChannelParams(cluster.delays,
                               np.abs(cluster.amplitudes) * np.exp(1j * phases))
        fim = fim_channel_params(params, cfg.tx_snr, n_sub,
                                 cfg.subcarrier_spacing_hz, mode="blockform")
        je[b] = equivalent_fim_toa(fim, allow_pseudo=True)
    xy = env.grid.points()[point_index]
    jpos = fim_position(je, env.bs_positions, xy, env.ue_height, with_bias=with_bias)
    return position_crlb(jpos)


def averaged_crlb_peb(env: EnvironmentMap, point_index: int, cfg: SystemConfig,
                      m_draws: int, rng: Generator | None = None,
                      with_bias: bool = True) -> tuple[np.ndarray, float]:
    """Channel-averaged CRLB and PEB at one grid point.

    Monte-Carlo average of the conditional CRLB over random-phase channel
    draws (magnitudes fixed from the environment).  Singular draws are
    skipped; more than 10 percent skipped raises.
    """
    if m_draws < 1:
        raise ValueError("need at least one draw")
    if rng is None:
        rng = derive_rng(env.seed, TAG_LOCALIZATION, point_index)
    total = np.zeros((2, 2))
    skipped = 0
    for _ in range(m_draws):
        try:
            total += _conditional_crlb(env, point_index, cfg, rng, with_bias=with_bias)
        except LocalizationUnobservable:
            skipped += 1
    if skipped > 0.1 * m_draws:
        raise LocalizationUnobservable(
            f"{skipped}/{m_draws} singular draws at point {point_index}")
    avg = total / (m_draws - skipped)
    return avg, float(np.sqrt(np.trace(avg)))


def constant_localization_model(grid: GridGeometry, sigma2: float) -> LocalizationModel:
    """Location-independent error model: covariance sigma2 * I everywhere."""
    if sigma2 <= 0:
        raise ValueError("sigma2 must be positive")
    cov = np.broadcast_to(sigma2 * np.eye(2), (grid.n_points, 2, 2)).copy()
    peb = np.full(grid.n_points, np.sqrt(2.0 * sigma2))
    return LocalizationModel(grid=grid, cov=cov, peb=peb, mode="constant")


def crlb_localization_model(env: EnvironmentMap, cfg: SystemConfig,
                            m_draws: int = 200) -> LocalizationModel:
    """CRLB-derived error model on the full padded grid."""
    n = env.grid.n_points
    cov = np.empty((n, 2, 2))
    peb = np.empty(n)
    for idx in range(n):
        cov[idx], peb[idx] = averaged_crlb_peb(env, idx, cfg, m_draws)
    return LocalizationModel(grid=env.grid, cov=cov, peb=peb, mode="crlb")
